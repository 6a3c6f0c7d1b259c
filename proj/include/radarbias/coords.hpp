#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

namespace radarbias {

using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix<double, 3, 3, Eigen::RowMajor>;

/// Rectangular (x, y, z) in meters. Used for ENU, ECI and FACE vectors alike;
/// the frame is carried by the function that produced it.
using CartesianTriple = Vector3;

/// (range, azimuth, elevation). Also used for bias increments
/// (Δr [m], Δψ [rad], Δθ [rad]), which carry no range/angle restriction.
struct SphericalTriple {
  double r = 0.0;
  double psi = 0.0;
  double theta = 0.0;
};

/// Longitude Ω and latitude L of a sensor site, radians.
struct GeodeticSite {
  double longitude = 0.0;
  double latitude = 0.0;
};

/// Reference ellipsoid. Defaults are WGS-84.
struct EarthModel {
  double equatorial_radius = 6378137.0;
  double eccentricity = 0.0818191908426;

  /// Throws std::invalid_argument unless r_ee > 0 and 0 <= e < 1.
  void validate() const;
};

/// Proper 3×3 rotation (orthogonal, det +1). Instances produced by this
/// library satisfy the invariant to 1e-12; from_matrix() checks it for
/// user-supplied matrices.
class Rotation3 {
 public:
  static Rotation3 identity() { return Rotation3(Matrix3::Identity()); }
  static Rotation3 from_matrix(const Matrix3& m, double tol = 1e-12);

  const Matrix3& matrix() const noexcept { return m_; }
  double operator()(int row, int col) const { return m_(row, col); }

  Rotation3 transpose() const { return Rotation3(m_.transpose()); }
  Rotation3 operator*(const Rotation3& rhs) const { return Rotation3(m_ * rhs.m_); }
  Vector3 operator*(const Vector3& v) const { return m_ * v; }

  /// max |RᵀR − I| over entries
  double orthogonality_error() const;
  double determinant() const { return m_.determinant(); }

 private:
  explicit Rotation3(const Matrix3& m) : m_(m) {}

  friend Rotation3 enu_to_face(double, double);
  friend Rotation3 eci_to_enu(const GeodeticSite&);
  friend Rotation3 enu1_to_enu2(const GeodeticSite&, const GeodeticSite&);

  Matrix3 m_;
};

CartesianTriple spherical_to_cartesian(const SphericalTriple& p);

struct SphericalConversion {
  SphericalTriple point;
  /// x = y = 0: azimuth is undefined and reported as 0.
  bool pole_ambiguous = false;
};

/// Inverse of spherical_to_cartesian using the full-quadrant arctangent,
/// so psi lands in (−π, π]. Throws ZeroVector for the origin.
SphericalConversion cartesian_to_spherical(const CartesianTriple& p);

/// ENU → radar-face rotation: pitch by theta applied after yaw by psi.
Rotation3 enu_to_face(double psi, double theta);
/// Transpose of enu_to_face(psi, theta).
Rotation3 face_to_enu(double psi, double theta);

/// ECI → local ENU at the given site.
Rotation3 eci_to_enu(const GeodeticSite& site);

/// Ellipsoid surface point of the site in ECI:
/// r_ee / sqrt(1 − e² sin²L) · (cosL cosΩ, cosL sinΩ, (1 − e²) sinL).
CartesianTriple site_position_eci(const GeodeticSite& site, const EarthModel& earth = {});

/// Rotation taking ENU(1) components to ENU(2) components. Evaluated from the
/// expanded three-step form (down to the equator, along it, up to site 2);
/// its transpose is the ENU(2) → ENU(1) rotation.
Rotation3 enu1_to_enu2(const GeodeticSite& site1, const GeodeticSite& site2);

/// Vector from site 1's origin to site 2's origin, in ECI.
CartesianTriple inter_site_translation(const GeodeticSite& site1, const GeodeticSite& site2,
                                       const EarthModel& earth = {});

/// Full position transform P_ENU(2) = −P_1to2,ENU(2) + T·P_ENU(1). Accumulates
/// in extended precision so round trips stay at the double rounding floor.
CartesianTriple enu1_to_enu2_position(const CartesianTriple& p_enu1, const GeodeticSite& site1,
                                      const GeodeticSite& site2, const EarthModel& earth = {});

/// Velocities transform by the rotation alone.
CartesianTriple enu1_to_enu2_velocity(const CartesianTriple& v_enu1, const GeodeticSite& site1,
                                      const GeodeticSite& site2);

CartesianTriple enu_to_eci_position(const CartesianTriple& p_enu, const GeodeticSite& site,
                                    const EarthModel& earth = {});
CartesianTriple eci_to_enu_position(const CartesianTriple& p_eci, const GeodeticSite& site,
                                    const EarthModel& earth = {});

}  // namespace radarbias
