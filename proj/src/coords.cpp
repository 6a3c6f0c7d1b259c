#include "radarbias/coords.hpp"

#include "radarbias/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace radarbias {

namespace {

using WideVector = Eigen::Matrix<long double, 3, 1>;

template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3, Eigen::RowMajor> eci_to_enu_entries(const GeodeticSite& site) {
  const Scalar lon = site.longitude, lat = site.latitude;
  const Scalar co = std::cos(lon), so = std::sin(lon);
  const Scalar cl = std::cos(lat), sl = std::sin(lat);
  Eigen::Matrix<Scalar, 3, 3, Eigen::RowMajor> m;
  m << -so, co, Scalar(0),
       -sl * co, -sl * so, cl,
       cl * co, cl * so, sl;
  return m;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3, Eigen::RowMajor> enu1_to_enu2_entries(const GeodeticSite& site1,
                                                                  const GeodeticSite& site2) {
  const Scalar dl = Scalar(site2.longitude) - Scalar(site1.longitude);
  const Scalar lat1 = site1.latitude, lat2 = site2.latitude;
  const Scalar cd = std::cos(dl), sd = std::sin(dl);
  const Scalar c1 = std::cos(lat1), s1 = std::sin(lat1);
  const Scalar c2 = std::cos(lat2), s2 = std::sin(lat2);
  Eigen::Matrix<Scalar, 3, 3, Eigen::RowMajor> m;
  m << cd, s1 * sd, -c1 * sd,
       -s2 * sd, c1 * c2 + s1 * s2 * cd, c2 * s1 - c1 * s2 * cd,
       c2 * sd, c1 * s2 - c2 * s1 * cd, s1 * s2 + c1 * c2 * cd;
  return m;
}

WideVector widen(const Vector3& v) { return v.cast<long double>(); }

WideVector wide_site_position(const GeodeticSite& site, const EarthModel& earth) {
  const long double lon = site.longitude;
  const long double lat = site.latitude;
  const long double e2 = static_cast<long double>(earth.eccentricity) * earth.eccentricity;
  const long double sl = std::sin(lat);
  const long double scale = earth.equatorial_radius / std::sqrt(1.0L - e2 * sl * sl);
  return scale * WideVector(std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon),
                            (1.0L - e2) * sl);
}

}  // namespace

void EarthModel::validate() const {
  if (!(equatorial_radius > 0.0) || !std::isfinite(equatorial_radius)) {
    throw std::invalid_argument("earth model: equatorial radius must be positive");
  }
  if (!(eccentricity >= 0.0 && eccentricity < 1.0)) {
    throw std::invalid_argument("earth model: eccentricity must lie in [0, 1)");
  }
}

Rotation3 Rotation3::from_matrix(const Matrix3& m, double tol) {
  Rotation3 r(m);
  if (r.orthogonality_error() > tol || std::abs(r.determinant() - 1.0) > tol) {
    throw std::invalid_argument("matrix is not a proper rotation");
  }
  return r;
}

double Rotation3::orthogonality_error() const {
  return (m_.transpose() * m_ - Matrix3::Identity()).cwiseAbs().maxCoeff();
}

CartesianTriple spherical_to_cartesian(const SphericalTriple& p) {
  const double ct = std::cos(p.theta);
  return {p.r * ct * std::cos(p.psi), p.r * ct * std::sin(p.psi), p.r * std::sin(p.theta)};
}

SphericalConversion cartesian_to_spherical(const CartesianTriple& p) {
  const double horizontal = std::hypot(p.x(), p.y());
  const double r = std::hypot(horizontal, p.z());
  if (r == 0.0) {
    throw ZeroVector();
  }
  SphericalConversion out;
  out.point.r = r;
  out.point.theta = std::atan2(p.z(), horizontal);
  if (horizontal == 0.0) {
    out.pole_ambiguous = true;
    out.point.psi = 0.0;
  } else {
    // atan2 returns −π for (−x, −0); fold onto +π to keep psi in (−π, π].
    const double psi = std::atan2(p.y(), p.x());
    out.point.psi = psi == -M_PI ? M_PI : psi;
  }
  return out;
}

Rotation3 enu_to_face(double psi, double theta) {
  const double cp = std::cos(psi), sp = std::sin(psi);
  const double ct = std::cos(theta), st = std::sin(theta);
  Matrix3 m;
  m << ct * cp, ct * sp, st,
       -sp, cp, 0.0,
       -st * cp, -st * sp, ct;
  return Rotation3(m);
}

Rotation3 face_to_enu(double psi, double theta) { return enu_to_face(psi, theta).transpose(); }

Rotation3 eci_to_enu(const GeodeticSite& site) {
  return Rotation3(eci_to_enu_entries<double>(site));
}

CartesianTriple site_position_eci(const GeodeticSite& site, const EarthModel& earth) {
  return wide_site_position(site, earth).cast<double>();
}

Rotation3 enu1_to_enu2(const GeodeticSite& site1, const GeodeticSite& site2) {
  return Rotation3(enu1_to_enu2_entries<double>(site1, site2));
}

CartesianTriple inter_site_translation(const GeodeticSite& site1, const GeodeticSite& site2,
                                       const EarthModel& earth) {
  return (wide_site_position(site2, earth) - wide_site_position(site1, earth)).cast<double>();
}

CartesianTriple enu1_to_enu2_position(const CartesianTriple& p_enu1, const GeodeticSite& site1,
                                      const GeodeticSite& site2, const EarthModel& earth) {
  const WideVector offset_eci = wide_site_position(site2, earth) - wide_site_position(site1, earth);
  const WideVector offset_enu2 = eci_to_enu_entries<long double>(site2) * offset_eci;
  const WideVector rotated = enu1_to_enu2_entries<long double>(site1, site2) * widen(p_enu1);
  return (rotated - offset_enu2).cast<double>();
}

CartesianTriple enu1_to_enu2_velocity(const CartesianTriple& v_enu1, const GeodeticSite& site1,
                                      const GeodeticSite& site2) {
  return enu1_to_enu2(site1, site2) * v_enu1;
}

CartesianTriple enu_to_eci_position(const CartesianTriple& p_enu, const GeodeticSite& site,
                                    const EarthModel& earth) {
  const WideVector rotated = eci_to_enu_entries<long double>(site).transpose() * widen(p_enu);
  return (wide_site_position(site, earth) + rotated).cast<double>();
}

CartesianTriple eci_to_enu_position(const CartesianTriple& p_eci, const GeodeticSite& site,
                                    const EarthModel& earth) {
  const WideVector rel = widen(p_eci) - wide_site_position(site, earth);
  return (eci_to_enu_entries<long double>(site) * rel).cast<double>();
}

}  // namespace radarbias
