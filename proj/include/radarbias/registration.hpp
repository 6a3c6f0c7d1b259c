#pragma once

#include "radarbias/coords.hpp"

#include <Eigen/Core>

namespace radarbias {

/// A sensor's view of the target. `range` is the sensor-to-target distance
/// p_T; callers pass the measured range since the true one is unknown.
struct SensorGeometry {
  double range = 0.0;
  double psi = 0.0;
  double theta = 0.0;
};

/// Squared cost coefficients, exactly as tabulated: k_r² is unitless and the
/// angular k² are in m² (a common choice is 2·p_T²).
struct BiasCostWeights {
  double k_r1_sq = 1.0;
  double k_psi1_sq = 1.0;
  double k_theta1_sq = 1.0;
  double k_r2_sq = 1.0;
  double k_psi2_sq = 1.0;
  double k_theta2_sq = 1.0;

  static BiasCostWeights unit() { return {}; }
  /// Throws ConfigError unless every weight is finite and strictly positive.
  void validate() const;
};

struct RegistrationProblem {
  CartesianTriple relative_bias = CartesianTriple::Zero();  // B_R in ENU(1), meters
  SensorGeometry geom1;
  SensorGeometry geom2;
  BiasCostWeights weights;
};

struct RegistrationSolution {
  SphericalTriple bias1;  // (Δr₁ m, Δψ₁ rad, Δθ₁ rad)
  SphericalTriple bias2;
  double cost = 0.0;              // weighted quadratic cost F
  double unit_weight_cost = 0.0;  // ½·Σ increment², F with unit weights
  Vector3 multipliers = Vector3::Zero();  // a₁, a₂, a₃ in meters
  double constraint_residual = 0.0;       // ‖G(e)‖, meters
  double kkt_residual = 0.0;              // ‖∇F − Σ aᵢ∇Gᵢ‖ / ‖∇F‖
};

using Vector6 = Eigen::Matrix<double, 6, 1>;

// Degeneracy thresholds for SensorGeometry.
inline constexpr double kMinRange = 1e-6;
inline constexpr double kMinCosElevation = 1e-8;

/// Maps a spherical bias increment (Δr, Δψ, Δθ) to its ENU rectangular bias.
/// Throws SingularGeometry(sensor) when p_T or cos θ is below the thresholds.
Matrix3 build_A(const SensorGeometry& geom, int sensor = 1);

/// P₁ − P_1to2 − P₂, all in ENU(1).
CartesianTriple relative_bias_from_positions(const CartesianTriple& p1_enu1,
                                             const CartesianTriple& p2_enu1,
                                             const CartesianTriple& p_1to2_enu1);

double evaluate_cost(const SphericalTriple& bias1, const SphericalTriple& bias2,
                     const BiasCostWeights& w);

/// G(e) = A₂·bias2 − A₁·bias1 − B_R. Zero at any feasible pair.
CartesianTriple constraint_residual(const SphericalTriple& bias1, const SphericalTriple& bias2,
                                    const RegistrationProblem& problem);

/// ∇F(e) − [M₁; M₂]·a, the stationarity residual of the Kuhn-Tucker conditions.
Vector6 kkt_stationarity(const SphericalTriple& bias1, const SphericalTriple& bias2,
                         const Vector3& multipliers, const RegistrationProblem& problem);

/// Closed-form minimizer of the weighted cost subject to the relative-bias
/// constraint. The cost is a positive-definite quadratic and the constraint
/// affine, so the stationary point returned here is the global minimum.
///
/// Throws SingularGeometry for a degenerate sensor and SingularSystem when
/// one of the intermediate 3×3 systems cannot be inverted.
RegistrationSolution solve_absolute_bias(const RegistrationProblem& problem);

/// Adjugate inverse with a scale-free determinant check; throws
/// SingularSystem(name) when |det| is below 1e-14 of the row-norm product.
Matrix3 inverse3(const Matrix3& m, const char* name);

}  // namespace radarbias
