#include "radarbias/registration.hpp"

#include "radarbias/errors.hpp"

#include <cmath>
#include <string>

namespace radarbias {

namespace {

Vector3 as_vector(const SphericalTriple& s) { return {s.r, s.psi, s.theta}; }
SphericalTriple as_increment(const Vector3& v) { return {v.x(), v.y(), v.z()}; }

Matrix3 diag(double a, double b, double c) {
  Matrix3 d = Matrix3::Zero();
  d(0, 0) = a;
  d(1, 1) = b;
  d(2, 2) = c;
  return d;
}

void check_finite(const Vector3& v, const char* what) {
  if (!v.allFinite()) {
    throw ConfigError(std::string(what) + " must be finite");
  }
}

}  // namespace

void BiasCostWeights::validate() const {
  const double all[] = {k_r1_sq, k_psi1_sq, k_theta1_sq, k_r2_sq, k_psi2_sq, k_theta2_sq};
  for (double w : all) {
    if (!std::isfinite(w) || !(w > 0.0)) {
      throw ConfigError("cost weights must be finite and strictly positive");
    }
  }
}

Matrix3 build_A(const SensorGeometry& geom, int sensor) {
  const double ct = std::cos(geom.theta);
  if (!std::isfinite(geom.range) || !std::isfinite(geom.psi) || !std::isfinite(geom.theta) ||
      !(geom.range >= kMinRange) || std::abs(ct) < kMinCosElevation) {
    throw SingularGeometry(sensor);
  }
  const double p = geom.range;
  const double cp = std::cos(geom.psi), sp = std::sin(geom.psi);
  const double st = std::sin(geom.theta);
  Matrix3 a;
  a << ct * cp, -sp * p, -st * cp * p,
       ct * sp, cp * p, -st * sp * p,
       st, 0.0, ct * p;
  return a;
}

Matrix3 inverse3(const Matrix3& m, const char* name) {
  Matrix3 adj;
  adj(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  adj(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
  adj(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
  adj(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
  adj(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
  adj(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
  adj(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
  adj(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
  adj(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const double det = m(0, 0) * adj(0, 0) + m(0, 1) * adj(1, 0) + m(0, 2) * adj(2, 0);
  const double scale = m.row(0).norm() * m.row(1).norm() * m.row(2).norm();
  if (!std::isfinite(det) || !(std::abs(det) > 1e-14 * scale)) {
    throw SingularSystem(name);
  }
  return adj / det;
}

CartesianTriple relative_bias_from_positions(const CartesianTriple& p1_enu1,
                                             const CartesianTriple& p2_enu1,
                                             const CartesianTriple& p_1to2_enu1) {
  return p1_enu1 - p_1to2_enu1 - p2_enu1;
}

double evaluate_cost(const SphericalTriple& b1, const SphericalTriple& b2,
                     const BiasCostWeights& w) {
  return 0.5 * (w.k_r1_sq * b1.r * b1.r + w.k_psi1_sq * b1.psi * b1.psi +
                w.k_theta1_sq * b1.theta * b1.theta + w.k_r2_sq * b2.r * b2.r +
                w.k_psi2_sq * b2.psi * b2.psi + w.k_theta2_sq * b2.theta * b2.theta);
}

CartesianTriple constraint_residual(const SphericalTriple& bias1, const SphericalTriple& bias2,
                                    const RegistrationProblem& problem) {
  return build_A(problem.geom2, 2) * as_vector(bias2) - build_A(problem.geom1, 1) * as_vector(bias1) -
         problem.relative_bias;
}

Vector6 kkt_stationarity(const SphericalTriple& bias1, const SphericalTriple& bias2,
                         const Vector3& multipliers, const RegistrationProblem& problem) {
  const BiasCostWeights& w = problem.weights;
  // The constraint Jacobian blocks are M₁ = −A₁ᵀ and M₂ = A₂ᵀ.
  const Matrix3 m1 = -build_A(problem.geom1, 1).transpose();
  const Matrix3 m2 = build_A(problem.geom2, 2).transpose();
  Vector6 r;
  r.head<3>() = diag(w.k_r1_sq, w.k_psi1_sq, w.k_theta1_sq) * as_vector(bias1) - m1 * multipliers;
  r.tail<3>() = diag(w.k_r2_sq, w.k_psi2_sq, w.k_theta2_sq) * as_vector(bias2) - m2 * multipliers;
  return r;
}

RegistrationSolution solve_absolute_bias(const RegistrationProblem& problem) {
  check_finite(problem.relative_bias, "relative bias");
  problem.weights.validate();
  const BiasCostWeights& w = problem.weights;

  const Matrix3 a1 = build_A(problem.geom1, 1);
  const Matrix3 a2 = build_A(problem.geom2, 2);
  const Matrix3 m1 = -a1.transpose();
  const Matrix3 m2 = a2.transpose();
  const Matrix3 d1 = diag(w.k_r1_sq, w.k_psi1_sq, w.k_theta1_sq);
  const Matrix3 d2_inv = diag(1.0 / w.k_r2_sq, 1.0 / w.k_psi2_sq, 1.0 / w.k_theta2_sq);

  const Matrix3 a2_inv = inverse3(a2, "A2");
  const Matrix3 m1_inv = inverse3(m1, "M1");

  // Stationarity gives bias2 = D₂⁻¹M₂M₁⁻¹D₁·bias1; feasibility gives
  // bias2 = A₂⁻¹(A₁·bias1 + B_R). Equating the two fixes bias1.
  const Matrix3 coupling = d2_inv * m2 * m1_inv * d1;
  const Matrix3 combined = coupling - a2_inv * a1;
  const Vector3 e1 = inverse3(combined, "D2^-1 M2 M1^-1 D1 - A2^-1 A1") * (a2_inv * problem.relative_bias);
  const Vector3 e2 = coupling * e1;

  RegistrationSolution sol;
  sol.bias1 = as_increment(e1);
  sol.bias2 = as_increment(e2);
  sol.multipliers = m1_inv * (d1 * e1);
  sol.cost = evaluate_cost(sol.bias1, sol.bias2, w);
  sol.unit_weight_cost = evaluate_cost(sol.bias1, sol.bias2, BiasCostWeights::unit());
  sol.constraint_residual = (a2 * e2 - a1 * e1 - problem.relative_bias).norm();

  Vector6 grad;
  grad.head<3>() = d1 * e1;
  grad.tail<3>() = diag(w.k_r2_sq, w.k_psi2_sq, w.k_theta2_sq) * e2;
  const double stationarity = kkt_stationarity(sol.bias1, sol.bias2, sol.multipliers, problem).norm();
  const double grad_norm = grad.norm();
  sol.kkt_residual = grad_norm > 0.0 ? stationarity / grad_norm : stationarity;
  return sol;
}

}  // namespace radarbias
