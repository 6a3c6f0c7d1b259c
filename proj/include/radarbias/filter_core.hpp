#pragma once

#include "radarbias/steady_state.hpp"

#include <Eigen/Core>

#include <functional>

namespace radarbias {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// x(k+1) = Φx(k) + m(k),  z(k) = Hx(k) + W·u(x(k), λ) + n(k)
///
/// Dimensions: n states, q measurements, m bias-function outputs, p bias
/// parameters. u and its Jacobians are evaluated at (x̂(k|k), λ̄).
struct BiasFilterModel {
  using BiasFn = std::function<VectorXd(const VectorXd& x, const VectorXd& lambda)>;
  using JacobianFn = std::function<MatrixXd(const VectorXd& x, const VectorXd& lambda)>;

  MatrixXd Phi;         // n×n
  MatrixXd H;           // q×n
  MatrixXd W;           // q×m
  MatrixXd Q;           // n×n
  MatrixXd N;           // q×q
  MatrixXd Lambda;      // p×p
  VectorXd lambda_bar;  // p
  BiasFn u;
  JacobianFn du_dx;       // m×n
  JacobianFn du_dlambda;  // m×p

  Eigen::Index n() const { return Phi.rows(); }
  Eigen::Index q() const { return H.rows(); }
  Eigen::Index m() const { return W.cols(); }
  Eigen::Index p() const { return lambda_bar.size(); }

  /// Throws DimensionMismatch on inconsistent shapes or missing functions.
  void validate() const;

  /// Additive bias u(x, λ) = λ, so m = p and the Jacobians are (0, I).
  static BiasFilterModel additive_bias(MatrixXd Phi, MatrixXd H, MatrixXd W, MatrixXd Q,
                                       MatrixXd N, MatrixXd Lambda, VectorXd lambda_bar);

  /// Two-state position/velocity tracker with scalar additive bias.
  static BiasFilterModel alpha_beta(const SteadyStateConfig& cfg, double lambda_bar = 0.0);
};

enum class FilterStage { Posterior, Prior };

/// Estimate plus the covariance bookkeeping of the reduced-state filter.
///
/// After time_update the (k|k) quantities are kept in the *_post members,
/// since the combined measurement update propagates from them directly.
struct FilterState {
  VectorXd x_hat;
  MatrixXd M;  // covariance of the noise-driven error
  MatrixXd D;  // bias sensitivity: bias-driven error = D·Δλ
  MatrixXd S;  // total error covariance
  MatrixXd K;  // gain used by the next measurement update (n×q)
  FilterStage stage = FilterStage::Posterior;

  VectorXd x_post;
  MatrixXd M_post;
  MatrixXd D_post;

  /// (0|0) state: D = 0 and S = M. Default prior covariance is 1e6·I.
  static FilterState initial(const BiasFilterModel& model, const VectorXd& x0);
  static FilterState initial(const BiasFilterModel& model, const VectorXd& x0, const MatrixXd& M0);
};

/// x̂ ← Φx̂, M ← ΦMΦᵀ + Q, D ← ΦD, S ← M + DΛDᵀ.
FilterState time_update(const BiasFilterModel& model, const FilterState& state);

/// Applies state.K to measurement z. Requires a Prior-stage state.
FilterState measurement_update(const BiasFilterModel& model, const FilterState& state,
                               const VectorXd& z);

/// Gain minimizing tr S(k+1|k+1) for a Prior-stage state, found by solving
/// K·B = R with B the q×q innovation-like bracket. Throws SingularInnovation.
MatrixXd optimal_gain(const BiasFilterModel& model, const FilterState& state);

/// S(k+1|k+1) that measurement_update would produce with gain K.
MatrixXd posterior_total_covariance(const BiasFilterModel& model, const FilterState& state,
                                    const MatrixXd& K);

}  // namespace radarbias
