#include "radarbias/filter_core.hpp"

#include "radarbias/errors.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>
#include <utility>

namespace radarbias {

namespace {

void require_shape(const MatrixXd& m, Eigen::Index rows, Eigen::Index cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream msg;
    msg << name << " is " << m.rows() << "x" << m.cols() << ", expected " << rows << "x" << cols;
    throw DimensionMismatch(msg.str());
  }
}

MatrixXd symmetrize(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

void require_stage(const FilterState& s, FilterStage stage, const char* op) {
  if (s.stage != stage) {
    throw DimensionMismatch(std::string(op) + ": filter state is at the wrong stage");
  }
}

void check_state(const BiasFilterModel& model, const FilterState& s) {
  const auto n = model.n(), p = model.p();
  if (s.x_hat.size() != n) throw DimensionMismatch("x_hat has wrong length");
  require_shape(s.M, n, n, "M");
  require_shape(s.D, n, p, "D");
  require_shape(s.S, n, n, "S");
}

struct Linearization {
  MatrixXd WUx;  // q×n
  MatrixXd WUl;  // q×p
};

Linearization linearize(const BiasFilterModel& model, const VectorXd& x) {
  const MatrixXd ux = model.du_dx(x, model.lambda_bar);
  const MatrixXd ul = model.du_dlambda(x, model.lambda_bar);
  require_shape(ux, model.m(), model.n(), "du_dx");
  require_shape(ul, model.m(), model.p(), "du_dlambda");
  return {model.W * ux, model.W * ul};
}

}  // namespace

void BiasFilterModel::validate() const {
  const auto n_ = n(), q_ = q(), m_ = m(), p_ = p();
  if (n_ == 0 || q_ == 0) throw DimensionMismatch("model needs at least one state and measurement");
  require_shape(Phi, n_, n_, "Phi");
  require_shape(H, q_, n_, "H");
  require_shape(W, q_, m_, "W");
  require_shape(Q, n_, n_, "Q");
  require_shape(N, q_, q_, "N");
  require_shape(Lambda, p_, p_, "Lambda");
  if (!u || !du_dx || !du_dlambda) throw DimensionMismatch("bias function or Jacobian missing");
}

BiasFilterModel BiasFilterModel::additive_bias(MatrixXd Phi, MatrixXd H, MatrixXd W, MatrixXd Q,
                                               MatrixXd N, MatrixXd Lambda, VectorXd lambda_bar) {
  BiasFilterModel model;
  model.Phi = std::move(Phi);
  model.H = std::move(H);
  model.W = std::move(W);
  model.Q = std::move(Q);
  model.N = std::move(N);
  model.Lambda = std::move(Lambda);
  model.lambda_bar = std::move(lambda_bar);
  const auto p = model.lambda_bar.size();
  const auto n = model.Phi.rows();
  model.u = [](const VectorXd&, const VectorXd& lambda) { return lambda; };
  model.du_dx = [p, n](const VectorXd&, const VectorXd&) { return MatrixXd::Zero(p, n).eval(); };
  model.du_dlambda = [p](const VectorXd&, const VectorXd&) { return MatrixXd::Identity(p, p).eval(); };
  model.validate();
  return model;
}

BiasFilterModel BiasFilterModel::alpha_beta(const SteadyStateConfig& cfg, double lambda_bar) {
  MatrixXd Phi = transition_matrix(cfg.T);
  MatrixXd H(1, 2);
  H << 1.0, 0.0;
  MatrixXd Q = MatrixXd::Zero(2, 2);
  Q(1, 1) = cfg.q22;
  return additive_bias(std::move(Phi), std::move(H), MatrixXd::Identity(1, 1), std::move(Q),
                       MatrixXd::Constant(1, 1, cfg.N), MatrixXd::Constant(1, 1, cfg.Lambda),
                       VectorXd::Constant(1, lambda_bar));
}

FilterState FilterState::initial(const BiasFilterModel& model, const VectorXd& x0) {
  return initial(model, x0, 1e6 * MatrixXd::Identity(model.n(), model.n()));
}

FilterState FilterState::initial(const BiasFilterModel& model, const VectorXd& x0,
                                 const MatrixXd& M0) {
  model.validate();
  FilterState s;
  s.x_hat = x0;
  s.M = symmetrize(M0);
  s.D = MatrixXd::Zero(model.n(), model.p());
  s.S = s.M;
  s.K = MatrixXd::Zero(model.n(), model.q());
  check_state(model, s);
  return s;
}

FilterState time_update(const BiasFilterModel& model, const FilterState& state) {
  model.validate();
  check_state(model, state);
  require_stage(state, FilterStage::Posterior, "time_update");

  FilterState next = state;
  next.x_post = state.x_hat;
  next.M_post = state.M;
  next.D_post = state.D;

  next.x_hat = model.Phi * state.x_hat;
  next.M = symmetrize(model.Phi * state.M * model.Phi.transpose() + model.Q);
  next.D = model.Phi * state.D;
  next.S = symmetrize(next.M + next.D * model.Lambda * next.D.transpose());
  next.stage = FilterStage::Prior;
  return next;
}

MatrixXd posterior_total_covariance(const BiasFilterModel& model, const FilterState& state,
                                    const MatrixXd& K) {
  require_stage(state, FilterStage::Prior, "posterior_total_covariance");
  require_shape(K, model.n(), model.q(), "K");
  const Linearization lin = linearize(model, state.x_post);
  const auto n = model.n();

  const MatrixXd h_tilde = model.H + lin.WUx;
  const MatrixXd n_tilde = model.N + lin.WUl * model.Lambda * lin.WUl.transpose();
  // E[ε(k+1|k)Δλᵀ] = ΦD(k|k)Λ, mapped through the bias Jacobian.
  const MatrixXd cross = state.D * model.Lambda * lin.WUl.transpose();
  const MatrixXd g = MatrixXd::Identity(n, n) - K * h_tilde;
  const MatrixXd gx = g * cross * K.transpose();
  return symmetrize(g * state.S * g.transpose() + K * n_tilde * K.transpose() - gx -
                    gx.transpose());
}

FilterState measurement_update(const BiasFilterModel& model, const FilterState& state,
                               const VectorXd& z) {
  model.validate();
  check_state(model, state);
  require_stage(state, FilterStage::Prior, "measurement_update");
  if (z.size() != model.q()) throw DimensionMismatch("measurement has wrong length");
  const MatrixXd& K = state.K;
  require_shape(K, model.n(), model.q(), "K");

  const auto n = model.n();
  const Linearization lin = linearize(model, state.x_post);
  const MatrixXd L = MatrixXd::Identity(n, n) - K * model.H;
  const MatrixXd F = (L - K * lin.WUx) * model.Phi;
  const MatrixXd C = -K * lin.WUl;

  FilterState next = state;
  const VectorXd predicted_z = model.H * state.x_hat + model.W * model.u(state.x_hat, model.lambda_bar);
  next.x_hat = state.x_hat + K * (z - predicted_z);
  next.M = symmetrize(F * state.M_post * F.transpose() + L * model.Q * L.transpose() +
                      K * model.N * K.transpose());
  next.D = F * state.D_post + C;
  next.S = posterior_total_covariance(model, state, K);
  next.stage = FilterStage::Posterior;
  return next;
}

MatrixXd optimal_gain(const BiasFilterModel& model, const FilterState& state) {
  model.validate();
  check_state(model, state);
  require_stage(state, FilterStage::Prior, "optimal_gain");
  const Linearization lin = linearize(model, state.x_post);

  const MatrixXd h_tilde = model.H + lin.WUx;
  const MatrixXd n_tilde = model.N + lin.WUl * model.Lambda * lin.WUl.transpose();
  const MatrixXd cross = state.D * model.Lambda * lin.WUl.transpose();
  const MatrixXd hx = h_tilde * cross;
  const MatrixXd bracket =
      symmetrize(h_tilde * state.S * h_tilde.transpose() + n_tilde + hx + hx.transpose());
  const MatrixXd rhs = state.S * h_tilde.transpose() + cross;

  const Eigen::PartialPivLU<MatrixXd> lu(bracket.transpose());
  if (!bracket.allFinite() || !(lu.rcond() > 1e-14)) throw SingularInnovation();
  // K·B = R  ⇔  Bᵀ·Kᵀ = Rᵀ
  return lu.solve(rhs.transpose()).transpose();
}

}  // namespace radarbias
