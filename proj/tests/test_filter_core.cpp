#include "oracles.hpp"

#include "radarbias/errors.hpp"
#include "radarbias/filter_core.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace radarbias;
using oracle::relative_diff;

namespace {

BiasFilterModel random_linear_model(std::mt19937_64& rng, Eigen::Index n, Eigen::Index q,
                                    Eigen::Index p, bool with_bias) {
  MatrixXd Phi = oracle::random_matrix(rng, n, n, 0.4) + MatrixXd::Identity(n, n) * 0.5;
  MatrixXd H = oracle::random_matrix(rng, q, n);
  MatrixXd W = with_bias ? oracle::random_matrix(rng, q, p) : MatrixXd::Zero(q, p);
  MatrixXd Lambda = with_bias ? oracle::random_spd(rng, p) : MatrixXd::Zero(p, p);
  return BiasFilterModel::additive_bias(Phi, H, W, oracle::random_spd(rng, n, 0.05, 0.5),
                                        oracle::random_spd(rng, q, 0.2, 1.0), Lambda, VectorXd::Zero(p));
}

// Prior-stage state with nonzero bias sensitivity, built by a few optimal steps.
FilterState warmed_prior(const BiasFilterModel& model, std::mt19937_64& rng, int steps = 3) {
  FilterState s = FilterState::initial(model, VectorXd::Zero(model.n()), MatrixXd::Identity(model.n(), model.n()));
  for (int k = 0; k < steps; ++k) {
    s = time_update(model, s);
    s.K = optimal_gain(model, s);
    s = measurement_update(model, s, oracle::random_matrix(rng, model.q(), 1));
  }
  return time_update(model, s);
}

double trace_after(const BiasFilterModel& model, const FilterState& prior, const MatrixXd& K) {
  return posterior_total_covariance(model, prior, K).trace();
}

}  // namespace

TEST_CASE("time update") {
  auto model = BiasFilterModel::additive_bias(MatrixXd::Identity(2, 2), MatrixXd::Identity(1, 2) ,
                                              MatrixXd::Identity(1, 1), MatrixXd::Zero(2, 2),
                                              MatrixXd::Identity(1, 1), MatrixXd::Identity(1, 1),
                                              VectorXd::Zero(1));
  FilterState s = FilterState::initial(model, VectorXd::Constant(2, 3.0), MatrixXd::Identity(2, 2));
  FilterState t = time_update(model, s);
  CHECK(t.x_hat == s.x_hat);
  CHECK(t.M == s.M);
  CHECK(t.D == s.D);

  const auto cfg = SteadyStateConfig::make(2.0, 1.0, 0.5, std::nullopt, 0.0);
  model = BiasFilterModel::alpha_beta(cfg);
  MatrixXd M0(2, 2);
  M0 << 4, 1, 1, 3;
  s = FilterState::initial(model, VectorXd::Zero(2), M0);
  t = time_update(model, s);
  MatrixXd want(2, 2);
  // ΦMΦᵀ + Q with Φ = [[1, 2], [0, 1]].
  want << 4 + 2 * 1 + 2 * 1 + 4 * 3, 1 + 2 * 3, 1 + 2 * 3, 3 + 0.5;
  CHECK((t.M - want).norm() < 1e-12);
  CHECK(t.S == t.M);
}

TEST_CASE("zero gain leaves estimate and bias sensitivity unchanged") {
  std::mt19937_64 rng(21);
  const auto model = random_linear_model(rng, 3, 2, 2, true);
  FilterState prior = warmed_prior(model, rng);
  prior.K = MatrixXd::Zero(3, 2);
  const FilterState post = measurement_update(model, prior, VectorXd::Ones(2));
  CHECK(post.x_hat == prior.x_hat);
  CHECK(relative_diff(post.D, prior.D) < 1e-15);
  CHECK(relative_diff(post.S, prior.S) < 1e-15);
  CHECK(relative_diff(post.M, prior.M) < 1e-14);
}

TEST_CASE("scalar recursions") {
  // n = q = m = p = 1, Φ = H = W = 1, u = λ.
  const double q = 0.3, n = 0.7, lam = 2.0;
  const auto model = BiasFilterModel::additive_bias(MatrixXd::Ones(1, 1), MatrixXd::Ones(1, 1),
                                                    MatrixXd::Ones(1, 1), MatrixXd::Constant(1, 1, q),
                                                    MatrixXd::Constant(1, 1, n),
                                                    MatrixXd::Constant(1, 1, lam), VectorXd::Zero(1));
  FilterState s = FilterState::initial(model, VectorXd::Zero(1), MatrixXd::Constant(1, 1, 5.0));
  double m = 5.0, d = 0.0, S = 5.0, x = 0.0;
  const double zs[] = {1.0, -0.5, 2.0, 0.3, 0.0};
  for (double z : zs) {
    s = time_update(model, s);
    const double m_prior = m + q, d_prior = d, s_prior = m_prior + d_prior * d_prior * lam;
    CHECK(s.S(0, 0) == doctest::Approx(s_prior).epsilon(1e-14));
    // K·(S + N + Λ + 2DΛ) = S + DΛ
    const double k = (s_prior + d_prior * lam) / (s_prior + n + lam + 2 * d_prior * lam);
    s.K = optimal_gain(model, s);
    CHECK(s.K(0, 0) == doctest::Approx(k).epsilon(1e-14));
    s = measurement_update(model, s, VectorXd::Constant(1, z));
    x = x + k * (z - x);
    const double f = 1 - k;
    m = f * f * m + f * f * q + k * k * n;
    d = f * d - k;
    S = f * f * s_prior + k * k * (n + lam) - 2 * f * d_prior * lam * k;
    CHECK(s.x_hat(0) == doctest::Approx(x).epsilon(1e-14));
    CHECK(s.M(0, 0) == doctest::Approx(m).epsilon(1e-14));
    CHECK(s.D(0, 0) == doctest::Approx(d).epsilon(1e-14));
    CHECK(s.S(0, 0) == doctest::Approx(S).epsilon(1e-14));
    CHECK(s.S(0, 0) == doctest::Approx(m + d * d * lam).epsilon(1e-12));
  }
}

TEST_CASE("optimal gain reduces to the Kalman gain without bias") {
  std::mt19937_64 rng(22);
  const auto model = random_linear_model(rng, 4, 2, 1, false);
  const FilterState prior = warmed_prior(model, rng);
  const MatrixXd Sh = prior.S * model.H.transpose();
  const MatrixXd kalman = Sh * (model.H * Sh + model.N).inverse();
  CHECK(relative_diff(optimal_gain(model, prior), kalman) < 1e-12);
}

TEST_CASE("optimal gain minimizes the posterior trace") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto model = random_linear_model(rng, 3, 2, 2, true);
    const FilterState prior = warmed_prior(model, rng);
    const MatrixXd K = optimal_gain(model, prior);
    const double best = trace_after(model, prior, K);
    for (int i = 0; i < 50; ++i) {
      const MatrixXd probe = K + oracle::random_matrix(rng, 3, 2, 0.1);
      CHECK(trace_after(model, prior, probe) >= best - 1e-10);
    }
    // Central differences of tr S over each gain entry.
    const double h = 1e-5;
    MatrixXd grad(3, 2);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 2; ++j) {
        MatrixXd kp = K, km = K;
        kp(i, j) += h;
        km(i, j) -= h;
        grad(i, j) = (trace_after(model, prior, kp) - trace_after(model, prior, km)) / (2 * h);
      }
    }
    CHECK(grad.norm() < 1e-8 * std::max(1.0, best));
  }
}

TEST_CASE("covariance invariants along a trajectory") {
  std::mt19937_64 rng(24);
  const auto model = random_linear_model(rng, 3, 2, 2, true);
  FilterState s = FilterState::initial(model, VectorXd::Zero(3));
  for (int k = 0; k < 200; ++k) {
    s = time_update(model, s);
    CHECK((s.M - s.M.transpose()).norm() == 0.0);
    CHECK((s.S - s.S.transpose()).norm() == 0.0);
    s.K = optimal_gain(model, s);
    s = measurement_update(model, s, oracle::random_matrix(rng, 2, 1));
    // With additive bias S = M + DΛDᵀ, so S ⪰ M.
    const MatrixXd excess = s.S - s.M;
    CHECK(relative_diff(excess, s.D * model.Lambda * s.D.transpose()) < 1e-8);
    const Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (excess + excess.transpose()));
    CHECK(es.eigenvalues().minCoeff() >= -1e-9 * std::max(1.0, s.S.norm()));
  }
}

TEST_CASE("Kalman reduction over 1000 steps") {
  std::mt19937_64 rng(25);
  const auto model = random_linear_model(rng, 4, 2, 1, false);
  const MatrixXd P0 = oracle::random_spd(rng, 4, 1.0, 10.0);
  FilterState s = FilterState::initial(model, VectorXd::Zero(4), P0);
  oracle::Kalman kf{model.Phi, model.H, model.Q, model.N, VectorXd::Zero(4), P0, {}};
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const VectorXd z = oracle::random_matrix(rng, 2, 1, 3.0);
    s = time_update(model, s);
    s.K = optimal_gain(model, s);
    s = measurement_update(model, s, z);
    kf.predict();
    kf.update(z);
    worst = std::max({worst, relative_diff(s.x_hat, kf.x), relative_diff(s.M, kf.P),
                      relative_diff(s.S, kf.P), relative_diff(s.K, kf.K)});
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("alpha-beta model converges to the steady-state blocks") {
  const double rho = 2.0;
  const auto cfg = SteadyStateConfig::make(1.0, 1.0, std::nullopt, rho, 4.0);
  const auto model = BiasFilterModel::alpha_beta(cfg);
  const SteadyStateGains g{0.2, solve_beta(0.2, rho).beta};
  const auto pc = predicted_covariances(g, cfg);

  FilterState s = FilterState::initial(model, VectorXd::Zero(2), MatrixXd::Identity(2, 2));
  FilterState prior;
  for (int k = 0; k < 3000; ++k) {
    s = time_update(model, s);
    prior = s;
    s.K = g.gain(cfg.T);
    s = measurement_update(model, s, VectorXd::Zero(1));
  }
  CHECK(relative_diff(s.M, pc.Mbar) < 1e-8);
  CHECK(relative_diff(prior.S, pc.Sdot) < 1e-8);
  CHECK((s.D - pc.Dbar).norm() < 1e-8);
}

TEST_CASE("optimal alpha-beta gain lies on the admissible curve") {
  // With Λ > 0 the optimal gain still satisfies the α–β relation for ρ.
  for (double lambda : {0.0, 4.0}) {
    const double rho = 2.0;
    const auto cfg = SteadyStateConfig::make(1.0, 1.0, std::nullopt, rho, lambda);
    const auto model = BiasFilterModel::alpha_beta(cfg);
    FilterState s = FilterState::initial(model, VectorXd::Zero(2));
    for (int k = 0; k < 3000; ++k) {
      s = time_update(model, s);
      s.K = optimal_gain(model, s);
      s = measurement_update(model, s, VectorXd::Zero(1));
    }
    const double alpha = s.K(0, 0), beta = s.K(1, 0) * cfg.T;
    CHECK(std::abs(beta - solve_beta(alpha, rho).beta) < 1e-8);
    // Fixed-gain prediction with those gains reproduces the filter's own covariance.
    const auto pc = predicted_covariances({alpha, beta}, cfg);
    s = time_update(model, s);
    CHECK(relative_diff(s.S, pc.Sdot) < 1e-8);
    CHECK(relative_diff(optimal_gain(model, s), SteadyStateGains{alpha, beta}.gain(cfg.T)) < 1e-8);
  }
}

TEST_CASE("dimension checks") {
  std::mt19937_64 rng(26);
  auto model = random_linear_model(rng, 3, 2, 1, true);
  FilterState s = FilterState::initial(model, VectorXd::Zero(3));
  CHECK_THROWS_AS(measurement_update(model, s, VectorXd::Zero(2)), DimensionMismatch);
  s = time_update(model, s);
  CHECK_THROWS_AS(time_update(model, s), DimensionMismatch);
  s.K = MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(measurement_update(model, s, VectorXd::Zero(2)), DimensionMismatch);
  s.K = MatrixXd::Zero(3, 2);
  CHECK_THROWS_AS(measurement_update(model, s, VectorXd::Zero(3)), DimensionMismatch);
  CHECK_THROWS_AS(FilterState::initial(model, VectorXd::Zero(2)), DimensionMismatch);
  model.W = MatrixXd::Zero(3, 1);
  CHECK_THROWS_AS(model.validate(), DimensionMismatch);
}

TEST_CASE("singular innovation") {
  auto model = BiasFilterModel::additive_bias(MatrixXd::Identity(1, 1), MatrixXd::Zero(1, 1),
                                              MatrixXd::Zero(1, 1), MatrixXd::Zero(1, 1),
                                              MatrixXd::Zero(1, 1), MatrixXd::Zero(1, 1), VectorXd::Zero(1));
  FilterState s = time_update(model, FilterState::initial(model, VectorXd::Zero(1)));
  CHECK_THROWS_AS(optimal_gain(model, s), SingularInnovation);
}
