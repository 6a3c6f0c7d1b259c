#include "radarbias/sim_harness.hpp"

#include "radarbias/errors.hpp"
#include "radarbias/format.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ostream>
#include <random>
#include <string>
#include <thread>

namespace radarbias {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct RunSums {
  Matrix2 outer = Matrix2::Zero();
  std::size_t count = 0;
};

RunSums simulate_run(const SimScenario& s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  const double T = s.config.T;
  const double sd_m = std::sqrt(s.config.q22);
  const double sd_n = std::sqrt(s.config.N);
  const double lambda = s.lambda_mean + std::sqrt(s.config.Lambda) * unit(rng);
  const double a = s.gains.alpha, b_over_t = s.gains.beta / T;
  const std::size_t burn = s.effective_burn_in();

  Vector2 x = s.initial_state;
  Vector2 est = s.initial_state;
  RunSums sums;
  for (std::size_t k = 0; k < s.n_steps; ++k) {
    // Draw order per step is fixed: process noise, then measurement noise.
    const double m = sd_m * unit(rng);
    const double n = sd_n * unit(rng);
    x = Vector2(x(0) + T * x(1), x(1) + m);
    const Vector2 pred(est(0) + T * est(1), est(1));
    if (k >= burn) {
      const Vector2 e = x - pred;
      sums.outer += e * e.transpose();
      ++sums.count;
    }
    const double innovation = x(0) + lambda + n - pred(0) - s.lambda_mean;
    est = Vector2(pred(0) + a * innovation, pred(1) + b_over_t * innovation);
  }
  return sums;
}

}  // namespace

void SimScenario::validate() const {
  config.validate();
  if (n_runs < 1) throw ConfigError("n_runs must be at least 1");
  if (n_steps < 1) throw ConfigError("n_steps must be at least 1");
  if (effective_burn_in() >= n_steps) throw ConfigError("burn_in must be less than n_steps");
  if (!initial_state.allFinite() || !std::isfinite(lambda_mean)) {
    throw ConfigError("initial state and bias mean must be finite");
  }
}

std::uint64_t run_seed(std::uint64_t master_seed, std::size_t index) {
  std::uint64_t state = master_seed ^ (0xd1b54a32d192ed03ULL * (static_cast<std::uint64_t>(index) + 1));
  splitmix64(state);
  return splitmix64(state);
}

SimReport run_monte_carlo(const SimScenario& s) {
  s.validate();
  const GainDiagnostics diag = validate_gains(s.gains, s.config);
  if (!diag.ok()) {
    std::string msg = "invalid gains:";
    for (const auto& f : diag.failures()) msg += " " + f + ";";
    throw InvalidGains(msg);
  }

  const auto start = std::chrono::steady_clock::now();
  SimReport report;
  report.burn_in = s.effective_burn_in();
  report.run_seeds.resize(s.n_runs);
  for (std::size_t i = 0; i < s.n_runs; ++i) report.run_seeds[i] = run_seed(s.master_seed, i);

  std::vector<RunSums> per_run(s.n_runs);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(s.threads ? s.threads : hw, s.n_runs));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < s.n_runs; i = next++) {
      per_run[i] = simulate_run(s, report.run_seeds[i]);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
  }

  Matrix2 total = Matrix2::Zero();
  for (const RunSums& r : per_run) {
    total += r.outer;
    report.samples += r.count;
  }
  report.empirical_S = total / static_cast<double>(report.samples);
  report.empirical_S = 0.5 * (report.empirical_S + report.empirical_S.transpose()).eval();
  report.predicted_S = predicted_covariances(s.gains, s.config).Sdot;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double diff = std::abs(report.empirical_S(i, j) - report.predicted_S(i, j));
      const double ref = std::abs(report.predicted_S(i, j));
      report.relative_errors(i, j) = ref > 0.0 ? diff / ref : diff;
    }
  }
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void write_sim_report_csv(std::ostream& out, const SimReport& r) {
  static const char* names[2][2] = {{"S11", "S12"}, {"S21", "S22"}};
  out << "entry,empirical,predicted,relative_error\n";
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out << names[i][j] << ',' << format_number(r.empirical_S(i, j)) << ','
          << format_number(r.predicted_S(i, j)) << ',' << format_number(r.relative_errors(i, j))
          << '\n';
    }
  }
}

void GeometryRanges::validate() const {
  auto ordered = [](double lo, double hi) { return std::isfinite(lo) && std::isfinite(hi) && lo <= hi; };
  if (!ordered(range_min, range_max) || !(range_min >= kMinRange)) {
    throw ConfigError("range interval must be ordered and positive");
  }
  if (!ordered(psi_min, psi_max)) throw ConfigError("azimuth interval must be ordered");
  if (!ordered(theta_min, theta_max) || std::cos(theta_min) < 1e-6 || std::cos(theta_max) < 1e-6 ||
      theta_min <= -M_PI_2 || theta_max >= M_PI_2) {
    throw ConfigError("elevation interval must lie strictly inside (-pi/2, pi/2)");
  }
  if (!(range_bias_sigma >= 0.0) || !(angle_bias_sigma >= 0.0)) {
    throw ConfigError("bias sigmas must be non-negative");
  }
  weights.validate();
}

SynthRegistration synth_registration_scenario(std::uint64_t seed, const GeometryRanges& g) {
  g.validate();
  std::mt19937_64 rng(run_seed(seed, 0));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * u01(rng); };

  SynthRegistration out;
  out.problem.weights = g.weights;
  out.problem.geom1 = {uniform(g.range_min, g.range_max), uniform(g.psi_min, g.psi_max),
                       uniform(g.theta_min, g.theta_max)};
  out.problem.geom2 = {uniform(g.range_min, g.range_max), uniform(g.psi_min, g.psi_max),
                       uniform(g.theta_min, g.theta_max)};
  out.truth1 = {g.range_bias_sigma * unit(rng), g.angle_bias_sigma * unit(rng),
                g.angle_bias_sigma * unit(rng)};
  out.truth2 = {g.range_bias_sigma * unit(rng), g.angle_bias_sigma * unit(rng),
                g.angle_bias_sigma * unit(rng)};
  const Vector3 e1(out.truth1.r, out.truth1.psi, out.truth1.theta);
  const Vector3 e2(out.truth2.r, out.truth2.psi, out.truth2.theta);
  out.problem.relative_bias = build_A(out.problem.geom2, 2) * e2 - build_A(out.problem.geom1, 1) * e1;
  return out;
}

}  // namespace radarbias
