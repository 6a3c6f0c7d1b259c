#pragma once

#include "radarbias/registration.hpp"
#include "radarbias/steady_state.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace radarbias {

struct SimScenario {
  SteadyStateConfig config;
  SteadyStateGains gains;
  std::size_t n_runs = 1;
  std::size_t n_steps = 1;
  std::uint64_t master_seed = 0;
  Vector2 initial_state = Vector2::Zero();  // true x(0) and x̂(0|0)
  double lambda_mean = 0.0;
  std::optional<std::size_t> burn_in;  // defaults to n_steps / 2
  unsigned threads = 0;                // 0: hardware concurrency

  std::size_t effective_burn_in() const { return burn_in.value_or(n_steps / 2); }
  /// Throws ConfigError on zero runs/steps or burn-in >= n_steps.
  void validate() const;
};

struct SimReport {
  Matrix2 empirical_S = Matrix2::Zero();  // raw second moment of x(k+1) − Φx̂(k|k)
  Matrix2 predicted_S = Matrix2::Zero();
  /// |empirical − predicted| / |predicted| per entry; absolute error where predicted is 0.
  Matrix2 relative_errors = Matrix2::Zero();
  std::vector<std::uint64_t> run_seeds;
  std::size_t samples = 0;
  std::size_t burn_in = 0;
  double wall_time_s = 0.0;
};

/// Seed of run `index`, derived from the master seed with SplitMix64.
std::uint64_t run_seed(std::uint64_t master_seed, std::size_t index);

/// Fixed-gain α-β filter over n_runs independent trajectories with a per-run
/// scalar bias λ ~ Normal(λ̄, Λ). Runs execute in parallel; per-run sums are
/// combined in run order, so the report (except wall time) depends only on
/// the scenario. Throws InvalidGains when the gains fail validate_gains.
SimReport run_monte_carlo(const SimScenario& s);

/// Columns: entry,empirical,predicted,relative_error.
void write_sim_report_csv(std::ostream& out, const SimReport& r);

struct GeometryRanges {
  double range_min = 1e4, range_max = 1e5;      // m
  double psi_min = -M_PI, psi_max = M_PI;       // rad
  double theta_min = -1.2, theta_max = 1.2;     // rad
  double range_bias_sigma = 100.0;              // m
  double angle_bias_sigma = 5e-3;               // rad
  BiasCostWeights weights;

  /// Throws ConfigError for empty/inverted ranges or elevations reaching ±π/2.
  void validate() const;
};

struct SynthRegistration {
  RegistrationProblem problem;
  SphericalTriple truth1;
  SphericalTriple truth2;
};

/// Random geometry and true biases, with B_R built so the truth is feasible.
SynthRegistration synth_registration_scenario(std::uint64_t seed, const GeometryRanges& ranges = {});

}  // namespace radarbias
