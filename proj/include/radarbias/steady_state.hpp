#pragma once

#include <Eigen/Core>

#include <array>
#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace radarbias {

using Matrix2 = Eigen::Matrix2d;
using Vector2 = Eigen::Vector2d;

/// Scalar noise description of the two-state (position, velocity) tracker.
struct SteadyStateConfig {
  double T = 1.0;       // sample period, s
  double N = 1.0;       // measurement-noise variance, m²
  double q22 = 0.0;     // velocity process-noise variance, (m/s)²
  double Lambda = 0.0;  // bias variance, m²
  double rho = 0.0;     // q22·T²/N

  /// Builds a config from any consistent subset of (q22, rho). When both are
  /// given they must agree to 1e-9 relative; otherwise ConfigError.
  static SteadyStateConfig make(double T, double N, std::optional<double> q22,
                                std::optional<double> rho, double Lambda = 0.0);

  /// Throws ConfigError on T <= 0, negative variances or inconsistent rho.
  void validate() const;
};

struct SteadyStateGains {
  double alpha = 0.0;
  double beta = 0.0;

  /// K̄ = (α, β/T)ᵀ
  Vector2 gain(double T) const { return {alpha, beta / T}; }
};

Matrix2 transition_matrix(double T);
/// F̄ = (I − K̄H)Φ for the position-only measurement.
Matrix2 closed_loop_matrix(const SteadyStateGains& g, double T);
/// L̄ = I − K̄H
Matrix2 gain_complement(const SteadyStateGains& g, double T);

/// 1 − (α+β)/2 ± ½·sqrt(α² + 2αβ + β² − 4β), complex when the radicand is negative.
std::array<std::complex<double>, 2> fbar_eigenvalues(const SteadyStateGains& g);

/// Quartic relation between α and β for noise ratio rho; zero on admissible pairs.
double gain_polynomial(double alpha, double beta, double rho);
/// Cubic factor 2β³ + ρ((α² − 2α + 2)β + α²(α − 2)); the quartic is this times (β + 2α − 4).
double gain_cubic(double alpha, double beta, double rho);

/// Real roots of a3·x³ + a2·x² + a1·x + a0 (a3 ≠ 0), ascending, each polished
/// by Newton-Raphson. Repeated roots are reported once.
std::vector<double> real_cubic_roots(double a3, double a2, double a1, double a0);

struct BetaSolution {
  double beta = 0.0;
  double excluded_root = 0.0;           // 4 − 2α, always a root of the quartic
  std::vector<double> cubic_real_roots;  // every real root of the cubic factor
};

/// Admissible β for the given α and noise ratio. Throws std::invalid_argument
/// for rho <= 0 or alpha outside (0, 2) and NoValidRoot when no real root passes validate_gains.
BetaSolution solve_beta(double alpha, double rho);

/// Closed-form solution of M̄_N = F̄ M̄_N F̄ᵀ + K̄ N K̄ᵀ.
Matrix2 steady_MN(const SteadyStateGains& g, double T, double N);
/// Closed-form solution of M̄_Q = F̄ M̄_Q F̄ᵀ + L̄ Q L̄ᵀ with Q = diag(0, q22).
Matrix2 steady_MQ(const SteadyStateGains& g, double T, double q22);

struct PredictedCovariances {
  Matrix2 Mbar_N;
  Matrix2 Mbar_Q;
  Matrix2 Mbar;   // measurement-updated covariance of the noise-driven error
  Matrix2 Mdot;   // time-updated counterpart
  Matrix2 Sdot;   // time-updated total covariance, bias included
  Vector2 Dbar;   // steady bias sensitivity after update, (−1, 0)
  Vector2 Ddot;   // F̄·D̄ = (α − 1, β/T)
  double S11dot = 0.0;
  double S21dot = 0.0;
};

PredictedCovariances predicted_covariances(const SteadyStateGains& g, const SteadyStateConfig& cfg);

struct GainDiagnostics {
  bool alpha_nonzero = false;        // condition 1
  bool beta_nonzero = false;         // condition 2
  bool beta_not_excluded = false;    // condition 3: β ≠ 4 − 2α
  bool stable = false;               // both |eig F̄| < 1
  bool mn_positive_definite = false;
  bool mq_positive_definite = false;
  std::array<double, 2> eigenvalue_moduli{};

  bool conditions_hold() const { return alpha_nonzero && beta_nonzero && beta_not_excluded; }
  bool ok() const {
    return conditions_hold() && stable && mn_positive_definite && mq_positive_definite;
  }
  /// Human-readable names of the failed checks, e.g. "condition 3 (beta != 4 - 2*alpha)".
  std::vector<std::string> failures() const;
};

/// Positive definiteness is a property of the gains alone, so it is evaluated
/// with unit noise variances; cfg supplies T.
GainDiagnostics validate_gains(const SteadyStateGains& g, const SteadyStateConfig& cfg = {});

/// α·Ṡ₁₂·T − β·(Ṡ₁₁ − Λ), normalized by the magnitude of its terms. Vanishes
/// when β solves the gain polynomial for rho = q22·T²/N.
double gain_ratio_residual(const SteadyStateGains& g, const SteadyStateConfig& cfg);

struct GainSweepRow {
  double rho = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double eig1_mod = 0.0;
  double eig2_mod = 0.0;
  double S11dot = 0.0;
  double S21dot = 0.0;
  double excluded_root = 0.0;
  std::string error;  // non-empty when no admissible β exists for this point
};

inline constexpr const char* kGainSweepHeader = "rho,alpha,beta,eig1_mod,eig2_mod,S11dot,S21dot";

/// One row per (rho, alpha) pair; T, N and Lambda scale the covariance columns.
std::vector<GainSweepRow> gain_sweep(const std::vector<double>& rhos,
                                     const std::vector<double>& alphas, double T = 1.0,
                                     double N = 1.0, double Lambda = 0.0);
GainSweepRow gain_row(double rho, double alpha, double T = 1.0, double N = 1.0,
                      double Lambda = 0.0);

/// Writes kGainSweepHeader plus a trailing excluded_root column.
void write_gain_sweep_csv(std::ostream& out, const std::vector<GainSweepRow>& rows);

}  // namespace radarbias
