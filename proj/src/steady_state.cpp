#include "radarbias/steady_state.hpp"

#include "radarbias/errors.hpp"
#include "radarbias/format.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace radarbias {

namespace {

constexpr double kConditionTol = 1e-12;
constexpr double kExcludedRootTol = 1e-9;

bool positive_definite(const Matrix2& m) {
  return m.allFinite() && m(0, 0) > 0.0 && m.determinant() > 0.0;
}

void require_conditions(const SteadyStateGains& g, const char* what) {
  const double a = g.alpha, b = g.beta;
  if (std::abs(a) <= kConditionTol) {
    throw DegenerateDenominator(std::string(what) + ": condition 1 violated (alpha == 0)");
  }
  if (std::abs(b) <= kConditionTol) {
    throw DegenerateDenominator(std::string(what) + ": condition 2 violated (beta == 0)");
  }
  if (std::abs(b - (4.0 - 2.0 * a)) <= kExcludedRootTol) {
    throw DegenerateDenominator(std::string(what) +
                                ": condition 3 violated (beta == 4 - 2*alpha)");
  }
}

}  // namespace

SteadyStateConfig SteadyStateConfig::make(double T, double N, std::optional<double> q22,
                                          std::optional<double> rho, double Lambda) {
  if (!q22 && !rho) {
    throw ConfigError("steady-state config needs q22 or rho");
  }
  SteadyStateConfig cfg;
  cfg.T = T;
  cfg.N = N;
  cfg.Lambda = Lambda;
  if (q22) {
    cfg.q22 = *q22;
    cfg.rho = N > 0.0 ? cfg.q22 * T * T / N : (cfg.q22 == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    if (rho && std::abs(*rho - cfg.rho) > 1e-9 * std::max(std::abs(*rho), std::abs(cfg.rho))) {
      throw ConfigError("rho is inconsistent with q22*T^2/N");
    }
  } else {
    if (!(N > 0.0)) throw ConfigError("rho needs N > 0; give q22 instead");
    cfg.rho = *rho;
    cfg.q22 = *rho * N / (T * T);
  }
  cfg.validate();
  return cfg;
}

void SteadyStateConfig::validate() const {
  if (!std::isfinite(T) || !(T > 0.0)) throw ConfigError("T must be positive");
  if (!std::isfinite(N) || N < 0.0) throw ConfigError("N must be non-negative");
  if (!std::isfinite(q22) || q22 < 0.0) throw ConfigError("q22 must be non-negative");
  if (!std::isfinite(Lambda) || Lambda < 0.0) throw ConfigError("Lambda must be non-negative");
  if (N > 0.0) {
    const double derived = q22 * T * T / N;
    if (std::abs(derived - rho) > 1e-9 * std::max(std::abs(derived), std::abs(rho))) {
      throw ConfigError("rho is inconsistent with q22*T^2/N");
    }
  }
}

Matrix2 transition_matrix(double T) {
  Matrix2 phi;
  phi << 1.0, T, 0.0, 1.0;
  return phi;
}

Matrix2 closed_loop_matrix(const SteadyStateGains& g, double T) {
  Matrix2 f;
  f << 1.0 - g.alpha, (1.0 - g.alpha) * T,
       -g.beta / T, 1.0 - g.beta;
  return f;
}

Matrix2 gain_complement(const SteadyStateGains& g, double T) {
  Matrix2 l;
  l << 1.0 - g.alpha, 0.0,
       -g.beta / T, 1.0;
  return l;
}

std::array<std::complex<double>, 2> fbar_eigenvalues(const SteadyStateGains& g) {
  const double a = g.alpha, b = g.beta;
  const double centre = 1.0 - 0.5 * (a + b);
  const std::complex<double> root = std::sqrt(std::complex<double>(2 * a * b - 4 * b + a * a + b * b, 0.0));
  return {centre + 0.5 * root, centre - 0.5 * root};
}

double gain_polynomial(double a, double b, double rho) {
  const double b2 = b * b;
  return 2.0 * b2 * b2 + (4.0 * a - 8.0) * b2 * b +
         rho * ((a * a - 2.0 * a + 2.0) * b2 + (3.0 * a * a * a - 10.0 * a * a + 12.0 * a - 8.0) * b +
                (2.0 * a * a * a * a - 8.0 * a * a * a + 8.0 * a * a));
}

double gain_cubic(double a, double b, double rho) {
  return 2.0 * b * b * b + rho * ((a * a - 2.0 * a + 2.0) * b + a * a * (a - 2.0));
}

std::vector<double> real_cubic_roots(double a3, double a2, double a1, double a0) {
  if (a3 == 0.0 || !std::isfinite(a3)) {
    throw std::invalid_argument("real_cubic_roots: leading coefficient must be nonzero");
  }
  const double b = a2 / a3, c = a1 / a3, d = a0 / a3;
  // Depressed form t³ + p·t + q with x = t − b/3.
  const double shift = b / 3.0;
  const double p = c - b * b / 3.0;
  const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
  const double disc = q * q / 4.0 + p * p * p / 27.0;

  std::vector<double> roots;
  if (disc > 0.0) {
    const double sgn = q < 0.0 ? -1.0 : 1.0;
    const double u = -sgn * std::cbrt(std::abs(q) / 2.0 + std::sqrt(disc));
    roots.push_back((u != 0.0 ? u - p / (3.0 * u) : 0.0) - shift);
  } else if (disc == 0.0) {
    const double u = std::cbrt(-q / 2.0);
    roots.push_back(2.0 * u - shift);
    if (u != 0.0) roots.push_back(-u - shift);
  } else {
    const double r = std::sqrt(-p / 3.0);
    const double phi = std::acos(std::clamp(-q / (2.0 * r * r * r), -1.0, 1.0));
    for (int k = 0; k < 3; ++k) {
      roots.push_back(2.0 * r * std::cos((phi - 2.0 * M_PI * k) / 3.0) - shift);
    }
  }

  for (double& x : roots) {
    for (int it = 0; it < 2; ++it) {
      const double f = ((a3 * x + a2) * x + a1) * x + a0;
      const double df = (3.0 * a3 * x + 2.0 * a2) * x + a1;
      if (df == 0.0) break;
      const double step = f / df;
      if (!std::isfinite(step)) break;
      x -= step;
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

BetaSolution solve_beta(double alpha, double rho) {
  if (std::abs(alpha) <= kConditionTol) {
    throw std::invalid_argument("alpha = 0 violates condition 1 (alpha != 0)");
  }
  if (!std::isfinite(alpha) || !(alpha > 0.0 && alpha < 2.0)) {
    throw std::invalid_argument("alpha must lie in (0, 2)");
  }
  if (!std::isfinite(rho) || !(rho > 0.0)) throw std::invalid_argument("rho must be positive");

  BetaSolution out;
  out.excluded_root = 4.0 - 2.0 * alpha;
  out.cubic_real_roots = real_cubic_roots(2.0, 0.0, rho * (alpha * alpha - 2.0 * alpha + 2.0),
                                          rho * alpha * alpha * (alpha - 2.0));

  std::vector<double> admissible;
  std::ostringstream why;
  for (double b : out.cubic_real_roots) {
    const GainDiagnostics diag = validate_gains({alpha, b});
    if (diag.ok() && b > 0.0) {
      admissible.push_back(b);
      continue;
    }
    why << " root " << format_number(b) << " fails";
    const auto failed = diag.failures();
    for (std::size_t i = 0; i < failed.size(); ++i) why << (i ? "," : "") << ' ' << failed[i];
    if (failed.empty()) why << " beta > 0";
    why << ';';
  }
  if (admissible.size() != 1) {
    std::ostringstream msg;
    msg << "no valid root for alpha=" << format_number(alpha) << ", rho=" << format_number(rho);
    if (admissible.size() > 1) msg << ": " << admissible.size() << " admissible roots (ambiguous)";
    else msg << ':' << why.str();
    throw NoValidRoot(msg.str(), out.cubic_real_roots);
  }
  out.beta = admissible.front();
  return out;
}

Matrix2 steady_MN(const SteadyStateGains& g, double T, double N) {
  const double a = g.alpha, b = g.beta;
  const double den = a * (4.0 - 2.0 * a - b);
  if (!(std::abs(den) > kConditionTol)) {
    throw DegenerateDenominator("steady_MN: alpha*(4 - 2*alpha - beta) == 0");
  }
  Matrix2 m;
  m << 2 * a * a + 2 * b - 3 * a * b, b * (2 * a - b) / T,
       b * (2 * a - b) / T, 2 * b * b / (T * T);
  return (N / den) * m;
}

Matrix2 steady_MQ(const SteadyStateGains& g, double T, double q22) {
  require_conditions(g, "steady_MQ");
  const double a = g.alpha, b = g.beta;
  const double den = -4 * a * b + a * b * b + 2 * a * a * b;
  const double off = T * (-2 * a + b - a * b + 3 * a * a - a * a * a);
  Matrix2 m;
  m << T * T * (-2 + 5 * a - 4 * a * a + a * a * a), off,
       off, -2 * b + 2 * a * b - 2 * a * a + a * a * a;
  return (q22 / den) * m;
}

PredictedCovariances predicted_covariances(const SteadyStateGains& g, const SteadyStateConfig& cfg) {
  cfg.validate();
  require_conditions(g, "predicted_covariances");
  const double a = g.alpha, b = g.beta, T = cfg.T;

  PredictedCovariances out;
  out.Mbar_N = steady_MN(g, T, cfg.N);
  out.Mbar_Q = steady_MQ(g, T, cfg.q22);
  out.Mbar = out.Mbar_N + out.Mbar_Q;

  // Φ·M̄·Φᵀ + Q in closed form.
  const double nscale = cfg.N / (a * (4 - 2 * a - b));
  const double qscale = cfg.q22 / (-4 * a * b + a * b * b + 2 * a * a * b);
  Matrix2 mn_dot;
  mn_dot << 2 * a * a + 2 * b + a * b, b * (2 * a + b) / T,
            b * (2 * a + b) / T, 2 * b * b / (T * T);
  const double q_off = T * (-2 * a - b + a * b + a * a);
  Matrix2 mq_dot;
  mq_dot << T * T * (-2 + a), q_off,
            q_off, -2 * b + 2 * a * b - 2 * a * a + a * a * a;
  out.Mdot = nscale * mn_dot + qscale * mq_dot;
  out.Mdot(1, 1) += cfg.q22;

  out.Dbar = Vector2(-1.0, 0.0);
  out.Ddot = Vector2(a - 1.0, b / T);
  // Φ·D̄ = (−1, 0), so the bias adds Λ to the position variance only.
  out.Sdot = out.Mdot;
  out.Sdot(0, 0) += cfg.Lambda;
  out.S11dot = out.Sdot(0, 0);
  out.S21dot = out.Sdot(1, 0);
  return out;
}

std::vector<std::string> GainDiagnostics::failures() const {
  std::vector<std::string> out;
  if (!alpha_nonzero) out.emplace_back("condition 1 (alpha != 0)");
  if (!beta_nonzero) out.emplace_back("condition 2 (beta != 0)");
  if (!beta_not_excluded) out.emplace_back("condition 3 (beta != 4 - 2*alpha)");
  if (!stable) out.emplace_back("stability (|eig F| < 1)");
  if (!mn_positive_definite) out.emplace_back("M_N positive definite");
  if (!mq_positive_definite) out.emplace_back("M_Q positive definite");
  return out;
}

GainDiagnostics validate_gains(const SteadyStateGains& g, const SteadyStateConfig& cfg) {
  GainDiagnostics d;
  d.alpha_nonzero = std::isfinite(g.alpha) && std::abs(g.alpha) > kConditionTol;
  d.beta_nonzero = std::isfinite(g.beta) && std::abs(g.beta) > kConditionTol;
  d.beta_not_excluded = std::abs(g.beta - (4.0 - 2.0 * g.alpha)) > kExcludedRootTol;
  const auto eig = fbar_eigenvalues(g);
  d.eigenvalue_moduli = {std::abs(eig[0]), std::abs(eig[1])};
  d.stable = d.eigenvalue_moduli[0] < 1.0 && d.eigenvalue_moduli[1] < 1.0;
  if (d.conditions_hold()) {
    const double T = cfg.T > 0.0 ? cfg.T : 1.0;
    d.mn_positive_definite = positive_definite(steady_MN(g, T, 1.0));
    d.mq_positive_definite = positive_definite(steady_MQ(g, T, 1.0));
  }
  return d;
}

double gain_ratio_residual(const SteadyStateGains& g, const SteadyStateConfig& cfg) {
  const PredictedCovariances pc = predicted_covariances(g, cfg);
  const double lhs = g.alpha * pc.Sdot(0, 1) * cfg.T;
  const double rhs = g.beta * (pc.S11dot - cfg.Lambda);
  const double scale = std::abs(lhs) + std::abs(rhs);
  return scale > 0.0 ? (lhs - rhs) / scale : 0.0;
}

GainSweepRow gain_row(double rho, double alpha, double T, double N, double Lambda) {
  GainSweepRow row;
  row.rho = rho;
  row.alpha = alpha;
  row.excluded_root = 4.0 - 2.0 * alpha;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    const BetaSolution sol = solve_beta(alpha, rho);
    const SteadyStateGains g{alpha, sol.beta};
    const auto cfg = SteadyStateConfig::make(T, N, std::nullopt, rho, Lambda);
    const auto diag = validate_gains(g, cfg);
    const auto pc = predicted_covariances(g, cfg);
    row.beta = sol.beta;
    row.eig1_mod = diag.eigenvalue_moduli[0];
    row.eig2_mod = diag.eigenvalue_moduli[1];
    row.S11dot = pc.S11dot;
    row.S21dot = pc.S21dot;
  } catch (const std::exception& e) {
    row.beta = row.eig1_mod = row.eig2_mod = row.S11dot = row.S21dot = nan;
    row.error = e.what();
  }
  return row;
}

std::vector<GainSweepRow> gain_sweep(const std::vector<double>& rhos,
                                     const std::vector<double>& alphas, double T, double N,
                                     double Lambda) {
  std::vector<GainSweepRow> rows;
  rows.reserve(rhos.size() * alphas.size());
  for (double rho : rhos) {
    for (double alpha : alphas) rows.push_back(gain_row(rho, alpha, T, N, Lambda));
  }
  return rows;
}

void write_gain_sweep_csv(std::ostream& out, const std::vector<GainSweepRow>& rows) {
  out << kGainSweepHeader << ",excluded_root\n";
  for (const auto& r : rows) {
    out << format_number(r.rho) << ',' << format_number(r.alpha) << ',' << format_number(r.beta)
        << ',' << format_number(r.eig1_mod) << ',' << format_number(r.eig2_mod) << ','
        << format_number(r.S11dot) << ',' << format_number(r.S21dot) << ','
        << format_number(r.excluded_root) << '\n';
  }
}

}  // namespace radarbias
