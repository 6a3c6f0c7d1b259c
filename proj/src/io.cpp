#include "radarbias/io.hpp"

#include "radarbias/errors.hpp"
#include "radarbias/format.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

namespace radarbias::io {

namespace {

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& item : obj.items()) {
    if (!keys.count(item.key())) throw ConfigError("unknown field: " + where + item.key());
  }
}

double number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError("missing field: " + where + key);
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("field must be a number: " + where + key);
  return v.get<double>();
}

double number_or(const json& obj, const std::string& key, const std::string& where, double fallback) {
  return obj.contains(key) ? number(obj, key, where) : fallback;
}

std::optional<double> optional_number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) return std::nullopt;
  return number(obj, key, where);
}

std::uint64_t count(const json& obj, const std::string& key, const std::string& where,
                    std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw ConfigError("field must be a non-negative integer: " + where + key);
  }
  return v.get<std::uint64_t>();
}

template <int Size>
Eigen::Matrix<double, Size, 1> fixed_vector(const json& obj, const std::string& key,
                                            const std::string& where) {
  if (!obj.contains(key)) throw ConfigError("missing field: " + where + key);
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != Size) {
    throw ConfigError("field must be an array of " + std::to_string(Size) + " numbers: " + where + key);
  }
  Eigen::Matrix<double, Size, 1> out;
  for (int i = 0; i < Size; ++i) {
    if (!v[i].is_number()) throw ConfigError("field must contain numbers: " + where + key);
    out(i) = v[i].get<double>();
  }
  return out;
}

SensorGeometry parse_sensor(const json& doc, const std::string& key) {
  if (!doc.contains(key)) throw ConfigError("missing field: " + key);
  const json& s = doc.at(key);
  const std::string where = key + ".";
  reject_unknown(s, where, {"range", "azimuth", "elevation"});
  return {number(s, "range", where), number(s, "azimuth", where), number(s, "elevation", where)};
}

json r6(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round6(v);
}

json spherical(const SphericalTriple& s) {
  return {{"range", r6(s.r)}, {"azimuth", r6(s.psi)}, {"elevation", r6(s.theta)}};
}

json matrix2(const Matrix2& m) {
  return json::array({json::array({r6(m(0, 0)), r6(m(0, 1))}), json::array({r6(m(1, 0)), r6(m(1, 1))})});
}

}  // namespace

RegistrationProblem parse_registration_problem(const json& doc) {
  reject_unknown(doc, "", {"relative_bias", "sensor1", "sensor2", "weights"});
  RegistrationProblem p;
  p.relative_bias = fixed_vector<3>(doc, "relative_bias", "");
  p.geom1 = parse_sensor(doc, "sensor1");
  p.geom2 = parse_sensor(doc, "sensor2");
  if (doc.contains("weights")) {
    const json& w = doc.at("weights");
    const std::string where = "weights.";
    reject_unknown(w, where, {"k_r1_sq", "k_psi1_sq", "k_theta1_sq", "k_r2_sq", "k_psi2_sq", "k_theta2_sq"});
    p.weights.k_r1_sq = number_or(w, "k_r1_sq", where, 1.0);
    p.weights.k_psi1_sq = number_or(w, "k_psi1_sq", where, 1.0);
    p.weights.k_theta1_sq = number_or(w, "k_theta1_sq", where, 1.0);
    p.weights.k_r2_sq = number_or(w, "k_r2_sq", where, 1.0);
    p.weights.k_psi2_sq = number_or(w, "k_psi2_sq", where, 1.0);
    p.weights.k_theta2_sq = number_or(w, "k_theta2_sq", where, 1.0);
  }
  p.weights.validate();
  return p;
}

SimScenario parse_sim_scenario(const json& doc) {
  reject_unknown(doc, "", {"T", "N", "q22", "rho", "Lambda", "alpha", "beta", "n_runs", "n_steps",
                           "seed", "initial_state", "lambda_mean", "burn_in", "threads"});
  SimScenario s;
  s.config = SteadyStateConfig::make(number_or(doc, "T", "", 1.0), number_or(doc, "N", "", 1.0),
                                     optional_number(doc, "q22", ""), optional_number(doc, "rho", ""),
                                     number_or(doc, "Lambda", "", 0.0));
  s.gains.alpha = number(doc, "alpha", "");
  if (auto beta = optional_number(doc, "beta", "")) {
    s.gains.beta = *beta;
  } else {
    s.gains.beta = solve_beta(s.gains.alpha, s.config.rho).beta;
  }
  s.n_runs = count(doc, "n_runs", "", 1000);
  s.n_steps = count(doc, "n_steps", "", 200);
  s.master_seed = count(doc, "seed", "", 0);
  if (doc.contains("initial_state")) s.initial_state = fixed_vector<2>(doc, "initial_state", "");
  s.lambda_mean = number_or(doc, "lambda_mean", "", 0.0);
  if (doc.contains("burn_in")) s.burn_in = count(doc, "burn_in", "", 0);
  s.threads = static_cast<unsigned>(count(doc, "threads", "", 0));
  s.validate();
  return s;
}

json read_document(const std::string& path) {
  try {
    if (path == "-") {
      std::ostringstream text;
      text << std::cin.rdbuf();
      return json::parse(text.str());
    }
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

json to_json(const RegistrationSolution& sol) {
  return {{"bias1", spherical(sol.bias1)},
          {"bias2", spherical(sol.bias2)},
          {"cost", r6(sol.cost)},
          {"unit_weight_cost", r6(sol.unit_weight_cost)},
          {"multipliers", {r6(sol.multipliers(0)), r6(sol.multipliers(1)), r6(sol.multipliers(2))}},
          {"constraint_residual", r6(sol.constraint_residual)},
          {"kkt_residual", r6(sol.kkt_residual)}};
}

json to_json(const SimReport& report, bool include_seeds) {
  json out = {{"empirical_S", matrix2(report.empirical_S)},
              {"predicted_S", matrix2(report.predicted_S)},
              {"relative_errors", matrix2(report.relative_errors)},
              {"samples", report.samples},
              {"burn_in", report.burn_in},
              {"wall_time_s", r6(report.wall_time_s)}};
  if (include_seeds) out["run_seeds"] = report.run_seeds;
  return out;
}

json to_json(const GainSweepRow& row) {
  json out = {{"rho", r6(row.rho)},           {"alpha", r6(row.alpha)},
              {"beta", r6(row.beta)},         {"eig1_mod", r6(row.eig1_mod)},
              {"eig2_mod", r6(row.eig2_mod)}, {"S11dot", r6(row.S11dot)},
              {"S21dot", r6(row.S21dot)},     {"excluded_root", r6(row.excluded_root)}};
  if (!row.error.empty()) out["error"] = row.error;
  return out;
}

}  // namespace radarbias::io
