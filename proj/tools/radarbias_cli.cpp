// radarbias command-line front end: register, gains, simulate, transform.
//
// Exit codes: 0 success, 2 domain error, 3 input error.

#include "radarbias/coords.hpp"
#include "radarbias/errors.hpp"
#include "radarbias/format.hpp"
#include "radarbias/io.hpp"
#include "radarbias/registration.hpp"
#include "radarbias/sim_harness.hpp"
#include "radarbias/steady_state.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace rb = radarbias;
using rb::io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 2;
constexpr int kExitInput = 3;

struct Options {
  std::string output;
  std::string format;
  std::optional<std::uint64_t> seed;
};

void emit(const Options& opt, const std::string& text) {
  if (opt.output.empty() || opt.output == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(opt.output);
  if (!out) throw rb::ConfigError("cannot write output: " + opt.output);
  out << text;
}

std::string format_or(const Options& opt, const char* fallback) {
  return opt.format.empty() ? fallback : opt.format;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw rb::ConfigError("bad number in " + what + ": '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<double> parse_fixed(const std::string& text, std::size_t n, const std::string& what) {
  auto v = parse_list(text, what);
  if (v.size() != n) {
    throw rb::ConfigError(what + " needs " + std::to_string(n) + " comma-separated numbers");
  }
  return v;
}

// One axis of a grid: "2,4,6" or "start:stop:step" (inclusive of stop).
std::vector<double> parse_axis(const std::string& text, const std::string& name) {
  if (text.find(':') == std::string::npos) return parse_list(text, name);
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(parse_fixed(item, 1, name)[0]);
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
    throw rb::ConfigError("grid range for " + name + " must be start:stop:step with step > 0");
  }
  std::vector<double> out;
  const auto steps = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
  for (long i = 0; i <= steps; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[2]);
  return out;
}

std::map<std::string, std::vector<double>> parse_grid(const std::string& text) {
  std::map<std::string, std::vector<double>> axes;
  std::stringstream ss(text);
  std::string clause;
  while (std::getline(ss, clause, ';')) {
    const auto eq = clause.find('=');
    if (eq == std::string::npos) throw rb::ConfigError("grid clause needs name=values: '" + clause + "'");
    const std::string name = clause.substr(0, eq);
    if (name != "rho" && name != "alpha") throw rb::ConfigError("unknown grid axis: " + name);
    axes[name] = parse_axis(clause.substr(eq + 1), name);
  }
  if (!axes.count("rho") || !axes.count("alpha")) {
    throw rb::ConfigError("grid needs both rho and alpha axes");
  }
  return axes;
}

int cmd_register(const Options& opt, const std::string& config) {
  const rb::RegistrationProblem problem = rb::io::parse_registration_problem(rb::io::read_document(config));
  const rb::RegistrationSolution sol = rb::solve_absolute_bias(problem);
  const std::string fmt = format_or(opt, "json");
  if (fmt == "csv") {
    std::ostringstream out;
    out << "dr1,dpsi1,dtheta1,dr2,dpsi2,dtheta2,cost,unit_weight_cost,a1,a2,a3,constraint_residual,"
           "kkt_residual\n";
    const double vals[] = {sol.bias1.r, sol.bias1.psi, sol.bias1.theta, sol.bias2.r,
                           sol.bias2.psi, sol.bias2.theta, sol.cost, sol.unit_weight_cost,
                           sol.multipliers(0), sol.multipliers(1), sol.multipliers(2),
                           sol.constraint_residual, sol.kkt_residual};
    for (std::size_t i = 0; i < std::size(vals); ++i) out << (i ? "," : "") << rb::format_number(vals[i]);
    out << '\n';
    emit(opt, out.str());
  } else {
    emit(opt, rb::io::to_json(sol).dump(2) + "\n");
  }
  return kExitOk;
}

struct GainArgs {
  std::optional<double> rho;
  std::optional<double> alpha;
  std::string grid;
  double T = 1.0;
  double N = 1.0;
  double Lambda = 0.0;
};

int cmd_gains(const Options& opt, const GainArgs& args) {
  std::vector<double> rhos, alphas;
  if (!args.grid.empty()) {
    if (args.rho || args.alpha) throw rb::ConfigError("--grid excludes --rho/--alpha");
    auto axes = parse_grid(args.grid);
    rhos = axes["rho"];
    alphas = axes["alpha"];
  } else {
    if (!args.rho || !args.alpha) throw rb::ConfigError("gains needs --rho and --alpha, or --grid");
    rhos = {*args.rho};
    alphas = {*args.alpha};
  }
  const auto rows = rb::gain_sweep(rhos, alphas, args.T, args.N, args.Lambda);

  std::ostringstream out;
  if (format_or(opt, "csv") == "json") {
    json doc = json::array();
    for (const auto& r : rows) doc.push_back(rb::io::to_json(r));
    out << doc.dump(2) << '\n';
  } else {
    rb::write_gain_sweep_csv(out, rows);
  }
  emit(opt, out.str());

  int code = kExitOk;
  for (const auto& r : rows) {
    if (r.error.empty()) continue;
    std::cerr << "rho=" << rb::format_number(r.rho) << " alpha=" << rb::format_number(r.alpha)
              << ": " << r.error << '\n';
    code = kExitDomain;
  }
  return code;
}

struct SimArgs {
  std::string config;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> steps;
  bool omit_seeds = false;
};

int cmd_simulate(const Options& opt, const SimArgs& args) {
  rb::SimScenario s = rb::io::parse_sim_scenario(rb::io::read_document(args.config));
  if (opt.seed) s.master_seed = *opt.seed;
  if (args.runs) s.n_runs = *args.runs;
  if (args.steps) s.n_steps = *args.steps;
  s.validate();
  const rb::SimReport report = rb::run_monte_carlo(s);
  if (format_or(opt, "json") == "csv") {
    std::ostringstream out;
    rb::write_sim_report_csv(out, report);
    emit(opt, out.str());
  } else {
    emit(opt, rb::io::to_json(report, !args.omit_seeds).dump(2) + "\n");
  }
  return kExitOk;
}

struct TransformArgs {
  std::string from;
  std::string to;
  std::string point;
  std::string site1 = "0,0";
  std::string site2 = "0,0";
  std::string face = "0,0";
  int face_site = 1;
  bool velocity = false;
  int digits = 6;
  double earth_radius = rb::EarthModel{}.equatorial_radius;
  double eccentricity = rb::EarthModel{}.eccentricity;
};

rb::GeodeticSite parse_site(const std::string& text, const std::string& what) {
  const auto v = parse_fixed(text, 2, what);
  return {v[0], v[1]};
}

// Rigid frames share the ECI hub; FACE hangs off one site's ENU by rotation.
bool is_rigid(const std::string& f) { return f == "enu1" || f == "enu2" || f == "eci" || f == "face"; }

int cmd_transform(const Options& opt, const TransformArgs& a) {
  static const char* frames[] = {"spherical", "cartesian", "enu1", "enu2", "eci", "face"};
  auto known = [](const std::string& f) {
    for (const char* k : frames) if (f == k) return true;
    return false;
  };
  if (!known(a.from) || !known(a.to)) throw rb::ConfigError("unknown frame: " + (known(a.from) ? a.to : a.from));

  const auto p = parse_fixed(a.point, 3, "--point");
  const rb::Vector3 in(p[0], p[1], p[2]);
  const rb::GeodeticSite s1 = parse_site(a.site1, "--site1");
  const rb::GeodeticSite s2 = parse_site(a.site2, "--site2");
  const auto face = parse_fixed(a.face, 2, "--face");
  const rb::EarthModel earth{a.earth_radius, a.eccentricity};
  try {
    earth.validate();
  } catch (const std::invalid_argument& e) {
    throw rb::ConfigError(e.what());
  }
  if (a.face_site != 1 && a.face_site != 2) throw rb::ConfigError("--face-site must be 1 or 2");
  const std::string face_enu = a.face_site == 1 ? "enu1" : "enu2";

  rb::Vector3 out;
  bool pole = false;
  if (a.from == a.to) {
    out = in;
  } else if (a.from == "spherical" && a.to == "cartesian") {
    out = rb::spherical_to_cartesian({in(0), in(1), in(2)});
  } else if (a.from == "cartesian" && a.to == "spherical") {
    const auto conv = rb::cartesian_to_spherical(in);
    out = {conv.point.r, conv.point.psi, conv.point.theta};
    pole = conv.pole_ambiguous;
  } else if (is_rigid(a.from) && is_rigid(a.to)) {
    auto site_of = [&](const std::string& f) { return f == "enu1" ? s1 : s2; };
    rb::Vector3 v = in;
    std::string frame = a.from;
    if (frame == "face") {
      v = rb::face_to_enu(face[0], face[1]) * v;
      frame = face_enu;
    }
    const std::string target = a.to == "face" ? face_enu : a.to;
    if (frame != target) {
      if (frame == "enu1" && target == "enu2") {
        v = a.velocity ? rb::enu1_to_enu2_velocity(v, s1, s2) : rb::enu1_to_enu2_position(v, s1, s2, earth);
      } else if (frame == "enu2" && target == "enu1") {
        v = a.velocity ? rb::enu1_to_enu2_velocity(v, s2, s1) : rb::enu1_to_enu2_position(v, s2, s1, earth);
      } else if (frame == "eci") {
        v = a.velocity ? rb::eci_to_enu(site_of(target)) * v : rb::eci_to_enu_position(v, site_of(target), earth);
      } else {
        v = a.velocity ? rb::eci_to_enu(site_of(frame)).transpose() * v
                       : rb::enu_to_eci_position(v, site_of(frame), earth);
      }
    }
    if (a.to == "face") v = rb::enu_to_face(face[0], face[1]) * v;
    out = v;
  } else {
    throw rb::ConfigError("unsupported frame pair: " + a.from + " -> " + a.to);
  }

  const bool spherical_out = a.to == "spherical";
  if (format_or(opt, "json") == "csv") {
    std::ostringstream csv;
    csv << (spherical_out ? "r,psi,theta" : "x,y,z") << '\n'
        << rb::format_number(out(0), a.digits) << ',' << rb::format_number(out(1), a.digits) << ','
        << rb::format_number(out(2), a.digits) << '\n';
    emit(opt, csv.str());
  } else {
    json doc = {{"from", a.from},
                {"to", a.to},
                {"velocity", a.velocity},
                {"point", {rb::round_digits(out(0), a.digits), rb::round_digits(out(1), a.digits),
                           rb::round_digits(out(2), a.digits)}}};
    if (spherical_out) doc["pole_ambiguous"] = pole;
    emit(opt, doc.dump(2) + "\n");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radar bias registration and bias-aware alpha-beta filter design"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--output,-o", opt.output, "Write the result to PATH instead of stdout");
  app.add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", opt.seed, "Master seed for Monte-Carlo runs");

  std::string register_config;
  auto* reg = app.add_subcommand("register", "Absolute biases from a relative bias");
  reg->add_option("config", register_config, "JSON config path, or - for stdin")->required();

  GainArgs gains;
  auto* gain = app.add_subcommand("gains", "Steady-state alpha-beta gains for given noise ratios");
  gain->add_option("--rho", gains.rho, "Noise ratio q22*T^2/N");
  gain->add_option("--alpha", gains.alpha, "Position gain");
  gain->add_option("--grid", gains.grid, "Grid, e.g. \"rho=2,4,6;alpha=0.2:0.4:0.1\"");
  gain->add_option("--T", gains.T, "Sample period, s");
  gain->add_option("--N", gains.N, "Measurement-noise variance");
  gain->add_option("--Lambda", gains.Lambda, "Bias variance");

  SimArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo check of the predicted covariance");
  simulate->add_option("config", sim.config, "JSON scenario path, or - for stdin")->required();
  simulate->add_option("--runs", sim.runs, "Override n_runs");
  simulate->add_option("--steps", sim.steps, "Override n_steps");
  simulate->add_flag("--omit-seeds", sim.omit_seeds, "Leave per-run seeds out of the JSON report");

  TransformArgs tr;
  auto* transform = app.add_subcommand("transform", "Convert a point between frames");
  transform->add_option("--from", tr.from, "spherical|cartesian|enu1|enu2|eci|face")->required();
  transform->add_option("--to", tr.to, "spherical|cartesian|enu1|enu2|eci|face")->required();
  transform->add_option("--point", tr.point, "x,y,z (or r,psi,theta)")->required();
  transform->add_option("--site1", tr.site1, "Site 1 longitude,latitude in radians");
  transform->add_option("--site2", tr.site2, "Site 2 longitude,latitude in radians");
  transform->add_option("--face", tr.face, "Radar face psi,theta in radians");
  transform->add_option("--face-site", tr.face_site, "Site whose ENU frame carries the face");
  transform->add_flag("--velocity", tr.velocity, "Transform a velocity (rotation only)");
  transform->add_option("--digits", tr.digits, "Significant digits in the output (17 round-trips doubles)")
      ->check(CLI::Range(1, 17));
  transform->add_option("--earth-radius", tr.earth_radius, "Equatorial radius, m");
  transform->add_option("--eccentricity", tr.eccentricity, "Ellipsoid eccentricity");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*reg) return cmd_register(opt, register_config);
    if (*gain) return cmd_gains(opt, gains);
    if (*simulate) return cmd_simulate(opt, sim);
    if (*transform) return cmd_transform(opt, tr);
  } catch (const rb::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const rb::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitInput;
}
