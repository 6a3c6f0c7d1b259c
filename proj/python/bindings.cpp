#include "radarbias/coords.hpp"
#include "radarbias/errors.hpp"
#include "radarbias/filter_core.hpp"
#include "radarbias/registration.hpp"
#include "radarbias/sim_harness.hpp"
#include "radarbias/steady_state.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
namespace rb = radarbias;

namespace {

py::tuple triple(const rb::SphericalTriple& s) { return py::make_tuple(s.r, s.psi, s.theta); }

rb::SensorGeometry geometry(const py::sequence& s) {
  if (py::len(s) != 3) throw py::value_error("sensor geometry is (range, psi, theta)");
  return {s[0].cast<double>(), s[1].cast<double>(), s[2].cast<double>()};
}

rb::GeodeticSite site(const py::sequence& s) {
  if (py::len(s) != 2) throw py::value_error("site is (longitude, latitude)");
  return {s[0].cast<double>(), s[1].cast<double>()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Radar bias registration and bias-aware alpha-beta filter design";

  auto base = py::register_exception<rb::Error>(m, "DomainError", PyExc_ArithmeticError);
  py::register_exception<rb::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<rb::SingularGeometry>(m, "SingularGeometry", base.ptr());
  py::register_exception<rb::SingularSystem>(m, "SingularSystem", base.ptr());
  py::register_exception<rb::NoValidRoot>(m, "NoValidRoot", base.ptr());
  py::register_exception<rb::InvalidGains>(m, "InvalidGains", base.ptr());
  py::register_exception<rb::DegenerateDenominator>(m, "DegenerateDenominator", base.ptr());

  // coords
  m.def("spherical_to_cartesian", [](double r, double psi, double theta) {
    return rb::spherical_to_cartesian({r, psi, theta});
  }, py::arg("r"), py::arg("psi"), py::arg("theta"));
  m.def("cartesian_to_spherical", [](const rb::Vector3& p) {
    const auto c = rb::cartesian_to_spherical(p);
    return py::make_tuple(triple(c.point), c.pole_ambiguous);
  }, py::arg("p"), "Returns ((r, psi, theta), pole_ambiguous).");
  m.def("enu_to_face", [](double psi, double theta) { return rb::enu_to_face(psi, theta).matrix(); });
  m.def("face_to_enu", [](double psi, double theta) { return rb::face_to_enu(psi, theta).matrix(); });
  m.def("eci_to_enu", [](const py::sequence& s) { return rb::eci_to_enu(site(s)).matrix(); },
        py::arg("site"));
  m.def("enu1_to_enu2", [](const py::sequence& a, const py::sequence& b) {
    return rb::enu1_to_enu2(site(a), site(b)).matrix();
  }, py::arg("site1"), py::arg("site2"));
  m.def("site_position_eci", [](const py::sequence& s, double r_ee, double e) {
    return rb::site_position_eci(site(s), {r_ee, e});
  }, py::arg("site"), py::arg("equatorial_radius") = 6378137.0, py::arg("eccentricity") = 0.0818191908426);
  m.def("enu1_to_enu2_position", [](const rb::Vector3& p, const py::sequence& a, const py::sequence& b) {
    return rb::enu1_to_enu2_position(p, site(a), site(b));
  }, py::arg("p"), py::arg("site1"), py::arg("site2"));

  // registration
  m.def("build_A", [](const py::sequence& g) { return rb::build_A(geometry(g)); }, py::arg("geometry"));
  m.def("solve_absolute_bias",
        [](const rb::Vector3& relative_bias, const py::sequence& g1, const py::sequence& g2,
           const std::vector<double>& weights) {
          rb::RegistrationProblem p;
          p.relative_bias = relative_bias;
          p.geom1 = geometry(g1);
          p.geom2 = geometry(g2);
          if (!weights.empty()) {
            if (weights.size() != 6) throw py::value_error("weights are six squared coefficients");
            p.weights = {weights[0], weights[1], weights[2], weights[3], weights[4], weights[5]};
          }
          const auto s = rb::solve_absolute_bias(p);
          py::dict out;
          out["bias1"] = triple(s.bias1);
          out["bias2"] = triple(s.bias2);
          out["cost"] = s.cost;
          out["unit_weight_cost"] = s.unit_weight_cost;
          out["multipliers"] = s.multipliers;
          out["constraint_residual"] = s.constraint_residual;
          out["kkt_residual"] = s.kkt_residual;
          return out;
        },
        py::arg("relative_bias"), py::arg("geometry1"), py::arg("geometry2"),
        py::arg("weights") = std::vector<double>{},
        "Weights order: k_r1_sq, k_psi1_sq, k_theta1_sq, k_r2_sq, k_psi2_sq, k_theta2_sq.");

  // steady_state
  m.def("solve_beta", [](double alpha, double rho) { return rb::solve_beta(alpha, rho).beta; },
        py::arg("alpha"), py::arg("rho"));
  m.def("gain_polynomial", &rb::gain_polynomial, py::arg("alpha"), py::arg("beta"), py::arg("rho"));
  m.def("validate_gains", [](double alpha, double beta) {
    const auto d = rb::validate_gains({alpha, beta});
    py::dict out;
    out["ok"] = d.ok();
    out["failures"] = d.failures();
    out["eigenvalue_moduli"] = d.eigenvalue_moduli;
    return out;
  }, py::arg("alpha"), py::arg("beta"));
  m.def("predicted_covariances",
        [](double alpha, double beta, double T, double N, double q22, double Lambda) {
          const auto cfg = rb::SteadyStateConfig::make(T, N, q22, std::nullopt, Lambda);
          const auto pc = rb::predicted_covariances({alpha, beta}, cfg);
          py::dict out;
          out["Mbar_N"] = pc.Mbar_N;
          out["Mbar_Q"] = pc.Mbar_Q;
          out["Mbar"] = pc.Mbar;
          out["Mdot"] = pc.Mdot;
          out["Sdot"] = pc.Sdot;
          return out;
        },
        py::arg("alpha"), py::arg("beta"), py::arg("T") = 1.0, py::arg("N") = 1.0,
        py::arg("q22") = 0.0, py::arg("Lambda") = 0.0);

  // sim_harness
  m.def("run_monte_carlo",
        [](double alpha, double beta, double T, double N, double q22, double Lambda,
           std::size_t n_runs, std::size_t n_steps, std::uint64_t seed) {
          rb::SimScenario s;
          s.config = rb::SteadyStateConfig::make(T, N, q22, std::nullopt, Lambda);
          s.gains = {alpha, beta};
          s.n_runs = n_runs;
          s.n_steps = n_steps;
          s.master_seed = seed;
          rb::SimReport r;
          {
            py::gil_scoped_release release;
            r = rb::run_monte_carlo(s);
          }
          py::dict out;
          out["empirical_S"] = r.empirical_S;
          out["predicted_S"] = r.predicted_S;
          out["relative_errors"] = r.relative_errors;
          out["samples"] = r.samples;
          return out;
        },
        py::arg("alpha"), py::arg("beta"), py::arg("T") = 1.0, py::arg("N") = 1.0,
        py::arg("q22") = 0.0, py::arg("Lambda") = 0.0, py::arg("n_runs") = 1000,
        py::arg("n_steps") = 200, py::arg("seed") = 0);

  // filter_core: fixed- or optimal-gain run of the alpha-beta model on given measurements
  m.def("run_alpha_beta_filter",
        [](const std::vector<double>& z, double T, double N, double q22, double Lambda,
           std::optional<std::pair<double, double>> fixed_gains) {
          const auto cfg = rb::SteadyStateConfig::make(T, N, q22, std::nullopt, Lambda);
          const auto model = rb::BiasFilterModel::alpha_beta(cfg);
          auto state = rb::FilterState::initial(model, Eigen::Vector2d::Zero());
          Eigen::MatrixXd estimates(static_cast<Eigen::Index>(z.size()), 2);
          Eigen::MatrixXd gains(static_cast<Eigen::Index>(z.size()), 2);
          for (std::size_t k = 0; k < z.size(); ++k) {
            state = rb::time_update(model, state);
            if (fixed_gains) {
              state.K = Eigen::Vector2d(fixed_gains->first, fixed_gains->second / T);
            } else {
              state.K = rb::optimal_gain(model, state);
            }
            state = rb::measurement_update(model, state, Eigen::VectorXd::Constant(1, z[k]));
            const auto row = static_cast<Eigen::Index>(k);
            estimates.row(row) = state.x_hat.transpose();
            gains.row(row) = state.K.transpose();
          }
          py::dict out;
          out["estimates"] = estimates;
          out["gains"] = gains;
          out["S"] = state.S;
          out["M"] = state.M;
          return out;
        },
        py::arg("z"), py::arg("T") = 1.0, py::arg("N") = 1.0, py::arg("q22") = 0.0,
        py::arg("Lambda") = 0.0, py::arg("fixed_gains") = py::none());
}
