#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "mixsim/bounds.hpp"
#include "mixsim/decay.hpp"
#include "mixsim/doeblin.hpp"
#include "mixsim/experiments.hpp"
#include "mixsim/infinite_memory.hpp"
#include "mixsim/mixing.hpp"
#include "mixsim/stochastic_matrix.hpp"

namespace py = pybind11;
using namespace mixsim;

namespace {

Tail make_tail(const std::string& kind, double coef, double ratio, double exponent) {
  if (kind == "none") return Tail::none();
  if (kind == "zero") return Tail::zero();
  if (kind == "geometric") return Tail::geometric(coef, ratio);
  if (kind == "power") return Tail::power(coef, exponent);
  throw ConfigError("unknown tail kind \"" + kind + "\" (need none/zero/geometric/power)");
}

py::dict to_dict(const BoundResult& r) {
  py::dict d;
  d["raw"] = r.raw;
  d["bound"] = r.bound;
  d["leading"] = r.leading;
  d["series"] = r.series;
  d["tail_remainder"] = r.tail_remainder;
  d["cap_used"] = r.cap_used;
  return d;
}

py::dict to_dict(const RunReport& rep) {
  py::dict d;
  d["experiment"] = rep.experiment;
  d["config_hash"] = rep.config_hash;
  py::list verdicts;
  for (const auto& v : rep.verdicts) {
    py::dict e;
    e["name"] = v.name;
    e["pass"] = v.pass;
    e["detail"] = v.detail;
    verdicts.append(e);
  }
  d["verdicts"] = verdicts;
  py::dict metrics;
  for (const auto& [k, v] : rep.metrics) metrics[py::str(k)] = v;
  d["metrics"] = metrics;
  d["artifacts"] = rep.artifacts;
  d["wall_seconds"] = rep.wall_seconds;
  d["all_pass"] = rep.all_pass();
  return d;
}

std::vector<std::vector<double>> matrix_rows(const StochasticMatrix& m) {
  std::vector<std::vector<double>> rows;
  rows.reserve(std::size_t(m.size()));
  for (int i = 0; i < m.size(); ++i) rows.push_back(m.row(i));
  return rows;
}

}  // namespace

PYBIND11_MODULE(_mixsim, m) {
  m.doc() = "Simulation and verification toolkit for strong-mixing bounds of "
            "discrete-valued time series with exogenous covariates.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<DecaySequence>(m, "DecaySequence",
                            "Nonnegative sequence given by an explicit table plus a declared "
                            "analytic tail (none/zero/geometric/power).")
      .def_static(
          "from_values",
          [](std::vector<double> values, const std::string& tail, double coef, double ratio,
             double exponent, int first_index) {
            return DecaySequence::from_values(std::move(values),
                                              make_tail(tail, coef, ratio, exponent), first_index);
          },
          py::arg("values"), py::arg("tail") = "zero", py::arg("coef") = 0.0,
          py::arg("ratio") = 0.0, py::arg("exponent") = 0.0, py::arg("first_index") = 0)
      .def_static("zeros", &DecaySequence::zeros, py::arg("first_index") = 0)
      .def_static("geometric", &DecaySequence::geometric, py::arg("coef"), py::arg("ratio"),
                  py::arg("first_index") = 0)
      .def("at", &DecaySequence::at, py::arg("i"))
      .def("tail_sum_from", &DecaySequence::tail_sum_from, py::arg("j"))
      .def("weighted_tail_sum_from", &DecaySequence::weighted_tail_sum_from, py::arg("j"))
      .def("summable", &DecaySequence::summable)
      .def_property_readonly("first_index", &DecaySequence::first_index)
      .def_property_readonly("table_end", &DecaySequence::table_end);

  m.def("tv_distance", &tv_distance, py::arg("mu"), py::arg("nu"),
        "Total variation distance between two probability vectors.");

  m.def(
      "stationary",
      [](const std::vector<std::vector<double>>& rows) {
        return StochasticMatrix::from_rows(rows).stationary();
      },
      py::arg("transition"), "Unique stationary distribution of a transition matrix.");

  m.def(
      "dobrushin_coefficient",
      [](const std::vector<std::vector<double>>& rows) {
        return StochasticMatrix::from_rows(rows).dobrushin_coefficient();
      },
      py::arg("transition"), "Max over row pairs of the total variation distance between rows.");

  m.def(
      "alpha_exact",
      [](const std::vector<std::vector<double>>& joint) {
        return alpha_exact(JointDistribution::from_matrix(joint));
      },
      py::arg("joint"),
      "Exact strong mixing coefficient of a finite joint law (row = first coordinate).");

  m.def(
      "alpha_markov_exact",
      [](const std::vector<double>& pi, const std::vector<std::vector<double>>& rows, int n) {
        return alpha_markov_exact(pi, StochasticMatrix::from_rows(rows), n);
      },
      py::arg("pi"), py::arg("transition"), py::arg("n"),
      "Exact lag-n alpha coefficient of a stationary finite Markov chain.");

  m.def(
      "markov_alpha_envelope",
      [](const std::vector<double>& pi, const std::vector<std::vector<double>>& rows,
         int table_len) {
        return markov_alpha_envelope(pi, StochasticMatrix::from_rows(rows), table_len);
      },
      py::arg("pi"), py::arg("transition"), py::arg("table_len") = 32,
      "Certified geometric-tail envelope of the alpha sequence of a finite Markov chain.");

  m.def(
      "doeblin_decompose",
      [](const std::vector<std::vector<double>>& rows) {
        auto parts = doeblin_decompose(StochasticMatrix::from_rows(rows));
        py::dict d;
        d["eta"] = parts.eta;
        d["nu_defined"] = parts.nu_defined;
        d["residual_used"] = parts.residual_used;
        if (parts.nu_defined) d["nu"] = parts.nu;
        if (parts.residual_used) d["residual"] = matrix_rows(parts.residual);
        return d;
      },
      py::arg("transition"),
      "Maximal minorization split P = eta * nu + (1 - eta) * R of a transition matrix.");

  m.def(
      "max_minorization_mass",
      [](const std::vector<std::vector<double>>& rows) {
        return max_minorization_mass(StochasticMatrix::from_rows(rows));
      },
      py::arg("transition"), "Largest eta achievable in a minorization split (column-min mass).");

  m.def(
      "bstar_sequence",
      [](const DecaySequence& b, int len) { return bstar_sequence(b, len); }, py::arg("b"),
      py::arg("len"), "Return-time mass of the renewal chain built from failure probabilities b.");

  m.def("bstar_certified", &bstar_certified, py::arg("b"), py::arg("cap") = 256,
        "bstar as exact table plus a certified geometric tail; throws when none certifies.");

  m.def(
      "lemma_ult_bound",
      [](int s, double rho, const DecaySequence& alpha_kappa, int j_max, double factor) {
        auto r = lemma_ult_bound(s, rho, alpha_kappa, j_max, factor);
        py::dict d;
        d["value"] = r.value;
        d["j"] = r.j;
        return d;
      },
      py::arg("s"), py::arg("rho"), py::arg("alpha_kappa"), py::arg("j_max") = 0,
      py::arg("factor") = 4.0,
      "inf over j of rho^floor(s/j) + factor * alpha_kappa(j) / (1 - rho).");

  m.def("lemma_ult3_bound", &lemma_ult3_bound, py::arg("t"), py::arg("C"), py::arg("a"),
        py::arg("p"), py::arg("v"),
        "Closed form of the blocked recursion bound u_t <= C a^{t/p} + sum a^{j/p} v_{t-j}.");

  m.def("geometric_block_sum", &geometric_block_sum, py::arg("d"), py::arg("m"), py::arg("x"),
        "Exact sum_{t >= r+d} x^floor((t-r)/m).");

  m.def(
      "thm1_bound",
      [](std::int64_t n, std::int64_t r, int mm, double rho, const DecaySequence& alpha_x,
         int cap, int j_table, bool deterministic_eta) {
        SeriesBoundOptions opts;
        opts.cap = cap;
        opts.j_table = j_table;
        opts.deterministic_eta = deterministic_eta;
        return to_dict(thm1_bound(n, r, mm, rho, alpha_x, opts));
      },
      py::arg("n"), py::arg("r"), py::arg("m"), py::arg("rho"), py::arg("alpha_x"),
      py::arg("cap") = 256, py::arg("j_table") = 32, py::arg("deterministic_eta") = false,
      "Blockwise minorization mixing bound driven by the covariate alpha sequence.");

  m.def(
      "thm3_bound",
      [](std::int64_t n, std::int64_t r, int mm, double rho, const DecaySequence& alpha_zeta,
         int cap, int j_table, bool deterministic_eta) {
        SeriesBoundOptions opts;
        opts.cap = cap;
        opts.j_table = j_table;
        opts.deterministic_eta = deterministic_eta;
        return to_dict(thm3_bound(n, r, mm, rho, alpha_zeta, opts));
      },
      py::arg("n"), py::arg("r"), py::arg("m"), py::arg("rho"), py::arg("alpha_zeta"),
      py::arg("cap") = 256, py::arg("j_table") = 32, py::arg("deterministic_eta") = false,
      "Same series with the innovation-pair alpha sequence in place of the covariate one.");

  m.def(
      "thm2_bound",
      [](std::int64_t n, std::int64_t r, const DecaySequence& a, const DecaySequence& b,
         double x_norm, const DecaySequence& alpha_x, int cap) {
        Thm2Options opts;
        opts.cap = cap;
        return to_dict(thm2_bound(n, r, a, b, x_norm, alpha_x, opts));
      },
      py::arg("n"), py::arg("r"), py::arg("a"), py::arg("b"), py::arg("x_norm"),
      py::arg("alpha_x"), py::arg("cap") = 256,
      "Restart mixing bound for contracting infinite-memory models.");

  m.def(
      "omega_value",
      [](std::int64_t s, const DecaySequence& a, const DecaySequence& b, int p_max) {
        auto r = omega_value(s, a, b, p_max);
        py::dict d;
        d["value"] = r.value;
        d["p"] = r.p;
        return d;
      },
      py::arg("s"), py::arg("a"), py::arg("b"), py::arg("p_max") = 64,
      "Restart functional omega(s) = inf_p { abar^{s/p} + A_{p+1} + sum abar^{j/p} T_{s+1-j} }.");

  m.def(
      "cor_mixing_bound",
      [](std::int64_t n, std::int64_t r, const DecaySequence& a, const DecaySequence& b,
         const DecaySequence& alpha_zeta, int cap, int p_max, double exponent, double scale) {
        CorOptions opts;
        opts.cap = cap;
        opts.p_max = p_max;
        opts.exponent = exponent;
        opts.scale = scale;
        return to_dict(cor_mixing_bound(n, r, a, b, alpha_zeta, opts));
      },
      py::arg("n"), py::arg("r"), py::arg("a"), py::arg("b"), py::arg("alpha_zeta"),
      py::arg("cap") = 128, py::arg("p_max") = 64, py::arg("exponent") = 1.0,
      py::arg("scale") = 1.0,
      "alpha_zeta(r+1) + scale * sum_{t>=n} omega(t-r)^exponent with a certified tail.");

  m.def(
      "rate_schedule",
      [](std::int64_t n, const DecaySequence& alpha_x) {
        auto r = rate_schedule(n, alpha_x);
        py::dict d;
        d["r"] = r.r;
        d["l"] = r.l;
        d["degenerate"] = r.degenerate;
        return d;
      },
      py::arg("n"), py::arg("alpha_x"),
      "Block-length schedule (r = n/2, j(s) = ceil(s^l)) matched to the mixing tail.");

  m.def("schedule_j", &schedule_j, py::arg("s"), py::arg("l"));

  m.def("poisson_inv_cdf", &poisson_inv_cdf, py::arg("mean"), py::arg("u"),
        "Poisson quantile function, the monotone coupling used by the count models.");

  m.def("poisson_coupling_distance", &poisson_coupling_distance, py::arg("mu0"), py::arg("mu1"),
        "E|Q(mu0, U) - Q(mu1, U)| under the comonotone Poisson coupling (= |mu0 - mu1|).");

  m.def(
      "run_config",
      [](const std::string& config_text, const std::string& out_dir) {
        return to_dict(run_config_text(config_text, out_dir, "<python>"));
      },
      py::arg("config_text"), py::arg("out_dir"),
      "Run a JSON experiment config given as text; artifacts land in out_dir.");

  m.def(
      "run_config_file",
      [](const std::string& path, const std::string& out_dir) {
        return to_dict(run_config_file(path, out_dir));
      },
      py::arg("config_path"), py::arg("out_dir"));

  m.def(
      "run_experiment",
      [](const std::string& name, const std::string& out_dir) {
        return to_dict(run_preset(name, out_dir));
      },
      py::arg("name"), py::arg("out_dir"), "Run a named experiment from the built-in catalog.");

  m.def(
      "experiments",
      []() {
        py::list out;
        for (const auto& p : preset_catalog()) {
          py::dict d;
          d["name"] = p.name;
          d["summary"] = p.summary;
          d["runtime_hint"] = p.runtime_hint;
          d["config"] = p.config_json.empty() ? py::object(py::none())
                                              : py::object(py::str(p.config_json));
          out.append(d);
        }
        return out;
      },
      "Catalog of built-in experiments: name, summary, runtime hint, config JSON (or None).");
}
