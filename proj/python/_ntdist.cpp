#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "cli.hpp"
#include "ntdist/arith.hpp"
#include "ntdist/errors.hpp"
#include "ntdist/kloosterman.hpp"
#include "ntdist/parallel.hpp"
#include "ntdist/progressions.hpp"
#include "ntdist/randommodel.hpp"
#include "ntdist/shortintervals.hpp"
#include "ntdist/special.hpp"
#include "ntdist/stats.hpp"
#include "ntdist/windows.hpp"

namespace py = pybind11;
using namespace ntdist;

namespace {

template <class T>
py::array_t<T> to_array(std::span<const T> s) {
  return py::array_t<T>(static_cast<py::ssize_t>(s.size()), s.data());
}

py::array_t<double> to_array(const std::vector<double>& v) { return to_array(std::span<const double>(v)); }

windows::WindowSpec make_window(double delta, std::optional<double> epsilon) {
  return epsilon ? windows::WindowSpec::difference(delta, *epsilon) : windows::WindowSpec::single(delta);
}

progressions::ProgressionConfig progression_config(std::uint64_t p, double phi, std::optional<double> delta,
                                                   Mode mode, double cf) {
  progressions::ProgressionConfig cfg;
  cfg.p = p;
  cfg.phi = phi;
  cfg.mode = mode;
  if (delta) cfg.window = windows::WindowSpec::single(*delta);
  cfg.cf_value = cf;
  return cfg;
}

py::dict progression_dict(const progressions::ProgressionResult& r) {
  py::dict d;
  d["values"] = to_array(r.values);
  d["sums"] = to_array(r.sums);
  d["mean_term"] = r.mean_term;
  d["normalization"] = r.normalization;
  d["window_norm"] = r.window_norm;
  return d;
}

py::dict progression_values(const Coefficients& c, std::uint64_t p, double phi, std::optional<double> delta, double cf) {
  const auto cfg = progression_config(p, phi, delta, c.mode(), cf);
  progressions::ProgressionResult r;
  {
    py::gil_scoped_release release;
    r = cfg.window ? progressions::smoothed_progression_values(cfg, c) : progressions::sharp_progression_values(cfg, c);
  }
  return progression_dict(r);
}

py::dict dual_values(const Coefficients& c, std::uint64_t p, double phi, double delta, double tol, double xi_far,
                     double cf) {
  const auto cfg = progression_config(p, phi, delta, c.mode(), cf);
  progressions::DualOptions opt;
  opt.xi_far = xi_far;
  progressions::DualResult r;
  {
    py::gil_scoped_release release;
    r = progressions::voronoi_dual(cfg, c, tol, opt);
  }
  py::dict d;
  d["values"] = to_array(r.values);
  d["sigma"] = r.sigma;
  d["tail_bound"] = r.tail_bound;
  d["tol_met"] = r.tol_met;
  d["n_truncation"] = r.n_truncation;
  d["n_negative"] = r.n_negative;
  d["xi_far"] = r.xi_far;
  return d;
}

py::dict short_experiment(const shortintervals::Summatory& s, double T, double L, std::size_t samples,
                          std::uint64_t seed, double cf) {
  shortintervals::ShortIntervalConfig cfg;
  cfg.T = T;
  cfg.L = L;
  cfg.samples = samples;
  cfg.seed = seed;
  cfg.mode = s.mode();
  cfg.cf_value = cf;
  std::optional<shortintervals::DistributionResult> r;
  {
    py::gil_scoped_release release;
    r = shortintervals::distribution_experiment(cfg, s);
  }
  const auto sum = stats::summarize(r->distribution);
  py::dict d;
  d["x"] = to_array(r->samples.x);
  d["statistic"] = to_array(r->samples.statistic);
  d["mean"] = sum.mean;
  d["variance"] = sum.variance;
  d["ks"] = sum.ks;
  return d;
}

}  // namespace

PYBIND11_MODULE(_ntdist, m) {
  m.doc() = "Divisor-function and cusp-form distribution experiments";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<UnsupportedError>(m, "UnsupportedError", base.ptr());
  py::register_exception<FitError>(m, "FitError", base.ptr());
  py::register_exception<AccuracyError>(m, "AccuracyError", base.ptr());

  m.def("set_threads", &set_threads, py::arg("n"));
  m.def("threads", &threads);

  py::class_<arith::DivisorTable>(m, "DivisorTable")
      .def(py::init([](std::uint64_t limit, std::uint64_t ceiling) {
             py::gil_scoped_release release;
             return arith::DivisorTable::build(limit, ceiling);
           }),
           py::arg("limit"), py::arg("ceiling") = arith::kDefaultDivisorCeiling)
      .def_property_readonly("limit", &arith::DivisorTable::limit)
      .def("d", &arith::DivisorTable::d, py::arg("n"))
      .def("prefix", &arith::DivisorTable::prefix, py::arg("n"))
      .def("values", [](const arith::DivisorTable& t) { return to_array(t.values()); })
      .def("progression_values",
           [](const arith::DivisorTable& t, std::uint64_t p, double phi, std::optional<double> delta) {
             return progression_values(Coefficients(t), p, phi, delta, 0.0);
           },
           py::arg("p"), py::arg("phi"), py::arg("delta") = py::none())
      .def("voronoi_dual",
           [](const arith::DivisorTable& t, std::uint64_t p, double phi, double delta, double tol, double xi_far) {
             return dual_values(Coefficients(t), p, phi, delta, tol, xi_far, 0.0);
           },
           py::arg("p"), py::arg("phi"), py::arg("delta"), py::arg("tol") = 1e-5, py::arg("xi_far") = 1e6)
      .def("sigma_sq_M",
           [](const arith::DivisorTable& t, std::uint64_t M, double L) {
             return shortintervals::sigma_sq_M(M, L, Coefficients(t));
           },
           py::arg("M"), py::arg("L"))
      .def("model_moments",
           [](const arith::DivisorTable& t, std::uint64_t M, double L, std::size_t trials, std::uint64_t seed,
              int max_moment) {
             randommodel::ModelConfig cfg;
             cfg.M = M;
             cfg.L = L;
             cfg.trials = trials;
             cfg.seed = seed;
             cfg.max_moment = max_moment;
             std::optional<randommodel::MomentReport> r;
             {
               py::gil_scoped_release release;
               r = randommodel::model_moments_mc(t, cfg);
             }
             py::dict d;
             d["estimates"] = r->estimates;
             d["standard_errors"] = r->standard_errors;
             d["gaussian_targets"] = r->gaussian_targets;
             d["sigma"] = r->sigma;
             d["trial_sums"] = to_array(r->trial_sums);
             return d;
           },
           py::arg("M"), py::arg("L"), py::arg("trials"), py::arg("seed"), py::arg("max_moment") = 6);

  py::class_<arith::HeckeTable>(m, "HeckeTable")
      .def(py::init([](std::uint64_t limit, int weight, std::uint64_t ceiling) {
             py::gil_scoped_release release;
             return arith::HeckeTable::build(weight, limit, ceiling);
           }),
           py::arg("limit"), py::arg("weight") = 12, py::arg("ceiling") = arith::kDefaultHeckeCeiling)
      .def_property_readonly("limit", &arith::HeckeTable::limit)
      .def_property_readonly("weight", &arith::HeckeTable::weight)
      .def("exact", [](const arith::HeckeTable& t, std::uint64_t n) {
             return py::int_(py::str(t.exact(n).get_str()));
           }, py::arg("n"))
      .def("rho", &arith::HeckeTable::rho, py::arg("n"))
      .def("prefix", &arith::HeckeTable::prefix, py::arg("n"))
      .def("normalized", [](const arith::HeckeTable& t) { return to_array(t.normalized()); })
      .def("estimate_cf", [](const arith::HeckeTable& t, double x) { return arith::estimate_cf(t, x).value; },
           py::arg("x"))
      .def("progression_values",
           [](const arith::HeckeTable& t, std::uint64_t p, double phi, double cf, std::optional<double> delta) {
             return progression_values(Coefficients(t), p, phi, delta, cf);
           },
           py::arg("p"), py::arg("phi"), py::arg("cf"), py::arg("delta") = py::none())
      .def("voronoi_dual",
           [](const arith::HeckeTable& t, std::uint64_t p, double phi, double delta, double cf, double tol,
              double xi_far) { return dual_values(Coefficients(t), p, phi, delta, tol, xi_far, cf); },
           py::arg("p"), py::arg("phi"), py::arg("delta"), py::arg("cf"), py::arg("tol") = 1e-5,
           py::arg("xi_far") = 4e5)
      .def("short_intervals",
           [](const arith::HeckeTable& t, double T, double L, std::size_t samples, std::uint64_t seed, double cf) {
             return short_experiment(shortintervals::Summatory::hecke(t), T, L, samples, seed, cf);
           },
           py::arg("T"), py::arg("L"), py::arg("samples"), py::arg("seed"), py::arg("cf"));

  m.def("divisor_summatory", py::overload_cast<std::uint64_t>(&arith::divisor_summatory), py::arg("n"));
  m.def("delta_remainder", [](double x) { return arith::delta_remainder(x).remainder; }, py::arg("x"));
  m.def("ramanujan_tau", [](std::uint64_t limit) {
    py::list out;
    for (const auto& v : arith::ramanujan_tau(limit)) out.append(py::int_(py::str(v.get_str())));
    return out;
  }, py::arg("limit"));

  m.def("bessel_j", &special::bessel_j, py::arg("nu"), py::arg("x"));
  m.def("bessel_j0", &special::bessel_j0, py::arg("x"));
  m.def("bessel_y0", &special::bessel_y0, py::arg("x"));
  m.def("bessel_k0", &special::bessel_k0, py::arg("x"));

  m.def("window", [](double delta, std::optional<double> epsilon, double x) {
    return windows::window_eval(make_window(delta, epsilon), x);
  }, py::arg("delta"), py::arg("epsilon") = py::none(), py::arg("x"));
  m.def("window_norm_sq", [](double delta, std::optional<double> epsilon) {
    return windows::window_norm_sq(make_window(delta, epsilon));
  }, py::arg("delta"), py::arg("epsilon") = py::none());
  m.def("transform_d", [](double delta, std::optional<double> epsilon, double xi) {
    return windows::transform_d(make_window(delta, epsilon), xi).value;
  }, py::arg("delta"), py::arg("epsilon") = py::none(), py::arg("xi"));
  m.def("transform_f", [](double delta, std::optional<double> epsilon, double xi, int k) {
    return windows::transform_f(make_window(delta, epsilon), k, xi).value;
  }, py::arg("delta"), py::arg("epsilon") = py::none(), py::arg("xi"), py::arg("k") = 12);
  m.def("plancherel_check", [](double delta, double epsilon, double Xi, double grid_step) {
    windows::PlancherelResult r;
    {
      py::gil_scoped_release release;
      r = windows::plancherel_check(delta, epsilon, Xi, grid_step);
    }
    py::dict d;
    d["lhs"] = r.lhs;
    d["rhs"] = r.rhs;
    d["rel_err"] = r.rel_err;
    d["tail_estimate"] = r.tail_estimate;
    return d;
  }, py::arg("delta"), py::arg("epsilon"), py::arg("Xi"), py::arg("grid_step") = 0.01);

  m.def("is_prime", &kloosterman::is_prime, py::arg("n"));
  m.def("kloosterman_sum", &kloosterman::kloosterman_sum, py::arg("a"), py::arg("b"), py::arg("c"));
  m.def("kl2", &kloosterman::kl2, py::arg("a"), py::arg("b"), py::arg("p"));
  m.def("orthogonality_average",
        py::overload_cast<std::int64_t, std::int64_t, std::int64_t>(&kloosterman::orthogonality_average),
        py::arg("p"), py::arg("m"), py::arg("n"));

  m.def("sigma_sq_asymptotic", [](double L, const std::string& mode, double cf) {
    return shortintervals::sigma_sq_asymptotic(L, parse_mode(mode), cf);
  }, py::arg("L"), py::arg("mode") = "divisor", py::arg("cf") = 0.0);
  m.def("short_stat_divisor", [](double x, double L) {
    return shortintervals::short_stat_exact(x, L, shortintervals::Summatory::divisor());
  }, py::arg("x"), py::arg("L"));
  m.def("short_intervals_divisor", [](double T, double L, std::size_t samples, std::uint64_t seed) {
    return short_experiment(shortintervals::Summatory::divisor(), T, L, samples, seed, 0.0);
  }, py::arg("T"), py::arg("L"), py::arg("samples"), py::arg("seed"));

  m.def("squarefree", &randommodel::squarefree_sieve, py::arg("M"));
  m.def("gaussian_moment", &randommodel::gaussian_moment, py::arg("m"));

  m.def("ks_to_normal", [](std::vector<double> v) {
    return stats::ks_to_normal(stats::EmpiricalDistribution(std::move(v)));
  }, py::arg("values"));

  m.def("run_cli", [](const std::vector<std::string>& args) {
    py::gil_scoped_release release;
    return cli::run(args);
  }, py::arg("args"), "Run an ntdist subcommand; returns the exit code.");
}
