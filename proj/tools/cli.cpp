#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ntdist/arith.hpp"
#include "ntdist/cache.hpp"
#include "ntdist/errors.hpp"
#include "ntdist/io.hpp"
#include "ntdist/kloosterman.hpp"
#include "ntdist/parallel.hpp"
#include "ntdist/progressions.hpp"
#include "ntdist/randommodel.hpp"
#include "ntdist/shortintervals.hpp"
#include "ntdist/special.hpp"
#include "ntdist/stats.hpp"
#include "ntdist/windows.hpp"

namespace ntdist::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

const std::vector<std::string> kSubcommands = {"sieve",           "kloosterman",  "voronoi-check",
                                               "progressions",    "short-intervals", "random-model",
                                               "bessel-table",    "selftest"};

struct Common {
  std::string out = "runs";
  int threads = 0;
  std::string cache_dir;
  std::uint64_t divisor_ceiling = arith::kDefaultDivisorCeiling;
  std::uint64_t hecke_ceiling = arith::kDefaultHeckeCeiling;
};

// Outputs of one run, collected for the manifest.
class Run {
 public:
  Run(std::string name, const Common& common) : name_(std::move(name)), common_(common) {}

  json& params() { return params_; }
  void set_seed(std::uint64_t s) { seed_ = s; }

  fs::path write(const std::string& suffix, const std::string& text) {
    const fs::path p = fs::path(common_.out) / (name_ + suffix);
    io::write_text(p, text);
    outputs_.push_back(p.generic_string());
    return p;
  }

  void write_json(const std::string& suffix, const json& j) { write(suffix, j.dump(2) + "\n"); }

  // Manifest plus a flat key=value file that --config can replay.
  void finish() {
    std::ostringstream cfg;
    for (const auto& [k, v] : params_.items()) {
      cfg << k << '=' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    }
    if (seed_) cfg << "seed=" << *seed_ << '\n';
    const fs::path cfg_path = fs::path(common_.out) / (name_ + ".config");
    io::write_text(cfg_path, cfg.str());
    outputs_.push_back(cfg_path.generic_string());

    json m;
    m["tool"] = "ntdist";
    m["version"] = NTDIST_VERSION;
    m["subcommand"] = name_;
    m["parameters"] = params_;
    m["seed"] = seed_ ? json(*seed_) : json(nullptr);
    m["threads"] = threads();
    m["table_ceilings"] = {{"divisor", common_.divisor_ceiling}, {"hecke", common_.hecke_ceiling}};
    m["cache_dir"] = common_.cache_dir;
    m["outputs"] = outputs_;
    io::write_text(fs::path(common_.out) / (name_ + ".manifest.json"), m.dump(2) + "\n");
  }

 private:
  std::string name_;
  const Common& common_;
  json params_ = json::object();
  std::optional<std::uint64_t> seed_;
  std::vector<std::string> outputs_;
};

fs::path cache_path(const Common& c, const char* file) {
  return c.cache_dir.empty() ? fs::path() : fs::path(c.cache_dir) / file;
}

arith::DivisorTable divisor_table(const Common& c, std::uint64_t limit) {
  return cache::divisor_table(cache_path(c, "divisor.bin"), std::max<std::uint64_t>(limit, 1), c.divisor_ceiling);
}

arith::HeckeTable hecke_table(const Common& c, std::uint64_t limit, std::uint64_t ceiling) {
  return cache::hecke_table(cache_path(c, "hecke.bin"), std::max<std::uint64_t>(limit, 2), ceiling);
}

// c_f frozen from the Rankin-Selberg estimate at min(limit, 1e6).
double frozen_cf(const arith::HeckeTable& t) {
  return arith::estimate_cf(t, std::min(static_cast<double>(t.limit()), 1e6)).value;
}

json summary_json(const stats::Summary& s) {
  return {{"n", s.n}, {"mean", s.mean}, {"variance", s.variance}, {"KS", s.ks}};
}

std::string histogram_csv(const stats::EmpiricalDistribution& d) {
  std::ostringstream out;
  stats::write_histogram_csv(out, stats::histogram(d));
  return out.str();
}

// --config handling: key=value lines become --key=value tokens placed right
// after the subcommand name, so explicit flags (which come later) win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return rest;
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot read " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) throw CLI::ValidationError("--config", "expected key=value, got '" + line + "'");
    tokens.push_back("--" + trim(line.substr(0, eq)) + "=" + trim(line.substr(eq + 1)));
  }
  auto pos = std::find_if(rest.begin(), rest.end(), [](const std::string& a) {
    return std::find(kSubcommands.begin(), kSubcommands.end(), a) != kSubcommands.end();
  });
  if (pos == rest.end()) return rest;
  rest.insert(pos + 1, tokens.begin(), tokens.end());
  return rest;
}

// --- subcommands -----------------------------------------------------------

struct SieveOpts {
  std::string kind = "divisor";
  std::uint64_t limit = 1000000;
  std::size_t csv_rows = 0;
  std::vector<double> c3_grid;
  std::vector<double> cf_x;
};

int cmd_sieve(const SieveOpts& o, const Common& c) {
  Run run("sieve", c);
  run.params() = {{"kind", o.kind}, {"limit", o.limit}, {"csv-rows", o.csv_rows}};
  json result;
  std::ostringstream csv;
  if (o.kind == "divisor") {
    const auto t = divisor_table(c, o.limit);
    result["D(limit)"] = t.prefix(t.limit());
    result["Delta(limit)"] = arith::delta_remainder(static_cast<double>(t.limit())).remainder;
    if (!o.c3_grid.empty()) {
      run.params()["c3-grid"] = o.c3_grid;
      const auto fit = arith::fit_d2_polylog(t, o.c3_grid);
      result["c3"] = fit.a3;
      result["c3_target"] = 1.0 / (std::numbers::pi * std::numbers::pi);
      result["fit"] = {fit.a3, fit.a2, fit.a1, fit.a0};
    }
    csv << "n,d\n";
    for (std::uint64_t n = 1; n <= std::min<std::uint64_t>(o.csv_rows, t.limit()); ++n) csv << n << ',' << t.d(n) << '\n';
  } else if (o.kind == "hecke") {
    const auto t = hecke_table(c, o.limit, c.hecke_ceiling);
    result["A_f(limit)"] = t.prefix(t.limit());
    json cf = json::array();
    for (double x : o.cf_x.empty() ? std::vector<double>{static_cast<double>(t.limit())} : o.cf_x) {
      const auto e = arith::estimate_cf(t, x);
      cf.push_back({{"X", x}, {"cf", e.value}, {"precision_warning", e.precision_warning}});
    }
    if (!o.cf_x.empty()) run.params()["cf-x"] = o.cf_x;
    result["cf"] = cf;
    csv << "n,a,rho\n";
    for (std::uint64_t n = 1; n <= std::min<std::uint64_t>(o.csv_rows, t.limit()); ++n) {
      csv << n << ',' << t.exact(n).get_str() << ',' << io::format_double(t.rho(n)) << '\n';
    }
  } else {
    throw DomainError("sieve kind must be 'divisor' or 'hecke'");
  }
  run.write(".csv", csv.str());
  run.write_json(".json", result);
  run.finish();
  std::cout << "sieve " << o.kind << " limit=" << o.limit << ' ' << result.dump() << '\n';
  return 0;
}

struct KloostermanOpts {
  std::uint64_t p = 101;
  std::int64_t m = 1, n = 1;
};

int cmd_kloosterman(const KloostermanOpts& o, const Common& c) {
  Run run("kloosterman", c);
  run.params() = {{"p", o.p}, {"m", o.m}, {"n", o.n}};
  if (o.p > 100000) throw CapacityError("kloosterman table limited to p <= 1e5");
  const kloosterman::KloostermanTable t(static_cast<std::uint32_t>(o.p));
  std::ostringstream csv;
  csv << "m,S,Kl2\n";
  double weil = 0;
  for (std::uint64_t m = 0; m < o.p; ++m) {
    const double s = t.values()[m];
    csv << m << ',' << io::format_double(s) << ',' << io::format_double(t.kl2(1, static_cast<std::int64_t>(m))) << '\n';
    if (m) weil = std::max(weil, std::abs(t.kl2(1, static_cast<std::int64_t>(m))));
  }
  json result;
  result["p"] = o.p;
  result["max_abs_kl2"] = weil;
  result["weil_bound_holds"] = weil <= 2.0 + 1e-12;
  const double avg = kloosterman::orthogonality_average(t, o.m, o.n);
  result["orthogonality_average"] = avg;
  const auto pi = static_cast<std::int64_t>(o.p);
  if ((o.m % pi) != 0 && (o.n % pi) != 0) {
    const double cf = kloosterman::orthogonality_closed_form(pi, o.m, o.n);
    result["closed_form"] = cf;
    result["closed_form_error"] = std::abs(avg - cf);
  }
  run.write(".csv", csv.str());
  run.write_json(".json", result);
  run.finish();
  std::cout << "kloosterman p=" << o.p << " max|Kl2|=" << weil << " avg(" << o.m << ',' << o.n << ")=" << avg << '\n';
  return 0;
}

struct VoronoiOpts {
  std::string mode = "divisor";
  std::uint64_t p = 101;
  double phi = 16;
  double delta = 0.05;
  double tol = 1e-4;
  double dual_tol = 1e-5;
  double xi_far = 0;  // 0: 1e6 for d(n), 4e5 for cusp forms
  double cf = 0;
};

int cmd_voronoi(const VoronoiOpts& o, const Common& c) {
  Run run("voronoi-check", c);
  progressions::ProgressionConfig cfg;
  cfg.p = o.p;
  cfg.phi = o.phi;
  cfg.mode = parse_mode(o.mode);
  cfg.window = windows::WindowSpec::single(o.delta);
  progressions::DualOptions dopt;
  dopt.xi_far = o.xi_far > 0 ? o.xi_far : (cfg.mode == Mode::divisor ? 1e6 : 4e5);
  const auto need = static_cast<std::uint64_t>(std::max(std::floor(dopt.xi_far * cfg.Y()), std::floor(cfg.X())));
  run.params() = {{"mode", o.mode}, {"p", o.p},   {"phi", o.phi},           {"delta", o.delta},
                  {"tol", o.tol},   {"dual-tol", o.dual_tol}, {"xi-far", dopt.xi_far}};

  progressions::ProgressionResult direct;
  progressions::DualResult dual;
  if (cfg.mode == Mode::divisor) {
    const auto t = divisor_table(c, need);
    direct = progressions::smoothed_progression_values(cfg, Coefficients(t));
    dual = progressions::voronoi_dual(cfg, Coefficients(t), o.dual_tol, dopt);
  } else {
    // the dual sum needs coefficients far past X: the cusp-form ceiling is raised to cover it
    const auto t = hecke_table(c, std::max<std::uint64_t>(need, 1000000), std::max(need, c.hecke_ceiling) + 1);
    cfg.cf_value = o.cf > 0 ? o.cf : frozen_cf(t);
    run.params()["cf"] = cfg.cf_value;
    direct = progressions::smoothed_progression_values(cfg, Coefficients(t));
    dual = progressions::voronoi_dual(cfg, Coefficients(t), o.dual_tol, dopt);
  }
  std::ostringstream csv;
  csv << "a,direct,dual,diff\n";
  double worst = 0;
  for (std::size_t i = 0; i < dual.values.size(); ++i) {
    const double d = direct.values[i] - dual.values[i];
    worst = std::max(worst, std::abs(d));
    csv << i + 1 << ',' << io::format_double(direct.values[i]) << ',' << io::format_double(dual.values[i]) << ','
        << io::format_double(d) << '\n';
  }
  const bool pass = dual.tol_met && worst <= o.tol + dual.tail_bound;
  json result = {{"p", o.p},
                 {"Phi", o.phi},
                 {"X", cfg.X()},
                 {"Y", cfg.Y()},
                 {"mode", o.mode},
                 {"delta", o.delta},
                 {"max_abs_diff", worst},
                 {"tail_bound", dual.tail_bound},
                 {"dual_tol_met", dual.tol_met},
                 {"gate", o.tol + dual.tail_bound},
                 {"pass", pass},
                 {"n_truncation", dual.n_truncation},
                 {"n_negative", dual.n_negative},
                 {"xi_far", dual.xi_far},
                 {"envelope_A", dual.envelope_a},
                 {"envelope_C", dual.envelope_c},
                 {"sigma", dual.sigma},
                 {"meanTermUsed", direct.mean_term},
                 {"normalizationUsed", direct.normalization}};
  if (cfg.mode == Mode::hecke) result["cf"] = cfg.cf_value;
  run.write(".csv", csv.str());
  run.write_json(".json", result);
  run.finish();
  std::cout << "voronoi-check " << o.mode << " p=" << o.p << " phi=" << o.phi << " max|direct-dual|=" << worst
            << " tail=" << dual.tail_bound << (pass ? " PASS" : " FAIL") << '\n';
  return pass ? 0 : 3;
}

struct ProgressionOpts {
  std::string mode = "divisor";
  std::uint64_t p = 10007;
  double phi = 25;
  double delta = 0;  // 0: sharp cutoff
  double cf = 0;
};

int cmd_progressions(const ProgressionOpts& o, const Common& c) {
  Run run("progressions", c);
  progressions::ProgressionConfig cfg;
  cfg.p = o.p;
  cfg.phi = o.phi;
  cfg.mode = parse_mode(o.mode);
  if (o.delta > 0) cfg.window = windows::WindowSpec::single(o.delta);
  run.params() = {{"mode", o.mode}, {"p", o.p}, {"phi", o.phi}, {"delta", o.delta}};
  const auto N = static_cast<std::uint64_t>(std::floor(cfg.X()));
  progressions::ProgressionResult r;
  if (cfg.mode == Mode::divisor) {
    const auto t = divisor_table(c, N);
    r = cfg.window ? progressions::smoothed_progression_values(cfg, Coefficients(t))
                   : progressions::sharp_progression_values(cfg, Coefficients(t));
  } else {
    const auto t = hecke_table(c, std::max<std::uint64_t>(N, std::min<std::uint64_t>(1000000, c.hecke_ceiling)),
                               c.hecke_ceiling);
    cfg.cf_value = o.cf > 0 ? o.cf : frozen_cf(t);
    run.params()["cf"] = cfg.cf_value;
    r = cfg.window ? progressions::smoothed_progression_values(cfg, Coefficients(t))
                   : progressions::sharp_progression_values(cfg, Coefficients(t));
  }
  const stats::EmpiricalDistribution d(r.values);
  const auto s = stats::summarize(d);
  json result = {{"p", o.p},
                 {"Phi", o.phi},
                 {"X", cfg.X()},
                 {"mode", o.mode},
                 {"cutoff", cfg.window ? "smooth" : "sharp"},
                 {"mean", s.mean},
                 {"variance", s.variance},
                 {"KS", s.ks},
                 {"meanTermUsed", r.mean_term},
                 {"normalizationUsed", r.normalization}};
  if (cfg.window) result["delta"] = o.delta;
  if (cfg.mode == Mode::hecke) {
    result["cf"] = cfg.cf_value;
    if (cfg.window) result["meanTermDefinition"] = "(1/p) sum rho(n) w(n/X)";
  }
  run.write(".csv", progressions::to_csv(r));
  run.write("_hist.csv", histogram_csv(d));
  run.write_json(".json", result);
  run.finish();
  std::cout << "progressions " << o.mode << " p=" << o.p << " phi=" << o.phi << " mean=" << s.mean
            << " variance=" << s.variance << " KS=" << s.ks << '\n';
  return 0;
}

struct ShortOpts {
  std::string mode = "divisor";
  std::string kind = "distribution";
  double T = 1e6;
  double L = 16;
  std::size_t samples = 1000;
  std::optional<std::uint64_t> seed;
  double cf = 0;
};

int cmd_short(const ShortOpts& o, const Common& c) {
  Run run("short-intervals", c);
  shortintervals::ShortIntervalConfig cfg;
  cfg.T = o.T;
  cfg.L = o.L;
  cfg.samples = o.samples;
  cfg.seed = *o.seed;
  cfg.mode = parse_mode(o.mode);
  run.set_seed(cfg.seed);
  run.params() = {{"mode", o.mode}, {"kind", o.kind}, {"T", o.T}, {"L", o.L}, {"samples", o.samples}};
  if (o.kind != "distribution" && o.kind != "variance") throw DomainError("kind must be 'distribution' or 'variance'");

  std::optional<arith::HeckeTable> table;
  if (cfg.mode == Mode::hecke) {
    const double r = std::sqrt(2.0 * cfg.T) + 1.0 / std::max(cfg.L, 1.0);
    const auto need = static_cast<std::uint64_t>(std::ceil(r * r)) + 1;
    table = hecke_table(c, std::max<std::uint64_t>(need, std::min<std::uint64_t>(1000000, c.hecke_ceiling)), c.hecke_ceiling);
    cfg.cf_value = o.cf > 0 ? o.cf : frozen_cf(*table);
    run.params()["cf"] = cfg.cf_value;
  }
  const auto summ = table ? shortintervals::Summatory::hecke(*table) : shortintervals::Summatory::divisor();
  for (const auto& w : cfg.warnings()) std::cerr << "warning: " << w << '\n';

  json result = {{"T", o.T}, {"L", o.L}, {"samples", o.samples}, {"seed", cfg.seed}, {"mode", o.mode}, {"kind", o.kind}};
  if (cfg.mode == Mode::hecke) result["cf"] = cfg.cf_value;
  shortintervals::SampleSet set;
  if (o.kind == "variance") {
    auto v = shortintervals::variance_experiment(cfg, summ);
    result["variance"] = v.sample_variance;
    result["ratioToAsymptotic"] = v.ratio_to_asymptotic;
    result["degenerate"] = v.degenerate;
    if (!v.degenerate) {
      const stats::EmpiricalDistribution d(v.samples.statistic);
      result["mean"] = stats::mean(d);
    }
    set = std::move(v.samples);
  } else {
    auto r = shortintervals::distribution_experiment(cfg, summ);
    const auto s = stats::summarize(r.distribution);
    result["mean"] = s.mean;
    result["variance"] = s.variance;
    result["ratioToAsymptotic"] = s.variance;  // the statistic is already normalized
    result["KS"] = s.ks;
    run.write("_hist.csv", histogram_csv(r.distribution));
    set = std::move(r.samples);
  }
  run.write(".csv", shortintervals::to_csv(set));
  run.write_json(".json", result);
  run.finish();
  std::cout << "short-intervals " << o.kind << ' ' << o.mode << " T=" << o.T << " L=" << o.L << ' ' << result.dump() << '\n';
  return 0;
}

struct ModelOpts {
  std::uint64_t M = 10000;
  double L = 50;
  std::size_t trials = 20000;
  std::optional<std::uint64_t> seed;
  int max_moment = 6;
};

int cmd_model(const ModelOpts& o, const Common& c) {
  Run run("random-model", c);
  randommodel::ModelConfig cfg;
  cfg.M = o.M;
  cfg.L = o.L;
  cfg.trials = o.trials;
  cfg.seed = *o.seed;
  cfg.max_moment = o.max_moment;
  cfg.validate();
  run.set_seed(cfg.seed);
  run.params() = {{"M", o.M}, {"L", o.L}, {"trials", o.trials}, {"max-moment", o.max_moment}};
  const auto t = divisor_table(c, o.M);
  const auto r = randommodel::model_moments_mc(t, cfg);
  json moments = json::array();
  for (int m = 1; m <= cfg.max_moment; ++m) {
    const double se = r.standard_errors[m - 1];
    moments.push_back({{"m", m},
                       {"estimate", r.estimates[m - 1]},
                       {"standardError", std::isnan(se) ? json(nullptr) : json(se)},
                       {"gaussianTarget", r.gaussian_targets[m - 1]}});
  }
  const json result = {{"M", o.M},         {"L", o.L},          {"trials", o.trials}, {"seed", cfg.seed},
                       {"sigma_M", r.sigma}, {"standardErrorsAvailable", r.standard_errors_available},
                       {"moments", moments}};
  run.write(".csv", randommodel::to_csv(r));
  run.write_json(".json", result);
  run.finish();
  std::cout << "random-model M=" << o.M << " L=" << o.L << " trials=" << o.trials;
  for (int m = 1; m <= cfg.max_moment; ++m) std::cout << " m" << m << '=' << r.estimates[m - 1];
  std::cout << '\n';
  return 0;
}

struct BesselOpts {
  std::string kernel = "divisor";
  double delta = 0.1;
  double epsilon = 0;  // 0: single window
  double xi_min = 1;
  double xi_max = 1000;
  std::size_t points = 200;
  bool log_grid = false;
  double plancherel_xi = 0;
  double grid_step = 0.01;
};

int cmd_bessel(const BesselOpts& o, const Common& c) {
  Run run("bessel-table", c);
  const auto spec = o.epsilon > 0 ? windows::WindowSpec::difference(o.delta, o.epsilon) : windows::WindowSpec::single(o.delta);
  run.params() = {{"kernel", o.kernel}, {"delta", o.delta}, {"epsilon", o.epsilon}, {"xi-min", o.xi_min},
                  {"xi-max", o.xi_max}, {"points", o.points}, {"log-grid", o.log_grid}};
  if (o.points < 2) throw DomainError("points must be >= 2");
  if (o.log_grid && !(o.xi_min > 0)) throw DomainError("log grid needs xi-min > 0");
  const bool hecke = o.kernel == "hecke";
  if (!hecke && o.kernel != "divisor") throw DomainError("kernel must be 'divisor' or 'hecke'");
  std::vector<double> xs(o.points);
  for (std::size_t i = 0; i < o.points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(o.points - 1);
    xs[i] = o.log_grid ? o.xi_min * std::pow(o.xi_max / o.xi_min, t) : o.xi_min + (o.xi_max - o.xi_min) * t;
  }
  std::vector<windows::TransformValue> vals(o.points);
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(o.points); ++i) {
    try {
      vals[i] = hecke ? windows::transform_f(spec, 12, xs[i]) : windows::transform_d(spec, xs[i]);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  std::ostringstream csv;
  csv << "xi,B,quadError\n";
  for (const auto& v : vals) csv << io::format_double(v.xi) << ',' << io::format_double(v.value) << ',' << io::format_double(v.quad_error) << '\n';
  json result = {{"kernel", o.kernel}, {"points", o.points}, {"window_norm_sq", windows::window_norm_sq(spec)}};
  if (o.plancherel_xi > 0) {
    if (o.epsilon <= 0) throw DomainError("plancherel check needs --epsilon");
    run.params()["plancherel-xi"] = o.plancherel_xi;
    run.params()["grid-step"] = o.grid_step;
    const auto pr = windows::plancherel_check(o.delta, o.epsilon, o.plancherel_xi, o.grid_step);
    result["plancherel"] = {{"lhs", pr.lhs},
                            {"rhs", pr.rhs},
                            {"relErr", pr.rel_err},
                            {"tailEstimate", pr.tail_estimate},
                            {"relErrBudget", 1e-3 + pr.tail_estimate / pr.rhs},
                            {"gridPoints", pr.grid_points}};
  }
  run.write(".csv", csv.str());
  run.write_json(".json", result);
  run.finish();
  std::cout << "bessel-table " << o.kernel << " points=" << o.points << ' ' << result.dump() << '\n';
  return 0;
}

// Worked examples with known answers.
int cmd_selftest(const Common& c) {
  Run run("selftest", c);
  std::vector<std::pair<std::string, bool>> checks;
  auto near = [](double a, double b, double tol) { return std::abs(a - b) <= tol; };
  auto add = [&](std::string name, auto f) {
    bool ok = false;
    try {
      ok = f();
    } catch (const std::exception&) {
      ok = false;
    }
    checks.emplace_back(std::move(name), ok);
  };
  add("divisor table d(12) = 6", [] { return arith::DivisorTable::build(12).d(12) == 6; });
  add("D(1e6) = 13970034", [] { return arith::divisor_summatory(std::uint64_t{1000000}) == 13970034; });
  add("tau(2) = -24, tau(3) = 252", [] {
    const auto t = arith::ramanujan_tau(3);
    return t[2] == -24 && t[3] == 252;
  });
  add("J0(0) = 1", [] { return special::bessel_j0(0.0) == 1.0; });
  add("K0(50) = 3.41016774978950e-23", [&] { return near(special::bessel_k0(50) / 3.41016774978949551e-23, 1, 1e-12); });
  add("window w_0.1(0.15) = 1/2", [&] { return near(windows::window_eval(windows::WindowSpec::single(0.1), 0.15), 0.5, 1e-15); });
  add("|B_d(-400)| <= 1e-6", [] { return std::abs(windows::transform_d(windows::WindowSpec::single(0.1), -400).value) <= 1e-6; });
  add("S(1,1;2) = 1", [&] { return near(kloosterman::kloosterman_sum(1, 1, 2), 1, 1e-14); });
  add("S(0,1;5) = -1", [&] { return near(kloosterman::kloosterman_sum(0, 1, 5), -1, 1e-14); });
  add("S(1,1;5) = 0.3819660", [&] { return near(kloosterman::kloosterman_sum(1, 1, 5), 0.3819660, 1e-7); });
  add("orthogonality p=7: 41/42 and -4/21", [&] {
    return near(kloosterman::orthogonality_average(7, 1, 1), 41.0 / 42, 1e-13) &&
           near(kloosterman::orthogonality_average(7, 1, 2), -4.0 / 21, 1e-13);
  });
  add("S_d(20,5,1) = 12", [] {
    const auto t = arith::DivisorTable::build(20);
    progressions::ProgressionConfig cfg;
    cfg.p = 5;
    cfg.phi = 1.25;
    return progressions::sharp_progression_values(cfg, Coefficients(t)).sums[0] == 12;
  });
  add("sigma_M^2(M=1, L=4) = 1/pi^2", [&] {
    const auto t = arith::DivisorTable::build(2);
    return near(shortintervals::sigma_sq_M(1, 4, Coefficients(t)), 1 / (std::numbers::pi * std::numbers::pi), 1e-15);
  });
  add("square-free q <= 10", [] {
    return randommodel::squarefree_sieve(10) == std::vector<std::uint64_t>{1, 2, 3, 5, 6, 7, 10};
  });
  add("gaussian moments 1, 0, 3, 15", [] {
    return randommodel::gaussian_moment(2) == 1 && randommodel::gaussian_moment(3) == 0 &&
           randommodel::gaussian_moment(4) == 3 && randommodel::gaussian_moment(6) == 15;
  });
  add("KS of a point mass at 0 is 1/2", [&] { return near(stats::ks_to_normal(stats::EmpiricalDistribution({0.0})), 0.5, 1e-12); });

  json list = json::array();
  bool all = true;
  for (const auto& [name, ok] : checks) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << '\n';
    list.push_back({{"check", name}, {"pass", ok}});
    all = all && ok;
  }
  run.write_json(".json", {{"checks", list}, {"all_pass", all}});
  run.finish();
  std::cout << "selftest " << (all ? "passed" : "FAILED") << " (" << checks.size() << " checks)\n";
  return all ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& raw_args) {
  CLI::App app{"ntdist: distribution experiments for divisor and cusp-form coefficients", "ntdist"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  std::string config_path;
  app.add_option("--out", common.out, "Output directory")->capture_default_str();
  app.add_option("--threads", common.threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--cache-dir", common.cache_dir, "Directory for binary coefficient-table caches");
  app.add_option("--divisor-ceiling", common.divisor_ceiling, "Largest divisor table allowed")->capture_default_str();
  app.add_option("--hecke-ceiling", common.hecke_ceiling, "Largest cusp-form table allowed")->capture_default_str();
  app.add_option("--config", config_path, "Flat key=value file; explicit flags override it");

  SieveOpts sieve;
  auto* s_sieve = app.add_subcommand("sieve", "Build a coefficient table, optionally cache it");
  s_sieve->add_option("--kind", sieve.kind, "divisor | hecke")->capture_default_str();
  s_sieve->add_option("--limit", sieve.limit, "Table size")->capture_default_str();
  s_sieve->add_option("--csv-rows", sieve.csv_rows, "Rows of the table to dump as CSV");
  s_sieve->add_option("--c3-grid", sieve.c3_grid, "t values for the d^2 summatory fit")->delimiter(',');
  s_sieve->add_option("--cf-x", sieve.cf_x, "X values for Rankin-Selberg c_f estimates")->delimiter(',');

  KloostermanOpts kl;
  auto* s_kl = app.add_subcommand("kloosterman", "Kloosterman sums S(1,m;p), Weil bound, orthogonality");
  s_kl->add_option("--p", kl.p, "Prime modulus")->capture_default_str();
  s_kl->add_option("--m", kl.m, "First orthogonality index");
  s_kl->add_option("--n", kl.n, "Second orthogonality index");

  VoronoiOpts vo;
  auto* s_vo = app.add_subcommand("voronoi-check", "Compare smoothed progression sums with the dual sum");
  s_vo->add_option("--mode", vo.mode, "divisor | hecke")->capture_default_str();
  s_vo->add_option("--p", vo.p)->capture_default_str();
  s_vo->add_option("--phi", vo.phi)->capture_default_str();
  s_vo->add_option("--delta", vo.delta)->capture_default_str();
  s_vo->add_option("--tol", vo.tol, "Gate on max |direct - dual| (plus the tail bound)")->capture_default_str();
  s_vo->add_option("--dual-tol", vo.dual_tol, "Target tail bound for the dual truncation")->capture_default_str();
  s_vo->add_option("--xi-far", vo.xi_far, "Largest tabulated n/Y");
  s_vo->add_option("--cf", vo.cf, "c_f override");

  ProgressionOpts po;
  auto* s_po = app.add_subcommand("progressions", "E(a) over residues mod p and its distribution");
  s_po->add_option("--mode", po.mode, "divisor | hecke")->capture_default_str();
  s_po->add_option("--p", po.p)->capture_default_str();
  s_po->add_option("--phi", po.phi)->capture_default_str();
  s_po->add_option("--delta", po.delta, "Smooth window parameter (omit for a sharp cutoff)");
  s_po->add_option("--cf", po.cf, "c_f override");

  ShortOpts so;
  auto* s_so = app.add_subcommand("short-intervals", "Short-interval statistics sampled on [T, 2T]");
  s_so->add_option("--mode", so.mode, "divisor | hecke")->capture_default_str();
  s_so->add_option("--kind", so.kind, "distribution | variance")->capture_default_str();
  s_so->add_option("--T", so.T)->capture_default_str();
  s_so->add_option("--L", so.L)->capture_default_str();
  s_so->add_option("--samples", so.samples)->capture_default_str();
  s_so->add_option("--seed", so.seed, "RNG seed")->required();
  s_so->add_option("--cf", so.cf, "c_f override");

  ModelOpts mo;
  auto* s_mo = app.add_subcommand("random-model", "Monte Carlo moments of the random model");
  s_mo->add_option("--M", mo.M)->capture_default_str();
  s_mo->add_option("--L", mo.L)->capture_default_str();
  s_mo->add_option("--trials", mo.trials)->capture_default_str();
  s_mo->add_option("--seed", mo.seed, "RNG seed")->required();
  s_mo->add_option("--max-moment", mo.max_moment)->capture_default_str();

  BesselOpts bo;
  auto* s_bo = app.add_subcommand("bessel-table", "Tabulate B_d or B_f of a window; optional Plancherel check");
  s_bo->add_option("--kernel", bo.kernel, "divisor | hecke")->capture_default_str();
  s_bo->add_option("--delta", bo.delta)->capture_default_str();
  s_bo->add_option("--epsilon", bo.epsilon, "Second window parameter (difference window)");
  s_bo->add_option("--xi-min", bo.xi_min)->capture_default_str();
  s_bo->add_option("--xi-max", bo.xi_max)->capture_default_str();
  s_bo->add_option("--points", bo.points)->capture_default_str();
  s_bo->add_flag("--log-grid", bo.log_grid, "Logarithmic xi grid");
  s_bo->add_option("--plancherel-xi", bo.plancherel_xi, "Run the Plancherel check up to this |xi|");
  s_bo->add_option("--grid-step", bo.grid_step)->capture_default_str();

  auto* s_self = app.add_subcommand("selftest", "Worked examples with known answers");

  std::vector<std::string> args;
  try {
    args = expand_config(raw_args);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    set_threads(common.threads);
    if (*s_sieve) return cmd_sieve(sieve, common);
    if (*s_kl) return cmd_kloosterman(kl, common);
    if (*s_vo) return cmd_voronoi(vo, common);
    if (*s_po) return cmd_progressions(po, common);
    if (*s_so) return cmd_short(so, common);
    if (*s_mo) return cmd_model(mo, common);
    if (*s_bo) return cmd_bessel(bo, common);
    if (*s_self) return cmd_selftest(common);
  } catch (const AccuracyError& e) {
    std::cerr << "accuracy error: " << e.what() << " (best estimate " << e.best_estimate() << ", error estimate "
              << e.error_estimate() << ")\n";
    return 3;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << "capacity: " << e.what() << '\n';
    return 2;
  } catch (const UnsupportedError& e) {
    std::cerr << "unsupported: " << e.what() << '\n';
    return 2;
  } catch (const FitError& e) {
    std::cerr << "fit: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace ntdist::cli
