// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include "cli/run.hpp"

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "cli/cache.hpp"
#include "specdet/determinants.hpp"
#include "specdet/entire.hpp"
#include "specdet/error.hpp"
#include "specdet/factorization.hpp"
#include "specdet/gff.hpp"
#include "specdet/heat_renorm.hpp"
#include "specdet/linalg.hpp"
#include "specdet/operators.hpp"

#ifndef SPECDET_VERSION
#define SPECDET_VERSION "0.0.0"
#endif

namespace specdet::cli {

namespace {

constexpr double no_bound = std::numeric_limits<double>::quiet_NaN();

struct Context {
  const ExperimentConfig& config;
  const EigenCache* cache;
  std::ostream* log;
  int hits = 0;
  int misses = 0;

  double tol(const char* key) const { return config.tolerances.at(key).get<double>(); }
  const json& method(const char* key) const { return config.methods.at(key); }
};

std::string fmt(double x) { return format_double(x); }
std::string fmt(int x) { return std::to_string(x); }
std::string fmt(std::size_t x) { return std::to_string(x); }

json to_json(cplx z) { return {z.real(), z.imag()}; }

json det_json(const DetResult& r) {
  return {{"log_value", to_json(r.log_value)}, {"value", to_json(r.value)}, {"error", r.error},
          {"method", to_string(r.method)},     {"cutoff", r.cutoff},        {"params", r.params},
          {"tags", r.tags}};
}

Check bounded(std::string name, double value, double tolerance, std::string note = {}) {
  return {std::move(name), value, tolerance, value <= tolerance, std::move(note)};
}

Check flag(std::string name, bool pass, double value, std::string note = {}) {
  return {std::move(name), value, no_bound, pass, std::move(note)};
}

void require_continuum(const ExperimentConfig& c) {
  if (c.geometry.kind == GeometryKind::lattice_torus)
    throw ConfigError("geometry.kind", c.experiment + " needs circle or torus2");
}

int default_p(const ExperimentConfig& c) {
  const int p = c.methods.at("p").get<int>();
  return p > 0 ? p : c.geometry.dim() / 2 + 1;
}

std::vector<cplx> cached_spectrum(Context& ctx, const TruncatedOperator& op, const PerturbationField& V) {
  if (!ctx.cache) return eigenvalues(op);
  const std::string key = eigen_cache_key(op.geometry(), V, op.kind(), op.basis().cutoff());
  if (auto hit = ctx.cache->get(key)) {
    if (hit->size() == op.size()) {
      ++ctx.hits;
      return *hit;
    }
  }
  ++ctx.misses;
  auto spectrum = eigenvalues(op);
  ctx.cache->put(key, spectrum);
  return spectrum;
}

ExperimentOutput run_zeta(Context& ctx) {
  const auto& c = ctx.config;
  require_continuum(c);
  const PerturbationField V = c.field();
  const ModeBasis basis(c.geometry, c.cutoff);
  const TruncatedOperator op = build_laplace(c.geometry, V, basis);
  const DetResult r = zeta_det_mellin(SpectralData::of(op, cached_spectrum(ctx, op, V)));

  std::string reference = ctx.method("reference").get<std::string>();
  if (reference == "auto")
    reference = c.geometry.kind != GeometryKind::circle ? "none" : V.is_zero() ? "closed_form" : "monodromy";
  if (reference != "none" && c.geometry.kind != GeometryKind::circle)
    throw ConfigError("methods.reference", reference + " is only available on the circle");
  if (reference == "closed_form" && !V.is_zero())
    throw ConfigError("methods.reference", "closed_form needs V = 0");

  ExperimentOutput out;
  out.methods = {"zeta_mellin"};
  out.table.columns = {"method", "log_det_re", "log_det_im", "det_re", "det_im", "error"};
  auto row = [&](const std::string& name, const DetResult& d) {
    out.table.rows.push_back({name, fmt(d.log_value.real()), fmt(d.log_value.imag()), fmt(d.value.real()),
                              fmt(d.value.imag()), fmt(d.error)});
  };
  row("zeta_mellin", r);
  out.results["zeta_mellin"] = det_json(r);
  out.results["value"] = r.value.real();

  std::optional<DetResult> ref;
  if (reference == "closed_form") {
    ref = DetResult::from_log(std::log(free_circle_zeta_det(c.geometry.length, c.geometry.mass)), Method::zeta_mellin);
    ref->tags = {"closed_form"};
  } else if (reference == "monodromy") {
    ref = zeta_det_monodromy(V, c.geometry.mass, c.geometry);
  }
  if (ref) {
    out.methods.push_back(reference);
    row(reference, *ref);
    out.results[reference] = det_json(*ref);
    const double rel = std::abs(std::exp(r.log_value - ref->log_value) - 1.0);
    out.checks.push_back(bounded("relative", rel, ctx.tol("relative"), "zeta_mellin against " + reference));
  }
  return out;
}

ExperimentOutput run_gkdet(Context& ctx) {
  const auto& c = ctx.config;
  require_continuum(c);
  const PerturbationField V = c.field();
  const ModeBasis basis(c.geometry, c.cutoff);
  const int p = default_p(c);
  const cplx z(ctx.method("z")[0].get<double>(), ctx.method("z")[1].get<double>());
  const Eigen::MatrixXcd A = z * green_compose(free_laplace(basis), V);

  ExperimentOutput out;
  out.methods = {"gk_product"};
  out.table.columns = {"route", "p", "log_det_re", "log_det_im", "error"};
  auto row = [&](const std::string& name, const DetResult& d) {
    out.table.rows.push_back({name, fmt(p), fmt(d.log_value.real()), fmt(d.log_value.imag()), fmt(d.error)});
    out.results[name] = det_json(d);
  };
  const DetResult product = gk_det_from_spectrum(p, linalg::eigvals_auto(A));
  row("gk_product", product);
  if (A.rows() <= GkOptions{}.cross_check_max_dim) {
    // R_1 is the identity map, so p = 1 cross-checks against LU.
    const DetResult rp = p >= 2 ? gk_det_rp(p, A) : fredholm_det_lu(A);
    const std::string name = p >= 2 ? "gk_rp" : "fredholm_lu";
    row(name, rp);
    out.methods.push_back(name);
    const double gap = std::abs(std::exp(rp.log_value - product.log_value) - 1.0);
    out.checks.push_back(bounded("routes", gap, ctx.tol("routes"), "box product against " + name));
  }
  if (ctx.method("tail_correction").get<bool>()) {
    GkRay::Options o;
    o.max_abs_z = std::max(std::abs(z), 1e-300);
    const DetResult tail = GkRay(V, basis, p, o)(z);
    row("tail_corrected", tail);
    out.methods.push_back("tail_corrected");
  }
  out.results["p"] = p;
  out.results["z"] = to_json(z);
  return out;
}

ExperimentOutput run_factorize(Context& ctx) {
  const auto& c = ctx.config;
  require_continuum(c);
  const PerturbationField V = c.field();
  const ModeBasis basis(c.geometry, c.cutoff);
  const bool dirac = ctx.method("operator").get<std::string>() == "dirac";
  FactorizationOptions o;
  const int points = ctx.method("points").get<int>();
  const double lo = ctx.method("z_min").get<double>(), hi = ctx.method("z_max").get<double>();
  if (points < 3) throw ConfigError("methods.points", "need at least 3 grid points");
  for (int i = 0; i < points; ++i) o.z_grid.push_back(lo + (hi - lo) * i / (points - 1));
  o.p = ctx.method("p").get<int>();
  o.allowed_degree = ctx.method("allowed_degree").get<int>();
  o.tolerance = ctx.tol("fit");
  const int d = c.geometry.dim();
  const int allowed = o.allowed_degree >= 0 ? o.allowed_degree : (dirac ? d : d / 2);

  ExperimentOutput out;
  out.methods = {dirac ? "dirac_zeta" : "zeta_mellin", "gk_ray"};
  out.table.columns = {"z_re", "z_im", "g_re", "g_im", "fit_re", "fit_im", "residual"};
  try {
    const PolynomialInZ q = dirac ? q_polynomial_fit_dirac(V, ctx.method("dirac_mass").get<double>(), basis, o)
                                  : q_polynomial_fit(V, basis, o);
    for (std::size_t i = 0; i < q.grid.size(); ++i) {
      const cplx f = q(q.grid[i]);
      out.table.rows.push_back({fmt(q.grid[i].real()), fmt(q.grid[i].imag()), fmt(q.values[i].real()),
                                fmt(q.values[i].imag()), fmt(f.real()), fmt(f.imag()), fmt(q.residuals[i])});
    }
    json coeffs = json::array(), errors = json::array();
    for (std::size_t j = 0; j < q.coefficients.size(); ++j) {
      coeffs.push_back(to_json(q.coefficients[j]));
      errors.push_back(q.std_errors[j]);
    }
    out.results["coefficients"] = coeffs;
    out.results["std_errors"] = errors;
    out.results["degree"] = q.degree;
    out.results["skipped"] = q.skipped.size();
    out.checks.push_back(flag("degree", q.degree <= allowed, q.degree, "allowed " + std::to_string(allowed)));
    out.checks.push_back(bounded("fit", q.residual, o.tolerance, "rms residual"));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::fit_failure) throw;
    out.checks.push_back(flag("fit", false, no_bound, e.what()));
  }
  return out;
}

std::vector<Bump> parse_bumps(const json& a) {
  std::vector<Bump> out;
  for (const auto& b : a) {
    Bump x;
    x.center = {b.at("center")[0].get<double>(), b.at("center").size() > 1 ? b.at("center")[1].get<double>() : 0.0};
    x.radius = b.at("radius").get<double>();
    x.amplitude = b.at("amplitude").get<double>();
    out.push_back(x);
  }
  return out;
}

void derivative_row(ExperimentOutput& out, const std::string& kind, const DerivativeReport& r) {
  out.table.rows.push_back({kind, fmt(r.order), fmt(r.derivative.real()), fmt(r.derivative.imag()),
                            fmt(r.oracle.real()), fmt(r.oracle.imag()), fmt(r.relative_error), fmt(r.fd_error),
                            r.monotone ? "1" : "0"});
  out.results[kind + "_" + std::to_string(r.order)] = {{"derivative", to_json(r.derivative)},
                                                        {"oracle", to_json(r.oracle)},
                                                        {"relative_error", r.relative_error},
                                                        {"fd_error", r.fd_error},
                                                        {"steps", r.steps},
                                                        {"step_errors", r.step_errors},
                                                        {"monotone", r.monotone}};
}

ExperimentOutput run_derivatives(Context& ctx) {
  const auto& c = ctx.config;
  require_continuum(c);
  const PerturbationField V = c.field();
  const ModeBasis basis(c.geometry, c.cutoff);
  GateauxOptions fd;
  fd.steps = ctx.method("steps").get<std::vector<double>>();
  const std::string kind = ctx.method("kind").get<std::string>();

  ExperimentOutput out;
  out.methods = {"zeta_mellin", "gateaux_richardson", kind};
  out.table.columns = {"kind",      "order",          "derivative_re", "derivative_im", "oracle_re",
                       "oracle_im", "relative_error", "fd_error",      "monotone"};
  if (kind == "trace_identity") {
    TraceIdentityOptions o;
    o.fd = fd;
    for (int n : ctx.method("orders").get<std::vector<int>>()) {
      if (n < 2 || n > 4) throw ConfigError("methods.orders", "orders must lie in 2..4");
      if (ctx.log) *ctx.log << "trace identity, order " << n << '\n';
      const auto r = trace_identity_check(V, basis, n, o);
      derivative_row(out, kind, r);
      out.checks.push_back(bounded("order_" + std::to_string(n), r.relative_error, ctx.tol("relative")));
    }
  } else {
    const auto dirs = DirectionSet::from_bumps(c.geometry, parse_bumps(ctx.method("bumps")), ctx.method("band").get<int>());
    const auto r = disjoint_support_check(V, dirs, basis, fd);
    derivative_row(out, kind, r);
    out.results["support_disjoint"] = r.support_disjoint;
    out.checks.push_back(bounded("disjoint_support", r.relative_error, ctx.tol("relative"),
                                 r.support_disjoint ? "disjoint supports" : "overlapping supports"));
  }
  return out;
}

ExperimentOutput run_renormalize(Context& ctx) {
  const auto& c = ctx.config;
  require_continuum(c);
  const PerturbationField V = c.field();
  const ModeBasis basis(c.geometry, c.cutoff);
  RenormOptions o;
  o.eps_grid = geometric_grid(ctx.method("eps_min").get<double>(), ctx.method("eps_max").get<double>(),
                              ctx.method("points").get<int>());
  const RenormalizedDet r = renormalized_det(V, c.geometry, basis, o);

  ExperimentOutput out;
  out.methods = {"regularized_fredholm", "counterterm_fit", "renormalized"};
  out.table.columns = {"epsilon", "log_det_regularized", "fit_log_eps", "fit_const", "residual"};
  const double log_eps = r.fit.coefficient("log_eps"), konst = r.fit.coefficient("const");
  for (const auto& [eps, v] : r.samples)
    out.table.rows.push_back(
        {fmt(eps), fmt(v.real()), fmt(log_eps), fmt(konst), fmt(v.real() - r.fit.evaluate(eps).real())});
  out.results["renormalized"] = det_json(r.det);
  json coeffs = json::object();
  for (const auto& tag : r.fit.basis)
    coeffs[tag] = {{"value", r.fit.coefficient(tag)}, {"std_error", r.fit.standard_error(tag)}};
  out.results["fit"] = coeffs;
  out.checks.push_back(bounded("fit_residual", r.fit.residual, ctx.tol("fit_residual")));
  out.checks.push_back(bounded("richardson_gap", r.det.params.at("richardson_gap"), ctx.tol("richardson_gap"),
                               "fitted constant against Richardson extrapolation"));
  return out;
}

json estimate_json(const MCEstimate& e) {
  return {{"mean", e.mean}, {"std_error", e.std_error}, {"samples", e.samples}, {"seed", e.seed}};
}

ExperimentOutput run_gff(Context& ctx) {
  const auto& c = ctx.config;
  require_continuum(c);
  const PerturbationField V = c.field();
  const ModeBasis basis(c.geometry, c.cutoff);
  const auto samples = std::size_t(ctx.method("samples").get<int>());
  const auto scan = ctx.method("scan_eps").get<std::vector<double>>();

  ExperimentOutput out;
  if (!scan.empty()) {
    const GffEpsScan s = gff_log_eps_scan(V, scan, samples, c.seed, basis);
    out.methods = {"gff_mc", "common_random_numbers", "log_eps_scan"};
    out.table.columns = {"epsilon",       "plain_mean",          "plain_std_error",      "renormalized_mean",
                         "renormalized_std_error", "plain_log_mean", "renormalized_log_mean"};
    for (const auto& r : s.rows)
      out.table.rows.push_back({fmt(r.eps), fmt(r.plain.mean), fmt(r.plain.std_error), fmt(r.renormalized.mean),
                                fmt(r.renormalized.std_error), fmt(r.plain_log_mean),
                                fmt(r.renormalized_log_mean)});
    auto ratio = [](const AsymptoticFit& f) {
      const double se = f.standard_error("log_eps");
      return se > 0 ? std::abs(f.coefficient("log_eps")) / se : std::numeric_limits<double>::infinity();
    };
    out.results["plain_log_eps"] = {{"value", s.plain_fit.coefficient("log_eps")},
                                    {"std_error", s.plain_fit.standard_error("log_eps")}};
    out.results["renormalized_log_eps"] = {{"value", s.renormalized_fit.coefficient("log_eps")},
                                           {"std_error", s.renormalized_fit.standard_error("log_eps")}};
    out.checks.push_back(flag("plain_has_log", s.plain_has_log, ratio(s.plain_fit), "|coefficient| / std_error > 3"));
    out.checks.push_back(flag("renormalized_has_no_log", !s.renormalized_has_log, ratio(s.renormalized_fit),
                              "|coefficient| / std_error <= 3"));
    return out;
  }
  const double eps = ctx.method("epsilon").get<double>();
  const bool renormalized = ctx.method("renormalized").get<bool>();
  const PartitionResult r = renormalized ? mc_partition_renormalized(V, eps, samples, c.seed, basis)
                                         : mc_partition(V, eps, samples, c.seed, basis);
  out.methods = {"gff_mc", renormalized ? "det_2_reference" : "fredholm_reference"};
  out.table.columns = {"epsilon", "mean", "std_error", "samples", "reference", "deviation_sigmas"};
  out.table.rows.push_back({fmt(eps), fmt(r.estimate.mean), fmt(r.estimate.std_error), fmt(r.estimate.samples),
                            fmt(r.reference_value), fmt(r.deviation_sigmas)});
  out.results["estimate"] = estimate_json(r.estimate);
  out.results["reference"] = det_json(r.reference);
  out.results["min_eigenvalue"] = r.min_eigenvalue;
  out.results["counterterm"] = r.counterterm;
  out.checks.push_back(bounded("sigmas", r.deviation_sigmas, ctx.tol("sigmas"), "|mean - reference| / std_error"));
  return out;
}

ExperimentOutput run_dgff(Context& ctx) {
  const auto& c = ctx.config;
  if (c.geometry.kind != GeometryKind::torus2) throw ConfigError("geometry.kind", "dgff needs torus2");
  DgffOptions o;
  o.sizes = ctx.method("sizes").get<std::vector<int>>();
  o.continuum_cutoff = c.cutoff;
  const DgffResult r = dgff_ratio(c.field(), c.geometry, o);

  ExperimentOutput out;
  out.methods = {"lattice_sparse_ldlt", "neville_h2", "zeta_mellin"};
  out.table.columns = {"size", "mesh", "log_ratio", "extrapolated", "error"};
  for (const auto& row : r.rows)
    out.table.rows.push_back(
        {fmt(row.size), fmt(row.mesh), fmt(row.log_ratio), fmt(row.extrapolated), fmt(row.error)});
  out.results["extrapolated_log_ratio"] = r.extrapolated_log_ratio;
  out.results["continuum_log_ratio"] = r.continuum_log_ratio;
  out.results["continuum"] = det_json(r.continuum);
  out.checks.push_back(bounded("relative", r.relative_error, ctx.tol("relative"), "extrapolated against continuum"));
  out.checks.push_back(flag("monotone", r.monotone, r.monotone ? 1.0 : 0.0, "raw errors decrease with size"));
  return out;
}

ExperimentOutput run_order(Context& ctx) {
  const auto& c = ctx.config;
  require_continuum(c);
  const ModeBasis basis(c.geometry, c.cutoff);
  const int p = default_p(c);
  const GrowthReport r = growth_bound_check(c.field(), basis, p);

  ExperimentOutput out;
  out.methods = {"gk_ray", "max_modulus_fit"};
  out.table.columns = {"angle", "order"};
  for (std::size_t i = 0; i < r.angles.size() && i < r.estimate.per_ray.size(); ++i)
    out.table.rows.push_back({fmt(r.angles[i]), fmt(r.estimate.per_ray[i])});
  out.results["order"] = r.estimate.order;
  out.results["uncertainty"] = r.estimate.uncertainty;
  out.results["window"] = {r.lower_bound, r.upper_bound};
  out.results["radii"] = r.radii;
  out.results["p"] = p;
  std::ostringstream note;
  note << "window [" << r.lower_bound << ", " << r.upper_bound << "]";
  out.checks.push_back(flag("order_window", r.within_window, r.estimate.order, note.str()));
  return out;
}

ExperimentOutput dispatch(Context& ctx) {
  const std::string& e = ctx.config.experiment;
  if (e == "zeta") return run_zeta(ctx);
  if (e == "gkdet") return run_gkdet(ctx);
  if (e == "factorize") return run_factorize(ctx);
  if (e == "derivatives") return run_derivatives(ctx);
  if (e == "renormalize") return run_renormalize(ctx);
  if (e == "gff-mc") return run_gff(ctx);
  if (e == "dgff") return run_dgff(ctx);
  if (e == "order") return run_order(ctx);
  throw ConfigError("experiment", "unknown experiment '" + e + "'");
}

bool all_pass(const ExperimentOutput& out) {
  for (const auto& c : out.checks)
    if (!c.pass) return false;
  return true;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
}

}  // namespace

const char* version_string() { return SPECDET_VERSION; }

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0) x = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string render_csv(const ExperimentConfig& config, const ExperimentOutput& output) {
  std::ostringstream os;
  os << "# specdet " << version_string() << '\n';
  os << "# experiment=" << config.experiment << '\n';
  os << "# config_hash=" << config_hash(config) << '\n';
  os << "# seed=" << config.seed << '\n';
  os << "# cutoff=" << config.cutoff << '\n';
  os << "# methods=";
  for (std::size_t i = 0; i < output.methods.size(); ++i) os << (i ? ";" : "") << output.methods[i];
  os << '\n';
  for (const auto& c : output.checks)
    os << "# check " << c.name << " value=" << format_double(c.value) << " tolerance=" << format_double(c.tolerance)
       << ' ' << (c.pass ? "PASS" : "FAIL") << '\n';
  os << "# verdict=" << (all_pass(output) ? "PASS" : "FAIL") << '\n';
  for (std::size_t i = 0; i < output.table.columns.size(); ++i) os << (i ? "," : "") << output.table.columns[i];
  os << '\n';
  for (const auto& row : output.table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
  return os.str();
}

RunResult run(const ExperimentConfig& config, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const std::filesystem::path out_dir(config.output);
  std::filesystem::create_directories(out_dir);

  std::optional<EigenCache> cache;
  if (options.use_cache) {
    const auto dir = options.cache_dir ? *options.cache_dir : cache_dir_from_env(out_dir / "cache");
    cache.emplace(dir, cache_format_version, [log = options.log](const std::string& m) {
      if (log) *log << "warning: " << m << '\n';
    });
  }
  Context ctx{config, cache ? &*cache : nullptr, options.log};

  RunResult result;
  ExperimentOutput output;
  std::string error;
  try {
    output = dispatch(ctx);
  } catch (const Error& e) {
    error = std::string(to_string(e.kind())) + ": " + e.what();
  }
  const bool pass = error.empty() && all_pass(output);
  result.exit_code = !error.empty() ? exit_runtime_error : pass ? exit_pass : exit_check_failed;

  json checks = json::array();
  for (const auto& c : output.checks) {
    json j{{"name", c.name}, {"value", c.value}, {"pass", c.pass}, {"note", c.note}};
    j["tolerance"] = std::isnan(c.tolerance) ? json(nullptr) : json(c.tolerance);
    if (!std::isfinite(c.value)) j["value"] = format_double(c.value);
    checks.push_back(j);
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json& s = result.summary;
  s["experiment"] = config.experiment;
  s["config"] = to_json(config);
  s["config_hash"] = config_hash(config);
  s["seed"] = config.seed;
  s["cutoff"] = config.cutoff;
  s["methods"] = output.methods;
  s["checks"] = checks;
  s["pass"] = pass;
  s["exit_code"] = result.exit_code;
  s["results"] = output.results;
  if (!error.empty()) s["error"] = error;
  s["versions"] = {{"specdet", version_string()},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"compiler", __VERSION__},
                   {"builder", builder_version},
                   {"cache_format", cache_format_version},
                   {"mode_ordering", ModeBasis::ordering_version}};
  s["cache"] = {{"enabled", cache.has_value()},
                {"dir", cache ? cache->dir().string() : std::string()},
                {"hits", ctx.hits},
                {"misses", ctx.misses}};
  s["wall_time_seconds"] = wall;
  s["timestamp"] = utc_timestamp();

  result.csv_path = out_dir / (config.experiment + ".csv");
  result.summary_path = out_dir / (config.experiment + ".json");
  s["csv"] = result.csv_path.filename().string();
  write_file(result.csv_path, render_csv(config, output));
  write_file(result.summary_path, s.dump(2) + "\n");
  return result;
}

}  // namespace specdet::cli
