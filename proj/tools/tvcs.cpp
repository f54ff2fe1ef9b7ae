// Command-line front end: problem generation, solver runs with manifests and
// append-only logs, rate/certificate analysis, parameter sweeps, and a
// three-method trajectory comparison.
//
// Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 I/O failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tvcs/analysis.hpp"
#include "tvcs/bundle.hpp"
#include "tvcs/csv.hpp"
#include "tvcs/grid.hpp"
#include "tvcs/mask.hpp"
#include "tvcs/phantom.hpp"
#include "tvcs/prox.hpp"
#include "tvcs/solvers.hpp"
#include "tvcs/spectral.hpp"
#include "tvcs/util.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace tvcs;

namespace {

std::string fmt_g17(double x) {
  char b[64];
  std::snprintf(b, sizeof b, "%.17g", x);
  return b;
}

std::string hex64(std::uint64_t h) {
  char b[24];
  std::snprintf(b, sizeof b, "%016llx", static_cast<unsigned long long>(h));
  return b;
}

// "64x64", "64,64", and "32x32x32" all parse; GridShape rejects d outside 1..3.
GridShape parse_shape(const std::string& text) {
  std::vector<int> dims;
  std::string cur;
  for (char ch : text + "x") {
    if (ch == 'x' || ch == 'X' || ch == ',') {
      if (cur.empty()) throw std::invalid_argument("shape: empty extent in '" + text + "'");
      std::size_t used = 0;
      int n = std::stoi(cur, &used);
      if (used != cur.size()) throw std::invalid_argument("shape: bad extent '" + cur + "'");
      dims.push_back(n);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (dims.size() > 3)
    throw std::invalid_argument("shape: at most 3 extents supported, got " +
                                std::to_string(dims.size()));
  GridShape s(dims);
  for (int i = 0; i < s.d; ++i)
    if (s.n[i] < 2) throw std::invalid_argument("shape: extents must be >= 2");
  return s;
}

std::vector<double> parse_grid(const std::string& text, const char* what) {
  std::vector<double> out;
  std::string cur;
  for (char ch : text + ",") {
    if (ch == ',') {
      if (!cur.empty()) {
        char* end = nullptr;
        double v = std::strtod(cur.c_str(), &end);
        if (end != cur.c_str() + cur.size())
          throw std::invalid_argument(std::string(what) + ": bad grid value '" + cur + "'");
        out.push_back(v);
        cur.clear();
      }
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur += ch;
    }
  }
  return out;
}

std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("manifest: cannot hash missing file: " + path);
  std::vector<char> buf(1 << 16);
  std::uint64_t h = 0xcbf29ce484222325ull;
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h = fnv1a64(buf.data(), static_cast<std::size_t>(in.gcount()), h);
  }
  return h;
}

json num_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

// --out-dir flag wins, then TVCS_DATA_DIR, then the working directory.
std::string resolve_out_dir(const std::string& flag) {
  std::string dir = flag;
  if (dir.empty()) {
    const char* env = std::getenv("TVCS_DATA_DIR");
    dir = (env && *env) ? env : ".";
  }
  fs::create_directories(dir);
  return dir;
}

Method parse_method(const std::string& name) {
  if (name == "admm") return Method::admm;
  if (name == "drs") return Method::drs;
  if (name == "pdhg") return Method::pdhg;
  throw std::invalid_argument("method: expected admm, drs, or pdhg");
}

Precision parse_precision(const std::string& name) {
  if (name == "f32") return Precision::f32;
  if (name == "f64") return Precision::f64;
  throw std::invalid_argument("precision: expected f32 or f64");
}

json config_json(const SolverConfig& cfg) {
  json j;
  j["method"] = method_name(cfg.method);
  j["tau"] = cfg.tau;
  j["gamma"] = cfg.gamma();
  j["lambda"] = cfg.lambda;
  j["alpha"] = cfg.alpha ? json(*cfg.alpha) : json(nullptr);
  j["max_iters"] = cfg.max_iters;
  j["tol"] = cfg.tol;
  j["log_every"] = cfg.log_every;
  j["precision"] = precision_name(cfg.precision);
  return j;
}

SolverConfig config_from_json(const json& j) {
  SolverConfig cfg;
  cfg.method = parse_method(j.at("method").get<std::string>());
  cfg.tau = j.at("tau").get<double>();
  cfg.lambda = j.at("lambda").get<double>();
  if (!j.at("alpha").is_null()) cfg.alpha = j.at("alpha").get<double>();
  cfg.max_iters = j.at("max_iters").get<std::int64_t>();
  cfg.tol = j.at("tol").get<double>();
  cfg.log_every = j.at("log_every").get<std::int64_t>();
  cfg.precision = parse_precision(j.at("precision").get<std::string>());
  return cfg;
}

json artifact_json(const std::string& path) {
  json j;
  j["path"] = path;
  j["fnv1a64"] = hex64(hash_file(path));
  return j;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw io_error("write failed: " + path);
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw io_error("malformed JSON in " + path + ": " + e.what());
  }
}

double meta_num(const std::map<std::string, std::string>& m, const std::string& key) {
  auto it = m.find(key);
  if (it == m.end()) throw io_error("state bundle: missing metadata key '" + key + "'");
  char* end = nullptr;
  double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str()) throw io_error("state bundle: bad number for '" + key + "'");
  return v;
}

std::string meta_str(const std::map<std::string, std::string>& m, const std::string& key) {
  auto it = m.find(key);
  if (it == m.end()) throw io_error("state bundle: missing metadata key '" + key + "'");
  return it->second;
}

std::vector<double> widen_field(const Bundle& b, const std::string& name) {
  const BundleField* f = b.find(name);
  if (!f) throw io_error("state bundle: missing field '" + name + "'");
  if (const auto* d = std::get_if<std::vector<double>>(&f->data)) return *d;
  if (const auto* s = std::get_if<std::vector<float>>(&f->data))
    return std::vector<double>(s->begin(), s->end());
  throw io_error("state bundle: field '" + name + "' is not real-valued");
}

// ---- phantom --------------------------------------------------------------

struct PhantomArgs {
  std::string shape;
  std::string kind = "shepp-logan";
  double fraction = 0.3;
  std::uint64_t seed = 1;
  bool unsymmetrized = false;
  std::string out;
  std::string out_dir;
};

int run_phantom(const PhantomArgs& a) {
  GridShape s = parse_shape(a.shape);
  Phantom ph;
  if (a.kind == "staircase") {
    if (s.d != 1) throw std::invalid_argument("phantom: staircase requires a 1D shape");
    ph = staircase_1d(s.n[0]);
  } else {
    ph = shepp_logan(s);
  }
  SamplingMask mask = sample_mask(s, a.fraction, a.seed, !a.unsymmetrized);
  mask = measure(ph.image, mask);
  std::string out = a.out;
  if (out.empty()) out = resolve_out_dir(a.out_dir) + "/problem.bundle";
  save_bundle(out, make_problem_bundle(&ph, mask));
  std::printf("phantom: wrote %s (%s, |omega| = %zu of %lld)\n", out.c_str(), ph.name.c_str(),
              mask.omega.size(), static_cast<long long>(s.size()));
  return 0;
}

// ---- solve ----------------------------------------------------------------

struct SolveArgs {
  std::string bundle;
  std::string method = "pdhg";
  double tau = 0.01;
  double gamma = 0;
  bool has_tau = false, has_gamma = false;
  double lambda = 1.0;
  double alpha = 0;
  bool has_alpha = false;
  std::int64_t iters = 1000;
  double tol = 1e-12;
  std::int64_t log_every = 1;
  std::string precision = "f64";
  std::string out_dir;
  std::string tag = "run";
  std::string replay;
};

SolverConfig build_config(const SolveArgs& a) {
  SolverConfig cfg;
  cfg.method = parse_method(a.method);
  cfg.tau = a.has_gamma ? 1.0 / a.gamma : a.tau;
  cfg.lambda = a.lambda;
  if (a.has_alpha) cfg.alpha = a.alpha;
  cfg.max_iters = a.iters;
  cfg.tol = a.tol;
  cfg.log_every = a.log_every;
  cfg.precision = parse_precision(a.precision);
  cfg.validate();
  return cfg;
}

// Final states of every method are stored as the equivalent splitting pair
// (q, v) plus the primal image, so analysis never needs to re-translate.
template <class Real>
void pack_state(const RunResult<Real>& res, const SolverConfig& cfg, const GridShape& shape,
                Bundle& out) {
  DrsState<Real> d;
  if (const auto* st = std::get_if<AdmmState<Real>>(&res.state)) {
    d = drs_from_admm(*st, cfg.tau);
  } else if (const auto* st = std::get_if<PdhgState<Real>>(&res.state)) {
    d = drs_from_pdhg(*st, cfg.tau);
  } else {
    d = std::get<DrsState<Real>>(res.state);
  }
  out.shape = shape;
  out.fields.push_back({"u", d.u.v});
  for (int i = 0; i < shape.d; ++i) {
    out.fields.push_back({"q" + std::to_string(i), d.q.c[i]});
    out.fields.push_back({"v" + std::to_string(i), d.v.c[i]});
  }
  out.metadata["kind"] = "state";
  out.metadata["method"] = method_name(cfg.method);
  out.metadata["tau"] = fmt_g17(cfg.tau);
  out.metadata["lambda"] = fmt_g17(cfg.lambda);
  out.metadata["alpha"] = cfg.alpha ? fmt_g17(*cfg.alpha) : "none";
  out.metadata["precision"] = precision_name(cfg.precision);
  out.metadata["max_iters"] = std::to_string(cfg.max_iters);
  out.metadata["tol"] = fmt_g17(cfg.tol);
  out.metadata["log_every"] = std::to_string(cfg.log_every);
  out.metadata["iters"] = std::to_string(res.iters);
  out.metadata["converged"] = res.converged ? "1" : "0";
}

template <class Real>
RunResult<Real> solve_with(const ProblemInstance& prob, const SolverConfig& cfg,
                           const std::string& log_path) {
  SpectralOperator<Real> spec(prob.shape);
  GradientDataProjector<Real> proj(spec, prob.mask);
  RunRefs refs;
  if (prob.truth) refs.u_ref = &*prob.truth;
  LogCsvWriter log(log_path);
  refs.on_row = [&log](const LogRow& r) { log.append(r); };
  return run(proj, cfg, refs);
}

int run_solve(const SolveArgs& args) {
  SolveArgs a = args;
  std::string bundle_path = a.bundle;
  SolverConfig cfg;
  if (!a.replay.empty()) {
    json m = read_json(a.replay);
    try {
      cfg = config_from_json(m.at("config"));
      bundle_path = m.at("inputs").at("bundle").at("path").get<std::string>();
      std::string recorded = m.at("inputs").at("bundle").at("fnv1a64").get<std::string>();
      if (hex64(hash_file(bundle_path)) != recorded)
        throw io_error("replay: input bundle changed since the manifest was written");
    } catch (const json::exception& e) {
      throw io_error("replay: manifest missing fields: " + std::string(e.what()));
    }
  } else {
    if (a.bundle.empty()) throw std::invalid_argument("solve: --bundle is required");
    cfg = build_config(a);
  }

  ProblemInstance prob = unpack_problem(load_bundle(bundle_path));
  std::string dir = resolve_out_dir(a.out_dir);
  std::string log_path = dir + "/" + a.tag + "_log.csv";
  std::string state_path = dir + "/" + a.tag + "_state.bundle";
  std::string manifest_path = dir + "/" + a.tag + "_manifest.json";

  auto t0 = std::chrono::steady_clock::now();
  Bundle state;
  std::int64_t iters = 0;
  bool converged = false;
  if (cfg.precision == Precision::f32) {
    RunResult<float> res = solve_with<float>(prob, cfg, log_path);
    pack_state(res, cfg, prob.shape, state);
    iters = res.iters;
    converged = res.converged;
  } else {
    RunResult<double> res = solve_with<double>(prob, cfg, log_path);
    pack_state(res, cfg, prob.shape, state);
    iters = res.iters;
    converged = res.converged;
  }
  save_bundle(state_path, state);
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json m;
  m["format_version"] = 1;
  m["command"] = "solve";
  m["config"] = config_json(cfg);
  m["seeds"] = {{"mask_seed", prob.mask.seed}};
  m["inputs"] = {{"bundle", artifact_json(bundle_path)}};
  m["outputs"] = {{"log", artifact_json(log_path)}, {"state", artifact_json(state_path)}};
  m["timings"] = {{"seconds", seconds}};
  write_json(manifest_path, m);

  std::printf("solve: method=%s precision=%s iters=%lld converged=%d\n", method_name(cfg.method),
              precision_name(cfg.precision), static_cast<long long>(iters), converged ? 1 : 0);
  std::printf("solve: log=%s state=%s manifest=%s\n", log_path.c_str(), state_path.c_str(),
              manifest_path.c_str());
  return 0;
}

// ---- analyze --------------------------------------------------------------

struct AnalyzeArgs {
  std::string bundle;
  std::string solution;
  double tau = 0, gamma = 0, lambda = 0;
  bool has_tau = false, has_gamma = false, has_lambda = false;
  std::int64_t traj_iters = 0;  // 0 = reuse the solve iteration budget
  double cert_tol = 1e-8;
  double support_eps = 1e-8;
  double eps_int = 1e-6;
  std::int64_t dense_limit = 4096;
  std::string out;
  std::string out_dir;
};

int run_analyze(const AnalyzeArgs& a) {
  ProblemInstance prob = unpack_problem(load_bundle(a.bundle));
  Bundle sol = load_bundle(a.solution);
  if (meta_str(sol.metadata, "kind") != "state")
    throw io_error("analyze: " + a.solution + " is not a solver state bundle");
  if (sol.shape != prob.shape) throw io_error("analyze: bundle and solution shapes differ");

  SolverConfig cfg;
  cfg.method = parse_method(meta_str(sol.metadata, "method"));
  cfg.tau = meta_num(sol.metadata, "tau");
  cfg.lambda = meta_num(sol.metadata, "lambda");
  std::string alpha = meta_str(sol.metadata, "alpha");
  if (alpha != "none") cfg.alpha = meta_num(sol.metadata, "alpha");
  cfg.max_iters = static_cast<std::int64_t>(meta_num(sol.metadata, "max_iters"));
  cfg.tol = meta_num(sol.metadata, "tol");
  std::string state_precision = meta_str(sol.metadata, "precision");
  if (a.has_gamma) cfg.tau = 1.0 / a.gamma;
  if (a.has_tau) cfg.tau = a.tau;
  if (a.has_lambda) cfg.lambda = a.lambda;
  if (a.traj_iters > 0) cfg.max_iters = a.traj_iters;
  cfg.log_every = 1;
  cfg.precision = Precision::f64;  // the analysis machinery is double only
  cfg.validate();

  const GridShape& s = prob.shape;
  VectorField<double> qstar(s), vstar(s);
  for (int i = 0; i < s.d; ++i) {
    qstar.c[i] = widen_field(sol, "q" + std::to_string(i));
    vstar.c[i] = widen_field(sol, "v" + std::to_string(i));
    if (qstar.c[i].size() != static_cast<std::size_t>(s.size()))
      throw io_error("analyze: state field length does not match the shape");
  }

  SpectralOperator<double> spec(s);
  GradientDataProjector<double> proj(spec, prob.mask);
  CertificateReport cert = verify_fixed_point(qstar, vstar, cfg.tau, proj, a.cert_tol,
                                              a.support_eps);

  // replay the deterministic trajectory, logging the distance to the stored
  // fixed point, then fit the tail rate
  RunRefs refs;
  refs.q_ref = &qstar;
  RunResult<double> traj = run(proj, cfg, refs);
  std::vector<double> q_dist;
  q_dist.reserve(traj.log.rows.size());
  for (const LogRow& r : traj.log.rows) q_dist.push_back(r.q_dist);

  RateReport rep = build_rate_report(spec, prob.mask, vstar, cfg.tau, cfg.lambda, q_dist,
                                     a.support_eps, a.eps_int, a.dense_limit);

  json j;
  j["command"] = "analyze";
  j["bundle"] = a.bundle;
  j["solution"] = a.solution;
  j["state_precision"] = state_precision;
  j["config"] = config_json(cfg);
  j["angles"] = {{"cos_theta1", num_or_null(rep.cos_theta1)},
                 {"theta1", num_or_null(std::acos(std::min(1.0, rep.cos_theta1)))},
                 {"intersection_dim", rep.intersection_dim},
                 {"lemma_violation", rep.intersection_dim > 0},
                 {"kernel_real_dim", rep.kernel_real_dim},
                 {"kernel_complex_count", rep.kernel_complex_count},
                 {"support_size", rep.support_size}};
  j["rate"] = {{"h_norm", num_or_null(rep.h_norm)},
               {"min_mag", rep.min_mag},
               {"bound", num_or_null(rep.bound)},
               {"contractive", rep.contractive},
               {"observed", {{"found", rep.fit.found},
                             {"rate", num_or_null(rep.fit.rate)},
                             {"onset", rep.fit.onset},
                             {"window", rep.fit.window},
                             {"r2", num_or_null(rep.fit.r2)},
                             {"slope", num_or_null(rep.fit.slope)}}},
               {"trajectory_iters", traj.iters}};
  j["certificate"] = {{"classification", cert.interior ? "interior" : "boundary"},
                      {"interior", cert.interior},
                      {"subdiff_ok", cert.subdiff_ok},
                      {"support_align_err", cert.support_align_err},
                      {"off_support_excess", cert.off_support_excess},
                      {"range_ok", cert.range_ok},
                      {"range_residual", cert.range_residual},
                      {"margin_on", cert.margin_on},
                      {"margin_off", num_or_null(cert.margin_off)},
                      {"fixed_point_residual", cert.fixed_point_residual},
                      {"tol", cert.tol}};
  json warnings = json::array();
  if (rep.intersection_dim > 0)
    warnings.push_back("gradient kernel and support subspaces intersect; the angle-based "
                       "rate theory does not apply");
  if (!rep.contractive)
    warnings.push_back("rate bound >= 1; the local contraction guarantee is vacuous at "
                       "this step size");
  if (!rep.fit.found) warnings.push_back("no log-linear regime detected in the trajectory");
  j["warnings"] = warnings;

  std::string out = a.out;
  if (out.empty()) out = resolve_out_dir(a.out_dir) + "/report.json";
  write_json(out, j);
  std::printf("analyze: wrote %s (cos_theta1=%s bound=%s rate=%s %s)\n", out.c_str(),
              fmt_g17(rep.cos_theta1).c_str(), fmt_g17(rep.bound).c_str(),
              fmt_g17(rep.fit.rate).c_str(), cert.interior ? "interior" : "boundary");
  if (!rep.fit.found) {
    std::fprintf(stderr, "analyze: no log-linear regime detected\n");
    return 3;
  }
  return 0;
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
  std::string bundle;
  std::string method = "drs";
  std::string tau_grid, lambda_grid, alpha_grid, precision_grid;
  bool has_tau_grid = false, has_lambda_grid = false, has_alpha_grid = false,
       has_precision_grid = false;
  double tau = 0.01, gamma = 0;
  bool has_gamma = false;
  double lambda = 1.0;
  double alpha = 0;
  bool has_alpha = false;
  std::int64_t iters = 2000;
  double tol = 1e-12;
  std::string out_dir;
  std::string tag = "sweep";
};

struct SweepPoint {
  SolverConfig cfg;
  std::string status = "ok";
  std::int64_t iters = 0;
  bool converged = false;
  RateFit fit;
};

template <class Real>
void sweep_point(const ProblemInstance& prob, SweepPoint& pt, const std::string& log_path) {
  SpectralOperator<Real> spec(prob.shape);
  GradientDataProjector<Real> proj(spec, prob.mask);
  // two runs: converge to a reference pair, then replay the identical
  // trajectory logging the distance to it
  RunResult<Real> ref = run(proj, pt.cfg, {});
  Bundle tmp;
  pack_state(ref, pt.cfg, prob.shape, tmp);
  VectorField<double> qstar(prob.shape);
  for (int i = 0; i < prob.shape.d; ++i)
    qstar.c[i] = widen_field(tmp, "q" + std::to_string(i));
  RunRefs refs;
  refs.q_ref = &qstar;
  LogCsvWriter log(log_path);
  refs.on_row = [&log](const LogRow& r) { log.append(r); };
  RunResult<Real> traj = run(proj, pt.cfg, refs);
  pt.iters = traj.iters;
  pt.converged = ref.converged;
  std::vector<double> q_dist;
  q_dist.reserve(traj.log.rows.size());
  for (const LogRow& r : traj.log.rows) q_dist.push_back(r.q_dist);
  pt.fit = observed_rate(q_dist);
  if (!pt.fit.found) pt.status = "no_regime";
}

int run_sweep(const SweepArgs& a) {
  if (a.bundle.empty()) throw std::invalid_argument("sweep: --bundle is required");
  std::vector<double> taus = a.has_tau_grid
                                 ? parse_grid(a.tau_grid, "sweep")
                                 : std::vector<double>{a.has_gamma ? 1.0 / a.gamma : a.tau};
  std::vector<double> lambdas =
      a.has_lambda_grid ? parse_grid(a.lambda_grid, "sweep") : std::vector<double>{a.lambda};
  std::vector<std::optional<double>> alphas;
  if (a.has_alpha_grid) {
    for (double v : parse_grid(a.alpha_grid, "sweep")) alphas.push_back(v);
  } else if (a.has_alpha) {
    alphas.push_back(a.alpha);
  } else {
    alphas.push_back(std::nullopt);
  }
  std::vector<std::string> precisions;
  if (a.has_precision_grid) {
    std::string cur;
    for (char ch : a.precision_grid + ",") {
      if (ch == ',') {
        if (!cur.empty()) precisions.push_back(cur);
        cur.clear();
      } else if (!std::isspace(static_cast<unsigned char>(ch))) {
        cur += ch;
      }
    }
  } else {
    precisions.push_back("f64");
  }
  if (taus.empty() || lambdas.empty() || alphas.empty() || precisions.empty())
    throw std::invalid_argument("sweep: empty parameter grid");

  // every point must be a valid configuration before any work starts
  std::vector<SweepPoint> points;
  for (double tau : taus)
    for (double lambda : lambdas)
      for (const auto& alpha : alphas)
        for (const std::string& prec : precisions) {
          SweepPoint pt;
          pt.cfg.method = parse_method(a.method);
          pt.cfg.tau = tau;
          pt.cfg.lambda = lambda;
          pt.cfg.alpha = alpha;
          pt.cfg.max_iters = a.iters;
          pt.cfg.tol = a.tol;
          pt.cfg.log_every = 1;
          pt.cfg.precision = parse_precision(prec);
          pt.cfg.validate();
          points.push_back(pt);
        }

  std::string bundle_hash = hex64(hash_file(a.bundle));
  ProblemInstance prob = unpack_problem(load_bundle(a.bundle));
  std::string dir = resolve_out_dir(a.out_dir);

  auto t0 = std::chrono::steady_clock::now();
  json point_list = json::array();
  int failures = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    SweepPoint& pt = points[i];
    char suffix[32];
    std::snprintf(suffix, sizeof suffix, "_p%03zu_log.csv", i);
    std::string log_path = dir + "/" + a.tag + suffix;
    try {
      if (pt.cfg.precision == Precision::f32)
        sweep_point<float>(prob, pt, log_path);
      else
        sweep_point<double>(prob, pt, log_path);
    } catch (const numerical_error& e) {
      pt.status = "diverged";
      ++failures;
      std::fprintf(stderr, "sweep: point %zu diverged: %s\n", i, e.what());
    }
    json pj = config_json(pt.cfg);
    pj["status"] = pt.status;
    pj["log"] = log_path;
    point_list.push_back(pj);
  }
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::string summary_path = dir + "/" + a.tag + "_summary.csv";
  {
    std::ofstream out(summary_path, std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + summary_path);
    out << "index,method,tau,lambda,alpha,precision,status,iters,converged,rate,onset,window,r2\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
      const SweepPoint& pt = points[i];
      out << i << ',' << method_name(pt.cfg.method) << ',' << fmt_g17(pt.cfg.tau) << ','
          << fmt_g17(pt.cfg.lambda) << ','
          << (pt.cfg.alpha ? fmt_g17(*pt.cfg.alpha) : std::string("nan")) << ','
          << precision_name(pt.cfg.precision) << ',' << pt.status << ',' << pt.iters << ','
          << (pt.converged ? 1 : 0) << ',' << fmt_g17(pt.fit.found ? pt.fit.rate : std::nan(""))
          << ',' << pt.fit.onset << ',' << pt.fit.window << ','
          << fmt_g17(pt.fit.found ? pt.fit.r2 : std::nan("")) << '\n';
    }
    if (!out) throw io_error("write failed: " + summary_path);
  }

  json m;
  m["format_version"] = 1;
  m["command"] = "sweep";
  m["inputs"] = {{"bundle", {{"path", a.bundle}, {"fnv1a64", bundle_hash}}}};
  m["points"] = point_list;
  m["outputs"] = {{"summary", artifact_json(summary_path)}};
  m["timings"] = {{"seconds", seconds}};
  write_json(dir + "/" + a.tag + "_manifest.json", m);

  std::printf("sweep: %zu points, %d diverged, summary=%s\n", points.size(), failures,
              summary_path.c_str());
  return failures == static_cast<int>(points.size()) ? 3 : 0;
}

// ---- compare --------------------------------------------------------------

struct CompareArgs {
  std::string bundle;
  double tau = 0.01, gamma = 0;
  bool has_gamma = false;
  std::int64_t iters = 100;
  std::string out_dir;
  std::string tag = "compare";
};

int run_compare(const CompareArgs& a) {
  if (a.bundle.empty()) throw std::invalid_argument("compare: --bundle is required");
  ProblemInstance prob = unpack_problem(load_bundle(a.bundle));
  SolverConfig cfg;
  cfg.tau = a.has_gamma ? 1.0 / a.gamma : a.tau;
  cfg.max_iters = a.iters;
  cfg.validate();

  SpectralOperator<double> spec(prob.shape);
  GradientDataProjector<double> proj(spec, prob.mask);
  AdmmState<double> sa = init_admm(proj);
  PdhgState<double> sp = init_pdhg(proj);
  SolverConfig ca = cfg, cp = cfg, cd = cfg;
  ca.method = Method::admm;
  cp.method = Method::pdhg;
  cd.method = Method::drs;
  // the default start puts admm and pdhg on the same trajectory from k = 0;
  // drs joins via the state translation after one synchronized step
  admm_step(sa, proj, ca);
  pdhg_step(sp, proj, cp);
  DrsState<double> sd = drs_from_admm(sa, cfg.tau);

  std::string dir = resolve_out_dir(a.out_dir);
  std::string csv_path = dir + "/" + a.tag + ".csv";
  std::ofstream out(csv_path, std::ios::trunc);
  if (!out) throw io_error("cannot open for writing: " + csv_path);
  out << "iter,admm_pdhg,admm_drs,pdhg_drs,tv_spread\n";
  double max_dev = 0;
  for (std::int64_t k = sa.k;;) {
    VectorField<double> qa = detail::equivalent_q(sa, cfg.tau);
    VectorField<double> qp = detail::equivalent_q(sp, cfg.tau);
    double ap = dist2(qa, qp);
    double ad = dist2(qa, sd.q);
    double pd = dist2(qp, sd.q);
    double tva = tv_norm_field(sa.kx), tvp = tv_norm(sp.u), tvd = tv_norm(sd.u);
    double spread = std::max({tva, tvp, tvd}) - std::min({tva, tvp, tvd});
    out << k << ',' << fmt_g17(ap) << ',' << fmt_g17(ad) << ',' << fmt_g17(pd) << ','
        << fmt_g17(spread) << '\n';
    max_dev = std::max({max_dev, ap, ad, pd});
    if (k >= a.iters) break;
    admm_step(sa, proj, ca);
    pdhg_step(sp, proj, cp);
    drs_step(sd, proj, cd);
    k = sa.k;
  }
  if (!out) throw io_error("write failed: " + csv_path);
  std::printf("compare: %lld iterations, max pairwise q deviation %s, table=%s\n",
              static_cast<long long>(a.iters), fmt_g17(max_dev).c_str(), csv_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"isotropic total-variation compressed sensing toolkit"};
  app.require_subcommand(1);

  PhantomArgs pa;
  CLI::App* ph = app.add_subcommand("phantom", "generate a problem bundle (truth, mask, data)");
  ph->add_option("--shape", pa.shape, "grid extents, e.g. 64x64 or 32x32x32")->required();
  ph->add_option("--kind", pa.kind, "truth image family")
      ->check(CLI::IsMember({"shepp-logan", "staircase"}));
  ph->add_option("--fraction", pa.fraction, "observed frequency fraction");
  ph->add_option("--seed", pa.seed, "mask sampling seed");
  ph->add_flag("--unsymmetrized", pa.unsymmetrized, "sample plain indices, no conjugate pairing");
  ph->add_option("--out", pa.out, "output bundle path");
  ph->add_option("--out-dir", pa.out_dir, "output directory for default names");

  SolveArgs sa;
  CLI::App* so = app.add_subcommand("solve", "run a solver, write log + state + manifest");
  so->add_option("--bundle", sa.bundle, "problem bundle path");
  so->add_option("--method", sa.method, "admm, drs, or pdhg")
      ->check(CLI::IsMember({"admm", "drs", "pdhg"}));
  CLI::Option* so_tau = so->add_option("--tau", sa.tau, "primal step size");
  CLI::Option* so_gamma = so->add_option("--gamma", sa.gamma, "dual step size, tau = 1/gamma");
  so_tau->excludes(so_gamma);
  so_gamma->excludes(so_tau);
  so->add_option("--lambda", sa.lambda, "relaxation in (0, 2), drs only");
  CLI::Option* so_alpha = so->add_option("--alpha", sa.alpha, "regularization weight, drs only");
  so->add_option("--iters", sa.iters, "iteration cap");
  so->add_option("--tol", sa.tol, "relative step tolerance");
  so->add_option("--log-every", sa.log_every, "log row stride");
  so->add_option("--precision", sa.precision, "f32 or f64")
      ->check(CLI::IsMember({"f32", "f64"}));
  so->add_option("--out-dir", sa.out_dir, "output directory");
  so->add_option("--tag", sa.tag, "output base name");
  so->add_option("--replay", sa.replay, "rerun from a manifest, ignoring config flags");

  AnalyzeArgs an;
  CLI::App* az = app.add_subcommand("analyze", "rate bound + certificate report for a solution");
  az->add_option("--bundle", an.bundle, "problem bundle path")->required();
  az->add_option("--solution", an.solution, "state bundle from solve")->required();
  CLI::Option* az_tau = az->add_option("--tau", an.tau, "override the recorded step size");
  CLI::Option* az_gamma = az->add_option("--gamma", an.gamma, "override via gamma = 1/tau");
  az_tau->excludes(az_gamma);
  az_gamma->excludes(az_tau);
  CLI::Option* az_lambda = az->add_option("--lambda", an.lambda, "override the relaxation");
  az->add_option("--traj-iters", an.traj_iters, "iteration budget for the rate trajectory");
  az->add_option("--cert-tol", an.cert_tol, "certificate tolerance");
  az->add_option("--support-eps", an.support_eps, "relative support detection threshold");
  az->add_option("--eps-int", an.eps_int, "intersection classification threshold");
  az->add_option("--dense-limit", an.dense_limit, "largest dense angle computation");
  az->add_option("--out", an.out, "report path");
  az->add_option("--out-dir", an.out_dir, "output directory for default names");

  SweepArgs sw;
  CLI::App* swc = app.add_subcommand("sweep", "batch runs over a parameter grid");
  swc->add_option("--bundle", sw.bundle, "problem bundle path");
  swc->add_option("--method", sw.method, "admm, drs, or pdhg")
      ->check(CLI::IsMember({"admm", "drs", "pdhg"}));
  CLI::Option* sw_tg = swc->add_option("--tau-grid", sw.tau_grid, "comma-separated tau values");
  CLI::Option* sw_lg =
      swc->add_option("--lambda-grid", sw.lambda_grid, "comma-separated lambda values");
  CLI::Option* sw_ag =
      swc->add_option("--alpha-grid", sw.alpha_grid, "comma-separated alpha values");
  CLI::Option* sw_pg =
      swc->add_option("--precision-grid", sw.precision_grid, "comma-separated precisions");
  CLI::Option* sw_tau = swc->add_option("--tau", sw.tau, "single tau");
  CLI::Option* sw_gamma = swc->add_option("--gamma", sw.gamma, "single gamma, tau = 1/gamma");
  sw_tau->excludes(sw_gamma);
  sw_gamma->excludes(sw_tau);
  swc->add_option("--lambda", sw.lambda, "single lambda");
  CLI::Option* sw_alpha = swc->add_option("--alpha", sw.alpha, "single alpha");
  swc->add_option("--iters", sw.iters, "iteration cap per point");
  swc->add_option("--tol", sw.tol, "relative step tolerance");
  swc->add_option("--out-dir", sw.out_dir, "output directory");
  swc->add_option("--tag", sw.tag, "output base name");

  CompareArgs co;
  CLI::App* cm = app.add_subcommand("compare", "three-method trajectory deviation table");
  cm->add_option("--bundle", co.bundle, "problem bundle path");
  CLI::Option* cm_tau = cm->add_option("--tau", co.tau, "primal step size");
  CLI::Option* cm_gamma = cm->add_option("--gamma", co.gamma, "dual step size, tau = 1/gamma");
  cm_tau->excludes(cm_gamma);
  cm_gamma->excludes(cm_tau);
  cm->add_option("--iters", co.iters, "synchronized iterations");
  cm->add_option("--out-dir", co.out_dir, "output directory");
  cm->add_option("--tag", co.tag, "output base name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  sa.has_tau = so_tau->count() > 0;
  sa.has_gamma = so_gamma->count() > 0;
  sa.has_alpha = so_alpha->count() > 0;
  an.has_tau = az_tau->count() > 0;
  an.has_gamma = az_gamma->count() > 0;
  an.has_lambda = az_lambda->count() > 0;
  sw.has_tau_grid = sw_tg->count() > 0;
  sw.has_lambda_grid = sw_lg->count() > 0;
  sw.has_alpha_grid = sw_ag->count() > 0;
  sw.has_precision_grid = sw_pg->count() > 0;
  sw.has_gamma = sw_gamma->count() > 0;
  sw.has_alpha = sw_alpha->count() > 0;
  co.has_gamma = cm_gamma->count() > 0;

  try {
    if (app.got_subcommand(ph)) return run_phantom(pa);
    if (app.got_subcommand(so)) return run_solve(sa);
    if (app.got_subcommand(az)) return run_analyze(an);
    if (app.got_subcommand(swc)) return run_sweep(sw);
    if (app.got_subcommand(cm)) return run_compare(co);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const numerical_error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const io_error& e) {
    std::fprintf(stderr, "i/o failure: %s\n", e.what());
    return 4;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "i/o failure: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failure: %s\n", e.what());
    return 3;
  }
  return 2;
}
