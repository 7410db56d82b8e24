#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "grwlab/errors.hpp"
#include "grwlab/expression.hpp"
#include "grwlab/graphgeom.hpp"
#include "grwlab/io.hpp"
#include "grwlab/maxsolver.hpp"
#include "grwlab/verify.hpp"
#include "grwlab/warpkit.hpp"
#include "json.hpp"

namespace grwlab::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

struct UsageError : Error {
  using Error::Error;
};

// --tol-<flag> -> Tolerances JSON key.
const std::vector<std::pair<std::string, std::string>> kToleranceFlags = {
    {"ncc", "ncc"},
    {"inf-phi", "inf_phi"},
    {"root", "root"},
    {"scan-points", "scan_points"},
    {"refine-rounds", "refine_rounds"},
    {"endpoint-offset", "endpoint_offset"},
    {"space-margin", "space_margin"},
    {"residual", "residual"},
    {"max-iterations", "max_iterations"},
    {"damping-floor", "damping_floor"},
    {"maximal-factor", "maximal_factor"},
    {"check-inset", "check_inset"},
    {"c-lemma1", "c_lemma1"},
    {"c-laplacian", "c_laplacian"},
    {"c-ricci", "c_ricci"},
    {"c-nishikawa", "c_nishikawa"},
};

const std::vector<std::string> kSurfaceChecks = {"lemma1", "laplacian", "ricci"};
const std::vector<std::string> kConvergenceCases = {"hyperboloid", "plane", "slice", "laplacian",
                                                     "nishikawa", "lemma1", "ricci"};

double parse_number(std::string_view text, const std::string& what) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  if (s == "inf" || s == "+inf") return kInfinity;
  if (s == "-inf") return -kInfinity;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("cannot parse " + what + " from '" + std::string(text) + "'");
}

std::pair<double, double> parse_pair(std::string_view text, const std::string& what) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) throw UsageError(what + " must look like 'lo,hi'");
  return {parse_number(text.substr(0, comma), what), parse_number(text.substr(comma + 1), what)};
}

// ---------------------------------------------------------------------------
// Effective configuration.

struct Options {
  std::string config_file;
  std::string out;
  bool serial = false;
  std::map<std::string, std::string> given;  // config key -> raw flag text
  std::vector<std::string> checks;
};

json load_config(const Options& opt) {
  json in = json::object();
  if (!opt.config_file.empty()) {
    try {
      in = json::parse(io::read_text(opt.config_file));
    } catch (const json::exception& e) {
      throw UsageError("malformed config " + opt.config_file + ": " + e.what());
    } catch (const ParseError& e) {
      throw UsageError(e.what());
    }
    if (!in.is_object()) throw UsageError("config file must hold a JSON object");
  }
  for (const auto& [key, raw] : opt.given) {
    if (key.rfind("tol.", 0) == 0) {
      in["tolerances"][key.substr(4)] = parse_number(raw, "--tol-" + key.substr(4));
    } else if (key == "n" || key == "nodes" || key == "levels" || key == "base_nodes" ||
               key == "steps" || key == "seed") {
      const double v = parse_number(raw, "--" + key);
      if (v != std::floor(v)) throw UsageError("--" + key + " must be an integer");
      in[key] = static_cast<long long>(v);
    } else if (key == "a" || key == "c") {
      in[key] = parse_number(raw, "--" + key);
    } else {
      in[key] = raw;
    }
  }
  if (!opt.checks.empty()) in["checks"] = opt.checks;
  if (opt.serial) in["serial"] = true;
  return in;
}

template <class T>
T get_or(const json& in, const std::string& key, T fallback) {
  if (!in.contains(key) || in[key].is_null()) return fallback;
  try {
    return in[key].get<T>();
  } catch (const json::exception&) {
    throw UsageError("config entry '" + key + "' has the wrong type");
  }
}

Tolerances resolve_tolerances(const json& in) {
  if (!in.contains("tolerances")) return {};
  try {
    return io::tolerances_from_json(in["tolerances"].dump());
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }
}

SpacetimeSpec resolve_spacetime(const json& in) {
  const int n = get_or<int>(in, "n", 2);
  if (in.contains("warp_expr")) {
    IntervalDomain domain = IntervalDomain::real_line();
    if (in.contains("domain")) {
      const auto [lo, hi] = parse_pair(in["domain"].get<std::string>(), "--domain");
      domain = IntervalDomain::open(lo, hi);
    }
    return make_expression_spacetime(get_or<std::string>(in, "name", "custom"), n,
                                     in["warp_expr"].get<std::string>(), domain);
  }
  if (!in.contains("spacetime")) throw UsageError("no spacetime given (use --spacetime or --warp-expr)");
  const json& st = in["spacetime"];
  if (st.is_object() || (st.is_string() && st.get<std::string>().starts_with("{"))) {
    const std::string text = st.is_object() ? st.dump() : st.get<std::string>();
    SpacetimeSpec spec = io::spacetime_from_json(text);
    if (in.contains("n")) {
      spec = io::spacetime_from_json([&] {
        json j = json::parse(text);
        j["n"] = n;
        return j.dump();
      }());
    }
    return spec;
  }
  std::map<std::string, double> params;
  if (in.contains("a")) params["a"] = in["a"].get<double>();
  return make_spacetime(st.get<std::string>(), n, params);
}

Grid resolve_grid(const json& in, int dim) {
  if (!in.contains("nodes")) throw UsageError("missing grid spec: give --nodes (and optionally --box)");
  double lo = -1.0, hi = 1.0;
  if (in.contains("box")) std::tie(lo, hi) = parse_pair(in["box"].get<std::string>(), "--box");
  return Grid::cube(dim, lo, hi, in["nodes"].get<int>());
}

std::vector<std::string> coordinate_names(int dim) {
  std::vector<std::string> names;
  for (int a = 1; a <= dim; ++a) names.push_back("x" + std::to_string(a));
  return names;
}

NodeFunction node_function(const std::string& text, int dim) {
  auto expr = std::make_shared<Expression>(Expression::parse(text, coordinate_names(dim)));
  return [expr](std::span<const double> x) { return expr->evaluate_plain(x); };
}

Execution resolve_exec(const json& in) {
  return get_or<bool>(in, "serial", false) ? Execution::kSerial : Execution::kParallel;
}

ordered_json base_manifest(const std::string& subcommand, const json& in, const Tolerances& tol) {
  ordered_json m;
  m["schema"] = io::kSchema;
  m["tool"] = "grwlab";
  m["version"] = kVersion;
  m["subcommand"] = subcommand;
  m["execution"] = get_or<bool>(in, "serial", false) ? "serial" : "parallel";
  m["seed"] = get_or<long long>(in, "seed", 0);
  m["tolerances"] = ordered_json::parse(io::tolerances_to_json(tol));
  return m;
}

// ---------------------------------------------------------------------------
// Run directories.

std::string utc_stamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

fs::path output_root(const Options& opt, const json& in) {
  if (!opt.out.empty()) return opt.out;
  if (in.contains("out")) return in["out"].get<std::string>();
  if (const char* env = std::getenv("GRWLAB_OUT"); env != nullptr && *env != '\0') return env;
  return "grwlab-runs";
}

fs::path make_run_dir(const fs::path& root, const std::string& manifest) {
  const std::string base = utc_stamp() + "-" + config_hash(manifest);
  fs::path dir = root / base;
  for (int k = 1; fs::exists(dir); ++k) dir = root / (base + "-" + std::to_string(k));
  fs::create_directories(dir);
  io::write_text(dir / "manifest.json", manifest);
  return dir;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// catalog

int cmd_catalog(const std::vector<CatalogEntry>& entries, bool as_json, std::ostream& out) {
  if (as_json) {
    ordered_json list = ordered_json::array();
    for (const auto& e : entries) {
      ordered_json params = ordered_json::object();
      for (const auto& [k, v] : e.defaults) params[k] = v;
      list.push_back({{"name", e.name}, {"key", e.key}, {"f", e.formula}, {"domain", e.domain_text},
                      {"params", params}});
    }
    out << dump(ordered_json{{"schema", io::kSchema}, {"spacetimes", list}});
    return kOk;
  }
  for (const auto& e : entries) {
    out << e.name << "  f=" << e.formula << "  I=" << e.domain_text;
    for (const auto& [k, v] : e.defaults) out << "  " << k << "=" << io::format_double(v);
    out << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// classify

int cmd_classify(const Options& opt, std::ostream& out) {
  const json in = load_config(opt);
  const Tolerances tol = resolve_tolerances(in);
  const SpacetimeSpec spec = resolve_spacetime(in);
  const IntervalDomain window = in.contains("window")
                                    ? parse_window(in["window"].get<std::string>(), spec.warp.domain())
                                    : spec.warp.domain();

  auto manifest = base_manifest("classify", in, tol);
  manifest["spacetime"] = ordered_json::parse(io::spacetime_to_json(spec));
  manifest["window"] = ordered_json::parse(io::interval_to_json(window));
  const std::string manifest_text = dump(manifest);

  const ClassificationReport report = classify(spec, window, tol);
  const fs::path dir = make_run_dir(output_root(opt, in), manifest_text);
  io::write_text(dir / "classification.json", io::classification_to_json(report));

  out << "spacetime: " << spec.name << "  n=" << spec.n << "  f=" << spec.warp.formula()
      << "  I=" << spec.warp.domain().to_string() << "\n";
  out << "window: " << window.to_string() << "\n";
  out << "NCC: " << (report.ncc.holds ? "holds" : "fails");
  if (report.ncc.witness) out << " (violated at t=" << io::format_double(*report.ncc.witness) << ")";
  out << "\n";
  out << "inf Phi: " << io::format_double(report.inf.value) << " at t="
      << io::format_double(report.inf.argmin) << (report.inf.endpoint_limit ? " (end limit)" : "") << "\n";
  out << "critical points:";
  if (report.critical.empty()) out << " none";
  for (const auto& c : report.critical) {
    out << " " << io::format_double(c.t) << (c.degenerate ? " (degenerate)" : "");
  }
  out << "\n";
  out << "verdict: " << to_string(report.verdict);
  if (report.verdict == Verdict::kUniqueSlice) {
    for (double t0 : report.slices) out << " t0=" << io::format_double(t0);
  }
  out << "\n";
  out << "reason: " << report.reason << "\n";
  out << "run: " << dir.string() << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// solve

struct SolveSetup {
  DirichletProblem problem;
  int steps = 0;
  std::string boundary;
  std::string guess;
};

SolveSetup resolve_solve(const json& in, const Tolerances& tol, const SpacetimeSpec& spec) {
  const Grid grid = resolve_grid(in, spec.n);
  const std::string boundary = get_or<std::string>(in, "boundary", "0");
  const std::string guess = get_or<std::string>(in, "guess", "harmonic");
  const int steps = get_or<int>(in, "steps", 0);
  if (steps < 0) throw UsageError("--steps must be >= 0 (0 = plain Newton)");
  const NodeFunction guess_fn = guess == "harmonic" ? NodeFunction{} : node_function(guess, spec.n);
  return {make_dirichlet_problem(spec, grid, node_function(boundary, spec.n), guess_fn, tol, resolve_exec(in)),
          steps, boundary, guess};
}

void add_solve_manifest(ordered_json& m, const SolveSetup& s) {
  m["spacetime"] = ordered_json::parse(io::spacetime_to_json(s.problem.spec));
  m["grid"] = ordered_json::parse(io::grid_to_json(s.problem.grid));
  m["boundary"] = s.boundary;
  m["guess"] = s.guess;
  m["continuation_steps"] = s.steps;
}

SolveOutcome run_solve(const SolveSetup& s) {
  return s.steps > 0 ? continuation_solve(s.problem, s.steps) : solve(s.problem);
}

void write_solve_outputs(const fs::path& dir, const SolveSetup& s, const SolveOutcome& outcome) {
  const Grid& grid = s.problem.grid;
  io::write_text(dir / "problem.json", io::problem_to_json(s.problem));
  io::write_text(dir / "boundary.csv", io::field_to_csv(grid, s.problem.boundary));
  io::write_text(dir / "initial_guess.csv", io::field_to_csv(grid, s.problem.initial_guess));
  io::write_text(dir / "outcome.json", io::outcome_to_json(outcome, grid));
  io::write_text(dir / "residual_history.csv", io::residual_history_csv(outcome));
  if (!outcome.u.empty()) io::write_surface(dir / "surface", {grid, outcome.u, s.problem.spec});
  if (outcome.status == SolveStatus::kConverged) {
    io::write_fields(dir / "fields", compute_fields({grid, outcome.u, s.problem.spec}, s.problem.tolerances));
  }
}

void print_outcome(std::ostream& out, const SolveSetup& s, const SolveOutcome& outcome) {
  double max_u = 0.0;
  for (double v : outcome.u) max_u = std::max(max_u, std::abs(v));
  const double final_norm = outcome.history.empty() ? kInfinity : outcome.history.back().residual_norm;
  out << "status: " << to_string(outcome.status) << "  iterations: " << outcome.iterations << "\n";
  out << "grid: " << s.problem.grid.describe() << "\n";
  out << "max |H|: " << io::format_double(final_norm) << "\n";
  out << "max |u|: " << io::format_double(max_u) << "\n";
  if (!outcome.message.empty()) out << "message: " << outcome.message << "\n";
}

int cmd_solve(const Options& opt, std::ostream& out) {
  const json in = load_config(opt);
  const Tolerances tol = resolve_tolerances(in);
  const SolveSetup s = resolve_solve(in, tol, resolve_spacetime(in));
  auto manifest = base_manifest("solve", in, tol);
  add_solve_manifest(manifest, s);
  const std::string manifest_text = dump(manifest);

  const SolveOutcome outcome = run_solve(s);
  const fs::path dir = make_run_dir(output_root(opt, in), manifest_text);
  write_solve_outputs(dir, s, outcome);
  print_outcome(out, s, outcome);
  out << "run: " << dir.string() << "\n";
  return outcome.status == SolveStatus::kConverged ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------
// verify

struct CheckResult {
  std::string name;
  std::optional<CheckReport> report;
  std::string precondition;  // set when the check refused its input
};

void print_check(std::ostream& out, const CheckResult& r) {
  out << r.name << ": ";
  if (!r.report) {
    out << "PRECONDITION " << r.precondition << "\n";
    return;
  }
  out << (r.report->pass ? "PASS" : "FAIL") << "  worst=" << io::format_double(r.report->worst_margin)
      << "  tol=" << io::format_double(r.report->tolerance) << "  nodes=" << r.report->nodes_evaluated
      << "\n";
}

int cmd_verify(const Options& opt, std::ostream& out) {
  const json in = load_config(opt);
  const Tolerances tol = resolve_tolerances(in);
  const Execution exec = resolve_exec(in);

  const bool explicit_checks = in.contains("checks");
  std::vector<std::string> checks = get_or<std::vector<std::string>>(in, "checks", {});
  for (const auto& c : checks) {
    if (c != "nishikawa" && std::find(kSurfaceChecks.begin(), kSurfaceChecks.end(), c) == kSurfaceChecks.end()) {
      throw UsageError("unknown check '" + c + "' (lemma1, laplacian, ricci, nishikawa)");
    }
  }
  const bool has_field = in.contains("field");
  if (!explicit_checks) {
    checks = kSurfaceChecks;
    if (has_field) checks.push_back("nishikawa");
  }
  const bool wants_surface = std::any_of(checks.begin(), checks.end(), [](const auto& c) { return c != "nishikawa"; }) ||
                             get_or<std::string>(in, "background", "euclidean") == "surface";

  auto manifest = base_manifest("verify", in, tol);
  manifest["checks"] = checks;

  std::optional<GraphHypersurface> surface;
  std::optional<SolveSetup> inline_solve;
  std::optional<SolveOutcome> inline_outcome;
  if (wants_surface) {
    if (in.contains("surface")) {
      const std::string path = in["surface"].get<std::string>();
      try {
        surface = io::read_surface(path);
      } catch (const ParseError& e) {
        throw UsageError(e.what());
      }
      manifest["surface"] = path;
      manifest["spacetime"] = ordered_json::parse(io::spacetime_to_json(surface->spec));
      manifest["grid"] = ordered_json::parse(io::grid_to_json(surface->grid));
    } else {
      inline_solve = resolve_solve(in, tol, resolve_spacetime(in));
      add_solve_manifest(manifest, *inline_solve);
    }
  }
  std::optional<Grid> field_grid;
  if (has_field) {
    field_grid = surface ? surface->grid : inline_solve ? inline_solve->problem.grid
                                                        : resolve_grid(in, get_or<int>(in, "n", 2));
    manifest["field"] = in["field"].get<std::string>();
    manifest["field_grid"] = ordered_json::parse(io::grid_to_json(*field_grid));
    manifest["background"] = get_or<std::string>(in, "background", "euclidean");
    if (in.contains("c")) manifest["c"] = in["c"].get<double>();
  } else if (std::find(checks.begin(), checks.end(), "nishikawa") != checks.end()) {
    throw UsageError("the nishikawa check needs --field (a positive function of x1, x2, ...)");
  }
  const std::string manifest_text = dump(manifest);

  if (inline_solve) {
    inline_outcome = run_solve(*inline_solve);
    if (inline_outcome->status != SolveStatus::kConverged) {
      const fs::path dir = make_run_dir(output_root(opt, in), manifest_text);
      write_solve_outputs(dir, *inline_solve, *inline_outcome);
      print_outcome(out, *inline_solve, *inline_outcome);
      out << "run: " << dir.string() << "\n";
      return kInfeasible;
    }
    surface = GraphHypersurface{inline_solve->problem.grid, inline_outcome->u, inline_solve->problem.spec};
  }

  std::vector<CheckResult> results;
  std::vector<std::pair<std::string, std::string>> files;
  auto record = [&](const std::string& name, const CheckReport& report, const Grid& grid) {
    files.emplace_back("check_" + name + ".json", io::check_report_to_json(report));
    files.emplace_back("margins_" + name + ".csv", io::masked_field_to_csv(grid, report.margins, "margin"));
    results.push_back({name, report, {}});
  };

  for (const auto& name : checks) {
    try {
      if (name == "nishikawa") {
        const Grid& grid = *field_grid;
        const auto u = sample_nodes(grid, node_function(in["field"].get<std::string>(), grid.dim()));
        std::optional<GeometryFields> background;
        if (get_or<std::string>(in, "background", "euclidean") == "surface") {
          background = compute_fields(*surface, tol, exec);
        }
        std::optional<double> c;
        if (in.contains("c")) c = in["c"].get<double>();
        const auto r = check_nishikawa_identity(grid, u, tol, c, background ? &*background : nullptr);
        record(name, r.identity, grid);
        if (r.corollary) record("nishikawa_corollary", *r.corollary, grid);
        continue;
      }
      if (!explicit_checks && surface->grid.dim() != 2 && name != "lemma1") continue;
      if (name == "lemma1") record(name, check_lemma1_inequality(*surface, tol, exec), surface->grid);
      if (name == "laplacian") record(name, check_laplacian_identity(*surface, tol, exec), surface->grid);
      if (name == "ricci") record(name, check_ricci_bound(*surface, tol, exec), surface->grid);
    } catch (const PreconditionError& e) {
      results.push_back({name, std::nullopt, e.what()});
    } catch (const UnsupportedDimensionError& e) {
      results.push_back({name, std::nullopt, e.what()});
    } catch (const SpacelikeError& e) {
      results.push_back({name, std::nullopt, e.what()});
    }
  }

  const fs::path dir = make_run_dir(output_root(opt, in), manifest_text);
  if (inline_solve) write_solve_outputs(dir, *inline_solve, *inline_outcome);
  for (const auto& [file, text] : files) io::write_text(dir / file, text);
  ordered_json summary;
  summary["schema"] = io::kSchema;
  ordered_json list = ordered_json::array();
  bool any_fail = false, any_precondition = false;
  for (const auto& r : results) {
    print_check(out, r);
    ordered_json item{{"check", r.name}};
    if (r.report) {
      item["pass"] = r.report->pass;
      any_fail = any_fail || !r.report->pass;
    } else {
      item["precondition"] = r.precondition;
      any_precondition = true;
    }
    list.push_back(item);
  }
  summary["checks"] = list;
  io::write_text(dir / "verify.json", dump(summary));
  out << "run: " << dir.string() << "\n";
  if (any_fail) return kCheckFailed;
  if (any_precondition) return kInfeasible;
  return kOk;
}

// ---------------------------------------------------------------------------
// convergence

struct Level {
  int nodes = 0;
  double h = 0.0;
  double error = 0.0;
};

double sinsin_boundary(std::span<const double> x) {
  return 0.2 * std::sin(M_PI * x[0] / 2) * std::sin(M_PI * x[1] / 2);
}

// Error measure of one case on one grid.
double case_error(const std::string& name, int nodes, const Tolerances& tol, Execution exec) {
  auto max_dev = [](const Grid& g, const std::vector<double>& v, double target) {
    double worst = 0.0;
    for (std::size_t p : g.nodes_with_depth(1)) worst = std::max(worst, std::abs(v[p] - target));
    return worst;
  };
  if (name == "hyperboloid" || name == "plane" || name == "slice") {
    const Grid g = Grid::cube(2, -1, 1, nodes);
    if (name == "slice") {
      const auto spec = make_spacetime("Example1", 2);
      const WarpValues w = eval_warp(spec.warp, 0.5);
      const auto H = mean_curvature(g, spec, std::vector<double>(g.size(), 0.5), tol, exec);
      return max_dev(g, H, w.df / w.f);
    }
    const auto spec = make_spacetime("Minkowski", 2);
    const auto u = sample_nodes(g, [&](std::span<const double> x) {
      return name == "plane" ? 0.5 * x[0] + 0.3 * x[1] : std::sqrt(1.0 + x[0] * x[0] + x[1] * x[1]);
    });
    return max_dev(g, mean_curvature(g, spec, u, tol, exec), name == "plane" ? 0.0 : 1.0);
  }
  if (name == "nishikawa") {
    const Grid g = Grid::cube(2, 0, 2 * M_PI, nodes);
    const auto u = sample_nodes(g, [](std::span<const double> x) { return 3.0 + std::sin(x[0]) * std::sin(x[1]); });
    return -check_nishikawa_identity(g, u, tol).identity.worst_margin;
  }
  const auto spec = make_spacetime("Example1", 2);
  const Grid g = Grid::cube(2, -1, 1, nodes);
  const auto outcome = solve(make_dirichlet_problem(spec, g, sinsin_boundary, {}, tol, exec));
  if (outcome.status != SolveStatus::kConverged) {
    throw PreconditionError("calibration surface did not converge on " + g.describe());
  }
  const GraphHypersurface s{g, outcome.u, spec};
  const CheckReport r = name == "laplacian" ? check_laplacian_identity(s, tol, exec)
                        : name == "lemma1"  ? check_lemma1_inequality(s, tol, exec)
                                            : check_ricci_bound(s, tol, exec);
  // Inequalities only contribute their violations.
  return std::max(0.0, -r.worst_margin);
}

int cmd_convergence(const Options& opt, std::ostream& out) {
  const json in = load_config(opt);
  const Tolerances tol = resolve_tolerances(in);
  const std::string name = get_or<std::string>(in, "case", "");
  if (std::find(kConvergenceCases.begin(), kConvergenceCases.end(), name) == kConvergenceCases.end()) {
    std::string known;
    for (const auto& c : kConvergenceCases) known += " " + c;
    throw UsageError("unknown convergence case '" + name + "'; known:" + known);
  }
  const int levels = get_or<int>(in, "levels", 3);
  if (levels < 3) throw UsageError("convergence needs at least 3 grid levels, got " + std::to_string(levels));
  const int base = get_or<int>(in, "base_nodes", 33);
  if (base < 9) throw UsageError("--base-nodes must be >= 9");

  auto manifest = base_manifest("convergence", in, tol);
  manifest["case"] = name;
  manifest["levels"] = levels;
  manifest["base_nodes"] = base;
  const std::string manifest_text = dump(manifest);

  std::vector<Level> table;
  for (int k = 0; k < levels; ++k) {
    const int nodes = (base - 1) * (1 << k) + 1;
    const double h = 2.0 * (name == "nishikawa" ? M_PI : 1.0) / (nodes - 1);
    table.push_back({nodes, h, case_error(name, nodes, tol, resolve_exec(in))});
  }

  constexpr double kRoundoff = 1e-12;
  const bool exact = std::all_of(table.begin(), table.end(), [](const Level& l) { return l.error <= kRoundoff; });
  std::string csv = "nodes,h,error,order\n";
  ordered_json rows = ordered_json::array();
  double c_est = 0.0;
  std::optional<double> last_order;
  out << "case: " << name << "\n";
  if (name == "lemma1" || name == "ricci") out << "error = largest violation of the inequality (0: satisfied)\n";
  out << "nodes        h            error        order\n";
  for (std::size_t k = 0; k < table.size(); ++k) {
    const Level& l = table[k];
    c_est = std::max(c_est, l.error / (l.h * l.h));
    std::string order = "-";
    ordered_json row{{"nodes", l.nodes}, {"h", l.h}, {"error", l.error}};
    if (k > 0 && !exact) {
      if (table[k - 1].error > kRoundoff && l.error > kRoundoff) {
        const double p = std::log(table[k - 1].error / l.error) / std::log(table[k - 1].h / l.h);
        order = io::format_double(std::round(p * 1000) / 1000);
        row["order"] = p;
        last_order = p;
      } else {
        order = "exact";
      }
    }
    char line[128];
    std::snprintf(line, sizeof line, "%-12d %-12.6g %-12.6g %s\n", l.nodes, l.h, l.error, order.c_str());
    out << line;
    csv += std::to_string(l.nodes) + "," + io::format_double(l.h) + "," + io::format_double(l.error) + "," +
           (row.contains("order") ? io::format_double(row["order"].get<double>()) : order) + "\n";
    rows.push_back(row);
  }
  ordered_json report;
  report["schema"] = io::kSchema;
  report["case"] = name;
  report["levels"] = rows;
  if (exact) {
    report["observed_order"] = "exact";
    out << "observed order: exact (errors at roundoff level)\n";
  } else {
    report["observed_order"] = last_order ? ordered_json(*last_order) : ordered_json("n/a");
    out << "observed order: " << (last_order ? io::format_double(std::round(*last_order * 1000) / 1000) : "n/a")
        << "\n";
  }
  report["max_error_over_h2"] = c_est;
  out << "max error/h^2: " << io::format_double(c_est) << "\n";

  const fs::path dir = make_run_dir(output_root(opt, in), manifest_text);
  io::write_text(dir / "convergence.json", dump(report));
  io::write_text(dir / "convergence.csv", csv);
  out << "run: " << dir.string() << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// Command-line wiring.

void add_spacetime_options(CLI::App* cmd, Options& opt) {
  auto flag = [&](const std::string& name, const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(name, [&opt, key](const std::string& v) { opt.given[key] = v; }, help);
  };
  flag("--spacetime", "spacetime", "catalog name/key, or inline spacetime JSON");
  flag("--n", "n", "fiber dimension (>= 2)");
  flag("--a", "a", "catalog parameter a");
  flag("--warp-expr", "warp_expr", "inline warping function of t, e.g. 'exp(-t^2)'");
  flag("--domain", "domain", "open domain 'lo,hi' of --warp-expr (default -inf,inf)");
}

void add_grid_options(CLI::App* cmd, Options& opt) {
  auto flag = [&](const std::string& name, const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(name, [&opt, key](const std::string& v) { opt.given[key] = v; }, help);
  };
  flag("--nodes", "nodes", "nodes per axis (>= 5)");
  flag("--box", "box", "extent 'lo,hi' of every axis (default -1,1)");
  flag("--boundary", "boundary", "boundary data in x1, x2[, x3] (default 0)");
  flag("--guess", "guess", "initial guess in x1, x2[, x3] or 'harmonic' (default)");
  flag("--steps", "steps", "continuation steps (0 = plain Newton)");
}

int classify_error(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e) || dynamic_cast<const ParameterError*>(&e) ||
      dynamic_cast<const ParseError*>(&e) || dynamic_cast<const UnsupportedDimensionError*>(&e)) {
    return kUsage;
  }
  return kInfeasible;
}

}  // namespace

IntervalDomain parse_window(std::string_view text, const IntervalDomain& domain) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  std::optional<bool> lo_open, hi_open;
  if (!s.empty() && (s.front() == '(' || s.front() == '[')) {
    lo_open = s.front() == '(';
    s.erase(0, 1);
  }
  if (!s.empty() && (s.back() == ')' || s.back() == ']')) {
    hi_open = s.back() == ')';
    s.pop_back();
  }
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw InvalidWindowError("window must look like 'lo,hi', got '" + std::string(text) + "'");
  double lo, hi;
  try {
    lo = parse_number(s.substr(0, comma), "window");
    hi = parse_number(s.substr(comma + 1), "window");
  } catch (const UsageError& e) {
    throw InvalidWindowError(e.what());
  }
  IntervalDomain w{lo, hi, lo_open.value_or(!std::isfinite(lo) || lo == domain.lower),
                   hi_open.value_or(!std::isfinite(hi) || hi == domain.upper)};
  w.validate();
  return w;
}

std::string config_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"grwlab: maximal hypersurfaces in GRW spacetimes with flat fiber"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--config", opt.config_file, "JSON config file; flags override its entries");
  app.add_option("--out", opt.out, "output root (default $GRWLAB_OUT or ./grwlab-runs)");
  app.add_flag("--serial", opt.serial, "force bit-reproducible serial execution");
  app.add_option_function<std::string>("--seed", [&opt](const std::string& v) { opt.given["seed"] = v; },
                                       "seed recorded in the manifest");
  for (const auto& [flag, key] : kToleranceFlags) {
    app.add_option_function<std::string>("--tol-" + flag, [&opt, key = key](const std::string& v) {
      opt.given["tol." + key] = v;
    }, "override tolerance " + key);
  }

  bool catalog_json = false;
  std::string catalog_name;
  auto* catalog = app.add_subcommand("catalog", "list built-in spacetimes");
  catalog->add_flag("--json", catalog_json, "machine-readable listing");
  catalog->add_option("--name", catalog_name, "show one entry");

  auto* classify_cmd = app.add_subcommand("classify", "classify a spacetime window");
  add_spacetime_options(classify_cmd, opt);
  classify_cmd->add_option_function<std::string>("--window", [&opt](const std::string& v) { opt.given["window"] = v; },
                                                 "tau window, e.g. --window=-inf,inf or '(0,10]'");

  auto* solve_cmd = app.add_subcommand("solve", "solve the maximal Dirichlet problem");
  add_spacetime_options(solve_cmd, opt);
  add_grid_options(solve_cmd, opt);

  auto* verify_cmd = app.add_subcommand("verify", "check identities and inequalities");
  add_spacetime_options(verify_cmd, opt);
  add_grid_options(verify_cmd, opt);
  verify_cmd->add_option("checks", opt.checks, "lemma1 laplacian ricci nishikawa (default: all applicable)");
  for (const auto& [name, key, help] : std::vector<std::tuple<std::string, std::string, std::string>>{
           {"--surface", "surface", "surface header written by solve (surface.json)"},
           {"--field", "field", "positive test field u(x1, x2, ...) for nishikawa"},
           {"--c", "c", "constant of the nishikawa corollary"},
           {"--background", "background", "nishikawa background metric: euclidean | surface"}}) {
    verify_cmd->add_option_function<std::string>(name, [&opt, key = key](const std::string& v) { opt.given[key] = v; }, help);
  }

  auto* conv_cmd = app.add_subcommand("convergence", "grid-refinement study of a calibration case");
  for (const auto& [name, key, help] : std::vector<std::tuple<std::string, std::string, std::string>>{
           {"--case", "case", "hyperboloid | plane | slice | laplacian | nishikawa | lemma1 | ricci"},
           {"--levels", "levels", "number of grid levels (>= 3)"},
           {"--base-nodes", "base_nodes", "nodes per axis on the coarsest level (default 33)"}}) {
    conv_cmd->add_option_function<std::string>(name, [&opt, key = key](const std::string& v) { opt.given[key] = v; }, help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*catalog) {
      auto entries = builtin_catalog();
      if (!catalog_name.empty()) {
        std::erase_if(entries, [&](const auto& e) { return e.name != catalog_name && e.key != catalog_name; });
        if (entries.empty()) {
          err << "error: no spacetime named '" << catalog_name << "' in the catalog\n";
          return kUsage;
        }
      }
      return cmd_catalog(entries, catalog_json, out);
    }
    if (*classify_cmd) return cmd_classify(opt, out);
    if (*solve_cmd) return cmd_solve(opt, out);
    if (*verify_cmd) return cmd_verify(opt, out);
    if (*conv_cmd) return cmd_convergence(opt, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return classify_error(e);
  }
  return kUsage;
}

}  // namespace grwlab::cli
