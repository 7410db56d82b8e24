#include "grwlab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "grwlab/errors.hpp"
#include "json.hpp"

namespace grwlab::io {

using nlohmann::json;

namespace {

json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

double to_double(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ParseError("expected a number for '" + what + "'");
}

json parse(std::string_view text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError("malformed " + what + " JSON: " + e.what());
  }
}

json interval_json(const IntervalDomain& d) {
  return {{"lo", number(d.lower)},
          {"hi", number(d.upper)},
          {"lo_open", d.lower_open || !std::isfinite(d.lower)},
          {"hi_open", d.upper_open || !std::isfinite(d.upper)}};
}

IntervalDomain interval_of(const json& j) {
  if (!j.is_object() || !j.contains("lo") || !j.contains("hi")) {
    throw ParseError("interval needs 'lo' and 'hi'");
  }
  IntervalDomain d{to_double(j.at("lo"), "lo"), to_double(j.at("hi"), "hi"),
                   j.value("lo_open", true), j.value("hi_open", true)};
  if (!std::isfinite(d.lower)) d.lower_open = true;
  if (!std::isfinite(d.upper)) d.upper_open = true;
  return d;
}

json spacetime_json(const SpacetimeSpec& spec) {
  json params = json::object();
  for (const auto& [k, v] : spec.source.params) params[k] = v;
  if (spec.source.kind == "expr") params["expr"] = spec.source.expression;
  json domain = interval_json(spec.warp.domain());
  return {{"name", spec.name},
          {"n", spec.n},
          {"fiber", "flat"},
          {"warp", {{"kind", spec.source.kind}, {"params", params}}},
          {"domain", {{"lo", domain["lo"]}, {"hi", domain["hi"]}}}};
}

SpacetimeSpec spacetime_of(const json& j) {
  try {
    const int n = j.at("n").get<int>();
    const json& warp = j.at("warp");
    const std::string kind = warp.at("kind").get<std::string>();
    const json params = warp.value("params", json::object());
    if (kind == "expr") {
      const std::string expr = params.at("expr").get<std::string>();
      const json& dom = j.at("domain");
      const IntervalDomain domain = IntervalDomain::open(to_double(dom.at("lo"), "domain.lo"),
                                                         to_double(dom.at("hi"), "domain.hi"));
      return make_expression_spacetime(j.value("name", std::string("custom")), n, expr, domain);
    }
    std::map<std::string, double> values;
    for (const auto& [k, v] : params.items()) values[k] = to_double(v, k);
    SpacetimeSpec spec = make_spacetime(kind, n, values);
    if (j.contains("name")) spec.name = j.at("name").get<std::string>();
    return spec;
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid spacetime JSON: ") + e.what());
  }
}

json grid_json(const Grid& grid) {
  json lower = json::array();
  json upper = json::array();
  json nodes = json::array();
  for (int a = 0; a < grid.dim(); ++a) {
    lower.push_back(grid.lower(a));
    upper.push_back(grid.upper(a));
    nodes.push_back(grid.nodes(a));
  }
  return {{"dim", grid.dim()}, {"lower", lower}, {"upper", upper}, {"nodes", nodes}};
}

Grid grid_of(const json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    std::array<double, 3> lo{0, 0, 0};
    std::array<double, 3> hi{1, 1, 1};
    std::array<int, 3> nodes{1, 1, 1};
    if (dim < 2 || dim > 3) throw ParameterError("grid dim must be 2 or 3");
    for (std::size_t a = 0; a < static_cast<std::size_t>(dim); ++a) {
      lo[a] = j.at("lower").at(a).get<double>();
      hi[a] = j.at("upper").at(a).get<double>();
      nodes[a] = j.at("nodes").at(a).get<int>();
    }
    return Grid(dim, lo, hi, nodes);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid grid JSON: ") + e.what());
  }
}

json tolerances_json(const Tolerances& t) {
  return {{"ncc", t.ncc},
          {"inf_phi", t.inf_phi},
          {"root", t.root},
          {"scan_points", t.scan_points},
          {"refine_rounds", t.refine_rounds},
          {"endpoint_offset", t.endpoint_offset},
          {"space_margin", t.space_margin},
          {"residual", t.residual},
          {"max_iterations", t.max_iterations},
          {"damping_floor", t.damping_floor},
          {"maximal_factor", t.maximal_factor},
          {"check_inset", t.check_inset},
          {"c_lemma1", t.c_lemma1},
          {"c_laplacian", t.c_laplacian},
          {"c_ricci", t.c_ricci},
          {"c_nishikawa", t.c_nishikawa}};
}

void check_schema(const json& j, const std::string& what) {
  if (j.value("schema", std::string()) != kSchema) {
    throw ParseError(what + " is missing schema tag \"" + std::string(kSchema) + "\"");
  }
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string interval_to_json(const IntervalDomain& d) { return interval_json(d).dump(); }
IntervalDomain interval_from_json(std::string_view text) {
  return interval_of(parse(text, "interval"));
}

std::string spacetime_to_json(const SpacetimeSpec& spec) {
  json j = spacetime_json(spec);
  j["schema"] = kSchema;
  return j.dump(2);
}

SpacetimeSpec spacetime_from_json(std::string_view text) {
  return spacetime_of(parse(text, "spacetime"));
}

std::string grid_to_json(const Grid& grid) { return grid_json(grid).dump(); }
Grid grid_from_json(std::string_view text) { return grid_of(parse(text, "grid")); }

std::string tolerances_to_json(const Tolerances& tol) { return tolerances_json(tol).dump(2); }

Tolerances tolerances_from_json(std::string_view text, Tolerances t) {
  const json j = parse(text, "tolerances");
  auto read = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  try {
    read("ncc", t.ncc);
    read("inf_phi", t.inf_phi);
    read("root", t.root);
    read("scan_points", t.scan_points);
    read("refine_rounds", t.refine_rounds);
    read("endpoint_offset", t.endpoint_offset);
    read("space_margin", t.space_margin);
    read("residual", t.residual);
    read("max_iterations", t.max_iterations);
    read("damping_floor", t.damping_floor);
    read("maximal_factor", t.maximal_factor);
    read("check_inset", t.check_inset);
    read("c_lemma1", t.c_lemma1);
    read("c_laplacian", t.c_laplacian);
    read("c_ricci", t.c_ricci);
    read("c_nishikawa", t.c_nishikawa);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid tolerance record: ") + e.what());
  }
  return t;
}

std::string classification_to_json(const ClassificationReport& r) {
  json critical = json::array();
  for (const auto& c : r.critical) critical.push_back({{"t", c.t}, {"degenerate", c.degenerate}});
  json slices = json::array();
  for (double t : r.slices) slices.push_back(t);
  json ncc = {{"holds", r.ncc.holds},
              {"max_log_curvature", number(r.ncc.max_log_curvature)},
              {"samples", r.ncc.samples},
              {"skipped", r.ncc.skipped}};
  ncc["witness"] = r.ncc.witness ? json(*r.ncc.witness) : json(nullptr);
  const json j = {{"schema", kSchema},
                  {"spacetime", r.spacetime},
                  {"n", r.n},
                  {"tau_window", interval_json(r.tau_window)},
                  {"ncc", ncc},
                  {"inf_phi",
                   {{"value", number(r.inf.value)},
                    {"argmin", number(r.inf.argmin)},
                    {"endpoint_limit", r.inf.endpoint_limit},
                    {"samples", r.inf.samples},
                    {"skipped", r.inf.skipped}}},
                  {"critical_points", critical},
                  {"verdict", {{"kind", to_string(r.verdict)}, {"slices", slices}, {"reason", r.reason}}},
                  {"tolerances", tolerances_json(r.tolerances)}};
  return j.dump(2);
}

std::string field_to_csv(const Grid& grid, const std::vector<double>& values) {
  if (values.size() != grid.size()) throw ParameterError("field size does not match grid");
  std::string out;
  const auto row = static_cast<std::size_t>(grid.nodes(0));
  for (std::size_t p = 0; p < values.size(); ++p) {
    out += format_double(values[p]);
    out += (p + 1) % row == 0 ? '\n' : ',';
  }
  return out;
}

std::vector<double> field_from_csv(const Grid& grid, std::string_view csv) {
  std::vector<double> values;
  values.reserve(grid.size());
  std::size_t pos = 0;
  while (pos < csv.size()) {
    while (pos < csv.size() && (csv[pos] == ',' || csv[pos] == '\n' || csv[pos] == '\r' ||
                                csv[pos] == ' ')) {
      ++pos;
    }
    if (pos >= csv.size()) break;
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(csv.data() + pos, csv.data() + csv.size(), x);
    if (ec != std::errc()) throw ParseError("malformed CSV value at offset " + std::to_string(pos));
    pos = static_cast<std::size_t>(ptr - csv.data());
    values.push_back(x);
  }
  if (values.size() != grid.size()) {
    throw ParseError("CSV holds " + std::to_string(values.size()) + " values, grid has " +
                     std::to_string(grid.size()) + " nodes");
  }
  return values;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_surface(const std::filesystem::path& stem, const GraphHypersurface& surface) {
  std::filesystem::path header = stem;
  header += ".json";
  std::filesystem::path data = stem;
  data += ".csv";
  const json j = {{"schema", kSchema},
                  {"grid", grid_json(surface.grid)},
                  {"spacetime", spacetime_json(surface.spec)},
                  {"data", data.filename().string()},
                  {"layout", "row-major, axis 0 fastest"}};
  write_text(header, j.dump(2) + "\n");
  write_text(data, field_to_csv(surface.grid, surface.u));
}

GraphHypersurface read_surface(const std::filesystem::path& header) {
  const json j = parse(read_text(header), "surface header");
  check_schema(j, header.string());
  try {
    Grid grid = grid_of(j.at("grid"));
    SpacetimeSpec spec = spacetime_of(j.at("spacetime"));
    const auto data = header.parent_path() / j.at("data").get<std::string>();
    auto u = field_from_csv(grid, read_text(data));
    return {std::move(grid), std::move(u), std::move(spec)};
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid surface header: ") + e.what());
  }
}

std::string masked_field_to_csv(const Grid& grid, const MaskedField& field,
                                std::string_view column) {
  std::string out;
  for (int a = 0; a < grid.dim(); ++a) out += "x" + std::to_string(a + 1) + ",";
  out += std::string(column) + "\n";
  for (std::size_t p = 0; p < grid.size(); ++p) {
    if (!field.valid(grid, p) || std::isnan(field.values[p])) continue;
    for (int a = 0; a < grid.dim(); ++a) out += format_double(grid.coordinate(p, a)) + ",";
    out += format_double(field.values[p]) + "\n";
  }
  return out;
}

void write_fields(const std::filesystem::path& dir, const GeometryFields& fields) {
  const Grid& grid = fields.grid;
  const int depth = GeometryFields::kValidDepth;
  auto emit = [&](const std::string& name, const std::vector<double>& values) {
    write_text(dir / ("field_" + name + ".csv"),
               masked_field_to_csv(grid, MaskedField{values, depth}, name));
  };
  emit("u", fields.u);
  emit("cosh_phi", fields.cosh_phi);
  emit("sinh2_phi", fields.sinh2_phi);
  emit("grad_tau_norm2", fields.grad_tau_norm2);
  emit("mean_curvature", fields.mean_curvature);
  emit("sqrt_det_g", fields.sqrt_det);
  for (int i = 0; i < fields.n; ++i) {
    for (int j = i; j < fields.n; ++j) {
      std::vector<double> gij(grid.size());
      for (std::size_t p = 0; p < grid.size(); ++p) gij[p] = fields.metric[p][sym_index(i, j)];
      emit("g" + std::to_string(i + 1) + std::to_string(j + 1), gij);
    }
  }
}

std::string check_report_to_json(const CheckReport& r) {
  json loc = json::array();
  for (double x : r.worst_location) loc.push_back(x);
  const json j = {{"schema", kSchema},
                  {"check", r.name},
                  {"pass", r.pass},
                  {"nodes_evaluated", r.nodes_evaluated},
                  {"worst_margin", number(r.worst_margin)},
                  {"worst_node", r.worst_node},
                  {"worst_location", loc},
                  {"tolerance", r.tolerance},
                  {"constant_C", r.constant},
                  {"spacing_h", r.spacing},
                  {"max_residual", r.max_residual},
                  {"evaluated_depth", r.margins.min_depth},
                  {"note", r.note}};
  return j.dump(2);
}

std::string residual_history_csv(const SolveOutcome& outcome) {
  std::string out = "iteration,residual_norm,damping\n";
  for (const auto& rec : outcome.history) {
    out += std::to_string(rec.iteration) + "," + format_double(rec.residual_norm) + "," +
           format_double(rec.damping) + "\n";
  }
  return out;
}

std::string outcome_to_json(const SolveOutcome& outcome, const Grid& grid) {
  const double final_norm = outcome.history.empty() ? 0.0 : outcome.history.back().residual_norm;
  const json j = {{"schema", kSchema},
                  {"status", to_string(outcome.status)},
                  {"iterations", outcome.iterations},
                  {"final_residual", final_norm},
                  {"message", outcome.message},
                  {"grid", grid_json(grid)},
                  {"u", "surface.csv"},
                  {"history", "residual_history.csv"}};
  return j.dump(2);
}

std::string problem_to_json(const DirichletProblem& problem) {
  const json j = {{"schema", kSchema},
                  {"spacetime", spacetime_json(problem.spec)},
                  {"grid", grid_json(problem.grid)},
                  {"boundary", "boundary.csv"},
                  {"initial_guess", "initial_guess.csv"},
                  {"solver",
                   {{"max_iterations", problem.config.max_iterations},
                    {"residual_tolerance", problem.config.residual_tolerance},
                    {"damping_floor", problem.config.damping_floor}}},
                  {"tolerances", tolerances_json(problem.tolerances)}};
  return j.dump(2);
}

}  // namespace grwlab::io
