#include "mapple/report.hpp"

#include "mapple/commvol.hpp"
#include "mapple/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace mapple::report {

using ojson = nlohmann::ordered_json;

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw Error(Errc::InvalidArgument, "row width " + std::to_string(row.size()) + " does not match table '" + name +
                                           "' with " + std::to_string(columns.size()) + " columns");
  rows.push_back(std::move(row));
}

Table& Report::table(const std::string& name, std::vector<std::string> columns) {
  tables.push_back({name, std::move(columns), {}});
  return tables.back();
}

const Table* Report::find(const std::string& name) const {
  for (const auto& t : tables)
    if (t.name == name) return &t;
  return nullptr;
}

namespace {

ojson tuple_json(const Tuple& t) {
  ojson a = ojson::array();
  for (auto x : t) a.push_back(x);
  return a;
}

ojson cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> ojson {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) return nullptr;
        else if constexpr (std::is_same_v<T, double>) return std::isfinite(v) ? ojson(v) : ojson(nullptr);
        else if constexpr (std::is_same_v<T, Tuple>) return tuple_json(v);
        else if constexpr (std::is_same_v<T, std::vector<Tuple>>) {
          ojson a = ojson::array();
          for (const auto& t : v) a.push_back(tuple_json(t));
          return a;
        } else return v;
      },
      c);
}

std::string fmt_double(double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) return "";
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
        else if constexpr (std::is_same_v<T, double>) return fmt_double(v);
        else if constexpr (std::is_same_v<T, std::string>) return v;
        else if constexpr (std::is_same_v<T, Tuple>) return v.to_string();
        else {
          std::string s;
          for (const auto& t : v) s += (s.empty() ? "" : " ") + t.to_string();
          return s;
        }
      },
      c);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

std::string rational_list(const std::vector<Rational>& xs) {
  std::string s = "(";
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + to_string(xs[i]);
  return s + ")";
}

}  // namespace

std::string render_json(const Report& r) {
  ojson doc;
  doc["report"] = r.kind;
  ojson tables = ojson::object();
  for (const auto& t : r.tables) {
    ojson rows = ojson::array();
    for (const auto& row : t.rows) {
      ojson rec = ojson::object();
      for (std::size_t i = 0; i < t.columns.size(); ++i) rec[t.columns[i]] = cell_json(row[i]);
      rows.push_back(std::move(rec));
    }
    tables[t.name] = std::move(rows);
  }
  doc["tables"] = std::move(tables);
  return doc.dump(2) + "\n";
}

std::string render_csv(const Report& r) {
  std::ostringstream os;
  bool first = true;
  for (const auto& t : r.tables) {
    if (!first) os << '\n';
    first = false;
    os << "# " << r.kind << '.' << t.name << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_field(t.columns[i]);
    os << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(cell_text(row[i]));
      os << '\n';
    }
  }
  return os.str();
}

std::string render(const Report& r, Format f) { return f == Format::Json ? render_json(r) : render_csv(r); }

// ---- parse ------------------------------------------------------------------

Report parse_report(const dsl::MapperProgram& program, const std::vector<dsl::Diagnostic>& diags) {
  using namespace dsl;
  Report r;
  r.kind = "parse";
  std::int64_t errors = 0, warnings = 0;
  for (const auto& d : diags) (d.severity == Severity::Error ? errors : warnings)++;
  auto& sum = r.table("summary", {"statements", "functions", "globals", "errors", "warnings", "valid"});
  sum.add({static_cast<std::int64_t>(program.statements.size()), static_cast<std::int64_t>(program.functions.size()),
           static_cast<std::int64_t>(program.globals.size()), errors, warnings, errors == 0});

  auto& st = r.table("statements", {"index", "kind", "line", "task", "detail"});
  std::int64_t idx = 0;
  for (const auto& s : program.statements) {
    std::string task, detail;
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          auto join = [](const std::vector<std::string>& v) {
            std::string o;
            for (const auto& e : v) o += (o.empty() ? "" : " ") + e;
            return o;
          };
          if constexpr (std::is_same_v<T, IndexTaskMapStmt>) {
            task = x.task;
            detail = "func=" + x.func;
          } else if constexpr (std::is_same_v<T, TaskMapStmt>) {
            task = x.task;
            detail = "procs=" + join(x.procs);
          } else if constexpr (std::is_same_v<T, DataMapStmt>) {
            task = x.task;
            detail = "region=" + x.region + " proc=" + x.proc + " memories=" + join(x.memories);
          } else if constexpr (std::is_same_v<T, DataLayoutStmt>) {
            task = x.task;
            std::vector<std::string> cs;
            for (const auto& c : x.constraints) cs.push_back(c.align ? c.name + "==" + std::to_string(*c.align) : c.name);
            detail = "region=" + x.region + " proc=" + x.proc + " constraints=" + join(cs);
          } else if constexpr (std::is_same_v<T, GarbageCollectStmt>) {
            task = x.task;
            detail = "region=" + x.region;
          } else if constexpr (std::is_same_v<T, BackpressureStmt>) {
            task = x.task;
            detail = "depth=" + std::to_string(x.depth);
          } else if constexpr (std::is_same_v<T, FuncDefStmt>) {
            detail = "name=" + x.name;
          }
        },
        s.node);
    st.add({idx++, std::string(statement_kind(s)), std::int64_t{s.loc.line}, task.empty() ? Cell{} : Cell{task},
            detail});
  }

  auto& fn = r.table("functions", {"name", "params", "arity", "line"});
  for (const auto& f : program.functions) {
    std::string params;
    for (const auto& p : f.params) params += (params.empty() ? "" : ", ") + (p.type ? *p.type + " " : "") + p.name;
    fn.add({f.name, params, static_cast<std::int64_t>(f.params.size()), std::int64_t{f.loc.line}});
  }

  auto& dg = r.table("diagnostics", {"severity", "code", "message", "line", "col"});
  for (const auto& d : diags)
    dg.add({std::string(severity_name(d.severity)), d.code, d.message, std::int64_t{d.loc.line},
            std::int64_t{d.loc.col}});
  return r;
}

// ---- map --------------------------------------------------------------------

Report map_report(const dsl::MappingFunction& fn, const Tuple& ispace) {
  if (ispace.empty()) throw Error(Errc::InvalidArgument, "ispace must have at least one dimension");
  for (auto e : ispace)
    if (e <= 0) throw Error(Errc::InvalidArgument, "ispace extents must be positive");
  if (ispace.product() > (1 << 22)) throw Error(Errc::TooLarge, "ispace " + ispace.to_string() + " is too large");
  const auto& m = fn.machine();
  Report r;
  r.kind = "map";
  r.table("summary", {"function", "ispace", "kind", "nodes", "procs_per_node", "points"})
      .add({fn.function_name(), ispace, std::string(proc_kind_name(m.kind)), m.nodes, m.procs_per_node,
            ispace.product()});
  auto& as = r.table("assignments", {"point", "node", "proc"});
  std::map<ProcessorCoord, std::int64_t> counts;
  for (std::int64_t n = 0; n < m.nodes; ++n)
    for (std::int64_t p = 0; p < m.procs_per_node; ++p) counts[{n, p}] = 0;
  for_each_index(ispace, [&](const Tuple& pt) {
    const auto c = fn(pt, ispace);
    as.add({pt, c.node, c.proc});
    ++counts[c];
  });
  auto& pr = r.table("processors", {"node", "proc", "points"});
  for (const auto& [c, n] : counts) pr.add({c.node, c.proc, n});
  return r;
}

// ---- decompose --------------------------------------------------------------

Report decompose_report(std::int64_t d, const Tuple& extents, const Objective& objective, bool strict) {
  if (d < 1) throw Error(Errc::InvalidArgument, "processor count must be positive");
  if (extents.empty()) throw Error(Errc::InvalidArgument, "extents must be non-empty");
  const auto best = search_optimal(d, extents, objective, SearchOptions{strict});
  const auto greedy = greedy_grid(d, extents.size());
  const auto greedy_score = score(greedy, extents, objective);
  const bool iso = std::holds_alternative<Isotropic>(objective);
  const double ratio = best.score == 0 ? 1.0 : to_double(greedy_score / best.score);

  Report r;
  r.kind = "decompose";
  r.table("decompose", {"d", "extents", "objective", "strict", "candidates", "optimal", "workload", "score",
                        "score_value", "greedy", "greedy_workload", "greedy_score", "greedy_score_value",
                        "amgm_bound", "improvement_ratio"})
      .add({d, extents, objective_name(objective), strict, static_cast<std::int64_t>(count_factorizations(d, extents.size())),
            best.factors, rational_list(workload_vector(best.factors, extents)), to_string(best.score),
            to_double(best.score), greedy, rational_list(workload_vector(greedy, extents)), to_string(greedy_score),
            to_double(greedy_score), iso ? Cell{amgm_lower_bound(d, extents)} : Cell{}, ratio});
  auto& w = r.table("warnings", {"source", "message"});
  for (const auto& msg : objective_warnings(best.factors, extents, objective)) w.add({std::string("optimal"), msg});
  for (const auto& msg : objective_warnings(greedy, extents, objective)) w.add({std::string("greedy"), msg});
  return r;
}

// ---- commvol ----------------------------------------------------------------

Report commvol_report(const CommvolRequest& req) {
  const BlockGrid grid(req.extents, req.grid);
  Report r;
  r.kind = "commvol";
  const auto sv = surface_volume(grid);
  Cell sv2d, halo_v, halo_dual, oracle, matches;
  if (grid.rank() == 2) sv2d = to_string(surface_volume_2d(grid));
  if (req.halo) {
    halo_v = to_string(halo_volume(grid, *req.halo));
    halo_dual = to_string(halo_volume_dual(grid, *req.halo));
  }
  if (req.oracle) {
    const Tuple h = req.halo ? *req.halo : Tuple(grid.rank(), 1);
    const auto count = oracle_boundary_count(grid, h);
    oracle = count;
    bool unit = true;
    for (auto x : h) unit = unit && x == 1;
    if (unit && grid.divisible()) matches = (Rational(count) == sv);
  }
  r.table("commvol", {"extents", "grid", "processors", "divisible", "surface_volume", "surface_volume_2d", "halo",
                      "halo_volume", "halo_volume_dual", "oracle_count", "oracle_matches"})
      .add({req.extents, req.grid, grid.processors(), grid.divisible(), to_string(sv), sv2d,
            req.halo ? Cell{*req.halo} : Cell{}, halo_v, halo_dual, oracle, matches});
  auto& tr = r.table("transpose", {"dim", "volume"});
  for (auto dim : req.transpose_dims)
    tr.add({static_cast<std::int64_t>(dim), to_string(transpose_volume(grid, dim))});
  return r;
}

// ---- simulate ---------------------------------------------------------------

namespace {

void trace_table(Report& r, const std::vector<sim::LogEntry>& log) {
  auto& t = r.table("trace", {"step", "stage", "task", "origin", "node", "proc", "points"});
  for (const auto& e : log)
    t.add({e.step, std::string(sim::stage_name(e.stage)), e.task, e.origin,
           e.proc ? Cell{e.proc->node} : Cell{}, e.proc ? Cell{e.proc->proc} : Cell{},
           e.stage == sim::Stage::Mapped ? Cell{e.points} : Cell{}});
}

void diag_table(Report& r, const std::vector<sim::TraceDiagnostic>& diags) {
  auto& t = r.table("diagnostics", {"code", "entry", "message"});
  for (const auto& d : diags) t.add({d.code, d.entry < 0 ? Cell{} : Cell{d.entry}, d.message});
}

}  // namespace

Report simulate_report(const sim::Trace& trace, const std::vector<sim::TraceDiagnostic>& diags) {
  Report r;
  r.kind = "simulate";
  r.table("summary", {"steps", "entries", "diagnostics", "valid"})
      .add({trace.steps, static_cast<std::int64_t>(trace.log.size()), static_cast<std::int64_t>(diags.size()),
            diags.empty()});
  trace_table(r, trace.log);
  auto& p = r.table("processors", {"node", "proc", "tasks", "points"});
  for (const auto& s : trace.stats) p.add({s.proc.node, s.proc.proc, s.tasks, s.points});
  auto& rules = r.table("rules", {"rule", "count"});
  for (const auto& [name, n] : trace.rule_counts) rules.add({name, n});
  diag_table(r, diags);
  return r;
}

Report check_report(const std::vector<sim::LogEntry>& log, const std::vector<sim::TraceDiagnostic>& diags) {
  Report r;
  r.kind = "check";
  r.table("summary", {"entries", "diagnostics", "valid"})
      .add({static_cast<std::int64_t>(log.size()), static_cast<std::int64_t>(diags.size()), diags.empty()});
  diag_table(r, diags);
  return r;
}

// ---- sweep ------------------------------------------------------------------

Report sweep_report(const SweepResult& result) {
  Report r;
  r.kind = "sweep";
  r.table("summary", {"configs", "volume_model", "note"})
      .add({static_cast<std::int64_t>(result.records.size()), std::string("surface_volume_2d"),
            std::string("model-predicted communication volumes; not runtime measurements")});
  auto& c = r.table("configs", {"ratio", "area", "gpus", "nodes", "extents", "optimal", "greedy", "volume_optimal",
                                "volume_greedy", "improvement_pct"});
  for (const auto& x : result.records)
    c.add({std::to_string(x.ratio_x) + ":" + std::to_string(x.ratio_y), x.area, x.gpus, x.nodes, x.extents, x.optimal,
           x.greedy, to_string(x.volume_optimal), to_string(x.volume_greedy), x.improvement_pct});
  auto& g = r.table("groups", {"parameter", "value", "configs", "geomean_improvement_pct"});
  for (const auto& x : result.groups)
    g.add({x.parameter, x.value, static_cast<std::int64_t>(x.configs), x.geomean_improvement_pct});
  return r;
}

// ---- trace ingestion --------------------------------------------------------

std::vector<sim::LogEntry> parse_trace(std::string_view json_text) {
  auto bad = [](const std::string& m) { return Error(Errc::SchemaError, "trace: " + m); };
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw bad(std::string("invalid JSON: ") + e.what());
  }
  const nlohmann::json* list = &doc;
  if (doc.is_object()) {
    auto t = doc.find("tables");
    if (t == doc.end() || !t->is_object() || !t->contains("trace")) throw bad("expected a list or a simulate report");
    list = &(*t)["trace"];
  }
  if (!list->is_array()) throw bad("records must be a list");
  std::vector<sim::LogEntry> out;
  for (const auto& rec : *list) {
    if (!rec.is_object()) throw bad("record must be an object");
    sim::LogEntry e{};
    const auto stage = rec.value("stage", std::string());
    if (stage == "enqueued") e.stage = sim::Stage::Enqueued;
    else if (stage == "mapped") e.stage = sim::Stage::Mapped;
    else if (stage == "launched") e.stage = sim::Stage::Launched;
    else if (stage == "executed") e.stage = sim::Stage::Executed;
    else throw bad("unknown stage '" + stage + "'");
    if (!rec.contains("task") || !rec["task"].is_string()) throw bad("record needs a string 'task'");
    e.task = rec["task"].get<std::string>();
    if (rec.contains("origin") && rec["origin"].is_string()) e.origin = rec["origin"].get<std::string>();
    const auto& node = rec.contains("node") ? rec["node"] : nlohmann::json();
    const auto& proc = rec.contains("proc") ? rec["proc"] : nlohmann::json();
    if (node.is_number_integer() && proc.is_number_integer())
      e.proc = ProcessorCoord{node.get<std::int64_t>(), proc.get<std::int64_t>()};
    else if (!node.is_null() || !proc.is_null())
      throw bad("'node' and 'proc' must both be integers or both null");
    if (rec.contains("step") && rec["step"].is_number_integer()) e.step = rec["step"].get<std::int64_t>();
    if (rec.contains("points") && rec["points"].is_array()) {
      for (const auto& p : rec["points"]) {
        if (!p.is_array()) throw bad("points must be integer arrays");
        Tuple t;
        for (const auto& x : p) {
          if (!x.is_number_integer()) throw bad("points must be integer arrays");
          t.push_back(x.get<std::int64_t>());
        }
        e.points.push_back(std::move(t));
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace mapple::report
