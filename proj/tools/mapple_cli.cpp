// mapple command-line tool. Talks to the library only through the C API.
#include "mapple/mapple.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kOk = 0, kDomain = 1, kUsage = 2;

// Usage problems detected after CLI11 has parsed the flags.
struct UsageError {
  std::string message;
};

struct Handles {
  std::unique_ptr<mapple_program, decltype(&mapple_program_free)> program{nullptr, mapple_program_free};
  std::unique_ptr<mapple_mapper, decltype(&mapple_mapper_free)> mapper{nullptr, mapple_mapper_free};
  std::unique_ptr<mapple_taskgraph, decltype(&mapple_taskgraph_free)> graph{nullptr, mapple_taskgraph_free};
};

using ReportPtr = std::unique_ptr<mapple_report, decltype(&mapple_report_free)>;

struct Common {
  std::string format = "json";
  std::string out;
};

struct MachineOpts {
  std::string shape;  // NODESxPROCS
  std::string kind = "GPU";
  std::string config;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError{"cannot read '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// "6,6", "(6,6)", "6x6" or "6 6".
std::vector<int64_t> parse_ints(const std::string& text, const char* what) {
  std::vector<int64_t> v;
  std::string tok;
  auto flush = [&] {
    if (tok.empty()) return;
    size_t used = 0;
    try {
      v.push_back(std::stoll(tok, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw UsageError{std::string("malformed ") + what + " '" + text + "'"};
    tok.clear();
  };
  // 'x' only joins two numbers ("2x2"); on its own it is a typo, not a separator
  bool dangling_x = false;
  for (char c : text) {
    if (c == 'x') {
      if (tok.empty()) throw UsageError{std::string("malformed ") + what + " '" + text + "'"};
      flush();
      dangling_x = true;
    } else if (c == ',' || c == ' ' || c == '(' || c == ')') {
      flush();
    } else {
      tok += c;
      dangling_x = false;
    }
  }
  flush();
  if (dangling_x) throw UsageError{std::string("malformed ") + what + " '" + text + "'"};
  if (v.empty()) throw UsageError{std::string("empty ") + what};
  return v;
}

mapple_proc_kind parse_kind(const std::string& k) {
  if (k == "CPU") return MAPPLE_PROC_CPU;
  if (k == "GPU") return MAPPLE_PROC_GPU;
  if (k == "OMP") return MAPPLE_PROC_OMP;
  throw UsageError{"unknown processor kind '" + k + "'"};
}

// {"kind": "GPU", "nodes": 2, "procs_per_node": 2}
mapple_machine resolve_machine(const MachineOpts& m) {
  if (!m.config.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(m.config));
      mapple_machine out{parse_kind(j.value("kind", std::string("GPU"))), j.at("nodes").get<int64_t>(),
                         j.at("procs_per_node").get<int64_t>()};
      if (out.nodes < 1 || out.procs_per_node < 1) throw UsageError{"machine sizes must be positive"};
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw UsageError{"bad machine config '" + m.config + "': " + e.what()};
    }
  }
  if (m.shape.empty()) throw UsageError{"a machine is required: --machine NODESxPROCS or --machine-config FILE"};
  auto v = parse_ints(m.shape, "machine");
  if (v.size() != 2 || v[0] < 1 || v[1] < 1) throw UsageError{"--machine expects NODESxPROCS with positive sizes"};
  return {parse_kind(m.kind), v[0], v[1]};
}

void add_machine(CLI::App* cmd, MachineOpts& m) {
  cmd->add_option("--machine", m.shape, "Machine shape NODESxPROCS, e.g. 2x2");
  cmd->add_option("--kind", m.kind, "Processor kind")->check(CLI::IsMember({"CPU", "GPU", "OMP"}));
  cmd->add_option("--machine-config", m.config, "JSON file {kind, nodes, procs_per_node}")->check(CLI::ExistingFile);
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", c.out, "Output file (default stdout)");
}

// Error from the library: message on stderr, exit status by kind.
int api_failure(mapple_status s) {
  std::cerr << "mapple: " << mapple_status_name(s) << ": " << mapple_last_error() << "\n";
  return s == MAPPLE_E_INVALID_ARGUMENT ? kUsage : kDomain;
}

std::optional<nlohmann::json> report_json(const mapple_report* r) {
  char* text = nullptr;
  if (mapple_report_render(r, MAPPLE_FORMAT_JSON, &text) != MAPPLE_OK) return std::nullopt;
  auto j = nlohmann::json::parse(text);
  mapple_string_free(text);
  return j;
}

// Diagnostics table rows, one line each, on stderr.
void print_diagnostics(const mapple_report* r) {
  auto j = report_json(r);
  if (!j) return;
  for (const auto& d : (*j)["tables"]["diagnostics"]) {
    std::cerr << "mapple: ";
    if (d.contains("severity")) {
      std::cerr << d["line"].get<int64_t>() << ":" << d["col"].get<int64_t>() << ": "
                << d["severity"].get<std::string>() << ": ";
    } else if (d.contains("entry")) {
      std::cerr << "entry " << d["entry"].get<int64_t>() << ": ";
    }
    std::cerr << d["code"].get<std::string>() << ": " << d["message"].get<std::string>() << "\n";
  }
}

int write_report(const mapple_report* r, const Common& c) {
  char* text = nullptr;
  auto s = mapple_report_render(r, c.format == "csv" ? MAPPLE_FORMAT_CSV : MAPPLE_FORMAT_JSON, &text);
  if (s != MAPPLE_OK) return api_failure(s);
  std::string body(text);
  mapple_string_free(text);
  if (c.format == "json") body += "\n";
  if (c.out.empty()) {
    std::cout << body;
    std::cout.flush();
  } else {
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw UsageError{"cannot write '" + c.out + "'"};
    f << body;
  }
  return kOk;
}

// Parses the mapper; on validation errors prints them and returns false.
int load_program(const std::string& path, Handles& h, bool require_valid) {
  const auto src = read_file(path);
  mapple_program* p = nullptr;
  if (auto s = mapple_program_parse(src.data(), src.size(), &p)) return api_failure(s);
  h.program.reset(p);
  if (require_valid && mapple_program_has_errors(p)) {
    mapple_report* r = nullptr;
    if (mapple_parse_report(p, &r) == MAPPLE_OK) {
      ReportPtr rp(r, mapple_report_free);
      print_diagnostics(r);
    }
    std::cerr << "mapple: " << path << " has validation errors\n";
    return kDomain;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mapple: mapper DSL, decomposition and task lifecycle toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mapple_version()));

  // parse
  Common parse_c;
  std::string parse_file;
  bool canonical = false;
  auto* parse_cmd = app.add_subcommand("parse", "Parse and validate a mapper file");
  parse_cmd->add_option("mapper", parse_file, "Mapper source")->required()->check(CLI::ExistingFile);
  parse_cmd->add_flag("--canonical", canonical, "Print the canonical source instead of a report");
  add_common(parse_cmd, parse_c);

  // map
  Common map_c;
  MachineOpts map_m;
  std::string map_file, map_task, map_func, map_ispace;
  auto* map_cmd = app.add_subcommand("map", "Assignment table of a mapper over an index space");
  map_cmd->add_option("mapper", map_file, "Mapper source")->required()->check(CLI::ExistingFile);
  auto* task_opt = map_cmd->add_option("--task", map_task, "Task bound by IndexTaskMap");
  auto* func_opt = map_cmd->add_option("--func", map_func, "Mapping function name");
  task_opt->excludes(func_opt);
  map_cmd->add_option("--ispace", map_ispace, "Index space extents, e.g. 6,6")->required();
  add_machine(map_cmd, map_m);
  add_common(map_cmd, map_c);

  // decompose
  Common dec_c;
  int64_t dec_d = 0;
  std::string dec_extents, dec_halo, dec_transpose;
  bool dec_strict = false;
  auto* dec_cmd = app.add_subcommand("decompose", "Optimal vs greedy processor grid");
  dec_cmd->add_option("--procs,-d", dec_d, "Processor count")->required();
  dec_cmd->add_option("--extents", dec_extents, "Iteration space extents, e.g. 12,18")->required();
  dec_cmd->add_option("--halo", dec_halo, "Halo widths per dimension (anisotropic objective)");
  dec_cmd->add_option("--transpose", dec_transpose, "Dimensions needing an all-to-all, e.g. 0,2");
  dec_cmd->add_flag("--strict", dec_strict, "Only factors dividing their extent");
  add_common(dec_cmd, dec_c);

  // commvol
  Common cv_c;
  std::string cv_extents, cv_grid, cv_halo, cv_transpose;
  bool cv_oracle = false;
  auto* cv_cmd = app.add_subcommand("commvol", "Communication volume of a block partition");
  cv_cmd->add_option("--extents", cv_extents, "Iteration space extents")->required();
  cv_cmd->add_option("--grid", cv_grid, "Blocks per dimension")->required();
  cv_cmd->add_option("--halo", cv_halo, "Halo widths per dimension");
  cv_cmd->add_option("--transpose", cv_transpose, "Dimensions to report transpose volume for");
  cv_cmd->add_flag("--oracle", cv_oracle, "Add a brute-force boundary count");
  add_common(cv_cmd, cv_c);

  // simulate
  Common sim_c;
  MachineOpts sim_m;
  std::string sim_file, sim_graph, sim_task, sim_trace;
  uint64_t sim_seed = 0;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the task lifecycle simulator and check its trace");
  sim_cmd->add_option("mapper", sim_file, "Mapper source")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--graph", sim_graph, "Task graph JSON")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--task", sim_task, "Binding used for tasks without their own IndexTaskMap");
  sim_cmd->add_option("--seed", sim_seed, "Random scheduler seed; 0 = deterministic priority order");
  sim_cmd->add_option("--trace", sim_trace, "Check this trace instead of simulating")->check(CLI::ExistingFile);
  add_machine(sim_cmd, sim_m);
  add_common(sim_cmd, sim_c);

  // sweep
  Common sw_c;
  std::string sw_spec;
  auto* sw_cmd = app.add_subcommand("sweep", "Model-predicted optimal vs greedy volumes over a parameter grid");
  sw_cmd->add_option("--grid-spec", sw_spec, "JSON {ratios, areas, gpus, gpus_per_node}; default full grid")
      ->check(CLI::ExistingFile);
  add_common(sw_cmd, sw_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    Handles h;
    mapple_report* raw = nullptr;

    if (*parse_cmd) {
      if (int rc = load_program(parse_file, h, false)) return rc;
      const bool bad = mapple_program_has_errors(h.program.get());
      if (canonical) {
        char* text = nullptr;
        if (auto s = mapple_program_print(h.program.get(), &text)) return api_failure(s);
        std::string body(text);
        mapple_string_free(text);
        if (parse_c.out.empty()) std::cout << body;
        else std::ofstream(parse_c.out, std::ios::binary) << body;
      }
      if (auto s = mapple_parse_report(h.program.get(), &raw)) return api_failure(s);
      ReportPtr r(raw, mapple_report_free);
      if (bad) print_diagnostics(r.get());
      if (!canonical)
        if (int rc = write_report(r.get(), parse_c)) return rc;
      return bad ? kDomain : kOk;
    }

    if (*map_cmd) {
      if (map_task.empty() && map_func.empty()) throw UsageError{"map needs --task or --func"};
      const auto machine = resolve_machine(map_m);
      const auto ispace = parse_ints(map_ispace, "ispace");
      if (int rc = load_program(map_file, h, true)) return rc;
      mapple_mapper* f = nullptr;
      auto s = map_task.empty() ? mapple_mapper_compile_function(h.program.get(), map_func.c_str(), &machine, &f)
                                : mapple_mapper_compile(h.program.get(), map_task.c_str(), &machine, &f);
      if (s) return api_failure(s);
      h.mapper.reset(f);
      if ((s = mapple_map_report(f, ispace.data(), ispace.size(), &raw))) return api_failure(s);
      ReportPtr r(raw, mapple_report_free);
      return write_report(r.get(), map_c);
    }

    if (*dec_cmd) {
      const auto extents = parse_ints(dec_extents, "extents");
      std::vector<int64_t> halo;
      std::vector<size_t> transposed;
      mapple_objective obj{MAPPLE_OBJECTIVE_ISOTROPIC, nullptr, nullptr, 0};
      if (!dec_halo.empty()) {
        halo = parse_ints(dec_halo, "halo");
        obj.kind = MAPPLE_OBJECTIVE_HALO;
      }
      if (!dec_transpose.empty()) {
        for (auto t : parse_ints(dec_transpose, "transpose dims")) {
          if (t < 0) throw UsageError{"transpose dims must be non-negative"};
          transposed.push_back(static_cast<size_t>(t));
        }
        if (halo.empty()) halo.assign(extents.size(), 1);
        obj.kind = MAPPLE_OBJECTIVE_TRANSPOSE;
      }
      if (!halo.empty() && halo.size() != extents.size())
        throw UsageError{"--halo needs one width per extent"};
      obj.halo = halo.empty() ? nullptr : halo.data();
      obj.transposed = transposed.data();
      obj.n_transposed = transposed.size();
      if (auto s = mapple_decompose_report(dec_d, extents.data(), extents.size(), &obj, dec_strict, &raw))
        return api_failure(s);
      ReportPtr r(raw, mapple_report_free);
      return write_report(r.get(), dec_c);
    }

    if (*cv_cmd) {
      const auto extents = parse_ints(cv_extents, "extents");
      const auto grid = parse_ints(cv_grid, "grid");
      if (grid.size() != extents.size()) throw UsageError{"--grid needs one count per extent"};
      std::vector<int64_t> halo;
      if (!cv_halo.empty()) {
        halo = parse_ints(cv_halo, "halo");
        if (halo.size() != extents.size()) throw UsageError{"--halo needs one width per extent"};
      }
      std::vector<size_t> dims;
      if (!cv_transpose.empty())
        for (auto t : parse_ints(cv_transpose, "transpose dims")) {
          if (t < 0) throw UsageError{"transpose dims must be non-negative"};
          dims.push_back(static_cast<size_t>(t));
        }
      if (auto s = mapple_commvol_report(extents.data(), grid.data(), extents.size(),
                                         halo.empty() ? nullptr : halo.data(), dims.data(), dims.size(), cv_oracle,
                                         &raw))
        return api_failure(s);
      ReportPtr r(raw, mapple_report_free);
      return write_report(r.get(), cv_c);
    }

    if (*sim_cmd) {
      const auto machine = resolve_machine(sim_m);
      if (int rc = load_program(sim_file, h, true)) return rc;
      const auto gsrc = read_file(sim_graph);
      mapple_taskgraph* g = nullptr;
      if (auto s = mapple_taskgraph_load(gsrc.data(), gsrc.size(), &g)) return api_failure(s);
      h.graph.reset(g);
      const char* task = sim_task.empty() ? nullptr : sim_task.c_str();
      mapple_status s;
      if (sim_trace.empty()) {
        s = mapple_simulate_report(g, h.program.get(), &machine, task, sim_seed, &raw);
      } else {
        const auto tsrc = read_file(sim_trace);
        s = mapple_check_trace_report(g, h.program.get(), &machine, task, tsrc.data(), tsrc.size(), &raw);
      }
      if (s) return api_failure(s);
      ReportPtr r(raw, mapple_report_free);
      if (int rc = write_report(r.get(), sim_c)) return rc;
      if (mapple_report_has_errors(r.get())) {
        print_diagnostics(r.get());
        return kDomain;
      }
      return kOk;
    }

    if (*sw_cmd) {
      mapple_status s;
      if (sw_spec.empty()) {
        s = mapple_sweep_report(nullptr, 0, &raw);
      } else {
        const auto spec = read_file(sw_spec);
        s = mapple_sweep_report(spec.data(), spec.size(), &raw);
      }
      if (s) return api_failure(s);
      ReportPtr r(raw, mapple_report_free);
      return write_report(r.get(), sw_c);
    }
  } catch (const UsageError& e) {
    std::cerr << "mapple: " << e.message << "\n";
    return kUsage;
  }
  return kUsage;
}
