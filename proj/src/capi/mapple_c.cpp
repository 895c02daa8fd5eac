#include "mapple/mapple.h"

#include "mapple/commvol.hpp"
#include "mapple/decompose.hpp"
#include "mapple/dsl/eval.hpp"
#include "mapple/dsl/parser.hpp"
#include "mapple/dsl/validate.hpp"
#include "mapple/error.hpp"
#include "mapple/report.hpp"
#include "mapple/sim/simulator.hpp"
#include "mapple/sim/taskgraph.hpp"
#include "mapple/sweep.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

using namespace mapple;

struct mapple_program {
  dsl::MapperProgram program;
  std::vector<dsl::Diagnostic> diags;
};

struct mapple_mapper {
  dsl::MappingFunction fn;
};

struct mapple_taskgraph {
  sim::TaskGraph graph;
};

struct mapple_report {
  report::Report r;
  bool errors = false;
};

namespace {

thread_local std::string g_last_error;

mapple_status status_of(Errc c) {
  switch (c) {
    case Errc::InvalidArgument: return MAPPLE_E_INVALID_ARGUMENT;
    case Errc::SyntaxError:
    case Errc::DuplicateFunction: return MAPPLE_E_PARSE;
    case Errc::EvalError: return MAPPLE_E_EVAL;
    case Errc::NoBinding: return MAPPLE_E_NO_BINDING;
    case Errc::EmptyTask:
    case Errc::SchemaError:
    case Errc::CyclicDependence:
    case Errc::MultipleRoots: return MAPPLE_E_SCHEMA;
    case Errc::Stuck: return MAPPLE_E_STUCK;
    default: return MAPPLE_E_DOMAIN;
  }
}

mapple_status fail(mapple_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

// Runs f, translating exceptions into a status plus the thread-local message.
template <class F>
mapple_status guard(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(MAPPLE_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MAPPLE_E_INTERNAL, e.what());
  } catch (...) {
    return fail(MAPPLE_E_INTERNAL, "unknown exception");
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.data(), s.size() + 1);
  return p;
}

MachineShape machine_of(const mapple_machine* m) {
  if (m->nodes < 1 || m->procs_per_node < 1) throw Error(Errc::InvalidArgument, "machine sizes must be positive");
  ProcKind k;
  switch (m->kind) {
    case MAPPLE_PROC_CPU: k = ProcKind::CPU; break;
    case MAPPLE_PROC_GPU: k = ProcKind::GPU; break;
    case MAPPLE_PROC_OMP: k = ProcKind::OMP; break;
    default: throw Error(Errc::InvalidArgument, "unknown processor kind");
  }
  return MachineShape{k, m->nodes, m->procs_per_node};
}

Tuple tuple_of(const int64_t* v, size_t n) { return Tuple(std::vector<std::int64_t>(v, v + n)); }

Objective objective_of(const mapple_objective* o, size_t k) {
  if (!o || o->kind == MAPPLE_OBJECTIVE_ISOTROPIC) return Isotropic{};
  if (!o->halo) throw Error(Errc::InvalidArgument, "objective needs halo widths");
  Tuple halo = tuple_of(o->halo, k);
  if (o->kind == MAPPLE_OBJECTIVE_HALO) return AnisotropicHalo{halo};
  if (o->kind != MAPPLE_OBJECTIVE_TRANSPOSE) throw Error(Errc::InvalidArgument, "unknown objective kind");
  if (o->n_transposed && !o->transposed) throw Error(Errc::InvalidArgument, "transposed dims missing");
  std::set<std::size_t> t(o->transposed, o->transposed + o->n_transposed);
  return WithTranspose{halo, t};
}

mapple_status emit(report::Report r, bool errors, mapple_report** out) {
  *out = new mapple_report{std::move(r), errors};
  return MAPPLE_OK;
}

// A program with validation errors cannot be evaluated meaningfully.
mapple_status require_valid(const mapple_program* p) {
  for (const auto& d : p->diags)
    if (d.severity == dsl::Severity::Error)
      return fail(MAPPLE_E_VALIDATION, std::to_string(d.loc.line) + ":" + std::to_string(d.loc.col) + ": " +
                                           d.code + ": " + d.message);
  return MAPPLE_OK;
}

#define REQUIRE(cond, what) \
  if (!(cond)) return fail(MAPPLE_E_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* mapple_version(void) { return "0.1.0"; }

const char* mapple_status_name(mapple_status s) {
  switch (s) {
    case MAPPLE_OK: return "OK";
    case MAPPLE_E_INVALID_ARGUMENT: return "InvalidArgument";
    case MAPPLE_E_PARSE: return "ParseError";
    case MAPPLE_E_VALIDATION: return "ValidationError";
    case MAPPLE_E_EVAL: return "EvalError";
    case MAPPLE_E_DOMAIN: return "DomainError";
    case MAPPLE_E_SCHEMA: return "SchemaError";
    case MAPPLE_E_STUCK: return "Stuck";
    case MAPPLE_E_NO_BINDING: return "NoBinding";
    case MAPPLE_E_INTERNAL: return "InternalError";
  }
  return "Unknown";
}

const char* mapple_last_error(void) { return g_last_error.c_str(); }

void mapple_string_free(char* s) { std::free(s); }

mapple_status mapple_program_parse(const char* source, size_t len, mapple_program** out) {
  REQUIRE(source && out, "null argument");
  return guard([&] {
    auto prog = dsl::parse(std::string_view(source, len));
    auto diags = dsl::validate(prog);
    *out = new mapple_program{std::move(prog), std::move(diags)};
    return MAPPLE_OK;
  });
}

void mapple_program_free(mapple_program* p) { delete p; }

int mapple_program_has_errors(const mapple_program* p) { return p && dsl::has_errors(p->diags) ? 1 : 0; }

mapple_status mapple_parse_report(const mapple_program* p, mapple_report** out) {
  REQUIRE(p && out, "null argument");
  return guard([&] { return emit(report::parse_report(p->program, p->diags), dsl::has_errors(p->diags), out); });
}

mapple_status mapple_program_print(const mapple_program* p, char** out) {
  REQUIRE(p && out, "null argument");
  return guard([&] {
    *out = dup_string(dsl::print(p->program));
    return MAPPLE_OK;
  });
}

mapple_status mapple_mapper_compile(const mapple_program* p, const char* task, const mapple_machine* m,
                                    mapple_mapper** out) {
  REQUIRE(p && task && m && out, "null argument");
  if (auto s = require_valid(p)) return s;
  return guard([&] {
    *out = new mapple_mapper{dsl::compile_mapper(p->program, task, machine_of(m))};
    return MAPPLE_OK;
  });
}

mapple_status mapple_mapper_compile_function(const mapple_program* p, const char* func, const mapple_machine* m,
                                             mapple_mapper** out) {
  REQUIRE(p && func && m && out, "null argument");
  if (auto s = require_valid(p)) return s;
  return guard([&] {
    *out = new mapple_mapper{dsl::compile_function(p->program, func, machine_of(m))};
    return MAPPLE_OK;
  });
}

void mapple_mapper_free(mapple_mapper* f) { delete f; }

mapple_status mapple_mapper_eval(const mapple_mapper* f, const int64_t* ipoint, const int64_t* ispace, size_t rank,
                                 int64_t* node, int64_t* proc) {
  REQUIRE(f && ipoint && ispace && node && proc, "null argument");
  return guard([&] {
    auto c = f->fn(tuple_of(ipoint, rank), tuple_of(ispace, rank));
    *node = c.node;
    *proc = c.proc;
    return MAPPLE_OK;
  });
}

mapple_status mapple_map_report(const mapple_mapper* f, const int64_t* ispace, size_t rank, mapple_report** out) {
  REQUIRE(f && ispace && out, "null argument");
  return guard([&] { return emit(report::map_report(f->fn, tuple_of(ispace, rank)), false, out); });
}

mapple_status mapple_count_factorizations(int64_t d, size_t k, uint64_t* out) {
  REQUIRE(out, "null argument");
  return guard([&] {
    *out = count_factorizations(d, k);
    return MAPPLE_OK;
  });
}

mapple_status mapple_greedy_grid(int64_t d, size_t k, int64_t* out_factors) {
  REQUIRE(out_factors || k == 0, "null argument");
  return guard([&] {
    auto g = greedy_grid(d, k);
    for (size_t i = 0; i < k; ++i) out_factors[i] = g[i];
    return MAPPLE_OK;
  });
}

mapple_status mapple_search_optimal(int64_t d, const int64_t* extents, size_t k, const mapple_objective* objective,
                                    int strict_divisible, int64_t* out_factors, char** out_score) {
  REQUIRE(extents && out_factors, "null argument");
  return guard([&] {
    auto r = search_optimal(d, tuple_of(extents, k), objective_of(objective, k), {strict_divisible != 0});
    for (size_t i = 0; i < k; ++i) out_factors[i] = r.factors[i];
    if (out_score) *out_score = dup_string(to_string(r.score));
    return MAPPLE_OK;
  });
}

mapple_status mapple_decompose_report(int64_t d, const int64_t* extents, size_t k, const mapple_objective* objective,
                                      int strict_divisible, mapple_report** out) {
  REQUIRE(extents && out, "null argument");
  return guard([&] {
    return emit(report::decompose_report(d, tuple_of(extents, k), objective_of(objective, k), strict_divisible != 0),
                false, out);
  });
}

mapple_status mapple_commvol_report(const int64_t* extents, const int64_t* grid, size_t k, const int64_t* halo,
                                    const size_t* transpose_dims, size_t n_transpose, int oracle,
                                    mapple_report** out) {
  REQUIRE(extents && grid && out, "null argument");
  REQUIRE(transpose_dims || n_transpose == 0, "null transpose dims");
  return guard([&] {
    report::CommvolRequest req;
    req.extents = tuple_of(extents, k);
    req.grid = tuple_of(grid, k);
    if (halo) req.halo = tuple_of(halo, k);
    req.transpose_dims.insert(transpose_dims, transpose_dims + n_transpose);
    req.oracle = oracle != 0;
    return emit(report::commvol_report(req), false, out);
  });
}

mapple_status mapple_taskgraph_load(const char* json, size_t len, mapple_taskgraph** out) {
  REQUIRE(json && out, "null argument");
  return guard([&] {
    *out = new mapple_taskgraph{sim::load_taskgraph(std::string_view(json, len))};
    return MAPPLE_OK;
  });
}

void mapple_taskgraph_free(mapple_taskgraph* g) { delete g; }

size_t mapple_taskgraph_size(const mapple_taskgraph* g) { return g ? g->graph.size() : 0; }

mapple_status mapple_simulate_report(const mapple_taskgraph* g, const mapple_program* p, const mapple_machine* m,
                                     const char* default_task, uint64_t seed, mapple_report** out) {
  REQUIRE(g && p && m && out, "null argument");
  if (auto s = require_valid(p)) return s;
  return guard([&] {
    const auto machine = machine_of(m);
    auto mapper = sim::bind_program(p->program, machine,
                                    default_task ? std::optional<std::string>(default_task) : std::nullopt);
    sim::Simulator s(g->graph, mapper, machine, seed ? sim::Simulator::Policy::Random : sim::Simulator::Policy::Priority,
                     seed);
    auto trace = s.run();
    auto diags = sim::check_trace(trace.log, g->graph, mapper);
    const bool bad = !diags.empty();
    return emit(report::simulate_report(trace, diags), bad, out);
  });
}

mapple_status mapple_check_trace_report(const mapple_taskgraph* g, const mapple_program* p, const mapple_machine* m,
                                        const char* default_task, const char* trace_json, size_t len,
                                        mapple_report** out) {
  REQUIRE(g && p && m && trace_json && out, "null argument");
  if (auto s = require_valid(p)) return s;
  return guard([&] {
    const auto machine = machine_of(m);
    auto mapper = sim::bind_program(p->program, machine,
                                    default_task ? std::optional<std::string>(default_task) : std::nullopt);
    auto log = report::parse_trace(std::string_view(trace_json, len));
    auto diags = sim::check_trace(log, g->graph, mapper);
    const bool bad = !diags.empty();
    return emit(report::check_report(log, diags), bad, out);
  });
}

mapple_status mapple_sweep_report(const char* spec_json, size_t len, mapple_report** out) {
  REQUIRE(out, "null argument");
  return guard([&] {
    auto spec = spec_json ? parse_sweep_spec(std::string_view(spec_json, len)) : default_grid();
    return emit(report::sweep_report(run_sweep(spec)), false, out);
  });
}

mapple_status mapple_report_render(const mapple_report* r, mapple_format format, char** out) {
  REQUIRE(r && out, "null argument");
  REQUIRE(format == MAPPLE_FORMAT_JSON || format == MAPPLE_FORMAT_CSV, "unknown format");
  return guard([&] {
    *out = dup_string(report::render(r->r, format == MAPPLE_FORMAT_JSON ? report::Format::Json : report::Format::Csv));
    return MAPPLE_OK;
  });
}

int mapple_report_has_errors(const mapple_report* r) { return r && r->errors ? 1 : 0; }

void mapple_report_free(mapple_report* r) { delete r; }

}  // extern "C"
