#pragma once

#include "mapple/decompose.hpp"
#include "mapple/dsl/ast.hpp"
#include "mapple/dsl/eval.hpp"
#include "mapple/dsl/validate.hpp"
#include "mapple/procspace.hpp"
#include "mapple/sim/simulator.hpp"
#include "mapple/sweep.hpp"
#include "mapple/tuple.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace mapple::report {

/// Null, bool, integer, real, text, tuple or list of tuples.
using Cell = std::variant<std::monostate, bool, std::int64_t, double, std::string, Tuple, std::vector<Tuple>>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

/// Named tables with fixed column order. Both renderings carry the same
/// records.
struct Report {
  std::string kind;
  std::deque<Table> tables;  // deque: table() references stay valid

  Table& table(const std::string& name, std::vector<std::string> columns);
  const Table* find(const std::string& name) const;
};

enum class Format { Json, Csv };

/// {"report": kind, "tables": {name: [{column: value, ...}, ...]}}
std::string render_json(const Report& r);
/// One block per table: "# name" line, header, rows; blank line between.
std::string render_csv(const Report& r);
std::string render(const Report& r, Format f);

Report parse_report(const dsl::MapperProgram& program, const std::vector<dsl::Diagnostic>& diags);

/// Every point of `ispace` through the mapping, row-major.
Report map_report(const dsl::MappingFunction& fn, const Tuple& ispace);

Report decompose_report(std::int64_t d, const Tuple& extents, const Objective& objective, bool strict);

struct CommvolRequest {
  Tuple extents;
  Tuple grid;
  std::optional<Tuple> halo;            // halo volume and its dual form
  std::set<std::size_t> transpose_dims;  // transpose volume per listed dim
  bool oracle = false;                  // brute-force count with unit (or given) halos
};
Report commvol_report(const CommvolRequest& req);

Report simulate_report(const sim::Trace& trace, const std::vector<sim::TraceDiagnostic>& diags);
/// Checker result for an externally supplied trace.
Report check_report(const std::vector<sim::LogEntry>& log, const std::vector<sim::TraceDiagnostic>& diags);

Report sweep_report(const SweepResult& result);

/// Reads a trace either as a bare list of records or as a simulate report.
/// Throws SchemaError.
std::vector<sim::LogEntry> parse_trace(std::string_view json_text);

}  // namespace mapple::report
