// Independent replay of a trace against the lifecycle premises. Shares only
// the graph and mapper with the simulator, none of its state handling.
#include "mapple/error.hpp"
#include "mapple/sim/simulator.hpp"

#include <map>
#include <unordered_map>

namespace mapple::sim {

namespace {

struct Replay {
  const TaskGraph& g;
  const PointMapper& mapper;
  std::vector<TraceDiagnostic> out;

  struct Task {
    bool enqueued = false;
    std::vector<bool> mapped_pt;
    std::int64_t mapped = 0, launched = 0, executed = 0;
    std::map<Tuple, std::size_t> index;
    std::optional<Tuple> ispace;
  };
  struct Slice {
    std::size_t origin;
    ProcessorCoord proc;
    std::int64_t size;
    int stage;  // 1 mapped, 2 launched, 3 executed
  };
  std::vector<Task> tasks;
  std::unordered_map<std::string, Slice> slices;

  Replay(const TaskGraph& graph, const PointMapper& m) : g(graph), mapper(m), tasks(graph.size()) {
    for (std::size_t t = 0; t < g.size(); ++t) {
      const auto& pts = g.task(t).points;
      tasks[t].mapped_pt.assign(pts.size(), false);
      for (std::size_t i = 0; i < pts.size(); ++i) tasks[t].index.emplace(pts[i], i);
    }
  }

  void diag(const char* code, std::string msg, std::int64_t entry) { out.push_back({code, std::move(msg), entry}); }

  std::int64_t total(std::size_t t) const { return static_cast<std::int64_t>(g.task(t).points.size()); }

  std::size_t origin_of(const std::string& slice_id) const {
    return g.find(slice_id.substr(0, slice_id.find('#')));
  }

  void bootstrap_root() {
    const auto r = g.root();
    auto& t = tasks[r];
    t.enqueued = true;
    t.mapped = t.launched = total(r);
    t.mapped_pt.assign(t.mapped_pt.size(), true);
    slices[g.task(r).id] = {r, {0, 0}, total(r), 2};
  }

  void enqueued(const LogEntry& e, std::int64_t i) {
    const auto t = g.find(e.task);
    if (t == TaskGraph::npos) return diag("UnknownTask", "enqueued unknown task '" + e.task + "'", i);
    if (t == g.root()) return diag("LifecycleViolation", "root '" + e.task + "' is never enqueued", i);
    if (tasks[t].enqueued) return diag("LifecycleViolation", "'" + e.task + "' enqueued twice", i);
    const auto p = g.parent(t);
    if (tasks[p].launched != total(p))
      diag("PremiseViolation", "'" + e.task + "' enqueued before parent '" + g.task(p).id + "' launched", i);
    for (std::size_t r = 0; r < g.sibling_rank(t); ++r) {
      const auto s = g.children(p)[r];
      if (!tasks[s].enqueued)
        diag("PremiseViolation", "'" + e.task + "' enqueued before earlier sibling '" + g.task(s).id + "'", i);
    }
    tasks[t].enqueued = true;
  }

  void mapped(const LogEntry& e, std::int64_t i) {
    const auto t = origin_of(e.task);
    if (t == TaskGraph::npos) return diag("UnknownTask", "mapped unknown task '" + e.task + "'", i);
    if (!e.proc) return diag("LifecycleViolation", "mapped '" + e.task + "' without a processor", i);
    if (t == g.root()) return diag("LifecycleViolation", "root '" + e.task + "' is mapped at bootstrap", i);
    if (slices.count(e.task)) return diag("LifecycleViolation", "'" + e.task + "' mapped twice", i);
    auto& ts = tasks[t];
    if (!ts.enqueued) diag("LifecycleViolation", "'" + e.task + "' mapped before '" + g.task(t).id + "' enqueued", i);
    for (auto p : g.sibling_preds(t))
      if (tasks[p].mapped != total(p))
        diag("PremiseViolation", "'" + e.task + "' mapped before sibling predecessor '" + g.task(p).id + "'", i);

    std::vector<Tuple> pts = e.points;
    if (pts.empty() && e.task == g.task(t).id) pts = g.task(t).points;
    if (pts.empty()) diag("PointConservation", "mapped slice '" + e.task + "' lists no points", i);
    const Tuple ispace = g.ispace(t);
    bool mismatch = false;
    std::int64_t counted = 0;
    for (const auto& pt : pts) {
      auto it = ts.index.find(pt);
      if (it == ts.index.end()) {
        diag("PointConservation", "'" + e.task + "' carries " + pt.to_string() + ", not a point of '" +
                                      g.task(t).id + "'", i);
        continue;
      }
      if (ts.mapped_pt[it->second]) {
        diag("PointConservation", "point " + pt.to_string() + " of '" + g.task(t).id + "' mapped twice", i);
        continue;
      }
      ts.mapped_pt[it->second] = true;
      ++counted;
      if (!mismatch) {
        const auto want = mapper(g.task(t), pt, ispace);
        if (want != *e.proc) {
          mismatch = true;
          diag("MappingMismatch", "'" + e.task + "' mapped to (" + std::to_string(e.proc->node) + "," +
                                      std::to_string(e.proc->proc) + ") but " + pt.to_string() + " maps to (" +
                                      std::to_string(want.node) + "," + std::to_string(want.proc) + ")",
               i);
        }
      }
    }
    ts.mapped += counted;
    slices[e.task] = {t, *e.proc, counted, 1};
  }

  void deps_executed(std::size_t t, const LogEntry& e, const char* what, std::int64_t i) {
    for (auto p : g.preds(t))
      if (tasks[p].executed != total(p))
        diag("PremiseViolation", "'" + e.task + "' " + what + " before dependence '" + g.task(p).id + "' executed", i);
  }

  Slice* live_slice(const LogEntry& e, int need_stage, std::int64_t i) {
    if (origin_of(e.task) == TaskGraph::npos) {
      diag("UnknownTask", std::string(stage_name(e.stage)) + " unknown task '" + e.task + "'", i);
      return nullptr;
    }
    auto it = slices.find(e.task);
    if (it == slices.end() || it->second.stage < need_stage) {
      diag("LifecycleViolation", "'" + e.task + "' " + stage_name(e.stage) + " out of order", i);
      return nullptr;
    }
    if (it->second.stage > need_stage) {
      diag("LifecycleViolation", "'" + e.task + "' " + stage_name(e.stage) + " twice", i);
      return nullptr;
    }
    if (e.proc && *e.proc != it->second.proc)
      diag("LifecycleViolation", "'" + e.task + "' " + stage_name(e.stage) + " on a different processor", i);
    return &it->second;
  }

  void launched(const LogEntry& e, std::int64_t i) {
    Slice* s = live_slice(e, 1, i);
    if (!s) return;
    deps_executed(s->origin, e, "launched", i);
    s->stage = 2;
    tasks[s->origin].launched += s->size;
  }

  void executed(const LogEntry& e, std::int64_t i) {
    Slice* s = live_slice(e, 2, i);
    if (!s) return;
    deps_executed(s->origin, e, "executed", i);
    for (auto c : g.children(s->origin))
      if (tasks[c].executed != total(c))
        diag("PremiseViolation", "'" + e.task + "' executed before child '" + g.task(c).id + "'", i);
    s->stage = 3;
    tasks[s->origin].executed += s->size;
  }

  void run(const std::vector<LogEntry>& log) {
    const auto& root = g.task(g.root()).id;
    std::size_t start = 0;
    if (!log.empty() && log[0].stage == Stage::Launched && log[0].task == root) start = 1;
    else diag("LifecycleViolation", "trace does not open with the launch of root '" + root + "'", 0);
    bootstrap_root();
    for (std::size_t i = start; i < log.size(); ++i) {
      const auto& e = log[i];
      const auto at = static_cast<std::int64_t>(i);
      switch (e.stage) {
        case Stage::Enqueued: enqueued(e, at); break;
        case Stage::Mapped: mapped(e, at); break;
        case Stage::Launched: launched(e, at); break;
        case Stage::Executed: executed(e, at); break;
      }
    }
    for (std::size_t t = 0; t < g.size(); ++t) {
      if (tasks[t].executed != total(t))
        diag("Incomplete", "'" + g.task(t).id + "' executed " + std::to_string(tasks[t].executed) + " of " +
                               std::to_string(total(t)) + " points",
             -1);
    }
  }
};

}  // namespace

std::vector<TraceDiagnostic> check_trace(const std::vector<LogEntry>& log, const TaskGraph& graph,
                                         const PointMapper& mapper) {
  Replay r(graph, mapper);
  r.run(log);
  return std::move(r.out);
}

}  // namespace mapple::sim
