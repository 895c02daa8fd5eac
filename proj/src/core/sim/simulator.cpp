#include "mapple/sim/simulator.hpp"

#include "mapple/dsl/eval.hpp"
#include "mapple/error.hpp"

#include <algorithm>
#include <mutex>
#include <unordered_map>

namespace mapple::sim {

const char* stage_name(Stage s) noexcept {
  switch (s) {
    case Stage::Enqueued: return "enqueued";
    case Stage::Mapped: return "mapped";
    case Stage::Launched: return "launched";
    case Stage::Executed: return "executed";
  }
  return "?";
}

const char* rule_name(Rule r) noexcept {
  switch (r) {
    case Rule::Enqueue: return "ENQUEUE";
    case Rule::Distribute: return "DISTRIBUTE";
    case Rule::Local: return "LOCAL";
    case Rule::Map: return "MAP";
    case Rule::Launch: return "LAUNCH";
    case Rule::Execute: return "EXECUTE";
    case Rule::Bootstrap: return "BOOTSTRAP";
  }
  return "?";
}

PointMapper bind_program(const dsl::MapperProgram& program, const MachineShape& machine,
                         std::optional<std::string> default_task) {
  struct Shared {
    dsl::MapperProgram program;
    MachineShape machine;
    std::optional<std::string> fallback;
    std::mutex mu;
    std::unordered_map<std::string, dsl::MappingFunction> fns;  // keyed by bound task name
  };
  auto s = std::make_shared<Shared>();
  s->program = program;
  s->machine = machine;
  s->fallback = std::move(default_task);
  return [s](const IndexTask& task, const Tuple& point, const Tuple& ispace) {
    const std::string& key = s->program.find_binding(task.id) ? task.id : s->fallback.value_or(task.id);
    const dsl::MappingFunction* fn = nullptr;
    {
      std::lock_guard lock(s->mu);
      auto it = s->fns.find(key);
      if (it == s->fns.end()) {
        if (!s->program.find_binding(key))
          throw Error(Errc::NoBinding, "no IndexTaskMap statement for task '" + task.id + "'" +
                                           (s->fallback ? " and default task '" + *s->fallback + "' is unbound" : ""));
        it = s->fns.emplace(key, dsl::compile_mapper(s->program, key, s->machine)).first;
      }
      fn = &it->second;
    }
    return (*fn)(point, ispace);
  };
}

ShardDecision shard_policy(const std::vector<ProcessorCoord>& point_procs) {
  if (point_procs.empty()) throw Error(Errc::EmptyTask, "cannot shard an empty task");
  const auto lo = *std::min_element(point_procs.begin(), point_procs.end());
  Distribute d;
  for (std::size_t i = 0; i < point_procs.size(); ++i) (point_procs[i] == lo ? d.left : d.right).push_back(i);
  if (d.right.empty()) return Local{lo};
  d.p_left = lo;
  d.p_right = point_procs[d.right.front()];
  for (auto i : d.right) d.p_right = std::min(d.p_right, point_procs[i]);
  return d;
}

namespace {

struct SliceState {
  std::string id;
  std::size_t origin;
  std::vector<std::size_t> points;  // indices into the origin's point list
  enum class Where { E, M, Out } where = Where::Out;
  std::int64_t node = 0;
  ProcessorCoord proc;
  bool mapped = false, launched = false, executed = false, dead = false;
  std::optional<ShardDecision> shard;
};

struct TaskState {
  bool enqueued = false;
  std::int64_t mapped = 0, launched = 0, executed = 0;  // point counts
  std::optional<std::int64_t> launch_node;
  int fresh = 0;
  std::vector<ProcessorCoord> procs;  // per point, filled on first use
  bool procs_ready = false;
};

}  // namespace

struct Simulator::Impl {
  const TaskGraph& g;
  PointMapper mapper;
  MachineShape machine;
  Policy policy;
  std::mt19937_64 rng;

  std::vector<TaskState> tasks;
  std::vector<SliceState> slices;  // uid = g.size() + index
  std::vector<std::vector<std::size_t>> eq, mq;  // per node, slice indices
  std::vector<LogEntry> log;
  std::map<std::string, std::int64_t> rule_counts;
  std::int64_t steps = 0;

  Impl(const TaskGraph& graph, PointMapper m, MachineShape mach, Policy p, std::uint64_t seed)
      : g(graph), mapper(std::move(m)), machine(mach), policy(p), rng(seed) {
    if (machine.nodes < 1 || machine.procs_per_node < 1)
      throw Error(Errc::InvalidArgument, "machine must have at least one node and one processor");
    tasks.resize(g.size());
    eq.resize(static_cast<std::size_t>(machine.nodes));
    mq.resize(static_cast<std::size_t>(machine.nodes));
    // root bootstrap: live before any child exists, mapped to (0,0)
    const auto r = g.root();
    const auto n = static_cast<std::int64_t>(g.task(r).points.size());
    tasks[r].enqueued = true;
    tasks[r].mapped = tasks[r].launched = n;
    tasks[r].launch_node = 0;
    SliceState root;
    root.id = g.task(r).id;
    root.origin = r;
    for (std::size_t i = 0; i < g.task(r).points.size(); ++i) root.points.push_back(i);
    root.mapped = root.launched = true;
    slices.push_back(std::move(root));
    log.push_back({Stage::Launched, g.task(r).id, g.task(r).id, ProcessorCoord{0, 0}, 0, {}});
  }

  std::int64_t total(std::size_t t) const { return static_cast<std::int64_t>(g.task(t).points.size()); }
  bool mapped_all(std::size_t t) const { return tasks[t].mapped == total(t); }
  bool launched_all(std::size_t t) const { return tasks[t].launched == total(t); }
  bool executed_all(std::size_t t) const { return tasks[t].executed == total(t); }

  const std::vector<ProcessorCoord>& procs_of(std::size_t t) {
    auto& ts = tasks[t];
    if (!ts.procs_ready) {
      const auto& task = g.task(t);
      const Tuple ispace = g.ispace(t);
      ts.procs.reserve(task.points.size());
      for (const auto& p : task.points) {
        const auto c = mapper(task, p, ispace);
        if (c.node < 0 || c.node >= machine.nodes || c.proc < 0 || c.proc >= machine.procs_per_node)
          throw Error(Errc::EvalError, "task '" + task.id + "' maps " + p.to_string() + " outside the machine");
        ts.procs.push_back(c);
      }
      ts.procs_ready = true;
    }
    return ts.procs;
  }

  const ShardDecision& shard(std::size_t s) {
    auto& sl = slices[s];
    if (!sl.shard) {
      const auto& all = procs_of(sl.origin);
      std::vector<ProcessorCoord> pp;
      pp.reserve(sl.points.size());
      for (auto i : sl.points) pp.push_back(all[i]);
      sl.shard = shard_policy(pp);
    }
    return *sl.shard;
  }

  bool can_enqueue(std::size_t t) const {
    if (t == g.root() || tasks[t].enqueued) return false;
    const auto p = g.parent(t);
    if (!launched_all(p)) return false;
    return g.sibling_rank(t) == 0 || tasks[g.children(p)[g.sibling_rank(t) - 1]].enqueued;
  }
  bool can_map(const SliceState& s) const {
    if (s.where != SliceState::Where::M) return false;
    for (auto p : g.sibling_preds(s.origin))
      if (!mapped_all(p)) return false;
    return true;
  }
  bool deps_done(std::size_t t) const {
    for (auto p : g.preds(t))
      if (!executed_all(p)) return false;
    return true;
  }
  bool can_launch(const SliceState& s) const { return s.mapped && !s.launched && deps_done(s.origin); }
  bool can_execute(const SliceState& s) const {
    if (!s.launched || s.executed || !deps_done(s.origin)) return false;
    for (auto c : g.children(s.origin))
      if (!executed_all(c)) return false;
    return true;
  }

  // Applicable (rule, uid) pairs. In priority mode only the winner is needed.
  std::vector<std::pair<Rule, std::size_t>> applicable(bool first_only) {
    std::vector<std::pair<Rule, std::size_t>> out;
    const std::size_t base = g.size();
    auto scan = [&](Rule rule, auto pred) {
      for (std::size_t s = 0; s < slices.size(); ++s) {
        if (slices[s].dead || !pred(s)) continue;
        out.emplace_back(rule, base + s);
        if (first_only) return true;
      }
      return false;
    };
    auto in_e = [&](std::size_t s) { return slices[s].where == SliceState::Where::E; };
    if (scan(Rule::Execute, [&](std::size_t s) { return can_execute(slices[s]); }) ||
        scan(Rule::Launch, [&](std::size_t s) { return can_launch(slices[s]); }) ||
        scan(Rule::Map, [&](std::size_t s) { return can_map(slices[s]); }) ||
        scan(Rule::Local, [&](std::size_t s) { return in_e(s) && std::holds_alternative<Local>(shard(s)); }) ||
        scan(Rule::Distribute,
             [&](std::size_t s) { return in_e(s) && std::holds_alternative<Distribute>(shard(s)); }))
      return out;
    for (std::size_t t = 0; t < g.size(); ++t) {
      if (!can_enqueue(t)) continue;
      out.emplace_back(Rule::Enqueue, t);
      if (first_only) break;
    }
    return out;
  }

  static void drop(std::vector<std::size_t>& q, std::size_t s) { q.erase(std::find(q.begin(), q.end(), s)); }

  std::size_t new_slice(std::size_t origin, std::string id, std::vector<std::size_t> pts, std::int64_t node) {
    SliceState s;
    s.id = std::move(id);
    s.origin = origin;
    s.points = std::move(pts);
    s.where = SliceState::Where::E;
    s.node = node;
    slices.push_back(std::move(s));
    eq[static_cast<std::size_t>(node)].push_back(slices.size() - 1);
    return slices.size() - 1;
  }

  std::vector<Tuple> point_tuples(const SliceState& s) const {
    std::vector<Tuple> out;
    out.reserve(s.points.size());
    for (auto i : s.points) out.push_back(g.task(s.origin).points[i]);
    return out;
  }

  void apply(Rule rule, std::size_t uid) {
    ++steps;
    ++rule_counts[rule_name(rule)];
    if (rule == Rule::Enqueue) {
      const auto t = uid;
      const auto node = tasks[g.parent(t)].launch_node.value_or(0);
      tasks[t].enqueued = true;
      log.push_back({Stage::Enqueued, g.task(t).id, g.task(t).id, std::nullopt, steps, {}});
      std::vector<std::size_t> pts(g.task(t).points.size());
      for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = i;
      new_slice(t, g.task(t).id, std::move(pts), node);
      return;
    }
    const std::size_t s = uid - g.size();
    switch (rule) {
      case Rule::Distribute: {
        const auto d = std::get<Distribute>(shard(s));
        SliceState& old = slices[s];
        drop(eq[static_cast<std::size_t>(old.node)], s);
        old.dead = true;
        old.where = SliceState::Where::Out;
        const auto origin = old.origin;
        std::vector<std::size_t> left, right;
        for (auto i : d.left) left.push_back(slices[s].points[i]);
        for (auto i : d.right) right.push_back(slices[s].points[i]);
        auto& ts = tasks[origin];
        const auto& oid = g.task(origin).id;
        new_slice(origin, oid + "#" + std::to_string(++ts.fresh), std::move(left), d.p_left.node);
        new_slice(origin, oid + "#" + std::to_string(++ts.fresh), std::move(right), d.p_right.node);
        break;
      }
      case Rule::Local: {
        const auto l = std::get<Local>(shard(s));
        SliceState& sl = slices[s];
        drop(eq[static_cast<std::size_t>(sl.node)], s);
        sl.where = SliceState::Where::M;
        sl.node = l.node();
        sl.proc = l.proc;
        mq[static_cast<std::size_t>(sl.node)].push_back(s);
        break;
      }
      case Rule::Map: {
        SliceState& sl = slices[s];
        drop(mq[static_cast<std::size_t>(sl.node)], s);
        sl.where = SliceState::Where::Out;
        sl.mapped = true;
        tasks[sl.origin].mapped += static_cast<std::int64_t>(sl.points.size());
        log.push_back({Stage::Mapped, sl.id, g.task(sl.origin).id, sl.proc, steps, point_tuples(sl)});
        break;
      }
      case Rule::Launch: {
        SliceState& sl = slices[s];
        sl.launched = true;
        auto& ts = tasks[sl.origin];
        ts.launched += static_cast<std::int64_t>(sl.points.size());
        if (!ts.launch_node) ts.launch_node = sl.proc.node;
        log.push_back({Stage::Launched, sl.id, g.task(sl.origin).id, sl.proc, steps, {}});
        break;
      }
      case Rule::Execute: {
        SliceState& sl = slices[s];
        sl.executed = true;
        tasks[sl.origin].executed += static_cast<std::int64_t>(sl.points.size());
        log.push_back({Stage::Executed, sl.id, g.task(sl.origin).id, sl.proc, steps, {}});
        break;
      }
      default: break;
    }
  }

  bool all_executed() const {
    for (std::size_t t = 0; t < g.size(); ++t)
      if (!executed_all(t)) return false;
    return true;
  }

  std::string diagnose() const {
    std::string msg;
    auto add = [&](const std::string& line) {
      if (!msg.empty()) msg += "; ";
      msg += line;
    };
    for (std::size_t t = 0; t < g.size(); ++t) {
      if (tasks[t].enqueued) continue;
      const auto p = g.parent(t);
      if (!launched_all(p)) add("'" + g.task(t).id + "' waits for parent '" + g.task(p).id + "' to launch");
      else add("'" + g.task(t).id + "' waits for an earlier sibling to be enqueued");
    }
    for (const auto& s : slices) {
      if (s.dead || s.executed) continue;
      if (s.where == SliceState::Where::M) {
        for (auto p : g.sibling_preds(s.origin))
          if (!mapped_all(p)) add("'" + s.id + "' cannot map before '" + g.task(p).id + "' is mapped");
      } else if (s.mapped) {
        for (auto p : g.preds(s.origin))
          if (!executed_all(p))
            add("'" + s.id + "' cannot " + (s.launched ? "execute" : "launch") + " before '" + g.task(p).id +
                "' executes");
        if (s.launched)
          for (auto c : g.children(s.origin))
            if (!executed_all(c)) add("'" + s.id + "' cannot execute before child '" + g.task(c).id + "' executes");
      }
    }
    return msg.empty() ? "no rule applies" : msg;
  }

  bool step() {
    auto cands = applicable(policy == Policy::Priority);
    if (cands.empty()) {
      if (all_executed()) return false;
      throw Error(Errc::Stuck, diagnose());
    }
    std::size_t pick = 0;
    if (policy == Policy::Random) pick = std::uniform_int_distribution<std::size_t>(0, cands.size() - 1)(rng);
    apply(cands[pick].first, cands[pick].second);
    return true;
  }

  Trace trace() const {
    Trace t;
    t.log = log;
    t.rule_counts = rule_counts;
    t.steps = steps;
    std::map<ProcessorCoord, ProcessorStats> stats;
    for (std::size_t s = 1; s < slices.size(); ++s) {  // slice 0 is the bootstrapped root
      const auto& sl = slices[s];
      if (sl.dead || !sl.mapped) continue;
      auto& st = stats[sl.proc];
      st.proc = sl.proc;
      ++st.tasks;
      st.points += static_cast<std::int64_t>(sl.points.size());
    }
    for (auto& [_, st] : stats) t.stats.push_back(st);
    return t;
  }
};

Simulator::Simulator(const TaskGraph& graph, PointMapper mapper, MachineShape machine, Policy policy,
                     std::uint64_t seed)
    : impl_(std::make_unique<Impl>(graph, std::move(mapper), machine, policy, seed)) {}
Simulator::~Simulator() = default;
Simulator::Simulator(Simulator&&) noexcept = default;

bool Simulator::step() { return impl_->step(); }

Trace Simulator::run() {
  while (impl_->step()) {
  }
  return impl_->trace();
}

const std::vector<LogEntry>& Simulator::log() const noexcept { return impl_->log; }

std::pair<std::vector<std::string>, std::vector<std::string>> Simulator::queues(std::int64_t node) const {
  std::pair<std::vector<std::string>, std::vector<std::string>> out;
  const auto n = static_cast<std::size_t>(node);
  if (node < 0 || n >= impl_->eq.size()) throw Error(Errc::InvalidArgument, "no node " + std::to_string(node));
  for (auto s : impl_->eq[n]) out.first.push_back(impl_->slices[s].id);
  for (auto s : impl_->mq[n]) out.second.push_back(impl_->slices[s].id);
  return out;
}

Trace run_to_quiescence(const TaskGraph& graph, const PointMapper& mapper, const MachineShape& machine) {
  return Simulator(graph, mapper, machine).run();
}

}  // namespace mapple::sim
