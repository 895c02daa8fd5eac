#include "mapple/sim/taskgraph.hpp"

#include "mapple/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

namespace mapple::sim {

using nlohmann::json;

std::size_t TaskGraph::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? npos : it->second;
}

Tuple TaskGraph::ispace(std::size_t i) const {
  const auto& t = tasks_.at(i);
  if (t.ispace) return *t.ispace;
  Tuple box(t.points.front().size(), 0);
  for (const auto& p : t.points)
    for (std::size_t d = 0; d < p.size(); ++d) box[d] = std::max(box[d], p[d] + 1);
  return box;
}

namespace {

[[noreturn]] void schema(const std::string& msg) { throw Error(Errc::SchemaError, msg); }

}  // namespace

TaskGraph TaskGraph::build(std::vector<IndexTask> tasks,
                           const std::vector<std::pair<std::string, std::string>>& parent,
                           const std::vector<std::pair<std::string, std::string>>& deps,
                           const std::vector<std::pair<std::string, std::vector<std::string>>>& siblings) {
  TaskGraph g;
  g.tasks_ = std::move(tasks);
  const std::size_t n = g.tasks_.size();
  if (n == 0) schema("task graph has no tasks");

  for (std::size_t i = 0; i < n; ++i) {
    auto& t = g.tasks_[i];
    if (t.id.empty()) schema("task ids must be non-empty");
    // '#' is reserved for the ids of distributed slices
    if (t.id.find('#') != std::string::npos) schema("task id '" + t.id + "' contains reserved character '#'");
    if (!g.by_id_.emplace(t.id, i).second) schema("duplicate task id '" + t.id + "'");
    if (t.points.empty()) throw Error(Errc::EmptyTask, "task '" + t.id + "' has no points");
    const std::size_t rank = t.points.front().size();
    if (rank == 0) schema("task '" + t.id + "' has zero-dimensional points");
    std::set<Tuple> seen;
    for (const auto& p : t.points) {
      if (p.size() != rank) schema("task '" + t.id + "' mixes point ranks");
      for (auto x : p)
        if (x < 0) schema("task '" + t.id + "' has negative coordinates in " + p.to_string());
      if (t.ispace) {
        if (t.ispace->size() != rank) schema("task '" + t.id + "' ispace rank differs from its points");
        for (std::size_t d = 0; d < rank; ++d)
          if (p[d] >= (*t.ispace)[d]) schema("point " + p.to_string() + " outside ispace of '" + t.id + "'");
      }
      if (!seen.insert(p).second) schema("task '" + t.id + "' repeats point " + p.to_string());
    }
  }

  auto lookup = [&](const std::string& id, const char* where) {
    auto i = g.find(id);
    if (i == npos) schema(std::string("unknown task '") + id + "' in " + where);
    return i;
  };

  g.parent_.assign(n, npos);
  g.children_.assign(n, {});
  for (const auto& [p, c] : parent) {
    const auto pi = lookup(p, "parent"), ci = lookup(c, "parent");
    if (pi == ci) throw Error(Errc::CyclicDependence, "task '" + p + "' is its own parent");
    if (g.parent_[ci] != npos) schema("task '" + c + "' has more than one parent");
    g.parent_[ci] = pi;
    g.children_[pi].push_back(ci);
  }
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < n; ++i)
    if (g.parent_[i] == npos) roots.push_back(i);
  if (roots.size() > 1)
    throw Error(Errc::MultipleRoots, "task graph has " + std::to_string(roots.size()) + " roots ('" +
                                         g.tasks_[roots[0]].id + "', '" + g.tasks_[roots[1]].id + "', ...)");
  if (roots.empty()) throw Error(Errc::CyclicDependence, "parent relation has a cycle");
  g.root_ = roots[0];
  // every task must reach the root, otherwise a parent cycle is detached
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t cur = i, hops = 0;
    while (g.parent_[cur] != npos && hops <= n) cur = g.parent_[cur], ++hops;
    if (cur != g.root_) throw Error(Errc::CyclicDependence, "parent relation has a cycle through '" +
                                                                g.tasks_[i].id + "'");
  }

  for (const auto& [p, order] : siblings) {
    const auto pi = lookup(p, "siblings");
    std::vector<std::size_t> ordered;
    for (const auto& c : order) ordered.push_back(lookup(c, "siblings"));
    auto a = ordered, b = g.children_[pi];
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) schema("sibling order for '" + p + "' does not list exactly its children");
    g.children_[pi] = std::move(ordered);
  }
  g.rank_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t r = 0; r < g.children_[i].size(); ++r) g.rank_[g.children_[i][r]] = r;

  g.preds_.assign(n, {});
  g.sibling_preds_.assign(n, {});
  std::set<std::pair<std::size_t, std::size_t>> seen_deps;
  for (const auto& [b, a] : deps) {
    const auto bi = lookup(b, "deps"), ai = lookup(a, "deps");
    if (bi == ai) throw Error(Errc::CyclicDependence, "task '" + a + "' depends on itself");
    if (!seen_deps.insert({bi, ai}).second) continue;
    g.deps_.emplace_back(bi, ai);
    g.preds_[ai].push_back(bi);
    if (g.parent_[ai] != npos && g.parent_[ai] == g.parent_[bi]) g.sibling_preds_[ai].push_back(bi);
  }
  g.validate_acyclic();
  return g;
}

void TaskGraph::validate_acyclic() const {
  const std::size_t n = size();
  // plain dependence cycles first, for a readable message
  {
    std::vector<int> color(n, 0);
    std::vector<std::size_t> path;
    std::vector<std::vector<std::size_t>> succ(n);
    for (auto [b, a] : deps_) succ[b].push_back(a);
    for (std::size_t s = 0; s < n; ++s) {
      if (color[s]) continue;
      std::vector<std::pair<std::size_t, std::size_t>> stack{{s, 0}};
      color[s] = 1;
      path.assign(1, s);
      while (!stack.empty()) {
        auto& [v, k] = stack.back();
        if (k < succ[v].size()) {
          const auto w = succ[v][k++];
          if (color[w] == 1) {
            std::string msg = "dependence cycle: ";
            auto from = std::find(path.begin(), path.end(), w);
            for (auto it = from; it != path.end(); ++it) msg += tasks_[*it].id + " -> ";
            throw Error(Errc::CyclicDependence, msg + tasks_[w].id);
          }
          if (color[w] == 0) {
            color[w] = 1;
            stack.emplace_back(w, 0);
            path.push_back(w);
          }
        } else {
          color[v] = 2;
          stack.pop_back();
          path.pop_back();
        }
      }
    }
  }

  // Stage wait-for graph: node 4*t + s for s in {enqueued, mapped, launched,
  // executed}. A cycle here means the lifecycle rules can never all fire.
  enum { E = 0, M, L, X };
  std::vector<std::vector<std::size_t>> waits(4 * n);
  auto at = [](std::size_t t, int s) { return 4 * t + static_cast<std::size_t>(s); };
  for (std::size_t t = 0; t < n; ++t) {
    if (t != root_) {
      waits[at(t, E)].push_back(at(parent_[t], L));
      if (rank_[t] > 0) waits[at(t, E)].push_back(at(children_[parent_[t]][rank_[t] - 1], E));
      waits[at(t, M)].push_back(at(t, E));
      for (auto p : sibling_preds_[t]) waits[at(t, M)].push_back(at(p, M));
      waits[at(t, L)].push_back(at(t, M));
      for (auto p : preds_[t]) waits[at(t, L)].push_back(at(p, X));
    }
    waits[at(t, X)].push_back(at(t, L));
    if (t == root_)
      for (auto p : preds_[t]) waits[at(t, X)].push_back(at(p, X));
    for (auto c : children_[t]) waits[at(t, X)].push_back(at(c, X));
  }
  static const char* stage[] = {"enqueue", "map", "launch", "execute"};
  std::vector<int> color(4 * n, 0);
  for (std::size_t s = 0; s < 4 * n; ++s) {
    if (color[s]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{s, 0}};
    color[s] = 1;
    while (!stack.empty()) {
      auto& [v, k] = stack.back();
      if (k < waits[v].size()) {
        const auto w = waits[v][k++];
        if (color[w] == 1)
          throw Error(Errc::CyclicDependence, std::string("cannot ") + stage[v % 4] + " '" + tasks_[v / 4].id +
                                                  "': it transitively waits on itself via " + stage[w % 4] +
                                                  " of '" + tasks_[w / 4].id + "'");
        if (color[w] == 0) {
          color[w] = 1;
          stack.emplace_back(w, 0);
        }
      } else {
        color[v] = 2;
        stack.pop_back();
      }
    }
  }
}

namespace {

Tuple json_tuple(const json& j, const std::string& what) {
  if (!j.is_array()) schema(what + " must be an array of integers");
  Tuple t;
  for (const auto& x : j) {
    if (!x.is_number_integer()) schema(what + " must contain integers only");
    t.push_back(x.get<std::int64_t>());
  }
  return t;
}

std::string json_id(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) schema(where + " needs a string field '" + key + "'");
  return it->get<std::string>();
}

}  // namespace

namespace {
// Typos in optional keys would otherwise silently drop structure.
void only_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& what) {
  for (const auto& [k, v] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || k == a;
    if (!ok) schema("unknown key '" + k + "' in " + what);
  }
}
}  // namespace

TaskGraph load_taskgraph(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    schema(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) schema("task graph document must be a JSON object");
  only_keys(doc, {"tasks", "parent", "deps", "siblings"}, "task graph");
  auto tasks_it = doc.find("tasks");
  if (tasks_it == doc.end() || !tasks_it->is_array()) schema("'tasks' must be an array");

  constexpr std::int64_t kMaxPoints = 1 << 22;
  std::vector<IndexTask> tasks;
  for (const auto& jt : *tasks_it) {
    if (!jt.is_object()) schema("each task must be an object");
    IndexTask t;
    t.id = json_id(jt, "id", "task");
    only_keys(jt, {"id", "ispace", "points"}, "task '" + t.id + "'");
    if (auto it = jt.find("ispace"); it != jt.end()) {
      t.ispace = json_tuple(*it, "ispace of '" + t.id + "'");
      if (t.ispace->empty()) schema("ispace of '" + t.id + "' is empty");
      for (auto e : *t.ispace)
        if (e <= 0) schema("ispace of '" + t.id + "' must be positive");
    }
    if (auto it = jt.find("points"); it != jt.end()) {
      if (!it->is_array()) schema("points of '" + t.id + "' must be an array");
      for (const auto& p : *it) t.points.push_back(json_tuple(p, "point of '" + t.id + "'"));
    } else if (t.ispace) {
      if (t.ispace->product() > kMaxPoints) schema("ispace of '" + t.id + "' is too large to enumerate");
      for_each_index(*t.ispace, [&](const Tuple& p) { t.points.push_back(p); });
    } else {
      schema("task '" + t.id + "' needs 'points' or 'ispace'");
    }
    tasks.push_back(std::move(t));
  }

  std::vector<std::pair<std::string, std::string>> parent, deps;
  std::vector<std::pair<std::string, std::vector<std::string>>> siblings;
  if (auto it = doc.find("parent"); it != doc.end()) {
    if (!it->is_array()) schema("'parent' must be an array");
    for (const auto& e : *it) {
      if (!e.is_object()) schema("parent entries must be objects");
      only_keys(e, {"parent", "child"}, "parent entry");
      parent.emplace_back(json_id(e, "parent", "parent entry"), json_id(e, "child", "parent entry"));
    }
  }
  if (auto it = doc.find("deps"); it != doc.end()) {
    if (!it->is_array()) schema("'deps' must be an array");
    for (const auto& e : *it) {
      if (!e.is_object()) schema("deps entries must be objects");
      only_keys(e, {"before", "after"}, "deps entry");
      deps.emplace_back(json_id(e, "before", "deps entry"), json_id(e, "after", "deps entry"));
    }
  }
  if (auto it = doc.find("siblings"); it != doc.end()) {
    if (!it->is_object()) schema("'siblings' must be an object of parent -> ordered children");
    for (const auto& [p, order] : it->items()) {
      if (!order.is_array()) schema("sibling order of '" + p + "' must be an array");
      std::vector<std::string> ids;
      for (const auto& c : order) {
        if (!c.is_string()) schema("sibling order of '" + p + "' must list task ids");
        ids.push_back(c.get<std::string>());
      }
      siblings.emplace_back(p, std::move(ids));
    }
  }
  return TaskGraph::build(std::move(tasks), parent, deps, siblings);
}

}  // namespace mapple::sim
