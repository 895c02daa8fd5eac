// Reference computations for the tests. Written independently of the
// library: plain loops, no shared helpers beyond Tuple and Rational.
#pragma once

#include "mapple/rational.hpp"
#include "mapple/sim/taskgraph.hpp"
#include "mapple/tuple.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using mapple::Rational;
using mapple::Tuple;

// Trial division, ascending (prime, exponent).
inline std::vector<std::pair<std::int64_t, int>> trial_division(std::int64_t d) {
  std::vector<std::pair<std::int64_t, int>> out;
  for (std::int64_t p = 2; p * p <= d; ++p) {
    int e = 0;
    while (d % p == 0) d /= p, ++e;
    if (e) out.emplace_back(p, e);
  }
  if (d > 1) out.emplace_back(d, 1);
  return out;
}

// Nested loop over candidate first factors.
inline std::uint64_t naive_count(std::int64_t d, std::size_t k) {
  if (k == 1) return 1;
  std::uint64_t n = 0;
  for (std::int64_t a = 1; a <= d; ++a)
    if (d % a == 0) n += naive_count(d / a, k - 1);
  return n;
}

// Same loop, collecting tuples (lexicographic by construction).
inline void naive_enumerate(std::int64_t d, std::size_t k, std::vector<std::int64_t>& prefix,
                            std::vector<Tuple>& out) {
  if (k == 1) {
    prefix.push_back(d);
    out.emplace_back(prefix);
    prefix.pop_back();
    return;
  }
  for (std::int64_t a = 1; a <= d; ++a) {
    if (d % a) continue;
    prefix.push_back(a);
    naive_enumerate(d / a, k - 1, prefix, out);
    prefix.pop_back();
  }
}

inline std::vector<Tuple> naive_enumerate(std::int64_t d, std::size_t k) {
  std::vector<std::int64_t> prefix;
  std::vector<Tuple> out;
  naive_enumerate(d, k, prefix, out);
  return out;
}

// sum_m d_m / l_m
inline Rational isotropic(const Tuple& f, const Tuple& l) {
  Rational s = 0;
  for (std::size_t m = 0; m < f.size(); ++m) s += Rational(f[m], l[m]);
  return s;
}

// Cells adjacent across a block cut, counted once per side. Blocks start at
// floor(l * b / d).
inline std::int64_t cut_cells(const Tuple& l, const Tuple& d) {
  const std::size_t k = l.size();
  auto block_of = [&](std::size_t m, std::int64_t c) {
    std::int64_t b = 0;
    while (b + 1 < d[m] && (l[m] * (b + 1)) / d[m] <= c) ++b;
    return b;
  };
  std::int64_t cells = 1;
  for (std::size_t m = 0; m < k; ++m) cells *= l[m];
  std::int64_t count = 0;
  std::vector<std::int64_t> c(k, 0);
  for (std::int64_t i = 0; i < cells; ++i) {
    std::int64_t r = i;
    for (std::size_t m = k; m-- > 0;) c[m] = r % l[m], r /= l[m];
    for (std::size_t m = 0; m < k; ++m)
      if (c[m] + 1 < l[m] && block_of(m, c[m]) != block_of(m, c[m] + 1)) count += 2;
  }
  return count;
}

// sum_n d_n h_n prod_{m != n} l_m, straight from the definition.
inline Rational halo(const Tuple& l, const Tuple& d, const Tuple& h) {
  Rational v = 0;
  for (std::size_t n = 0; n < l.size(); ++n) {
    Rational t = d[n] * h[n];
    for (std::size_t m = 0; m < l.size(); ++m)
      if (m != n) t *= l[m];
    v += t;
  }
  return v;
}

// Hand-derived assignment tables of the seven 2D distributions on a machine
// of `nodes` x `gpus`. The merged machine m.merge(0,1) enumerates node
// fastest: linear i -> (i % nodes, i / nodes).
struct Coord {
  std::int64_t node, proc;
  bool operator==(const Coord&) const = default;
};

inline Coord linear(std::int64_t i, std::int64_t nodes) { return {i % nodes, i / nodes}; }

inline Coord distribution(const std::string& name, std::int64_t x, std::int64_t y, std::int64_t X, std::int64_t Y,
                  std::int64_t nodes, std::int64_t gpus) {
  const std::int64_t P = nodes * gpus;
  if (name == "block2D") return {x * nodes / X, y * gpus / Y};
  if (name == "block1D_x") return linear(y * P / Y, nodes);
  if (name == "block1D_y") return linear(x * P / X, nodes);
  if (name == "cyclic2D") return {x % nodes, y % gpus};
  if (name == "cyclic1D_x") return linear(y % P, nodes);
  if (name == "cyclic1D_y") return linear(x % P, nodes);
  if (name == "blockcyclic") return {(x / nodes) % nodes, (y / gpus) % gpus};
  return {-1, -1};
}

inline const std::vector<std::string>& distribution_names() {
  static const std::vector<std::string> n{"block2D",    "block1D_x",  "block1D_y",  "cyclic2D",
                                          "cyclic1D_x", "cyclic1D_y", "blockcyclic"};
  return n;
}

// Random task tree: every task has a small point set or ispace; deps only
// run forward between siblings, so the graph is acyclic by construction.
inline mapple::sim::TaskGraph random_graph(std::mt19937_64& rng, std::size_t max_tasks) {
  using mapple::sim::IndexTask;
  std::uniform_int_distribution<std::size_t> count(1, max_tasks);
  const std::size_t n = count(rng);
  std::vector<IndexTask> tasks;
  std::vector<std::pair<std::string, std::string>> parent, deps;
  std::vector<std::vector<std::size_t>> kids(n);
  for (std::size_t i = 0; i < n; ++i) {
    IndexTask t;
    t.id = "t" + std::to_string(i);
    const int shape = static_cast<int>(rng() % 4);
    if (i == 0) {
      t.points = {Tuple{0}};
    } else if (shape == 0) {
      t.points = {Tuple{0}};
    } else if (shape == 1) {
      const auto a = static_cast<std::int64_t>(1 + rng() % 6);
      t.ispace = Tuple{a};
      for (std::int64_t x = 0; x < a; ++x) t.points.push_back(Tuple{x});
    } else if (shape == 2) {
      const auto a = static_cast<std::int64_t>(1 + rng() % 4), b = static_cast<std::int64_t>(1 + rng() % 4);
      t.ispace = Tuple{a, b};
      for (std::int64_t x = 0; x < a; ++x)
        for (std::int64_t y = 0; y < b; ++y) t.points.push_back(Tuple{x, y});
    } else {
      // sparse points inside a 4x4 box
      for (std::int64_t x = 0; x < 4; ++x)
        for (std::int64_t y = 0; y < 4; ++y)
          if (rng() % 3 == 0) t.points.push_back(Tuple{x, y});
      if (t.points.empty()) t.points.push_back(Tuple{static_cast<std::int64_t>(rng() % 4), 0});
    }
    if (i > 0) {
      const std::size_t p = rng() % i;
      parent.emplace_back("t" + std::to_string(p), t.id);
      kids[p].push_back(i);
    }
    tasks.push_back(std::move(t));
  }
  for (const auto& ks : kids)
    for (std::size_t a = 0; a < ks.size(); ++a)
      for (std::size_t b = a + 1; b < ks.size(); ++b)
        if (rng() % 4 == 0) deps.emplace_back("t" + std::to_string(ks[a]), "t" + std::to_string(ks[b]));
  return mapple::sim::TaskGraph::build(std::move(tasks), parent, deps, {});
}

}  // namespace oracle
