// Acceptance suite: one PASS/FAIL line per criterion. Expected values come
// from the oracles in tests/support or from hand derivations noted inline.
#include "mapple/commvol.hpp"
#include "mapple/decompose.hpp"
#include "mapple/dsl/eval.hpp"
#include "mapple/dsl/parser.hpp"
#include "mapple/dsl/validate.hpp"
#include "mapple/error.hpp"
#include "mapple/procspace.hpp"
#include "mapple/sim/simulator.hpp"
#include "mapple/sim/taskgraph.hpp"
#include "mapple/sweep.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

using namespace mapple;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

std::string slurp(const std::string& rel) {
  std::ifstream f(std::string(MAPPLE_TEST_DATA) + "/" + rel);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int failures = 0;

void criterion(int n, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && s >= budget_s && o.ok) {
    o.ok = false;
    o.detail = "over time budget";
  }
  if (!o.ok) ++failures;
  std::printf("%s criterion %2d: %s (%.3f s)%s%s\n", o.ok ? "PASS" : "FAIL", n, title, s,
              o.detail.empty() ? "" : " -- ", o.detail.c_str());
  std::fflush(stdout);
}

std::string str(const Tuple& t) { return t.to_string(); }

// every coordinate of an n x p machine exactly once
bool is_bijection(const std::vector<ProcessorCoord>& all, std::int64_t n, std::int64_t p, std::vector<char>& seen) {
  if (static_cast<std::int64_t>(all.size()) != n * p) return false;
  seen.assign(static_cast<std::size_t>(n * p), 0);
  for (const auto& c : all) {
    if (c.node < 0 || c.node >= n || c.proc < 0 || c.proc >= p) return false;
    auto& s = seen[static_cast<std::size_t>(c.node * p + c.proc)];
    if (s) return false;
    s = 1;
  }
  return true;
}

// n is the largest divisor of total with n * n <= total
bool is_balanced(std::int64_t n, std::int64_t total) {
  for (std::int64_t m = n + 1; m * m <= total; ++m)
    if (total % m == 0) return false;
  return true;
}

std::vector<std::int64_t> divisors(std::int64_t x) {
  std::vector<std::int64_t> d;
  for (std::int64_t i = 1; i <= x; ++i)
    if (x % i == 0) d.push_back(i);
  return d;
}

}  // namespace

int main() {
  criterion(1, "surface volumes 96 / 84 on (12,18) and (18,12), oracle agrees", 1.0, [] {
    Outcome o;
    BlockGrid a({12, 18}, {3, 2}), b({18, 12}, {3, 2});
    o.require(surface_volume(a) == 96, "surface_volume((12,18),(3,2)) = " + to_string(surface_volume(a)));
    o.require(surface_volume(b) == 84, "surface_volume((18,12),(3,2)) = " + to_string(surface_volume(b)));
    o.require(oracle_boundary_count(a, {1, 1}) == 96, "oracle on (12,18)");
    o.require(oracle_boundary_count(b, {1, 1}) == 84, "oracle on (18,12)");
    o.require(oracle::cut_cells({12, 18}, {3, 2}) == 96 && oracle::cut_cells({18, 12}, {3, 2}) == 84,
              "independent cut count");
    return o;
  });

  criterion(2, "search_optimal(6,(12,18)) = (2,3), volume 84, greedy (3,2)", 0, [] {
    Outcome o;
    auto r = search_optimal(6, {12, 18}, Isotropic{});
    o.require(r.factors == Tuple{2, 3}, "optimal " + str(r.factors));
    o.require(r.score == Rational(1, 3), "score " + to_string(r.score));
    auto v = surface_volume(BlockGrid({12, 18}, r.factors));
    o.require(v == 84, "volume " + to_string(v));
    o.require(greedy_grid(6, 2) == Tuple{3, 2}, "greedy " + str(greedy_grid(6, 2)));
    return o;
  });

  criterion(3, "search_optimal(72,(8,9)) = (8,9), workload (1,1)", 0, [] {
    Outcome o;
    auto r = search_optimal(72, {8, 9}, Isotropic{});
    o.require(r.factors == Tuple{8, 9}, "optimal " + str(r.factors));
    auto w = workload_vector(r.factors, {8, 9});
    o.require(w.size() == 2 && w[0] == 1 && w[1] == 1, "workload not (1,1)");
    return o;
  });

  criterion(4, "factorization count: closed form = enumeration = naive loops", 10.0, [] {
    Outcome o;
    o.require(count_factorizations(16, 3) == 15, "count(16,3)");
    o.require(enumerate_factorizations(16, 3).size() == 15, "enumerate(16,3)");
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 200 && o.ok; ++i) {
      const std::int64_t d = 1 + static_cast<std::int64_t>(rng() % 5000);
      const std::size_t k = 1 + rng() % 4;
      const auto closed = count_factorizations(d, k);
      const auto listed = enumerate_factorizations(d, k).size();
      const auto naive = oracle::naive_count(d, k);
      o.require(closed == listed && listed == naive,
                "d=" + std::to_string(d) + " k=" + std::to_string(k) + ": " + std::to_string(closed) + "/" +
                    std::to_string(listed) + "/" + std::to_string(naive));
    }
    o.detail = o.ok ? "200 random cases" : o.detail;
    return o;
  });

  criterion(5, "AM-GM lower bound, tight exactly when balanced", 0, [] {
    Outcome o;
    std::mt19937_64 rng(5);
    int balanced = 0;
    auto check = [&](std::int64_t d, const Tuple& l) {
      const std::size_t k = l.size();
      const auto best = search_optimal(d, l, Isotropic{});
      const double bound = amgm_lower_bound(d, l);
      o.require(to_double(best.score) >= bound - 1e-12,
                "d=" + std::to_string(d) + " l=" + str(l) + " score below bound");
      bool exists = false;
      for (const auto& f : enumerate_factorizations(d, k)) {
        auto w = workload_vector(f, l);
        if (std::all_of(w.begin(), w.end(), [&](const Rational& x) { return x == w[0]; })) exists = true;
      }
      if (exists) {
        ++balanced;
        // (score / k)^k == d / prod l, exactly
        Rational lhs = 1, base = best.score / static_cast<std::int64_t>(k);
        for (std::size_t i = 0; i < k; ++i) lhs *= base;
        o.require(lhs == Rational(d, l.product()), "d=" + std::to_string(d) + " l=" + str(l) + " not tight");
        o.require(std::fabs(to_double(best.score) - bound) <= 1e-12, "bound gap on balanced case");
      }
    };
    for (int i = 0; i < 500 && o.ok; ++i) {
      const std::int64_t d = 1 + static_cast<std::int64_t>(rng() % 1024);
      const std::size_t k = 1 + rng() % 3;
      std::vector<std::int64_t> l(k);
      for (auto& x : l) x = 1 + static_cast<std::int64_t>(rng() % 256);
      check(d, Tuple(l));
    }
    // balanced by construction: l_m = w * d_m
    for (int i = 0; i < 100 && o.ok; ++i) {
      const std::size_t k = 1 + rng() % 3;
      const std::int64_t w = 1 + static_cast<std::int64_t>(rng() % 8);
      std::vector<std::int64_t> l(k);
      std::int64_t d = 1;
      for (auto& x : l) {
        const std::int64_t dm = 1 + static_cast<std::int64_t>(rng() % 8);
        d *= dm;
        x = w * dm;
      }
      check(d, Tuple(l));
    }
    if (o.ok) o.detail = "600 cases, " + std::to_string(balanced) + " balanced";
    return o;
  });

  criterion(6, "processor-space algebra, exhaustive up to 4096 points", 0, [] {
    Outcome o;
    std::vector<char> seen;
    std::int64_t spaces = 0;
    for (std::int64_t n = 1; n <= 4096 && o.ok; ++n) {
      for (std::int64_t p = 1; n * p <= 4096 && o.ok; ++p) {
        const ProcSpace s(MachineShape{ProcKind::GPU, n, p});
        const auto base = s.materialize();
        const std::string tag = " on " + std::to_string(n) + "x" + std::to_string(p);
        o.require(is_bijection(base, n, p, seen), "base not bijective" + tag);
        o.require(s.swap(0, 1).swap(0, 1).materialize() == base, "swap not an involution" + tag);
        o.require(is_bijection(s.swap(0, 1).materialize(), n, p, seen), "swap not bijective" + tag);
        const auto merged = s.merge(0, 1);
        o.require(is_bijection(merged.materialize(), n, p, seen), "merge not bijective" + tag);
        spaces += 3;
        // split then merge back, every dim and factor
        for (std::size_t dim = 0; dim < 2; ++dim)
          for (auto f : divisors(s.shape()[dim])) {
            // back == base also settles bijectivity of the split: merge only
            // re-indexes, so split and base hit the same coordinates
            const auto t = s.split(dim, f);
            const auto back = t.merge(dim, dim + 1);
            o.require(back.shape() == s.shape() && back.materialize() == base, "split;merge != id" + tag);
            spaces += 2;
          }
        // decompose of the flattened space = the same splits done by hand
        const std::int64_t total = n * p;
        // the flattened space of n*p points differs across shapes only in the
        // base linearization; take the most balanced shape per total
        if (n <= p && is_balanced(n, total)) {
          for (std::size_t k = 2; k <= 3; ++k)
            for (const auto& f : enumerate_factorizations(total, k)) {
              const auto dec = merged.decompose(0, f);
              auto manual = merged;
              for (std::size_t i = 0; i + 1 < k; ++i) manual = manual.split(i, f[i]);
              o.require(dec.shape() == f, "decompose shape" + tag);
              const auto all = dec.materialize();
              o.require(all == manual.materialize(), "decompose != splits" + tag);
              o.require(is_bijection(all, n, p, seen), "decompose not bijective" + tag);
              ++spaces;
            }
        }
      }
    }
    if (o.ok) o.detail = std::to_string(spaces) + " spaces";
    return o;
  });

  criterion(7, "block2d golden point and the seven 2D distribution tables", 0, [] {
    Outcome o;
    const MachineShape m{ProcKind::GPU, 2, 2};
    auto block = dsl::parse(slurp("mappers/block2d.mpl"));
    o.require(dsl::eval_mapping(block, "block2d", {2, 3}, {6, 6}, m) == ProcessorCoord{0, 1}, "block2d(2,3)");
    auto dists = dsl::parse(slurp("mappers/distributions.mpl"));
    for (const auto& name : oracle::distribution_names()) {
      auto f = dsl::compile_mapper(dists, "t_" + name, m);
      for_each_index(Tuple{4, 4}, [&](const Tuple& pt) {
        const auto got = f(pt, {4, 4});
        const auto want = oracle::distribution(name, pt[0], pt[1], 4, 4, 2, 2);
        o.require(got.node == want.node && got.proc == want.proc, name + " at " + pt.to_string());
      });
    }
    return o;
  });

  criterion(8, "corpus parses, validates and evaluates totally", 0, [] {
    Outcome o;
    // task -> iteration space used for the totality check
    const std::map<std::string, std::vector<Tuple>> spaces{
        {"loop0", {{4, 4}, {6, 6}, {3, 5}}},   {"task0", {{4, 4}, {6, 6}, {3, 5}}},
        {"mm3d", {{2, 2, 2}, {4, 4, 4}}},      {"solomonik3d", {{2, 2, 2}, {4, 4, 4}, {8, 4, 2}}},
        {"cannon", {{4, 4}, {8, 8}, {8, 4}}},  {"solomonik_lin", {{2, 2, 2}, {3, 2, 4}}},
        {"cosma", {{2, 2, 2}, {4, 2, 3}}},     {"johnson", {{2, 1, 3}, {3, 3, 3}}},
    };
    const std::vector<MachineShape> machines{{ProcKind::GPU, 2, 2}, {ProcKind::GPU, 2, 4}, {ProcKind::GPU, 4, 4}};
    std::int64_t points = 0;
    for (const char* file : {"statements.mpl", "block2d.mpl", "linear_cyclic.mpl", "mm3d.mpl", "distributions.mpl", "hierarchical.mpl"}) {
      const auto prog = dsl::parse(slurp(std::string("mappers/") + file));
      const auto diags = dsl::validate(prog);
      o.require(!dsl::has_errors(diags), std::string(file) + " has validation errors");
      for (const auto& d : diags) o.require(d.code == "Extension", std::string(file) + ": unexpected " + d.code);
      for (const auto& st : prog.statements) {
        const auto* b = std::get_if<dsl::IndexTaskMapStmt>(&st.node);
        if (!b) continue;
        std::vector<Tuple> is{{4, 4}};
        if (auto it = spaces.find(b->task); it != spaces.end()) is = it->second;
        if (b->task.rfind("t_", 0) == 0) is = {{4, 4}, {8, 8}, {4, 6}};
        for (const auto& m : machines) {
          auto f = dsl::compile_mapper(prog, b->task, m);
          for (const auto& sp : is)
            for_each_index(sp, [&](const Tuple& pt) {
              const auto c = f(pt, sp);
              ++points;
              o.require(c.node >= 0 && c.node < m.nodes && c.proc >= 0 && c.proc < m.procs_per_node,
                        std::string(file) + " " + b->task + " out of range at " + pt.to_string());
            });
        }
      }
    }
    if (o.ok) o.detail = std::to_string(points) + " evaluations";
    return o;
  });

  criterion(9, "oracle boundary count and halo dual form on random grids", 30.0, [] {
    Outcome o;
    std::mt19937_64 rng(9);
    for (int i = 0; i < 300 && o.ok; ++i) {
      const std::size_t k = 2 + rng() % 2;
      std::vector<std::int64_t> l(k), d(k), h(k);
      for (std::size_t m = 0; m < k; ++m) {
        // divisible: d_m | l_m, l_m <= 48
        l[m] = 1 + static_cast<std::int64_t>(rng() % 48);
        const auto ds = divisors(l[m]);
        d[m] = ds[rng() % ds.size()];
        h[m] = static_cast<std::int64_t>(rng() % 4);
      }
      const BlockGrid g{Tuple(l), Tuple(d)};
      const auto count = oracle_boundary_count(g, Tuple(k, 1));
      o.require(Rational(count) == surface_volume(g),
                "l=" + str(Tuple(l)) + " d=" + str(Tuple(d)) + ": oracle " + std::to_string(count) + " vs " +
                    to_string(surface_volume(g)));
      o.require(halo_volume(g, Tuple(h)) == halo_volume_dual(g, Tuple(h)), "halo dual mismatch");
      o.require(halo_volume(g, Tuple(h)) == oracle::halo(Tuple(l), Tuple(d), Tuple(h)), "halo vs definition");
    }
    if (o.ok) o.detail = "300 grids";
    return o;
  });

  criterion(10, "simulator soundness under random schedules", 60.0, [] {
    Outcome o;
    const MachineShape m{ProcKind::GPU, 2, 2};
    auto prog = dsl::parse(slurp("mappers/block2d.mpl"));
    auto block = sim::bind_program(prog, m, "task0");
    auto fghk = sim::load_taskgraph(slurp("graphs/fghk.json"));
    sim::PointMapper hash = [](const sim::IndexTask&, const Tuple& p, const Tuple&) {
      std::int64_t h = 0;
      for (std::size_t i = 0; i < p.size(); ++i) h += p[i] * static_cast<std::int64_t>(2 * i + 1);
      return ProcessorCoord{h % 2, (h / 2) % 2};
    };
    std::int64_t runs = 0, entries = 0;
    auto soak = [&](const sim::TaskGraph& g, const sim::PointMapper& f, std::uint64_t seed) {
      sim::Simulator s(g, f, m, sim::Simulator::Policy::Random, seed);
      const auto t = s.run();  // throws Stuck if a run does not terminate cleanly
      const auto diags = sim::check_trace(t.log, g, f);
      o.require(diags.empty(), "seed " + std::to_string(seed) + ": " +
                                   (diags.empty() ? "" : diags[0].code + " " + diags[0].message));
      // monotone lifecycle per slice and conservation per task
      std::map<std::string, int> stage;
      std::map<std::string, std::int64_t> executed;
      std::map<std::string, std::int64_t> slice_points;
      for (const auto& e : t.log) {
        const int now = static_cast<int>(e.stage);
        if (e.stage != sim::Stage::Enqueued) {
          auto it = stage.find(e.task);
          const int before = it == stage.end() ? 0 : it->second;
          o.require(now == before + 1 || (before == 0 && now == 2), "non-monotone " + e.task);
          stage[e.task] = now;
        }
        if (e.stage == sim::Stage::Mapped) {
          auto n = static_cast<std::int64_t>(e.points.size());
          if (n == 0 && e.task == e.origin) n = static_cast<std::int64_t>(g.task(g.find(e.origin)).points.size());
          slice_points[e.task] = n;
        }
        if (e.stage == sim::Stage::Executed) executed[e.origin] += slice_points[e.task];
      }
      for (std::size_t i = 0; i < g.size(); ++i) {
        const auto& task = g.task(i);
        if (i == g.root()) continue;
        o.require(executed[task.id] == static_cast<std::int64_t>(task.points.size()), "points lost in " + task.id);
      }
      ++runs;
      entries += static_cast<std::int64_t>(t.log.size());
    };
    for (std::uint64_t seed = 1; seed <= 100 && o.ok; ++seed) soak(fghk, block, seed);
    std::mt19937_64 rng(10);
    for (int gi = 0; gi < 50 && o.ok; ++gi) {
      const auto g = oracle::random_graph(rng, 200);
      for (std::uint64_t seed = 1; seed <= 100 && o.ok; ++seed) soak(g, hash, seed * 7919 + gi);
    }
    if (o.ok) o.detail = std::to_string(runs) + " runs, " + std::to_string(entries) + " entries";
    return o;
  });

  criterion(11, "sweep: improvement >= 0 everywhere, 1:32 beats 1:1", 0, [] {
    Outcome o;
    const auto r = run_sweep(default_grid());
    o.require(r.records.size() == 180, "config count " + std::to_string(r.records.size()));
    for (const auto& rec : r.records)
      o.require(rec.improvement_pct >= 0 && rec.volume_optimal <= rec.volume_greedy,
                "negative improvement at " + std::to_string(rec.ratio_x) + ":" + std::to_string(rec.ratio_y));
    double r1 = NAN, r32 = NAN;
    for (const auto& g : r.groups) {
      if (g.parameter == "ratio" && g.value == "1:1") r1 = g.geomean_improvement_pct;
      if (g.parameter == "ratio" && g.value == "1:32") r32 = g.geomean_improvement_pct;
    }
    o.require(r32 > r1, "1:32 geomean not above 1:1");
    if (o.ok) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "geomean 1:1 = %.2f%%, 1:32 = %.2f%% (model-predicted)", r1, r32);
      o.detail = buf;
    }
    return o;
  });

  std::printf("%d criteria failed\n", failures);
  return failures ? 1 : 0;
}
