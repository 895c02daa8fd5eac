#include "mapple/decompose.hpp"

#include "mapple/error.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace mapple {

namespace {

void require_positive(std::int64_t d, const char* what) {
  if (d < 1) throw Error(Errc::InvalidArgument, std::string(what) + " must be >= 1, got " + std::to_string(d));
}

void require_extents(const Tuple& extents) {
  if (extents.empty()) throw Error(Errc::InvalidArgument, "extents must be non-empty");
  for (auto l : extents)
    if (l <= 0) throw Error(Errc::InvalidArgument, "extents must be positive, got " + extents.to_string());
}

// All ways to place `total` indistinguishable units into k ordered bins.
void compositions(int total, std::size_t k, std::vector<int>& current, std::vector<std::vector<int>>& out) {
  if (current.size() + 1 == k) {
    current.push_back(total);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int x = 0; x <= total; ++x) {
    current.push_back(x);
    compositions(total - x, k, current, out);
    current.pop_back();
  }
}

const Tuple& halo_of(const Objective& objective) {
  static const Tuple none;
  if (auto* h = std::get_if<AnisotropicHalo>(&objective)) return h->halo;
  if (auto* t = std::get_if<WithTranspose>(&objective)) return t->halo;
  return none;
}

void check_objective_shape(const Factorization& factors, const Tuple& extents, const Objective& objective) {
  if (factors.size() != extents.size())
    throw Error(Errc::ShapeMismatch, "factorization " + factors.to_string() + " and extents " +
                                         extents.to_string() + " differ in length");
  for (auto f : factors)
    if (f <= 0) throw Error(Errc::InvalidArgument, "factors must be positive");
  require_extents(extents);
  if (!std::holds_alternative<Isotropic>(objective)) {
    const Tuple& h = halo_of(objective);
    if (h.size() != extents.size())
      throw Error(Errc::ShapeMismatch, "halo " + h.to_string() + " does not match rank " +
                                           std::to_string(extents.size()));
    for (auto x : h)
      if (x < 0) throw Error(Errc::InvalidArgument, "halo widths must be non-negative");
  }
  if (auto* t = std::get_if<WithTranspose>(&objective)) {
    for (auto n : t->transposed)
      if (n >= extents.size())
        throw Error(Errc::ShapeMismatch, "transposed dimension " + std::to_string(n) + " out of range");
  }
}

Rational halo_score(const Factorization& d, const Tuple& l, const Tuple& h) {
  Rational v = 0;
  for (std::size_t n = 0; n < l.size(); ++n) {
    Rational term = Rational(d[n]) * h[n];
    for (std::size_t m = 0; m < l.size(); ++m)
      if (m != n) term *= l[m];
    v += term;
  }
  return v;
}

}  // namespace

std::vector<PrimePower> prime_factorize(std::int64_t d) {
  require_positive(d, "d");
  std::vector<PrimePower> out;
  for (std::int64_t p = 2; p <= d / p; ++p) {
    int a = 0;
    while (d % p == 0) {
      d /= p;
      ++a;
    }
    if (a) out.push_back({p, a});
  }
  if (d > 1) out.push_back({d, 1});
  return out;
}

std::vector<Factorization> enumerate_factorizations(std::int64_t d, std::size_t k) {
  require_positive(d, "d");
  if (k == 0) throw Error(Errc::InvalidArgument, "k must be >= 1");

  std::vector<Factorization> result{Factorization(k, 1)};
  for (const auto& [prime, exponent] : prime_factorize(d)) {
    std::vector<std::vector<int>> placements;
    std::vector<int> scratch;
    compositions(exponent, k, scratch, placements);

    std::vector<std::int64_t> powers(static_cast<std::size_t>(exponent) + 1, 1);
    for (int e = 1; e <= exponent; ++e) powers[e] = checked_mul(powers[e - 1], prime);

    std::vector<Factorization> next;
    next.reserve(result.size() * placements.size());
    for (const auto& partial : result) {
      for (const auto& placement : placements) {
        Factorization f = partial;
        for (std::size_t m = 0; m < k; ++m) f[m] = checked_mul(f[m], powers[placement[m]]);
        next.push_back(std::move(f));
      }
    }
    result = std::move(next);
  }
  std::sort(result.begin(), result.end());
  return result;
}

std::uint64_t count_factorizations(std::int64_t d, std::size_t k) {
  require_positive(d, "d");
  if (k == 0) throw Error(Errc::InvalidArgument, "k must be >= 1");
  std::uint64_t total = 1;
  for (const auto& pp : prime_factorize(d)) {
    // C(a + k - 1, k - 1) computed as C(a + k - 1, a) incrementally.
    unsigned __int128 c = 1;
    for (int i = 1; i <= pp.exponent; ++i) {
      c = c * (k - 1 + static_cast<unsigned>(i)) / static_cast<unsigned>(i);
      if (c > UINT64_MAX) throw Error(Errc::Overflow, "factorization count overflows");
    }
    unsigned __int128 t = static_cast<unsigned __int128>(total) * c;
    if (t > UINT64_MAX) throw Error(Errc::Overflow, "factorization count overflows");
    total = static_cast<std::uint64_t>(t);
  }
  return total;
}

std::string objective_name(const Objective& objective) {
  if (std::holds_alternative<Isotropic>(objective)) return "isotropic";
  if (std::holds_alternative<AnisotropicHalo>(objective)) return "halo";
  return "transpose";
}

std::vector<Rational> workload_vector(const Factorization& factors, const Tuple& extents) {
  check_objective_shape(factors, extents, Isotropic{});
  std::vector<Rational> w;
  w.reserve(factors.size());
  for (std::size_t m = 0; m < factors.size(); ++m) w.emplace_back(extents[m], factors[m]);
  return w;
}

Rational score(const Factorization& factors, const Tuple& extents, const Objective& objective) {
  check_objective_shape(factors, extents, objective);
  return std::visit(
      [&](const auto& obj) -> Rational {
        using T = std::decay_t<decltype(obj)>;
        if constexpr (std::is_same_v<T, Isotropic>) {
          Rational s = 0;
          for (std::size_t m = 0; m < factors.size(); ++m) s += Rational(factors[m], extents[m]);
          return s;
        } else if constexpr (std::is_same_v<T, AnisotropicHalo>) {
          return halo_score(factors, extents, obj.halo);
        } else {
          Rational v = halo_score(factors, extents, obj.halo);
          Rational prod_w = 1;
          for (std::size_t m = 0; m < factors.size(); ++m) prod_w *= Rational(extents[m], factors[m]);
          const Rational d = factors.product();
          for (auto n : obj.transposed) v += (Rational(1) - Rational(1, factors[n])) * prod_w * d;
          return v;
        }
      },
      objective);
}

std::vector<std::string> objective_warnings(const Factorization& factors, const Tuple& extents,
                                            const Objective& objective) {
  check_objective_shape(factors, extents, objective);
  std::vector<std::string> out;
  if (std::holds_alternative<Isotropic>(objective)) return out;
  const Tuple& h = halo_of(objective);
  for (std::size_t n = 0; n < h.size(); ++n) {
    if (Rational(h[n]) > Rational(extents[n], factors[n]))
      out.push_back("halo width " + std::to_string(h[n]) + " in dimension " + std::to_string(n) +
                    " exceeds block width " + to_string(Rational(extents[n], factors[n])));
  }
  return out;
}

SearchResult search_optimal(std::int64_t d, const Tuple& extents, const Objective& objective,
                            SearchOptions options) {
  require_positive(d, "d");
  require_extents(extents);
  std::optional<SearchResult> best;
  for (auto& f : enumerate_factorizations(d, extents.size())) {
    if (options.strict_divisible) {
      bool divisible = true;
      for (std::size_t m = 0; m < f.size(); ++m) divisible = divisible && extents[m] % f[m] == 0;
      if (!divisible) continue;
    }
    Rational s = score(f, extents, objective);
    // Enumeration is lexicographic, so strict < keeps the smallest tuple on ties.
    if (!best || s < best->score) best = SearchResult{std::move(f), std::move(s)};
  }
  if (!best)
    throw Error(Errc::NoFeasibleFactorization,
                "no factorization of " + std::to_string(d) + " divides extents " + extents.to_string());
  return *best;
}

Factorization greedy_grid(std::int64_t d, std::size_t k) {
  require_positive(d, "d");
  if (k == 0) throw Error(Errc::InvalidArgument, "k must be >= 1");
  Factorization factors(k, 1);
  for (const auto& [prime, exponent] : prime_factorize(d)) {
    for (int i = 0; i < exponent; ++i) {
      auto j = std::min_element(factors.begin(), factors.end()) - factors.begin();
      factors[static_cast<std::size_t>(j)] = checked_mul(factors[static_cast<std::size_t>(j)], prime);
    }
  }
  std::sort(factors.begin(), factors.end(), std::greater<>());
  return factors;
}

double amgm_lower_bound(std::int64_t d, const Tuple& extents) {
  require_positive(d, "d");
  require_extents(extents);
  long double prod = 1;
  for (auto l : extents) prod *= static_cast<long double>(l);
  const long double k = static_cast<long double>(extents.size());
  return static_cast<double>(k * std::pow(static_cast<long double>(d) / prod, 1.0L / k));
}

}  // namespace mapple
