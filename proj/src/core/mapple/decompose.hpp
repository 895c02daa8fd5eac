#pragma once

#include "mapple/rational.hpp"
#include "mapple/tuple.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace mapple {

struct PrimePower {
  std::int64_t prime;
  int exponent;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// A k-tuple of positive integers with a fixed product.
using Factorization = Tuple;

/// Sorted prime powers of d; d == 1 yields an empty sequence.
std::vector<PrimePower> prime_factorize(std::int64_t d);

/// Every k-tuple of positive integers whose product is d, exactly once, in
/// lexicographic order. Built per prime by stars-and-bars placement of its
/// exponent, then the Cartesian product over primes.
std::vector<Factorization> enumerate_factorizations(std::int64_t d, std::size_t k);

/// Closed form prod_j C(a_j + k - 1, k - 1).
std::uint64_t count_factorizations(std::int64_t d, std::size_t k);

struct Isotropic {};

struct AnisotropicHalo {
  Tuple halo;  // h_n per dimension
};

struct WithTranspose {
  Tuple halo;
  std::set<std::size_t> transposed;  // dimensions needing an all-to-all
};

using Objective = std::variant<Isotropic, AnisotropicHalo, WithTranspose>;

std::string objective_name(const Objective& objective);

/// w_m = l_m / d_m, exact.
std::vector<Rational> workload_vector(const Factorization& factors, const Tuple& extents);

/// Isotropic:       sum_m d_m / l_m
/// AnisotropicHalo: sum_n d_n h_n prod_{m != n} l_m
/// WithTranspose:   halo volume + sum_{n in T} (1 - 1/d_n) (prod_m w_m) d
Rational score(const Factorization& factors, const Tuple& extents, const Objective& objective);

/// Non-fatal remarks about an objective evaluation, e.g. halo widths wider
/// than the block they border.
std::vector<std::string> objective_warnings(const Factorization& factors, const Tuple& extents,
                                            const Objective& objective);

struct SearchOptions {
  /// Only consider factorizations with d_m | l_m for every m.
  bool strict_divisible = false;
};

struct SearchResult {
  Factorization factors;
  Rational score;
};

/// Exhaustive search over enumerate_factorizations(d, extents.size()).
/// Ties go to the lexicographically smallest factor tuple.
SearchResult search_optimal(std::int64_t d, const Tuple& extents, const Objective& objective,
                            SearchOptions options = {});

/// Greedy processor-grid heuristic: each prime factor (ascending) goes to the
/// dimension with the smallest running product (lowest index on ties), then
/// the grid is sorted descending.
Factorization greedy_grid(std::int64_t d, std::size_t k);

/// k * (d / prod l)^(1/k), the AM-GM floor of sum_m 1/w_m.
double amgm_lower_bound(std::int64_t d, const Tuple& extents);

}  // namespace mapple
