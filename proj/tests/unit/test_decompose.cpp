#include "mapple/decompose.hpp"
#include "mapple/error.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace mapple;

TEST(Decompose, PrimeFactorize) {
  EXPECT_EQ(prime_factorize(48), (std::vector<PrimePower>{{2, 4}, {3, 1}}));
  EXPECT_TRUE(prime_factorize(1).empty());
  EXPECT_EQ(prime_factorize(72), (std::vector<PrimePower>{{2, 3}, {3, 2}}));
  for (std::int64_t d = 1; d < 3000; ++d) {
    auto got = prime_factorize(d);
    auto want = oracle::trial_division(d);
    ASSERT_EQ(got.size(), want.size()) << d;
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].prime, want[i].first);
      EXPECT_EQ(got[i].exponent, want[i].second);
    }
  }
  EXPECT_THROW(prime_factorize(0), Error);
}

TEST(Decompose, Enumerate) {
  EXPECT_EQ(enumerate_factorizations(6, 2), (std::vector<Tuple>{{1, 6}, {2, 3}, {3, 2}, {6, 1}}));
  EXPECT_EQ(enumerate_factorizations(1, 3), (std::vector<Tuple>{{1, 1, 1}}));
  EXPECT_EQ(enumerate_factorizations(16, 3).size(), 15u);
  for (std::int64_t d : {1, 2, 12, 30, 64, 360, 997})
    for (std::size_t k = 1; k <= 4; ++k) EXPECT_EQ(enumerate_factorizations(d, k), oracle::naive_enumerate(d, k));
}

TEST(Decompose, Count) {
  EXPECT_EQ(count_factorizations(16, 3), 15u);
  EXPECT_EQ(count_factorizations(48, 3), 45u);
  for (std::size_t k = 1; k < 6; ++k) EXPECT_EQ(count_factorizations(1, k), 1u);
  EXPECT_EQ(count_factorizations(5040, 4), oracle::naive_count(5040, 4));
}

TEST(Decompose, Score) {
  EXPECT_EQ(score({2, 3}, {12, 18}, Isotropic{}), Rational(1, 3));
  EXPECT_EQ(score({1, 1}, {12, 18}, Isotropic{}), Rational(1, 12) + Rational(1, 18));
  EXPECT_EQ(score({8, 9}, {8, 9}, Isotropic{}), Rational(2));
  EXPECT_EQ(workload_vector({8, 9}, {8, 9}), (std::vector<Rational>{1, 1}));
  EXPECT_THROW(score({2, 3}, {12}, Isotropic{}), Error);
  // halo objective is the halo volume
  EXPECT_EQ(score({3, 2}, {12, 18}, AnisotropicHalo{{1, 1}}), Rational(78));
  // transpose adds (1 - 1/d_n) (prod w) d
  EXPECT_EQ(score({2, 3}, {12, 18}, WithTranspose{{0, 0}, {0}}), Rational(108));
}

TEST(Decompose, SearchOptimal) {
  auto r = search_optimal(6, {12, 18}, Isotropic{});
  EXPECT_EQ(r.factors, (Tuple{2, 3}));
  EXPECT_EQ(r.score, Rational(1, 3));
  r = search_optimal(72, {8, 9}, Isotropic{});
  EXPECT_EQ(r.factors, (Tuple{8, 9}));
  EXPECT_EQ(workload_vector(r.factors, {8, 9}), (std::vector<Rational>{1, 1}));
  r = search_optimal(16, {4, 8, 4}, Isotropic{});
  EXPECT_EQ(r.factors, (Tuple{2, 4, 2}));
  EXPECT_EQ(r.score, Rational(3, 2));
}

TEST(Decompose, SearchTiesAndStrict) {
  // (2,2) square: (1,4),(4,1) tie at 5/4+... lexicographically smallest wins
  auto r = search_optimal(4, {4, 4}, Isotropic{});
  EXPECT_EQ(r.factors, (Tuple{2, 2}));
  r = search_optimal(2, {5, 5}, Isotropic{});
  EXPECT_EQ(r.factors, (Tuple{1, 2}));
  // strict: 7 does not divide 12 or 18
  EXPECT_THROW(search_optimal(7, {12, 18}, Isotropic{}, {true}), Error);
  r = search_optimal(6, {12, 18}, Isotropic{}, {true});
  EXPECT_EQ(r.factors, (Tuple{2, 3}));
}

TEST(Decompose, SearchMatchesBruteForce) {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 200; ++it) {
    const std::int64_t d = 1 + rng() % 200;
    const std::size_t k = 1 + rng() % 3;
    std::vector<std::int64_t> l(k);
    for (auto& x : l) x = 1 + rng() % 64;
    const Tuple ext(l);
    auto r = search_optimal(d, ext, Isotropic{});
    Rational best = -1;
    Tuple arg;
    for (const auto& f : oracle::naive_enumerate(d, k)) {
      auto s = oracle::isotropic(f, ext);
      if (best < 0 || s < best) best = s, arg = f;
    }
    EXPECT_EQ(r.score, best);
    EXPECT_EQ(r.factors, arg);
  }
}

TEST(Decompose, Greedy) {
  EXPECT_EQ(greedy_grid(6, 2), (Tuple{3, 2}));
  EXPECT_EQ(greedy_grid(1, 3), (Tuple{1, 1, 1}));
  EXPECT_EQ(greedy_grid(16, 3), (Tuple{4, 2, 2}));
  EXPECT_EQ(greedy_grid(72, 2), (Tuple{12, 6}));
  for (std::int64_t d = 1; d < 500; ++d) EXPECT_EQ(greedy_grid(d, 3).product(), d);
}

TEST(Decompose, AmGmBound) {
  EXPECT_NEAR(amgm_lower_bound(6, {12, 18}), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(amgm_lower_bound(16, {4, 8, 4}), 1.5, 1e-15);
  EXPECT_LE(amgm_lower_bound(1, {3, 5}), 1.0 / 3 + 1.0 / 5);
}

TEST(Decompose, HaloWarnings) {
  auto w = objective_warnings({4, 1}, {4, 8}, AnisotropicHalo{{3, 1}});
  EXPECT_FALSE(w.empty());
  EXPECT_TRUE(objective_warnings({2, 2}, {8, 8}, AnisotropicHalo{{1, 1}}).empty());
}
