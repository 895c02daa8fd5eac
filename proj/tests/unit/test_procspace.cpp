#include "mapple/error.hpp"
#include "mapple/procspace.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace mapple;

namespace {

ProcSpace machine(std::int64_t n, std::int64_t p) { return ProcSpace(MachineShape{ProcKind::GPU, n, p}); }

// Base linear index with proc fastest,, matching the (node, proc) layout.
std::int64_t base_linear(const ProcessorCoord& c, std::int64_t nodes) { return c.node + c.proc * nodes; }

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return Errc::InvalidArgument;
}

}  // namespace

TEST(ProcSpace, BaseShapeAndIdentity) {
  auto s = machine(2, 2);
  EXPECT_EQ(s.shape(), (Tuple{2, 2}));
  EXPECT_EQ(s.resolve(Tuple{0, 1}), (ProcessorCoord{0, 1}));
  EXPECT_EQ(s.resolve(Tuple{1, 0}), (ProcessorCoord{1, 0}));
}

TEST(ProcSpace, SplitFormula) {
  // (4,) machine as 4 nodes x 1 proc, merged to one dim first
  auto s = machine(4, 1).merge(0, 1);
  ASSERT_EQ(s.shape(), (Tuple{4}));
  auto t = s.split(0, 2);
  EXPECT_EQ(t.shape(), (Tuple{2, 2}));
  // [1,1] -> linear 1 + 1*2 = 3
  EXPECT_EQ(base_linear(t.resolve(Tuple{1, 1}), 4), 3);
}

TEST(ProcSpace, SplitByOneKeepsResolution) {
  auto s = machine(2, 3);
  auto t = s.split(0, 1);
  EXPECT_EQ(t.shape(), (Tuple{1, 2, 3}));
  for (std::int64_t a = 0; a < 2; ++a)
    for (std::int64_t b = 0; b < 3; ++b) EXPECT_EQ(t.resolve(Tuple{0, a, b}), s.resolve(Tuple{a, b}));
}

TEST(ProcSpace, MergeFormula) {
  auto s = machine(2, 2).merge(0, 1);
  EXPECT_EQ(s.shape(), (Tuple{4}));
  EXPECT_EQ(s.resolve(Tuple{3}), (ProcessorCoord{1, 1}));
  EXPECT_EQ(s.resolve(Tuple{1}), (ProcessorCoord{1, 0}));
  EXPECT_EQ(s.resolve(Tuple{2}), (ProcessorCoord{0, 1}));
}

TEST(ProcSpace, MergeWithUnitDimIsBijective) {
  auto s = machine(1, 5).merge(0, 1);
  auto all = s.materialize();
  ASSERT_EQ(all.size(), 5u);
  for (std::int64_t i = 0; i < 5; ++i) EXPECT_EQ(all[i], (ProcessorCoord{0, i}));
}

TEST(ProcSpace, SwapFormula) {
  auto s = machine(2, 3);
  auto t = s.swap(0, 1);
  EXPECT_EQ(t.shape(), (Tuple{3, 2}));
  EXPECT_EQ(t.resolve(Tuple{2, 1}), s.resolve(Tuple{1, 2}));
  EXPECT_EQ(s.swap(1, 1).materialize(), s.materialize());
  EXPECT_EQ(t.swap(0, 1).materialize(), s.materialize());
}

TEST(ProcSpace, SliceFormula) {
  auto s = machine(4, 2);
  auto t = s.slice(0, 1, 2);
  EXPECT_EQ(t.shape(), (Tuple{2, 2}));
  EXPECT_EQ(t.resolve(Tuple{0, 1}), s.resolve(Tuple{1, 1}));
  EXPECT_EQ(s.slice(0, 0, 3).materialize(), s.materialize());
  EXPECT_TRUE(t.has_slice());
}

TEST(ProcSpace, DecomposeMatchesSplits) {
  auto s = machine(16, 1).merge(0, 1);
  auto d = s.decompose(0, Tuple{2, 4, 2});
  EXPECT_EQ(d.shape(), (Tuple{2, 4, 2}));
  auto manual = s.split(0, 2).split(1, 4);
  EXPECT_EQ(manual.shape(), d.shape());
  EXPECT_EQ(manual.materialize(), d.materialize());
  EXPECT_EQ(s.decompose(0, Tuple{16}).shape(), s.shape());
}

TEST(ProcSpace, Errors) {
  auto s = machine(2, 3);
  EXPECT_EQ(code_of([&] { s.split(1, 2); }), Errc::NonDivisibleSplit);
  EXPECT_EQ(code_of([&] { s.split(2, 1); }), Errc::DimOutOfRange);
  EXPECT_EQ(code_of([&] { s.merge(1, 0); }), Errc::BadDimOrder);
  EXPECT_EQ(code_of([&] { s.slice(1, 2, 1); }), Errc::BadSliceBounds);
  EXPECT_EQ(code_of([&] { s.slice(1, 0, 3); }), Errc::BadSliceBounds);
  EXPECT_EQ(code_of([&] { s.decompose(1, Tuple{2, 2}); }), Errc::ProductMismatch);
  EXPECT_EQ(code_of([&] { s.resolve(Tuple{2, 0}); }), Errc::IndexOutOfRange);
  EXPECT_EQ(code_of([&] { s.resolve(Tuple{0}); }), Errc::IndexOutOfRange);
}

TEST(ProcSpace, ImmutableValues) {
  auto s = machine(2, 2);
  auto fp = s.fingerprint();
  auto t = s.merge(0, 1).split(0, 4);
  EXPECT_EQ(s.fingerprint(), fp);
  EXPECT_EQ(s.shape(), (Tuple{2, 2}));
  EXPECT_NE(t.fingerprint(), fp);
  EXPECT_EQ(t.chain().size(), 2u);
}

TEST(ProcSpace, ChainedTransformsStayBijective) {
  auto s = machine(4, 6).merge(0, 1).split(0, 3).swap(0, 1).split(1, 3);
  auto all = s.materialize();
  std::sort(all.begin(), all.end());
  ASSERT_EQ(all.size(), 24u);
  EXPECT_TRUE(std::adjacent_find(all.begin(), all.end()) == all.end());
  EXPECT_EQ(all.front(), (ProcessorCoord{0, 0}));
  EXPECT_EQ(all.back(), (ProcessorCoord{3, 5}));
}
