// Exercises the shared library through its C header only.
#include "mapple/mapple.h"

#include <gtest/gtest.h>

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

std::string data(const std::string& rel) {
  std::ifstream f(std::string(MAPPLE_TEST_DATA) + "/" + rel);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const mapple_machine k2x2{MAPPLE_PROC_GPU, 2, 2};

mapple_program* load(const std::string& rel) {
  auto src = data(rel);
  mapple_program* p = nullptr;
  EXPECT_EQ(mapple_program_parse(src.data(), src.size(), &p), MAPPLE_OK) << mapple_last_error();
  return p;
}

std::string render(mapple_report* r, mapple_format f = MAPPLE_FORMAT_JSON) {
  char* text = nullptr;
  EXPECT_EQ(mapple_report_render(r, f, &text), MAPPLE_OK);
  std::string s = text ? text : "";
  mapple_string_free(text);
  return s;
}

}  // namespace

TEST(CApi, StatusNamesAndVersion) {
  EXPECT_STREQ(mapple_status_name(MAPPLE_OK), "OK");
  EXPECT_STREQ(mapple_status_name(MAPPLE_E_STUCK), "Stuck");
  EXPECT_GT(std::strlen(mapple_version()), 0u);
}

TEST(CApi, ParseErrorsCarryMessages) {
  mapple_program* p = nullptr;
  const char* bad = "def f(Tuple a:\n";
  EXPECT_EQ(mapple_program_parse(bad, std::strlen(bad), &p), MAPPLE_E_PARSE);
  EXPECT_EQ(p, nullptr);
  EXPECT_NE(std::string(mapple_last_error()).find("1:"), std::string::npos);
  EXPECT_EQ(mapple_program_parse(nullptr, 0, &p), MAPPLE_E_INVALID_ARGUMENT);
}

TEST(CApi, ValidationGate) {
  const char* src = "IndexTaskMap loop0 missing_fn";
  mapple_program* p = nullptr;
  ASSERT_EQ(mapple_program_parse(src, std::strlen(src), &p), MAPPLE_OK);
  EXPECT_EQ(mapple_program_has_errors(p), 1);
  mapple_mapper* f = nullptr;
  EXPECT_EQ(mapple_mapper_compile(p, "loop0", &k2x2, &f), MAPPLE_E_VALIDATION);
  EXPECT_NE(std::string(mapple_last_error()).find("UnknownFunction"), std::string::npos);
  mapple_report* r = nullptr;
  ASSERT_EQ(mapple_parse_report(p, &r), MAPPLE_OK);
  EXPECT_EQ(mapple_report_has_errors(r), 1);
  mapple_report_free(r);
  mapple_program_free(p);
}

TEST(CApi, EvalAndMapReport) {
  auto* p = load("mappers/block2d.mpl");
  mapple_mapper* f = nullptr;
  ASSERT_EQ(mapple_mapper_compile(p, "task0", &k2x2, &f), MAPPLE_OK);
  const int64_t pt[] = {2, 3}, sp[] = {6, 6};
  int64_t node = -1, proc = -1;
  ASSERT_EQ(mapple_mapper_eval(f, pt, sp, 2, &node, &proc), MAPPLE_OK);
  EXPECT_EQ(node, 0);
  EXPECT_EQ(proc, 1);
  const int64_t out[] = {6, 0};
  EXPECT_EQ(mapple_mapper_eval(f, out, sp, 2, &node, &proc), MAPPLE_E_EVAL);

  mapple_report* r = nullptr;
  ASSERT_EQ(mapple_map_report(f, sp, 2, &r), MAPPLE_OK);
  auto json = render(r);
  EXPECT_NE(json.find("\"points\": 36"), std::string::npos);
  mapple_report_free(r);

  mapple_mapper* g = nullptr;
  EXPECT_EQ(mapple_mapper_compile(p, "nobody", &k2x2, &g), MAPPLE_E_NO_BINDING);
  ASSERT_EQ(mapple_mapper_compile_function(p, "block2d", &k2x2, &g), MAPPLE_OK);
  mapple_mapper_free(g);
  mapple_machine bad{MAPPLE_PROC_GPU, 0, 2};
  EXPECT_EQ(mapple_mapper_compile(p, "task0", &bad, &g), MAPPLE_E_INVALID_ARGUMENT);
  mapple_mapper_free(f);
  mapple_program_free(p);
}

TEST(CApi, Decompose) {
  uint64_t n = 0;
  ASSERT_EQ(mapple_count_factorizations(16, 3, &n), MAPPLE_OK);
  EXPECT_EQ(n, 15u);
  int64_t g[3];
  ASSERT_EQ(mapple_greedy_grid(16, 3, g), MAPPLE_OK);
  EXPECT_EQ(g[0], 4);
  EXPECT_EQ(g[1], 2);
  EXPECT_EQ(g[2], 2);
  const int64_t ext[] = {12, 18};
  int64_t best[2];
  char* score = nullptr;
  ASSERT_EQ(mapple_search_optimal(6, ext, 2, nullptr, 0, best, &score), MAPPLE_OK);
  EXPECT_EQ(best[0], 2);
  EXPECT_EQ(best[1], 3);
  EXPECT_STREQ(score, "1/3");
  mapple_string_free(score);

  const int64_t halo[] = {1, 1};
  const size_t tdims[] = {0};
  mapple_objective obj{MAPPLE_OBJECTIVE_TRANSPOSE, halo, tdims, 1};
  mapple_report* r = nullptr;
  ASSERT_EQ(mapple_decompose_report(6, ext, 2, &obj, 0, &r), MAPPLE_OK);
  EXPECT_NE(render(r).find("transpose"), std::string::npos);
  mapple_report_free(r);

  EXPECT_EQ(mapple_search_optimal(7, ext, 2, nullptr, 1, best, nullptr), MAPPLE_E_DOMAIN);
  EXPECT_EQ(mapple_count_factorizations(0, 2, &n), MAPPLE_E_INVALID_ARGUMENT);
}

TEST(CApi, Commvol) {
  const int64_t ext[] = {12, 18}, grid[] = {3, 2}, halo[] = {1, 1};
  mapple_report* r = nullptr;
  ASSERT_EQ(mapple_commvol_report(ext, grid, 2, halo, nullptr, 0, 1, &r), MAPPLE_OK);
  auto csv = render(r, MAPPLE_FORMAT_CSV);
  EXPECT_NE(csv.find(",96,"), std::string::npos);
  mapple_report_free(r);
  const int64_t bad_grid[] = {13, 2};
  EXPECT_NE(mapple_commvol_report(ext, bad_grid, 2, nullptr, nullptr, 0, 0, &r), MAPPLE_OK);
}

TEST(CApi, SimulateAndCheck) {
  auto* p = load("mappers/block2d.mpl");
  auto gsrc = data("graphs/fghk.json");
  mapple_taskgraph* g = nullptr;
  ASSERT_EQ(mapple_taskgraph_load(gsrc.data(), gsrc.size(), &g), MAPPLE_OK);
  EXPECT_EQ(mapple_taskgraph_size(g), 4u);
  mapple_report* r = nullptr;
  ASSERT_EQ(mapple_simulate_report(g, p, &k2x2, "task0", 0, &r), MAPPLE_OK) << mapple_last_error();
  EXPECT_EQ(mapple_report_has_errors(r), 0);
  const auto trace = render(r);
  mapple_report_free(r);

  // the simulate report feeds straight back into the checker
  ASSERT_EQ(mapple_check_trace_report(g, p, &k2x2, "task0", trace.data(), trace.size(), &r), MAPPLE_OK);
  EXPECT_EQ(mapple_report_has_errors(r), 0);
  mapple_report_free(r);

  const char* truncated = R"([{"step":0,"stage":"launched","task":"f","node":0,"proc":0}])";
  ASSERT_EQ(mapple_check_trace_report(g, p, &k2x2, "task0", truncated, std::strlen(truncated), &r), MAPPLE_OK);
  EXPECT_EQ(mapple_report_has_errors(r), 1);
  mapple_report_free(r);

  EXPECT_EQ(mapple_simulate_report(g, p, &k2x2, nullptr, 0, &r), MAPPLE_E_NO_BINDING);
  mapple_taskgraph_free(g);

  auto cyc = data("graphs/cyclic.json");
  EXPECT_EQ(mapple_taskgraph_load(cyc.data(), cyc.size(), &g), MAPPLE_E_SCHEMA);
  EXPECT_NE(std::string(mapple_last_error()).find("CyclicDependence"), std::string::npos);
  mapple_program_free(p);
}

TEST(CApi, Sweep) {
  const char* spec = R"({"ratios":["1:1","1:32"],"areas":[1000000],"gpus":[8]})";
  mapple_report* r = nullptr;
  ASSERT_EQ(mapple_sweep_report(spec, std::strlen(spec), &r), MAPPLE_OK);
  EXPECT_NE(render(r).find("\"configs\": 2"), std::string::npos);
  mapple_report_free(r);
  const char* bad = R"({"ratios":["oops"]})";
  EXPECT_EQ(mapple_sweep_report(bad, std::strlen(bad), &r), MAPPLE_E_INVALID_ARGUMENT);
}

TEST(CApi, LastErrorIsThreadLocal) {
  mapple_program* p = nullptr;
  const char* bad = "def (";
  EXPECT_EQ(mapple_program_parse(bad, std::strlen(bad), &p), MAPPLE_E_PARSE);
  std::string other;
  std::thread t([&] { other = mapple_last_error(); });
  t.join();
  EXPECT_EQ(other, "");
  EXPECT_NE(std::string(mapple_last_error()), "");
}

TEST(CApi, FreeAcceptsNull) {
  mapple_program_free(nullptr);
  mapple_mapper_free(nullptr);
  mapple_taskgraph_free(nullptr);
  mapple_report_free(nullptr);
  mapple_string_free(nullptr);
}
