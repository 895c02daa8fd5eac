#include "mapple/sweep.hpp"

#include "mapple/commvol.hpp"
#include "mapple/decompose.hpp"
#include "mapple/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace mapple {

SweepSpec default_grid() {
  SweepSpec s;
  s.ratios = {{1, 1}, {1, 2}, {1, 4}, {1, 8}, {1, 16}, {1, 32}};
  s.areas = {1'000'000, 10'000'000, 100'000'000, 200'000'000, 400'000'000};
  s.gpus = {4, 8, 16, 32, 64, 128};
  s.gpus_per_node = 4;
  return s;
}

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(Errc::InvalidArgument, "sweep spec: " + msg); }

std::pair<std::int64_t, std::int64_t> parse_ratio(const nlohmann::json& j) {
  std::int64_t a = 0, b = 0;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    const auto colon = s.find(':');
    if (colon == std::string::npos) bad("ratio '" + s + "' must look like 1:4");
    try {
      std::size_t used = 0;
      a = std::stoll(s.substr(0, colon), &used);
      if (used != colon) bad("ratio '" + s + "' must look like 1:4");
      b = std::stoll(s.substr(colon + 1), &used);
      if (used != s.size() - colon - 1) bad("ratio '" + s + "' must look like 1:4");
    } catch (const std::logic_error&) {
      bad("ratio '" + s + "' must look like 1:4");
    }
  } else if (j.is_array() && j.size() == 2 && j[0].is_number_integer() && j[1].is_number_integer()) {
    a = j[0].get<std::int64_t>();
    b = j[1].get<std::int64_t>();
  } else {
    bad("ratios must be strings like \"1:4\" or pairs [1, 4]");
  }
  if (a <= 0 || b <= 0) bad("ratio terms must be positive");
  return {a, b};
}

std::vector<std::int64_t> positive_list(const nlohmann::json& j, const char* key) {
  if (!j.is_array() || j.empty()) bad(std::string("'") + key + "' must be a non-empty array");
  std::vector<std::int64_t> out;
  for (const auto& x : j) {
    if (!x.is_number()) bad(std::string("'") + key + "' must hold numbers");
    const double v = x.get<double>();
    if (!(v >= 1) || v != std::floor(v) || v > 9e15) bad(std::string("'") + key + "' must hold positive integers");
    out.push_back(static_cast<std::int64_t>(v));
  }
  return out;
}

}  // namespace

SweepSpec parse_sweep_spec(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) bad("document must be an object");
  SweepSpec s = default_grid();
  for (const auto& [key, val] : doc.items()) {
    if (key == "ratios") {
      if (!val.is_array() || val.empty()) bad("'ratios' must be a non-empty array");
      s.ratios.clear();
      for (const auto& r : val) s.ratios.push_back(parse_ratio(r));
    } else if (key == "areas") {
      s.areas = positive_list(val, "areas");
    } else if (key == "gpus") {
      s.gpus = positive_list(val, "gpus");
    } else if (key == "gpus_per_node") {
      if (!val.is_number_integer() || val.get<std::int64_t>() < 1) bad("'gpus_per_node' must be a positive integer");
      s.gpus_per_node = val.get<std::int64_t>();
    } else {
      bad("unknown key '" + key + "'");
    }
  }
  for (auto g : s.gpus)
    if (g % s.gpus_per_node != 0)
      bad(std::to_string(g) + " GPUs do not fill whole nodes of " + std::to_string(s.gpus_per_node));
  return s;
}

SweepRecord sweep_config(std::int64_t ratio_x, std::int64_t ratio_y, std::int64_t area, std::int64_t gpus,
                         std::int64_t gpus_per_node) {
  if (ratio_x <= 0 || ratio_y <= 0 || area <= 0 || gpus <= 0 || gpus_per_node <= 0 || gpus % gpus_per_node)
    throw Error(Errc::InvalidArgument, "invalid sweep configuration");
  SweepRecord r{};
  r.ratio_x = ratio_x;
  r.ratio_y = ratio_y;
  r.area = area;
  r.gpus = gpus;
  r.nodes = gpus / gpus_per_node;
  const long double total = static_cast<long double>(area) * static_cast<long double>(r.nodes);
  auto x = static_cast<std::int64_t>(std::llround(std::sqrt(total * ratio_x / ratio_y)));
  x = std::max<std::int64_t>(x, 1);
  auto y = static_cast<std::int64_t>(std::llround(static_cast<long double>(x) * ratio_y / ratio_x));
  y = std::max<std::int64_t>(y, 1);
  r.extents = Tuple{x, y};
  r.optimal = search_optimal(gpus, r.extents, Isotropic{}).factors;
  r.greedy = greedy_grid(gpus, 2);
  r.volume_optimal = surface_volume_2d(BlockGrid(r.extents, r.optimal));
  r.volume_greedy = surface_volume_2d(BlockGrid(r.extents, r.greedy));
  r.improvement_pct = r.volume_optimal == 0 ? 0.0 : (to_double(r.volume_greedy / r.volume_optimal) - 1.0) * 100.0;
  return r;
}

SweepResult run_sweep(const SweepSpec& spec) {
  SweepResult out;
  for (const auto& [a, b] : spec.ratios)
    for (auto area : spec.areas)
      for (auto g : spec.gpus) out.records.push_back(sweep_config(a, b, area, g, spec.gpus_per_node));

  struct Acc {
    std::size_t n = 0;
    double log_sum = 0;
  };
  auto log_ratio = [](const SweepRecord& r) {
    return r.volume_optimal == 0 ? 0.0 : std::log(to_double(r.volume_greedy / r.volume_optimal));
  };
  auto emit = [&](const std::string& param, const std::vector<std::string>& order,
                  const std::map<std::string, Acc>& acc) {
    for (const auto& v : order) {
      const auto& a = acc.at(v);
      out.groups.push_back({param, v, a.n, (std::exp(a.log_sum / static_cast<double>(a.n)) - 1.0) * 100.0});
    }
  };
  std::map<std::string, Acc> by_ratio, by_area, by_gpus, all;
  std::vector<std::string> ratio_order, area_order, gpus_order;
  auto note = [](std::vector<std::string>& order, const std::string& v) {
    if (std::find(order.begin(), order.end(), v) == order.end()) order.push_back(v);
  };
  for (const auto& r : out.records) {
    const double l = log_ratio(r);
    const auto rk = std::to_string(r.ratio_x) + ":" + std::to_string(r.ratio_y);
    const auto ak = std::to_string(r.area);
    const auto gk = std::to_string(r.gpus);
    note(ratio_order, rk);
    note(area_order, ak);
    note(gpus_order, gk);
    for (auto* acc : {&by_ratio[rk], &by_area[ak], &by_gpus[gk], &all["all"]}) {
      ++acc->n;
      acc->log_sum += l;
    }
  }
  if (out.records.empty()) return out;
  emit("ratio", ratio_order, by_ratio);
  emit("area", area_order, by_area);
  emit("gpus", gpus_order, by_gpus);
  emit("all", {"all"}, all);
  return out;
}

}  // namespace mapple
