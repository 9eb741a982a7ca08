#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "upcfekete/cli.hpp"

using namespace upcfekete;
using namespace upcfekete::cli;
namespace fs = std::filesystem;

namespace {

json minimal() { return json::parse(R"({"set": {"type": "interval", "a": -1, "b": 1}, "gamma": 1, "degrees": "2..12"})"); }

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("upcfekete-cli-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& command, const ExperimentPlan& plan, const fs::path& dir, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  RunOptions opts;
  opts.out_dir = dir.string();
  opts.workers = 2;
  const int code = dispatch(command, plan, opts, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

std::vector<std::string> problems_of(const json& doc) {
  try {
    parse_plan(doc);
  } catch (const PlanError& e) {
    return e.problems();
  }
  return {};
}

}  // namespace

TEST_CASE("minimal plan gets defaults") {
  const auto plan = parse_plan(minimal());
  CHECK(plan.degrees.size() == 11);
  CHECK(plan.degrees.front() == 2);
  CHECK(plan.solver == "greedy+exchange");
  CHECK(plan.density == 1.0);
  CHECK(plan.dictionary_size == 64);
  CHECK_FALSE(plan.surrogate_degree);
}

TEST_CASE("validation reports every problem") {
  auto doc = minimal();
  doc["gamma"] = 3;
  auto p = problems_of(doc);
  REQUIRE(p.size() == 1);
  CHECK(p[0] == "γ must lie in (0,2]");

  doc = minimal();
  doc["degrees"] = "5..2";
  p = problems_of(doc);
  REQUIRE(p.size() == 1);
  CHECK(p[0].find("empty range") != std::string::npos);

  doc = minimal();
  doc["gamma"] = 0;
  doc["alpha"] = 2;
  doc["colour"] = "blue";
  doc["solver"] = "simulated-annealing";
  doc["set"]["c"] = 1;
  p = problems_of(doc);
  CHECK(p.size() == 5);
  bool named = false;
  for (const auto& s : p) named = named || s.find("'colour'") != std::string::npos;
  CHECK(named);

  doc = minimal();
  doc["set"] = {{"type", "interval"}, {"a", 1}, {"b", -1}};
  CHECK(problems_of(doc).size() == 1);
  doc.erase("set");
  CHECK(problems_of(doc).size() == 1);
}

TEST_CASE("plan round trip and hash") {
  auto doc = minimal();
  doc["reference"] = {{"type", "surrogate"}, {"degree", 48}};
  doc["points"] = json::array({json::array({json::array({0, 2})}), 1.5});
  doc["hcp"] = {{"radii", {1, 0.5}}, {"anchor", -1}};
  doc["upc"] = "builtin";
  doc["weight"] = {{"amplitude", 0.2}, {"center", 0.5}};
  const auto a = parse_plan(doc);
  const auto b = parse_plan(serialize(a));
  CHECK(serialize(a) == serialize(b));
  CHECK(plan_hash(a) == plan_hash(b));
  CHECK(plan_hash_hex(a).size() == 16);

  // key order in the source text does not matter
  const auto r1 = parse_plan(json::parse(R"({"gamma": 1, "degrees": [2, 3], "set": {"b": 1, "type": "interval", "a": -1}})"));
  const auto r2 = parse_plan(json::parse(R"({"set": {"a": -1, "b": 1, "type": "interval"}, "degrees": [3, 2], "gamma": 1})"));
  CHECK(plan_hash(r1) == plan_hash(r2));

  auto c = a;
  c.output = "elsewhere";
  CHECK(plan_hash(c) == plan_hash(a));
  c.gamma = 0.5;
  CHECK(plan_hash(c) != plan_hash(a));
}

TEST_CASE("set documents round trip") {
  const std::vector<geometry::CompactSet> sets{
      geometry::CompactSet::interval(-1, 2),
      geometry::CompactSet::box({0, 0}, {1, 2}),
      geometry::CompactSet::disk(cplx(0.5, -1), 2.0),
      geometry::CompactSet::circle(0.0, 1.0, 256),
      geometry::CompactSet::convex_polygon({{0, 0}, {1, 0}, {0, 1}}),
      geometry::CompactSet::power_cusp(1, 2, 1),
      geometry::CompactSet::comb_default(5),
      geometry::CompactSet::union_of({geometry::CompactSet::interval(-2, -1), geometry::CompactSet::interval(1, 2)}),
      geometry::CompactSet::ball_clip(geometry::CompactSet::box({0, 0}, {1, 1}), Point::real(0, 0), 0.5)};
  for (const auto& s : sets) {
    const json doc = set_to_json(s);
    CHECK(set_to_json(set_from_json(doc)) == doc);
  }
}

TEST_CASE("descriptor documents round trip") {
  const auto set = geometry::CompactSet::power_cusp(1, 2, 1);
  const auto u = geometry::builtin_descriptor(set);
  const auto v = descriptor_from_json(descriptor_to_json(u), set);
  CHECK(v.M() == u.M());
  CHECK(v.m() == u.m());
  const Point a = Point::real(0.3, 0.05);
  for (int k = 0; k <= u.degree(); ++k) CHECK(v.coefficient(k, a) == u.coefficient(k, a));
  CHECK(descriptor_from_json({{"type", "builtin"}, {"M", 0.1}}, set).M() == 0.1);
}

TEST_CASE("number formatting and points") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  CHECK(point_from_json(1.5, 1) == Point::real(1.5));
  CHECK(point_from_json(json::array({json::array({0, 2})}), 1) == Point::complex(cplx(0, 2)));
  CHECK(point_from_json(json::array({0.5, 0.25}), 2) == Point::real(0.5, 0.25));
  CHECK_THROWS_AS(point_from_json(json::array({1, 2, 3}), 2), Error);
}

TEST_CASE("constants command") {
  std::ostringstream out, err;
  CHECK(run_constants({1.0, 1.0, 1, 1}, out, err) == 0);
  const std::string s = out.str();
  CHECK(s.find("mu=0.5\n") != std::string::npos);
  CHECK(s.find("q=2\n") != std::string::npos);
  CHECK(s.find("tau=0.16666666666666666\n") != std::string::npos);
  CHECK(s.find("alpha_prime=0.0066666666666666") != std::string::npos);
  CHECK(s.find("alpha_double_prime=0.0002768549") != std::string::npos);
  std::ostringstream out2, err2;
  CHECK(run_constants({1.0, 3.0, 1, 1}, out2, err2) == 2);
  CHECK(err2.str().find("rates.input") != std::string::npos);
}

TEST_CASE("unknown command is a usage error") {
  std::ostringstream out, err;
  CHECK(dispatch("plot", parse_plan(minimal()), {}, out, err) == 2);
  CHECK(err.str().find("usage") != std::string::npos);
  CHECK_FALSE(is_command("plot"));
  CHECK(is_command("validate-upc"));
}

TEST_CASE("fekete artifacts are deterministic") {
  auto doc = minimal();
  doc["degrees"] = "2..4";
  const auto plan = parse_plan(doc);
  const auto d1 = fresh_dir("fekete-1"), d2 = fresh_dir("fekete-2");
  REQUIRE(run("fekete", plan, d1) == 0);
  REQUIRE(run("fekete", plan, d2) == 0);
  const std::string stem = "fekete-" + plan_hash_hex(plan);
  const std::string csv = slurp(d1 / (stem + ".csv"));
  CHECK(csv == slurp(d2 / (stem + ".csv")));
  CHECK(csv.rfind("d,j,re0,im0\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 + 4 + 5);
  const auto manifest = json::parse(slurp(d1 / (stem + ".manifest.json")));
  CHECK(manifest["plan_hash"] == plan_hash_hex(plan));
  CHECK(manifest["tool_version"] == kToolVersion);
  CHECK(manifest.contains("wall_seconds"));
  const auto summary = json::parse(slurp(d1 / (stem + ".json")));
  CHECK(summary["degrees"].size() == 3);
}

TEST_CASE("rates, extremal and validate-upc commands") {
  auto doc = minimal();
  doc["degrees"] = "2..6";
  const auto plan = parse_plan(doc);
  const auto dir = fresh_dir("commands");
  const std::string h = plan_hash_hex(plan);

  REQUIRE(run("rates", plan, dir) == 0);
  const auto rates = json::parse(slurp(dir / ("rates-" + h + ".json")));
  CHECK(rates["verdict"]["label"] == "PASS");
  CHECK(rates["constants"]["q"] == 2.0);
  CHECK(slurp(dir / ("rates-" + h + ".csv")).rfind("d,N_d,objective,dist_lower,dist_upper,bound,in_fit\n", 0) == 0);

  REQUIRE(run("extremal", plan, dir) == 0);
  const std::string ext = slurp(dir / ("extremal-" + h + ".csv"));
  CHECK(std::count(ext.begin(), ext.end(), '\n') == 1 + 5 * 4);

  REQUIRE(run("validate-upc", plan, dir) == 0);
  const auto upc = json::parse(slurp(dir / ("validate-upc-" + h + ".json")));
  CHECK(upc["ok"] == true);
  CHECK(upc["inclusion"]["witness_count"] == 0);
}

TEST_CASE("failures write an error report") {
  auto doc = minimal();
  doc["degrees"] = json::array({2, 3, 5});
  doc["solver"] = "brute";
  const auto plan = parse_plan(doc);
  const auto dir = fresh_dir("failure");
  std::string err;
  CHECK(run("rates", plan, dir, &err) == 1);
  const std::string stem = "rates-" + plan_hash_hex(plan);
  const auto report = json::parse(slurp(dir / (stem + ".error.json")));
  CHECK(report["code"] == "fekete.capacity");
  CHECK(err.find("fekete.capacity") != std::string::npos);
  const std::string csv = slurp(dir / (stem + ".csv"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + two finished degrees

  auto box = minimal();
  box["set"] = {{"type", "box"}, {"lo", {0, 0}}, {"hi", {1, 1}}};
  box["degrees"] = "2..2";
  CHECK(run("extremal", parse_plan(box), dir, &err) == 1);
  CHECK(err.find("cli.input") != std::string::npos);
}
