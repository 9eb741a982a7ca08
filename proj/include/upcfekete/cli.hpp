#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "upcfekete/error.hpp"
#include "upcfekete/geometry.hpp"
#include "upcfekete/rates.hpp"

namespace upcfekete::cli {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

struct HcpSpec {
  std::optional<Point> anchor;  // default: left end of an interval
  std::vector<double> radii{1.0, 0.5};
  double delta_from = 1e-3;
  double delta_to = 1e-1;
  int delta_count = 12;
  int degree = 0;  // 0: largest plan degree
};

struct UpcSpec {
  json descriptor;  // {"type": "builtin"} (optionally "M") or an explicit descriptor document
  int t_points = 64;
  int u_points = 16;
  int anchor_degree = 2;  // anchors are the mesh of this degree
  double r = 1.0;         // radius for the pyramid / inclusion check
};

struct ExperimentPlan {
  json set;  // canonical set document
  std::optional<UpcSpec> upc;
  double gamma = 1.0;
  double alpha = 1.0;
  std::vector<int> degrees;
  std::string solver = "greedy+exchange";
  double density = 1.0;
  std::optional<int> surrogate_degree;  // reference: closed form when empty
  int reference_max_intervals = 160;
  int dictionary_size = 64;
  std::string output = "out";
  double weight_amplitude = 0.0;
  std::optional<Point> weight_center;
  std::optional<int> cusp_m;
  std::vector<Point> points;  // extremal evaluation points
  HcpSpec hcp;
  std::uint64_t brute_budget = 2'000'000;
};

// Validation failures, all of them.
class PlanError : public Error {
 public:
  explicit PlanError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

ExperimentPlan parse_plan(const json& document);
json serialize(const ExperimentPlan& plan);
// FNV-1a over the sorted-key dump of the serialized plan without "output",
// so the same experiment hashes alike wherever it is written.
std::uint64_t plan_hash(const ExperimentPlan& plan);
std::string plan_hash_hex(const ExperimentPlan& plan);

// Set and descriptor documents.
json set_to_json(const geometry::CompactSet& set);
geometry::CompactSet set_from_json(const json& doc);
json descriptor_to_json(const geometry::UpcDescriptor& u);
geometry::UpcDescriptor descriptor_from_json(const json& doc, const geometry::CompactSet& set);

// Point documents: an array with one entry per coordinate, each a number
// (real) or [re, im]; a bare number is accepted for n = 1.
json point_to_json(const Point& p, bool complex_ambient);
Point point_from_json(const json& doc, int n);

// %.17g
std::string format_double(double x);

rates::ParallelFor thread_pool(unsigned workers);

struct RunOptions {
  std::optional<std::string> out_dir;  // overrides plan.output
  unsigned workers = 1;
  bool verbose = false;
};

struct ConstantsArgs {
  double alpha = 1.0;
  double gamma = 1.0;
  int m = 1;
  int n = 1;
};

bool is_command(const std::string& name);
std::string usage();

// Exit status: 0 success, 1 computation failure (error.json written), 2 usage.
int run_constants(const ConstantsArgs& args, std::ostream& out, std::ostream& err);
int dispatch(const std::string& command, const ExperimentPlan& plan, const RunOptions& options, std::ostream& out,
             std::ostream& err);

}  // namespace upcfekete::cli
