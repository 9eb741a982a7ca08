#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "upcfekete/error.hpp"
#include "upcfekete/fekete.hpp"
#include "upcfekete/geometry.hpp"
#include "upcfekete/measures.hpp"

namespace upcfekete::rates {

struct RateConstants {
  double alpha = 1.0;
  double gamma = 1.0;
  int m = 1;
  int n = 1;
  double mu = 0.0;
  double q = 0.0;
  double tau = 0.0;
  double alpha_prime = 0.0;
  double alpha_double_prime = 0.0;
};

std::pair<double, double> hcp_constants(int m, int n);  // (1/(2m), n+1)
double tau_of(double alpha, double mu, double q);
double alpha_prime(double alpha, double mu, double q);
double alpha_double_prime(double gamma, double alpha_prime);
// generic regular-set rate gamma alpha / (24 + 12 alpha), for comparison
double dmn_alpha_prime(double gamma, double alpha);

// Full chain; asserts 0 < a'' < a' < tau <= alpha.
RateConstants rate_constants(double alpha, double gamma, int m, int n);

// c (log d)^{3 a''} / d^{a''}, natural log; d <= 1 is an input error.
double bound_value(double c, double alpha_double_prime, double d);
std::vector<std::pair<int, double>> bound_curve(double c, double alpha_double_prime, std::span<const int> degrees);

// count, body(i): body may run concurrently for distinct i.
using ParallelFor = std::function<void(std::size_t, const std::function<void(std::size_t)>&)>;
void sequential_for(std::size_t count, const std::function<void(std::size_t)>& body);

// phi(z) = amplitude |z - center|^alpha; amplitude 0 is the unweighted case.
struct HolderWeight {
  double amplitude = 0.0;
  Point center = Point::real(0.0);
  bool active() const { return amplitude != 0.0; }
};

struct RatePlan {
  geometry::CompactSet set = geometry::CompactSet::interval(-1.0, 1.0);
  double gamma = 1.0;
  double alpha = 1.0;
  std::optional<int> cusp_m;  // default: cusp exponent of a power cusp, else 1
  std::vector<int> degrees;
  fekete::SolverKind solver = fekete::SolverKind::GreedyExchange;
  double density = 1.0;
  std::optional<int> surrogate_degree;  // empty: closed-form equilibrium measure
  int dictionary_size = measures::kDefaultDictionarySize;
  int reference_max_intervals = 160;
  HolderWeight weight;
};

struct RateRow {
  int d = 0;
  std::size_t N = 0;
  double objective = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double bound = 0.0;
  std::string upper_method;
  bool in_fit = false;  // bracket width <= upper / 2
};

struct Verdict {
  int d0 = 0;
  double c = 0.0;
  double slope = 0.0;  // NaN with fewer than two usable rows
  std::size_t fit_points = 0;
  bool bound_ok = false;
  bool slope_ok = false;
  bool pass = false;
};

struct RateReport {
  RateConstants constants;
  std::vector<RateRow> rows;
  Verdict verdict;
  std::string reference;
  std::optional<measures::ReferenceQuality> reference_quality;
  std::vector<std::string> caveats;
};

// Calibrates c at the smallest degree and fills row.bound and row.in_fit.
Verdict assess(std::vector<RateRow>& rows, double alpha_double_prime);

// Raised when a degree fails; carries the rows finished before it.
class ExperimentError : public Error {
 public:
  ExperimentError(const Error& cause, RateReport partial)
      : Error(cause.module(), cause.kind(), cause.what()), partial_(std::move(partial)) {}
  const RateReport& partial() const { return partial_; }

 private:
  RateReport partial_;
};

RateReport run_experiment(const RatePlan& plan, const ParallelFor& parallel = sequential_for);

}  // namespace upcfekete::rates
