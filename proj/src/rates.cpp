#include "upcfekete/rates.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <variant>

#include "upcfekete/polyspace.hpp"

namespace upcfekete::rates {

namespace {

Error input_error(const std::string& msg) { return Error("rates", ErrorKind::Input, msg); }

bool in_unit(double x) { return x > 0.0 && x <= 1.0; }

}  // namespace

std::pair<double, double> hcp_constants(int m, int n) {
  if (m < 1 || n < 1) throw input_error("hcp_constants needs m >= 1 and n >= 1");
  return {1.0 / (2.0 * m), n + 1.0};
}

double tau_of(double alpha, double mu, double q) {
  if (!in_unit(alpha)) throw input_error("α must lie in (0,1]");
  if (!in_unit(mu)) throw input_error("μ must lie in (0,1]");
  if (!(q >= 1.0)) throw input_error("q must be >= 1");
  return std::min(alpha, mu / (1.0 + q));
}

double alpha_prime(double alpha, double mu, double q) {
  const double tau = tau_of(alpha, mu, q);
  return tau * tau / (tau + 2.0 + q);
}

double alpha_double_prime(double gamma, double ap) {
  if (!(gamma > 0.0 && gamma <= 2.0)) throw input_error("γ must lie in (0,2]");
  if (!(ap > 0.0 && ap < 1.0)) throw input_error("α′ must lie in (0,1)");
  return gamma * ap / (24.0 + 12.0 * ap);
}

double dmn_alpha_prime(double gamma, double alpha) {
  if (!in_unit(gamma)) throw input_error("γ must lie in (0,1] for the regular-set rate");
  if (!in_unit(alpha)) throw input_error("α must lie in (0,1]");
  return gamma * alpha / (24.0 + 12.0 * alpha);
}

RateConstants rate_constants(double alpha, double gamma, int m, int n) {
  RateConstants k;
  k.alpha = alpha;
  k.gamma = gamma;
  k.m = m;
  k.n = n;
  std::tie(k.mu, k.q) = hcp_constants(m, n);
  k.tau = tau_of(alpha, k.mu, k.q);
  k.alpha_prime = alpha_prime(alpha, k.mu, k.q);
  k.alpha_double_prime = alpha_double_prime(gamma, k.alpha_prime);
  if (!(0.0 < k.alpha_double_prime && k.alpha_double_prime < k.alpha_prime && k.alpha_prime < k.tau &&
        k.tau <= k.alpha))
    throw Error("rates", ErrorKind::Internal, "rate constant chain out of order");
  return k;
}

double bound_value(double c, double a2, double d) {
  if (!(d > 1.0)) throw input_error("the bound is stated for d > 1, got d = " + std::to_string(d));
  if (!(c >= 0.0)) throw input_error("bound constant must be nonnegative");
  return c * std::pow(std::log(d), 3.0 * a2) / std::pow(d, a2);
}

std::vector<std::pair<int, double>> bound_curve(double c, double a2, std::span<const int> degrees) {
  std::vector<std::pair<int, double>> out;
  out.reserve(degrees.size());
  for (int d : degrees) out.emplace_back(d, bound_value(c, a2, d));
  return out;
}

void sequential_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  for (std::size_t i = 0; i < count; ++i) body(i);
}

Verdict assess(std::vector<RateRow>& rows, double a2) {
  Verdict v;
  v.slope = std::numeric_limits<double>::quiet_NaN();
  if (rows.empty()) return v;
  v.d0 = rows.front().d;
  v.c = rows.front().upper / bound_value(1.0, a2, v.d0);
  v.bound_ok = true;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& r : rows) {
    r.bound = bound_value(v.c, a2, r.d);
    if (r.d > v.d0 && r.upper > r.bound * (1.0 + 1e-12)) v.bound_ok = false;
    r.in_fit = r.upper > 0.0 && r.upper - r.lower <= 0.5 * r.upper;
    if (!r.in_fit) continue;
    const double x = std::log(static_cast<double>(r.d)), y = std::log(r.upper);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++v.fit_points;
  }
  if (v.fit_points >= 2) {
    const double k = static_cast<double>(v.fit_points);
    const double den = k * sxx - sx * sx;
    if (den > 0.0) v.slope = (k * sxy - sx * sy) / den;
  }
  v.slope_ok = std::isfinite(v.slope) && v.slope <= -a2;
  v.pass = v.bound_ok && v.slope_ok;
  return v;
}

RateReport run_experiment(const RatePlan& plan, const ParallelFor& parallel) {
  std::vector<int> degrees = plan.degrees;
  std::sort(degrees.begin(), degrees.end());
  degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());
  if (degrees.empty()) throw input_error("degree range is empty");
  if (degrees.front() < 2) throw input_error("degrees must be >= 2");
  if (!(plan.density > 0.0)) throw input_error("mesh density must be positive");
  if (plan.dictionary_size < 1) throw input_error("dictionary size must be positive");
  if (plan.surrogate_degree && *plan.surrogate_degree < 4 * degrees.back())
    throw input_error("surrogate degree must be at least 4 x the largest degree (" +
                      std::to_string(4 * degrees.back()) + ")");

  int m = 1;
  if (const auto* cusp = std::get_if<geometry::PowerCusp>(&plan.set.kind())) m = cusp->m;
  if (plan.cusp_m) m = *plan.cusp_m;

  RateReport report;
  report.constants = rate_constants(plan.alpha, plan.gamma, m, plan.set.dim());

  measures::MeasureDescriptor reference;
  if (plan.surrogate_degree) {
    measures::ReferenceOptions opts;
    opts.max_intervals = plan.reference_max_intervals;
    opts.solver = plan.solver == fekete::SolverKind::Brute ? fekete::SolverKind::GreedyExchange : plan.solver;
    reference = measures::empirical_reference(plan.set, *plan.surrogate_degree, opts);
    report.reference = "empirical-reference(D=" + std::to_string(*plan.surrogate_degree) + ")";
    report.reference_quality = reference.quality;
    if (reference.quality && reference.quality->mesh_capped)
      report.caveats.push_back("reference mesh was capped below the d^-2 spacing rule");
  } else {
    reference = measures::equilibrium_closed_form(plan.set);
    report.reference = measures::measure_kind_name(reference.kind);
  }
  if (plan.weight.active())
    report.caveats.push_back("weighted run: distances are to the unweighted equilibrium measure; no weighted reference");
  if (plan.gamma > 1.0) report.caveats.push_back("γ > 1: upper distance from the Lipschitz-ball inclusion");

  Weight weight;
  if (plan.weight.active()) {
    const HolderWeight w = plan.weight;
    const double alpha = plan.alpha;
    weight = [w, alpha](const Point& z) { return w.amplitude * std::pow(std::sqrt(dist2(z, w.center)), alpha); };
  }

  std::vector<RateRow> rows(degrees.size());
  std::vector<std::exception_ptr> failures(degrees.size());
  parallel(degrees.size(), [&](std::size_t i) {
    try {
      const int d = degrees[i];
      const auto mesh = geometry::generate_mesh(plan.set, d, plan.density);
      const fekete::Problem problem(mesh, poly::Basis::default_for(plan.set, d), weight);
      const auto config = fekete::solve(problem, plan.solver);
      const auto mu = measures::MeasureDescriptor::from_discrete(measures::fekete_measure(config));
      const auto g = measures::dist_gamma(mu, reference, plan.gamma, plan.dictionary_size);
      RateRow& r = rows[i];
      r.d = d;
      r.N = config.points.size();
      r.objective = config.objective;
      r.lower = g.lower;
      r.upper = g.upper;
      r.upper_method = g.upper_method;
    } catch (...) {
      failures[i] = std::current_exception();
    }
  });

  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (!failures[i]) continue;
    report.rows.assign(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(i));
    report.verdict = assess(report.rows, report.constants.alpha_double_prime);
    try {
      std::rethrow_exception(failures[i]);
    } catch (const Error& e) {
      const std::string at = "d = " + std::to_string(degrees[i]) + ": ";
      throw ExperimentError(Error(e.module(), e.kind(), at + e.what()), std::move(report));
    } catch (const std::exception& e) {
      const std::string at = "d = " + std::to_string(degrees[i]) + ": ";
      throw ExperimentError(Error("rates", ErrorKind::Internal, at + e.what()), std::move(report));
    }
  }
  report.rows = std::move(rows);
  report.verdict = assess(report.rows, report.constants.alpha_double_prime);
  return report;
}

}  // namespace upcfekete::rates
