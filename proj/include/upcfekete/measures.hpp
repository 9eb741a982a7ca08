#pragma once

#include <optional>
#include <string>
#include <vector>

#include "upcfekete/fekete.hpp"
#include "upcfekete/geometry.hpp"

namespace upcfekete::measures {

struct DiscreteMeasure {
  std::vector<Point> atoms;
  std::vector<double> weights;
};

// Validates weights (nonnegative, sum 1 within 1e-12) and distinct atoms.
DiscreteMeasure make_discrete(std::vector<Point> atoms, std::vector<double> weights);
DiscreteMeasure uniform_measure(std::vector<Point> atoms);
DiscreteMeasure fekete_measure(const fekete::Configuration& config);

enum class MeasureKind { Arcsine, UniformCircle, Discrete, EmpiricalReference };
const char* measure_kind_name(MeasureKind kind);

struct ReferenceQuality {
  int degree = 0;
  int half_degree = 0;
  double self_distance = 0.0;  // W1 (or OT) between the degree D and D/2 measures
  bool mesh_capped = false;
};

struct MeasureDescriptor {
  MeasureKind kind = MeasureKind::Discrete;
  double a = -1.0, b = 1.0;  // arcsine support
  cplx center{};             // uniform circle
  double radius = 1.0;
  DiscreteMeasure discrete;  // Discrete and EmpiricalReference
  std::optional<ReferenceQuality> quality;

  static MeasureDescriptor arcsine(double a, double b);
  static MeasureDescriptor uniform_circle(cplx center, double radius);
  static MeasureDescriptor from_discrete(DiscreteMeasure m);

  bool is_atomic() const { return kind == MeasureKind::Discrete || kind == MeasureKind::EmpiricalReference; }
  // mu((-inf, x]) for measures on the real line
  double cdf(double x) const;
  // mass of the arc of angles [0, theta] around `around`, theta in [0, 2 pi]
  double angle_cdf(double theta, cplx around = {}) const;
};

// Classical closed forms: arcsine law on intervals, normalized arc length on
// the boundary circle of disks and circles. Other sets: no_closed_form error.
MeasureDescriptor equilibrium_closed_form(const geometry::CompactSet& set);

// Exact W1 on the real line, or on a circle (geodesic metric, minimized over
// the cut offset) when either side is a uniform circle measure.
double wasserstein1_1d(const MeasureDescriptor& mu, const MeasureDescriptor& nu);
double wasserstein1_circle(const MeasureDescriptor& mu, const MeasureDescriptor& nu, cplx center, double radius);

struct TransportResult {
  double cost = 0.0;
  // Feasible duals: u_i - v_j <= |x_i - y_j|, with equality on the support
  // of the optimal plan.
  std::vector<double> source_potential;
  std::vector<double> target_potential;
};

// Exact Euclidean W1 between atomic measures (successive shortest paths on
// integer masses); intended for up to ~10^3 atoms.
TransportResult optimal_transport(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// Upper bound on W1 chosen by geometry: exact line/circle values, the
// projected circle bound for atoms inside a disk, or optimal transport.
struct W1Estimate {
  double value = 0.0;
  std::string method;  // "line", "circle", "circle+projection", "transport", "line-quadrature"
};
W1Estimate wasserstein1(const MeasureDescriptor& mu, const MeasureDescriptor& nu);

struct GammaBracket {
  double lower = 0.0;
  double upper = 0.0;
  std::string upper_method;
  std::string best_test;  // dictionary entry achieving the lower bound
  bool gamma_above_one = false;
};

inline constexpr int kDefaultDictionarySize = 64;

// lower: max of |<mu - nu, v>| / ||v||_gamma over a deterministic dictionary
// with analytically certified norms (sup + Holder seminorm on the convex
// hull of the supports); upper: W1 for gamma >= 1, W1^gamma for gamma < 1.
GammaBracket dist_gamma(const MeasureDescriptor& mu, const MeasureDescriptor& nu, double gamma,
                        int dictionary_size = kDefaultDictionarySize);

struct ReferenceOptions {
  double density = 1.0;
  int max_intervals = 160;
  fekete::SolverKind solver = fekete::SolverKind::GreedyExchange;
};

// Fekete measure of degree D as a stand-in for the equilibrium measure,
// with the D vs D/2 self-distance as quality indicator.
MeasureDescriptor empirical_reference(const geometry::CompactSet& set, int degree,
                                      const ReferenceOptions& options = {});

}  // namespace upcfekete::measures
