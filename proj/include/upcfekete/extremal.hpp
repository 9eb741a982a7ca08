#pragma once

#include <functional>
#include <span>
#include <vector>

#include "upcfekete/fekete.hpp"
#include "upcfekete/geometry.hpp"
#include "upcfekete/polyspace.hpp"

namespace upcfekete::extremal {

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
};

// Lagrange brackets for L_K built from a degree-d configuration. Sup-norms of
// the fundamental polynomials are taken over the mesh (plus the nodes).
class ExtremalEstimate {
 public:
  ExtremalEstimate(fekete::Configuration config, poly::Basis basis, const geometry::CandidateMesh& mesh);

  int degree() const { return config_.degree; }
  const fekete::Configuration& configuration() const { return config_; }
  double mesh_spacing() const { return mesh_spacing_; }
  // max_j ||l_j||_mesh; 1 for a mesh-optimal configuration
  double max_lagrange_norm() const { return max_norm_; }
  // (1/d) log N_d
  double count_slack() const;

  Bracket bracket(const Point& z) const;
  double lower(const Point& z) const { return bracket(z).lower; }
  double upper(const Point& z) const { return bracket(z).upper; }

 private:
  fekete::Configuration config_;
  poly::Basis basis_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
  std::vector<double> norms_;
  double max_norm_ = 1.0;
  double mesh_spacing_ = 0.0;
};

// One-shot bracket. Lagrange polynomials do not depend on the basis, so a
// well-conditioned one is chosen from the mesh.
poly::Basis conditioning_basis(const geometry::CandidateMesh& mesh, int degree);
Bracket extremal_bracket(const fekete::Configuration& config, const geometry::CandidateMesh& mesh, const Point& z);

// Mesh, configuration (greedy + exchange unless told otherwise) and estimate
// for a set at degree d.
struct SetEstimate {
  geometry::CandidateMesh mesh;
  ExtremalEstimate estimate;
  double mesh_defect;  // NaN when no Markov-type estimate exists for the set
  double slack() const;  // (1/d) log N_d + mesh defect (defect taken as 0 when unknown)
};
SetEstimate estimate_for_set(const geometry::CompactSet& set, int degree, double density = 1.0,
                             fekete::SolverKind solver = fekete::SolverKind::GreedyExchange);

struct ModulusSamples {
  Point anchor;
  double r = 0.0;
  int degree = 0;
  double mesh_spacing = 0.0;
  std::vector<double> deltas;
  std::vector<double> values;  // non-decreasing in delta
};

// sup of the upper evaluator over the Euclidean ball B(a, delta), sampled on
// spheres (L is plurisubharmonic, so the sup sits on the sphere) and made
// cumulative over the sorted delta grid.
ModulusSamples modulus_samples(const ExtremalEstimate& est, const Point& anchor, std::span<const double> deltas,
                               double r = 0.0);

// Builds K ∩ B(a, r), solves at degree d there and samples the modulus at a.
ModulusSamples modulus_of_continuity(const geometry::CompactSet& set, const Point& anchor, double r,
                                     std::span<const double> deltas, int degree,
                                     fekete::SolverKind solver = fekete::SolverKind::GreedyExchange,
                                     double density = 1.0);

struct HcpFit {
  double mu = 0.0;
  double q = 0.0;
  double C = 0.0;
  double max_residual = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;  // non-positive samples dropped
};

// Least squares for log w = log C + mu log delta - q log r.
HcpFit hcp_fit(std::span<const ModulusSamples> samples);

struct PolynomialMap {
  int degree = 1;
  std::function<Point(const Point&)> eval;
};

struct InequalityRow {
  Point z;
  Point w;  // second point (Blocki) or the image h(z) (Lemma check)
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double margin = 0.0;  // rhs + slack - lhs
};

struct InequalityReport {
  bool ok = true;
  double worst_margin = 0.0;
  std::vector<InequalityRow> rows;
};

// lower_{h(E)}(h(w)) <= k upper_E(w) + slack at every sample w. The image
// mesh is h applied to the mesh of E.
InequalityReport check_polynomial_image_inequality(const geometry::CompactSet& E, const PolynomialMap& h,
                                                   std::span<const Point> ws, int degree, double density = 1.0);

struct BlockiOptions {
  int degree = 8;
  double density = 1.0;
  std::vector<double> deltas;  // empty: 24 log-spaced values in [1e-3, 1]
  std::size_t max_anchors = 16;
};

// |mid(z) - mid(w)| <= w_global(|z - w|) + slack with w_global the max of
// the sampled modulus over a boundary net, read at the next grid delta.
InequalityReport check_blocki_inequality(const geometry::CompactSet& set,
                                         std::span<const std::pair<Point, Point>> pairs,
                                         const BlockiOptions& options = {});

// Closed form oracle for [-1, 1]: log|z + sqrt(z^2 - 1)| on the branch with modulus >= 1.
double interval_green(cplx z);

}  // namespace upcfekete::extremal
