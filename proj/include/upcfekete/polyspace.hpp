#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "upcfekete/error.hpp"
#include "upcfekete/geometry.hpp"
#include "upcfekete/point.hpp"

namespace upcfekete::poly {

using MultiIndex = std::array<int, 2>;

// N_d = C(n + d, n); throws a capacity error past 10^7.
std::size_t dimension_count(int n, int d);

// Graded-lexicographic exponents with |alpha| <= d. For n = 2 the order is
// (0,0), (0,1), (1,0), (0,2), (1,1), (2,0), ...
std::vector<MultiIndex> multi_indices(int n, int d);

enum class Flavor { Monomial, ChebyshevTensor };

// Graded polynomial basis of P_d on K^n. Monomials may be centred at a
// point; the Chebyshev flavour uses T_k of the affine chart of a real box.
class Basis {
 public:
  static Basis monomial(int n, int d, Point center = Point{});
  static Basis chebyshev(int n, int d, const geometry::Bounds& box);
  // Chebyshev on the set's bounding box for real sets, centred monomials otherwise.
  static Basis default_for(const geometry::CompactSet& set, int d);

  int n() const { return n_; }
  int degree() const { return d_; }
  Flavor flavor() const { return flavor_; }
  std::size_t size() const { return indices_.size(); }
  const std::vector<MultiIndex>& indices() const { return indices_; }

  // out[i] = e_i(z), out must hold size() entries.
  void evaluate(const Point& z, std::span<cplx> out) const;
  void evaluate(const Point& z, std::span<double> out) const;  // real points only

  // log of |det| of the map taking monomials z^alpha to this basis; the map
  // is triangular in graded order, so this is a sum over leading coefficients.
  double leading_log_abs_det() const;

 private:
  Basis(int n, int d, Flavor flavor) : n_(n), d_(d), flavor_(flavor), indices_(multi_indices(n, d)) {}
  template <class Scalar>
  void evaluate_impl(const Point& z, std::span<Scalar> out) const;

  int n_, d_;
  Flavor flavor_;
  std::vector<MultiIndex> indices_;
  std::array<cplx, 2> center_{};
  std::array<double, 2> half_width_{1.0, 1.0};
};

// Rows are basis functions, columns are points: entry (i, j) = e_i(x_j) exp(-s phi(x_j)).
template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
Matrix<Scalar> evaluation_matrix(const Basis& basis, std::span<const Point> points, const Weight& weight = {},
                                 double scale = 0.0);

struct WeightedVandermonde {
  Eigen::MatrixXcd matrix;
  int degree = 0;
  double scale = 0.0;
  std::vector<Point> points;
};

WeightedVandermonde vandermonde(const Basis& basis, std::span<const Point> points, const Weight& weight = {},
                                double scale = 0.0, bool require_square = true);

inline constexpr double kUnderflowTolerance = 1e-300;

// log|det| via column-pivoted Householder QR; -inf when a diagonal entry of
// R falls below the tolerance or two columns coincide.
template <class Derived>
double log_abs_det(const Eigen::MatrixBase<Derived>& m, double tolerance = kUnderflowTolerance);
double log_abs_det(const WeightedVandermonde& v, double tolerance = kUnderflowTolerance);

// log|VDM_B| - log|VDM_A| for every point set.
double change_basis_logdet_shift(const Basis& a, const Basis& b);

// --- template definitions --------------------------------------------------

template <class Scalar>
Matrix<Scalar> evaluation_matrix(const Basis& basis, std::span<const Point> points, const Weight& weight,
                                 double scale) {
  const auto rows = static_cast<Eigen::Index>(basis.size());
  Matrix<Scalar> m(rows, static_cast<Eigen::Index>(points.size()));
  std::vector<Scalar> col(basis.size());
  for (std::size_t j = 0; j < points.size(); ++j) {
    basis.evaluate(points[j], std::span<Scalar>(col));
    const double w = (weight && scale != 0.0) ? std::exp(-scale * weight(points[j])) : 1.0;
    for (Eigen::Index i = 0; i < rows; ++i) m(i, static_cast<Eigen::Index>(j)) = col[static_cast<std::size_t>(i)] * w;
  }
  return m;
}

template <class Derived>
double log_abs_det(const Eigen::MatrixBase<Derived>& m, double tolerance) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) throw Error("polyspace", ErrorKind::Shape, "log|det| needs a square matrix");
  const Eigen::Index n = m.cols();
  if (n == 0) return 0.0;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a + 1; b < n; ++b)
      if (m.col(a) == m.col(b)) return -std::numeric_limits<double>::infinity();
  Eigen::ColPivHouseholderQR<Matrix<Scalar>> qr(m);
  const auto& r = qr.matrixQR();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = std::abs(r(i, i));
    if (!(v >= tolerance)) return -std::numeric_limits<double>::infinity();
    sum += std::log(v);
  }
  return sum;
}

}  // namespace upcfekete::poly
