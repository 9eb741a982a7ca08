#include "upcfekete/polyspace.hpp"

#include <cmath>
#include <limits>

#include "upcfekete/error.hpp"

namespace upcfekete::poly {

std::size_t dimension_count(int n, int d) {
  if (n < 1 || d < 0) throw Error("polyspace", ErrorKind::Input, "multi-indices need n >= 1 and d >= 0");
  constexpr std::size_t kLimit = 10'000'000;
  // C(n + d, n) built incrementally; every partial product is an integer.
  std::size_t c = 1;
  for (int i = 1; i <= n; ++i) {
    const auto num = static_cast<std::size_t>(d + i);
    if (c > std::numeric_limits<std::size_t>::max() / num)
      throw Error("polyspace", ErrorKind::Capacity, "N_d overflows");
    c = c * num / static_cast<std::size_t>(i);
    if (c > kLimit) throw Error("polyspace", ErrorKind::Capacity, "N_d exceeds 10^7");
  }
  return c;
}

std::vector<MultiIndex> multi_indices(int n, int d) {
  if (n > 2) throw Error("polyspace", ErrorKind::Input, "only n = 1 and n = 2 are supported");
  std::vector<MultiIndex> out;
  out.reserve(dimension_count(n, d));
  for (int k = 0; k <= d; ++k) {
    if (n == 1) {
      out.push_back({k, 0});
    } else {
      for (int i = 0; i <= k; ++i) out.push_back({i, k - i});
    }
  }
  return out;
}

Basis Basis::monomial(int n, int d, Point center) {
  Basis b(n, d, Flavor::Monomial);
  if (center.n == n)
    for (int i = 0; i < n; ++i) b.center_[static_cast<std::size_t>(i)] = center[i];
  return b;
}

Basis Basis::chebyshev(int n, int d, const geometry::Bounds& box) {
  if (box.axes != n) throw Error("polyspace", ErrorKind::Shape, "Chebyshev chart needs a real box of matching dimension");
  Basis b(n, d, Flavor::ChebyshevTensor);
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    b.center_[k] = 0.5 * (box.lo[k] + box.hi[k]);
    b.half_width_[k] = 0.5 * (box.hi[k] - box.lo[k]);
    if (!(b.half_width_[k] > 0.0)) throw Error("polyspace", ErrorKind::Input, "degenerate Chebyshev box");
  }
  return b;
}

Basis Basis::default_for(const geometry::CompactSet& set, int d) {
  const auto bounds = set.bounds();
  if (set.is_real()) return chebyshev(set.dim(), d, bounds);
  Point c = zero_point(set.dim());
  c[0] = cplx(0.5 * (bounds.lo[0] + bounds.hi[0]), 0.5 * (bounds.lo[1] + bounds.hi[1]));
  return monomial(set.dim(), d, c);
}

template <class Scalar>
void Basis::evaluate_impl(const Point& z, std::span<Scalar> out) const {
  if (z.n != n_) throw Error("polyspace", ErrorKind::Shape, "point dimension does not match basis");
  if (out.size() < indices_.size()) throw Error("polyspace", ErrorKind::Shape, "output buffer too small");
  // Per-axis univariate values p[axis][k].
  std::array<std::vector<Scalar>, 2> p;
  for (int a = 0; a < n_; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    auto& v = p[ua];
    v.resize(static_cast<std::size_t>(d_ + 1));
    Scalar x;
    if constexpr (std::is_same_v<Scalar, double>) {
      x = (z[a].real() - center_[ua].real()) / half_width_[ua];
    } else {
      x = (z[a] - center_[ua]) / half_width_[ua];
    }
    v[0] = Scalar(1.0);
    if (d_ >= 1) v[1] = x;
    for (int k = 2; k <= d_; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      if (flavor_ == Flavor::Monomial)
        v[uk] = v[uk - 1] * x;
      else
        v[uk] = Scalar(2.0) * x * v[uk - 1] - v[uk - 2];
    }
  }
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    Scalar val = p[0][static_cast<std::size_t>(indices_[i][0])];
    if (n_ == 2) val *= p[1][static_cast<std::size_t>(indices_[i][1])];
    out[i] = val;
  }
}

void Basis::evaluate(const Point& z, std::span<cplx> out) const { evaluate_impl<cplx>(z, out); }
void Basis::evaluate(const Point& z, std::span<double> out) const { evaluate_impl<double>(z, out); }

double Basis::leading_log_abs_det() const {
  double sum = 0.0;
  for (const auto& alpha : indices_) {
    for (int a = 0; a < n_; ++a) {
      const int k = alpha[static_cast<std::size_t>(a)];
      const double h = half_width_[static_cast<std::size_t>(a)];
      // monomial (z - c)^k / h^k with h = 1; Chebyshev T_k has leading 2^{k-1}
      if (flavor_ == Flavor::ChebyshevTensor && k >= 1) sum += (k - 1) * std::log(2.0);
      sum -= k * std::log(h);
    }
  }
  return sum;
}

WeightedVandermonde vandermonde(const Basis& basis, std::span<const Point> points, const Weight& weight, double scale,
                                bool require_square) {
  if (require_square && points.size() != basis.size())
    throw Error("polyspace", ErrorKind::Shape,
                "square Vandermonde needs N_d = " + std::to_string(basis.size()) + " points, got " +
                    std::to_string(points.size()));
  WeightedVandermonde v;
  v.matrix = evaluation_matrix<cplx>(basis, points, weight, scale);
  v.degree = basis.degree();
  v.scale = scale;
  v.points.assign(points.begin(), points.end());
  return v;
}

double log_abs_det(const WeightedVandermonde& v, double tolerance) {
  if (v.matrix.rows() != v.matrix.cols())
    throw Error("polyspace", ErrorKind::Shape, "log|det| needs a square matrix");
  return log_abs_det(v.matrix, tolerance);
}

double change_basis_logdet_shift(const Basis& a, const Basis& b) {
  if (a.n() != b.n() || a.degree() != b.degree())
    throw Error("polyspace", ErrorKind::Shape, "bases span different polynomial spaces");
  return b.leading_log_abs_det() - a.leading_log_abs_det();
}

}  // namespace upcfekete::poly
