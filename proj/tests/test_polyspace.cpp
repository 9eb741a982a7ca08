#include <doctest.h>

#include <cmath>
#include <limits>

#include "upcfekete/polyspace.hpp"

using namespace upcfekete;
using namespace upcfekete::poly;

namespace {

std::vector<Point> reals(std::initializer_list<double> xs) {
  std::vector<Point> out;
  for (double x : xs) out.push_back(Point::real(x));
  return out;
}

}  // namespace

TEST_CASE("multi-index counts and order") {
  CHECK(multi_indices(1, 3).size() == 4);
  CHECK(multi_indices(2, 0).size() == 1);
  const auto idx = multi_indices(2, 2);
  const std::vector<MultiIndex> expected{{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {2, 0}};
  CHECK(idx == expected);
  CHECK(dimension_count(2, 10) == 66);
  CHECK_THROWS_AS(dimension_count(2, 100000), Error);
  CHECK_THROWS_AS(multi_indices(0, 2), Error);
}

TEST_CASE("plain Vandermonde values") {
  const auto b1 = Basis::monomial(1, 1);
  const auto v = vandermonde(b1, reals({0.0, 1.0}));
  CHECK(v.matrix(0, 0) == cplx(1.0));
  CHECK(v.matrix(0, 1) == cplx(1.0));
  CHECK(v.matrix(1, 0) == cplx(0.0));
  CHECK(v.matrix(1, 1) == cplx(1.0));
  CHECK(log_abs_det(v) == doctest::Approx(0.0));

  const auto b2 = Basis::monomial(1, 2);
  CHECK(log_abs_det(vandermonde(b2, reals({-1.0, 0.0, 1.0}))) == doctest::Approx(std::log(2.0)));
  CHECK_THROWS_AS(vandermonde(b2, reals({-1.0, 1.0})), Error);
  CHECK(log_abs_det(vandermonde(b2, reals({-1.0, 1.0, 1.0}))) == -std::numeric_limits<double>::infinity());

  Eigen::MatrixXd one(1, 1);
  one(0, 0) = 1.0;
  CHECK(log_abs_det(one) == 0.0);
  CHECK_THROWS_AS(log_abs_det(Eigen::MatrixXd(2, 3)), Error);
}

TEST_CASE("log|VDM| matches the product formula for up to 12 points") {
  for (int np = 2; np <= 12; ++np) {
    std::vector<double> xs;
    // Perturbed uniform nodes on [-1, 1], gaps stay above half the spacing.
    for (int i = 0; i < np; ++i) xs.push_back(-1.0 + 2.0 * i / (np - 1) + 0.4 / (np - 1) * std::sin(1.7 * i + 0.3));
    std::vector<Point> pts;
    for (double x : xs) pts.push_back(Point::real(x));
    double expected = 0.0;
    for (int i = 0; i < np; ++i)
      for (int j = i + 1; j < np; ++j) expected += std::log(std::abs(xs[j] - xs[i]));
    const auto b = Basis::monomial(1, np - 1);
    CHECK(std::abs(log_abs_det(vandermonde(b, pts)) - expected) < 1e-10);
  }
}

TEST_CASE("weights scale columns") {
  const auto b = Basis::monomial(1, 2);
  const auto pts = reals({-0.7, 0.1, 0.9});
  const double base = log_abs_det(vandermonde(b, pts));
  const Weight c = [](const Point&) { return 0.25; };
  CHECK(log_abs_det(vandermonde(b, pts, c, 2.0)) == doctest::Approx(base - 3 * 2.0 * 0.25));
  CHECK(log_abs_det(vandermonde(b, pts, c, 0.0)) == doctest::Approx(base));
  const Weight phi = [](const Point& z) { return z.x() * z.x(); };
  const Weight phic = [](const Point& z) { return z.x() * z.x() + 1.5; };
  const double a = log_abs_det(vandermonde(b, pts, phi, 3.0));
  CHECK(log_abs_det(vandermonde(b, pts, phic, 3.0)) == doctest::Approx(a - 3.0 * 1.5 * 3).epsilon(1e-14));
}

TEST_CASE("permutations leave log|det| unchanged") {
  const auto b = Basis::monomial(2, 2);
  std::vector<Point> pts{Point::real(0, 0), Point::real(1, 0), Point::real(0, 1),
                         Point::real(1, 1), Point::real(0.5, 0.2), Point::real(0.3, 0.8)};
  const double a = log_abs_det(vandermonde(b, pts));
  std::swap(pts[0], pts[4]);
  std::swap(pts[2], pts[5]);
  CHECK(log_abs_det(vandermonde(b, pts)) == doctest::Approx(a).epsilon(1e-13));
}

TEST_CASE("change of basis shift") {
  const auto m1 = Basis::monomial(1, 1);
  CHECK(change_basis_logdet_shift(m1, m1) == 0.0);
  CHECK(change_basis_logdet_shift(m1, Basis::monomial(1, 1, Point::real(0.4))) == 0.0);
  const auto box = geometry::CompactSet::interval(-1, 1).bounds();
  CHECK(change_basis_logdet_shift(Basis::monomial(1, 2), Basis::chebyshev(1, 2, box)) ==
        doctest::Approx(std::log(2.0)));
  CHECK_THROWS_AS(change_basis_logdet_shift(Basis::monomial(1, 2), Basis::monomial(1, 3)), Error);

  // Shift is independent of the point set, including on a shifted 2-D box.
  const auto sq = geometry::CompactSet::box({0, 0}, {1, 1});
  const auto cheb = Basis::chebyshev(2, 3, sq.bounds());
  const auto mono = Basis::monomial(2, 3);
  const double shift = change_basis_logdet_shift(mono, cheb);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<Point> pts;
    for (int i = 0; i < 10; ++i)
      pts.push_back(Point::real(std::fmod(0.137 * (i + 1) * (trial + 2), 1.0), std::fmod(0.291 * (i * i + 1) + 0.1 * trial, 1.0)));
    const double diff = log_abs_det(vandermonde(cheb, pts)) - log_abs_det(vandermonde(mono, pts));
    CHECK(diff == doctest::Approx(shift).epsilon(1e-9));
  }
}

TEST_CASE("real and complex evaluation agree on real points") {
  const auto b = Basis::chebyshev(2, 4, geometry::CompactSet::box({-1, 0}, {2, 1}).bounds());
  const auto pts = std::vector<Point>{Point::real(0.3, 0.7), Point::real(-0.9, 0.2)};
  const auto r = evaluation_matrix<double>(b, pts);
  const auto c = evaluation_matrix<cplx>(b, pts);
  CHECK((r.cast<cplx>() - c).norm() < 1e-14);
}
