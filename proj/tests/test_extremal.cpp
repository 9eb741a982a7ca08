#include <doctest.h>

#include <cmath>

#include "upcfekete/error.hpp"
#include "upcfekete/extremal.hpp"

using namespace upcfekete;
using namespace upcfekete::extremal;

namespace {

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
  return out;
}

}  // namespace

TEST_CASE("interval Green's function oracle") {
  CHECK(interval_green(2.0) == doctest::Approx(std::log(2.0 + std::sqrt(3.0))));
  CHECK(interval_green(-2.0) == doctest::Approx(std::log(2.0 + std::sqrt(3.0))));
  CHECK(interval_green(0.3) == doctest::Approx(0.0));
  CHECK(interval_green(cplx(0, 2)) == doctest::Approx(std::asinh(2.0)));
}

TEST_CASE("brackets on [-1,1] at d = 8 contain the Green's function within slack") {
  const auto iv = geometry::CompactSet::interval(-1, 1);
  const auto se = estimate_for_set(iv, 8, 1.0);
  const double slack = se.slack();
  CHECK(slack == doctest::Approx(std::log(9.0) / 8 + se.mesh_defect));
  for (cplx z : {cplx(1.5), cplx(2.0), cplx(3.0), cplx(0.0, 2.0)}) {
    const auto b = se.estimate.bracket(Point::complex(z));
    const double L = interval_green(z);
    CHECK(b.lower <= b.upper + 1e-9);
    CHECK(b.lower - slack <= L);
    CHECK(L <= b.upper + slack);
  }
  // At a node the lower bracket is >= -(1/d) log max ||l_j||, i.e. >= 0 here.
  for (const auto& x : se.estimate.configuration().points) {
    CHECK(se.estimate.lower(x) >= -std::log(se.estimate.max_lagrange_norm()) / 8 - 1e-12);
    CHECK(se.estimate.upper(x) <= slack + 1e-12);
  }
}

TEST_CASE("disk brackets contain log|z| outside") {
  const auto disk = geometry::CompactSet::disk(0.0, 1.0);
  for (int d : {2, 4, 6}) {
    const auto se = estimate_for_set(disk, d, 1.0);
    for (cplx z : {cplx(0, 2), cplx(2, 0), cplx(-1.2, 1.6)}) {
      const auto b = se.estimate.bracket(Point::complex(z));
      CHECK(b.lower - se.slack() <= std::log(2.0));
      CHECK(std::log(2.0) <= b.upper + se.slack());
      CHECK(std::abs(b.upper - std::log(2.0)) <= se.slack());
    }
  }
}

TEST_CASE("bigger sets have smaller extremal functions") {
  const auto small = geometry::CompactSet::interval(-0.5, 0.5);
  const auto big = geometry::CompactSet::interval(-1, 1);
  const auto s = estimate_for_set(small, 6, 1.0);
  const auto b = estimate_for_set(big, 6, 1.0);
  for (double x : {0.7, 1.5, 3.0})
    CHECK(b.estimate.upper(Point::complex(x)) <= s.estimate.upper(Point::complex(x)) + s.slack() + b.slack());
}

TEST_CASE("one-shot bracket agrees with the estimate object") {
  const auto iv = geometry::CompactSet::interval(-1, 1);
  const auto se = estimate_for_set(iv, 5, 1.0);
  const auto b1 = extremal_bracket(se.estimate.configuration(), se.mesh, Point::complex(2.0));
  const auto b2 = se.estimate.bracket(Point::complex(2.0));
  CHECK(b1.lower == doctest::Approx(b2.lower).epsilon(1e-9));
  CHECK(b1.upper == doctest::Approx(b2.upper).epsilon(1e-9));
}

TEST_CASE("modulus samples are monotone and shrink towards the slack") {
  const auto iv = geometry::CompactSet::interval(-1, 1);
  const auto deltas = log_grid(1e-4, 1e-1, 10);
  const auto ms = modulus_of_continuity(iv, Point::real(1.0), 1.0, deltas, 16);
  CHECK(ms.values.front() >= 0.0);
  for (std::size_t i = 1; i < ms.values.size(); ++i) CHECK(ms.values[i] >= ms.values[i - 1]);
  CHECK(ms.values.front() <= std::log(17.0) / 16);
  // endpoint behaviour of order sqrt(delta)
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (deltas[i] < 1e-3) continue;
    const double ratio = ms.values[i] / std::sqrt(deltas[i]);
    CHECK(ratio > 0.5);
    CHECK(ratio < 4.0);
  }
  CHECK_THROWS_AS(modulus_of_continuity(iv, Point::real(2.0), 1.0, deltas, 4), Error);
}

TEST_CASE("thin clipped sets are rejected") {
  const auto cusp = geometry::CompactSet::power_cusp(1, 2, 1);
  try {
    const double deltas[] = {0.01, 0.1};
    modulus_of_continuity(cusp, Point::real(0.0, 0.0), 1e-3, deltas, 6);
    FAIL("expected a degenerate set error");
  } catch (const Error& e) {
    CHECK(e.code() == "extremal.degenerate_set");
  }
}

TEST_CASE("HCP fit recovers an exact model") {
  std::vector<ModulusSamples> samples;
  for (double r : {1.0, 0.5, 0.25}) {
    ModulusSamples s;
    s.r = r;
    s.deltas = log_grid(1e-3, 1e-1, 6);
    for (double d : s.deltas) s.values.push_back(2.0 * std::sqrt(d) / (r * r));
    samples.push_back(s);
  }
  const auto fit = hcp_fit(samples);
  CHECK(std::abs(fit.C - 2.0) < 1e-6);
  CHECK(std::abs(fit.mu - 0.5) < 1e-6);
  CHECK(std::abs(fit.q - 2.0) < 1e-6);
  CHECK(fit.max_residual < 1e-10);

  samples[0].values[0] = 0.0;
  CHECK(hcp_fit(samples).excluded == 1);
  CHECK_THROWS_AS(hcp_fit(std::span<const ModulusSamples>(samples).first(1)), Error);
}

TEST_CASE("HCP exponent at the interval endpoint is about 1/2, and the cusp tip is no better") {
  const auto iv = geometry::CompactSet::interval(-1, 1);
  const auto deltas = log_grid(1e-3, 1e-1, 12);
  std::vector<ModulusSamples> ms;
  for (double r : {1.0, 0.5}) ms.push_back(modulus_of_continuity(iv, Point::real(1.0), r, deltas, 48));
  const auto fit = hcp_fit(ms);
  CHECK(fit.mu >= 0.4);
  CHECK(fit.mu <= 0.6);

  std::vector<ModulusSamples> iv8, cusp8;
  const auto cusp = geometry::CompactSet::power_cusp(1, 2, 1);
  for (double r : {1.0, 0.5}) {
    iv8.push_back(modulus_of_continuity(iv, Point::real(1.0), r, deltas, 6));
    cusp8.push_back(modulus_of_continuity(cusp, Point::real(0.0, 0.0), r, deltas, 6));
  }
  CHECK(hcp_fit(cusp8).mu <= hcp_fit(iv8).mu);
}

TEST_CASE("polynomial image inequality") {
  const auto iv = geometry::CompactSet::interval(-1, 1);
  const PolynomialMap square{2, [](const Point& z) { return Point::complex(z[0] * z[0]); }};
  const std::vector<Point> ws{Point::complex(2.0), Point::complex(1.3), Point::complex(cplx(0.2, 0.9)),
                              Point::complex(cplx(-1.5, 0.4))};
  const auto rep = check_polynomial_image_inequality(iv, square, ws, 8, 8.0);
  CHECK(rep.ok);
  CHECK(std::isfinite(rep.worst_margin));
  // both sides are log(7 + 4 sqrt 3) for the true extremal functions
  CHECK(rep.rows[0].lhs <= std::log(7 + 4 * std::sqrt(3.0)) + 1e-9);

  const PolynomialMap id{1, [](const Point& z) { return z; }};
  CHECK(check_polynomial_image_inequality(iv, id, ws, 6).ok);

  const PolynomialMap constant{1, [](const Point&) { return Point::complex(0.5); }};
  try {
    check_polynomial_image_inequality(iv, constant, ws, 4);
    FAIL("expected a degenerate set error");
  } catch (const Error& e) {
    CHECK(e.code() == "extremal.degenerate_set");
  }
}

TEST_CASE("Blocki inequality on the interval") {
  const auto iv = geometry::CompactSet::interval(-1, 1);
  std::vector<std::pair<Point, Point>> pairs{
      {Point::complex(1.1), Point::complex(1.05)},
      {Point::complex(0.4), Point::complex(0.4)},
      {Point::complex(cplx(0.0, 0.5)), Point::complex(cplx(0.3, 0.1))},
      {Point::complex(-1.2), Point::complex(-0.6)},
  };
  const auto rep = check_blocki_inequality(iv, pairs);
  CHECK(rep.ok);
  CHECK(rep.rows[1].lhs == 0.0);
  // the oracle difference at the first pair
  CHECK(std::abs(interval_green(1.1) - interval_green(1.05)) == doctest::Approx(0.12869).epsilon(1e-3));

  std::vector<std::pair<Point, Point>> far{{Point::complex(0.0), Point::complex(2.0)}};
  CHECK_THROWS_AS(check_blocki_inequality(iv, far), Error);
}
