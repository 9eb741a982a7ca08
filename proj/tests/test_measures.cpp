#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "upcfekete/error.hpp"
#include "upcfekete/measures.hpp"

using namespace upcfekete;
using namespace upcfekete::measures;

namespace {

constexpr double kPi = std::numbers::pi;

MeasureDescriptor atoms_1d(std::vector<double> xs, std::vector<double> ws = {}) {
  std::vector<Point> pts;
  for (double x : xs) pts.push_back(Point::real(x));
  if (ws.empty()) return MeasureDescriptor::from_discrete(uniform_measure(pts));
  return MeasureDescriptor::from_discrete(make_discrete(pts, ws));
}

// brute-force assignment for equal-size uniform measures
double assignment_cost(const std::vector<Point>& a, const std::vector<Point>& b) {
  std::vector<std::size_t> perm(b.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  double best = 1e300;
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) c += dist2(a[i], b[perm[i]]);
    best = std::min(best, c / static_cast<double>(a.size()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double arcsine_cdf(double x) { return x <= -1 ? 0.0 : x >= 1 ? 1.0 : 0.5 + std::asin(x) / kPi; }

}  // namespace

TEST_CASE("arcsine CDF values") {
  const auto m = MeasureDescriptor::arcsine(-1, 1);
  CHECK(m.cdf(0.0) == doctest::Approx(0.5));
  CHECK(m.cdf(0.5) == doctest::Approx(2.0 / 3.0));
  CHECK(m.cdf(-2.0) == 0.0);
  CHECK(m.cdf(1.0) == 1.0);
}

TEST_CASE("closed forms by set type") {
  const auto iv = equilibrium_closed_form(geometry::CompactSet::interval(2, 6));
  CHECK(iv.kind == MeasureKind::Arcsine);
  CHECK(iv.a == 2.0);
  const auto dk = equilibrium_closed_form(geometry::CompactSet::disk(cplx(1, 1), 2.0));
  CHECK(dk.kind == MeasureKind::UniformCircle);
  CHECK(dk.radius == 2.0);
  try {
    equilibrium_closed_form(geometry::CompactSet::box({0, 0}, {1, 1}));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == "measures.no_closed_form");
  }
}

TEST_CASE("discrete measure validation") {
  CHECK_THROWS_AS(make_discrete({Point::real(0), Point::real(1)}, {0.5, 0.6}), Error);
  CHECK_THROWS_AS(make_discrete({Point::real(0), Point::real(0)}, {0.5, 0.5}), Error);
  CHECK_THROWS_AS(make_discrete({Point::real(0)}, {-1.0}), Error);
}

TEST_CASE("W1 between point masses on the line") {
  CHECK(wasserstein1_1d(atoms_1d({0}), atoms_1d({1})) == doctest::Approx(1.0));
  CHECK(wasserstein1_1d(atoms_1d({0, 1}), atoms_1d({0.5})) == doctest::Approx(0.5));
  CHECK(wasserstein1_1d(atoms_1d({0, 1}, {0.25, 0.75}), atoms_1d({0, 1})) == doctest::Approx(0.25));
}

TEST_CASE("W1 to the arcsine law matches dense quadrature") {
  const auto mu2 = atoms_1d({-1, 0, 1});
  const auto arc = MeasureDescriptor::arcsine(-1, 1);
  const int n = 1000000;
  double oracle = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = -1.0 + (i + 0.5) * 2.0 / n;
    const double F = x < 0 ? 1.0 / 3 : 2.0 / 3;
    oracle += std::abs(F - arcsine_cdf(x)) * 2.0 / n;
  }
  const double w = wasserstein1_1d(mu2, arc);
  CHECK(w == doctest::Approx(oracle).epsilon(1e-6));
  CHECK(wasserstein1(arc, mu2).method == "line");

  // scale covariance: everything is stretched by (b - a)/2
  const auto mu2s = atoms_1d({2, 4, 6});
  CHECK(wasserstein1_1d(mu2s, MeasureDescriptor::arcsine(2, 6)) == doctest::Approx(2.0 * w).epsilon(1e-12));
}

TEST_CASE("arcsine against arcsine uses quadrature") {
  const auto a = MeasureDescriptor::arcsine(-1, 1), b = MeasureDescriptor::arcsine(-1, 2);
  const auto w = wasserstein1(a, b);
  CHECK(w.method == "line-quadrature");
  // W1 = int |G^{-1}_a - G^{-1}_b| over quantiles = |mean difference| here
  // (quantile functions are ordered), i.e. 0.5
  CHECK(w.value == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("triangle inequality on deterministic triples") {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> pos(-2.0, 2.0), wt(0.1, 1.0);
  auto random_measure = [&] {
    const int k = 1 + static_cast<int>(rng() % 6);
    std::vector<double> xs, ws;
    double s = 0.0;
    for (int i = 0; i < k; ++i) {
      xs.push_back(pos(rng));
      ws.push_back(wt(rng));
      s += ws.back();
    }
    for (auto& w : ws) w /= s;
    double fix = 1.0;
    for (int i = 0; i + 1 < k; ++i) fix -= ws[static_cast<std::size_t>(i)];
    ws.back() = fix;
    return atoms_1d(xs, ws);
  };
  for (int t = 0; t < 100; ++t) {
    const auto a = random_measure(), b = random_measure(), c = random_measure();
    CHECK(wasserstein1_1d(a, c) <= wasserstein1_1d(a, b) + wasserstein1_1d(b, c) + 1e-12);
  }
}

TEST_CASE("circle W1 of equispaced points") {
  for (int d : {3, 8, 20}) {
    std::vector<Point> pts;
    for (int k = 0; k <= d; ++k) pts.push_back(Point::complex(std::polar(1.0, 2 * kPi * k / (d + 1) + 0.3)));
    const auto mu = MeasureDescriptor::from_discrete(uniform_measure(pts));
    const auto ref = MeasureDescriptor::uniform_circle(0.0, 1.0);
    CHECK(wasserstein1_1d(mu, ref) == doctest::Approx(kPi / (2.0 * (d + 1))).epsilon(1e-9));
    const auto g = dist_gamma(mu, ref, 1.0);
    CHECK(g.lower <= g.upper);
    CHECK(g.upper - g.lower <= 0.5 * g.upper);
  }
  // radius scales the distance
  std::vector<Point> pts;
  for (int k = 0; k < 4; ++k) pts.push_back(Point::complex(std::polar(3.0, kPi * k / 2)));
  CHECK(wasserstein1_1d(MeasureDescriptor::from_discrete(uniform_measure(pts)),
                        MeasureDescriptor::uniform_circle(0.0, 3.0)) == doctest::Approx(3 * kPi / 8));
}

TEST_CASE("disk atoms use the projection bound") {
  const auto mu = MeasureDescriptor::from_discrete(uniform_measure({Point::complex(0.5), Point::complex(-1.0)}));
  const auto w = wasserstein1(mu, MeasureDescriptor::uniform_circle(0.0, 1.0));
  CHECK(w.method == "circle+projection");
  CHECK(w.value >= 0.25);
}

TEST_CASE("optimal transport against exhaustive assignment") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    std::vector<Point> a, b;
    for (int i = 0; i < 6; ++i) {
      a.push_back(Point::real(u(rng), u(rng)));
      b.push_back(Point::real(u(rng), u(rng)));
    }
    const auto r = optimal_transport(uniform_measure(a), uniform_measure(b));
    CHECK(r.cost == doctest::Approx(assignment_cost(a, b)).epsilon(1e-12));
    // dual feasibility with equality on the plan
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j)
        CHECK(r.source_potential[i] - r.target_potential[j] <= dist2(a[i], b[j]) + 1e-9);
  }
  CHECK(optimal_transport(uniform_measure({Point::real(0, 0)}), uniform_measure({Point::real(3, 4)})).cost ==
        doctest::Approx(5.0));
  // unequal sizes: embedded line points agree with the 1-D formula
  std::vector<Point> a, b;
  std::vector<double> xa{0.1, 0.7, 0.2}, xb{0.0, 0.3, 0.5, 0.9, 1.0};
  for (double x : xa) a.push_back(Point::real(x, 0.0));
  for (double x : xb) b.push_back(Point::real(x, 0.0));
  CHECK(optimal_transport(uniform_measure(a), uniform_measure(b)).cost ==
        doctest::Approx(wasserstein1_1d(atoms_1d(xa), atoms_1d(xb))).epsilon(1e-12));
}

TEST_CASE("dist_gamma bracket") {
  const auto arc = MeasureDescriptor::arcsine(-1, 1);
  const auto mu = atoms_1d({-1, -0.5, 0.5, 1});
  for (double gamma : {0.25, 0.5, 1.0, 1.5, 2.0}) {
    const auto g = dist_gamma(mu, arc, gamma);
    CHECK(g.lower > 0.0);
    CHECK(g.lower <= g.upper);
    CHECK(g.gamma_above_one == (gamma > 1.0));
  }
  CHECK(dist_gamma(mu, arc, 1.5).upper == dist_gamma(mu, arc, 1.0).upper);
  CHECK(dist_gamma(mu, arc, 0.5).upper == doctest::Approx(std::sqrt(dist_gamma(mu, arc, 1.0).upper)));
  const auto same = dist_gamma(mu, mu, 1.0);
  CHECK(same.lower == 0.0);
  CHECK(same.upper == 0.0);
  try {
    dist_gamma(mu, arc, 3.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == "measures.input");
    CHECK(std::string(e.what()).find("(0,2]") != std::string::npos);
  }
  // the transport potential makes the gamma = 1 bracket tight on the line
  const auto g1 = dist_gamma(mu, arc, 1.0);
  CHECK(g1.best_test == "transport-potential");
  CHECK(g1.upper - g1.lower <= 0.5 * g1.upper);

  // point masses in the plane
  const auto p = MeasureDescriptor::from_discrete(uniform_measure({Point::real(0, 0), Point::real(1, 0)}));
  const auto q = MeasureDescriptor::from_discrete(uniform_measure({Point::real(0, 1), Point::real(1, 1)}));
  const auto gp = dist_gamma(p, q, 1.0);
  CHECK(gp.upper == doctest::Approx(1.0));
  CHECK(gp.lower <= gp.upper);
  CHECK(gp.lower >= 0.3);
}

TEST_CASE("empirical references") {
  ReferenceOptions opts;
  const auto iv = geometry::CompactSet::interval(-1, 1);
  const auto ref = empirical_reference(iv, 40, opts);
  REQUIRE(ref.quality);
  CHECK(ref.kind == MeasureKind::EmpiricalReference);
  CHECK(ref.discrete.atoms.size() == 41);
  const auto arc = MeasureDescriptor::arcsine(-1, 1);
  const auto low = empirical_reference(iv, 10, opts);
  CHECK(wasserstein1_1d(ref, arc) < wasserstein1_1d(low, arc));

  const auto sq = geometry::CompactSet::box({0, 0}, {1, 1});
  const auto sref = empirical_reference(sq, 20, opts);
  REQUIRE(sref.quality);
  CHECK(sref.discrete.atoms.size() == 231);
  CHECK(sref.quality->half_degree == 10);
  CHECK(sref.quality->self_distance > 0.0);
  CHECK(sref.quality->mesh_capped);
  CHECK_THROWS_AS(empirical_reference(iv, 1, opts), Error);
}
