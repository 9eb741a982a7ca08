#include <doctest.h>

#include <cmath>

#include "upcfekete/error.hpp"
#include "upcfekete/geometry.hpp"

using namespace upcfekete;
using namespace upcfekete::geometry;

TEST_CASE("membership of model sets") {
  const auto iv = CompactSet::interval(-1, 1);
  CHECK(iv.contains(Point::real(0.0)));
  CHECK(iv.contains(Point::real(1.0)));
  CHECK_FALSE(iv.contains(Point::real(1.01)));
  CHECK_THROWS_AS(iv.contains(Point::real(0.0, 0.0)), Error);

  const auto cusp = CompactSet::power_cusp(1, 2, 1);
  CHECK_FALSE(cusp.contains(Point::real(0.5, 0.3)));
  CHECK(cusp.contains(Point::real(0.5, 0.25)));
  CHECK(cusp.contains(Point::real(0.0, 0.0)));

  const auto disk = CompactSet::disk(0.0, 1.0);
  CHECK(disk.contains(Point::complex(cplx(0.6, 0.8))));
  CHECK_FALSE(disk.contains(Point::complex(cplx(0.8, 0.8))));

  const auto comb = CompactSet::comb_default();
  CHECK(comb.contains(Point::real(0.6, 0.5)));
  CHECK_FALSE(comb.contains(Point::real(0.1, 0.5)));
  CHECK(comb.contains(Point::real(0.9, -0.5)));
}

TEST_CASE("interval mesh of degree 2 has 9 points with both endpoints") {
  const auto m = generate_mesh(CompactSet::interval(-1, 1), 2, 1.0);
  CHECK(m.points.size() == 9);
  CHECK(m.points.front().x() == -1.0);
  CHECK(m.points.back().x() == 1.0);
  CHECK(m.max_valid_degree == 2);
  CHECK_THROWS_AS(generate_mesh(CompactSet::interval(-1, 1), 0, 1.0), Error);
  CHECK_THROWS_AS(generate_mesh(CompactSet::interval(-1, 1), 2, 0.5), Error);
}

TEST_CASE("meshes respect membership and are deterministic") {
  const auto disk = CompactSet::disk(0.0, 1.0);
  const auto md = generate_mesh(disk, 1, 1.0);
  for (const auto& p : md.points) CHECK(std::abs(p[0]) <= 1.0 + 1e-12);

  const auto cusp = CompactSet::power_cusp(1, 2, 1);
  const auto mc = generate_mesh(cusp, 3, 1.0);
  for (const auto& p : mc.points) CHECK(std::abs(p.x(1)) <= p.x(0) * p.x(0) + 1e-12);
  const auto mc2 = generate_mesh(cusp, 3, 1.0);
  CHECK(mc.points == mc2.points);

  for (std::size_t i = 0; i < mc.points.size(); ++i)
    for (std::size_t j = i + 1; j < mc.points.size(); ++j) REQUIRE_FALSE(mc.points[i] == mc.points[j]);
}

TEST_CASE("cusp samples at t = 0 collapse to the anchor") {
  const auto iv = CompactSet::interval(0, 1);
  const auto u = builtin_descriptor(iv);
  const double ts[] = {0.0};
  const auto ws = unit_cube_grid(1, Ambient::Real, 16);
  const auto pts = cusp_set_samples(u, Point::real(0.3), ts, ws);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0] == Point::real(0.3));
}

TEST_CASE("interval family h_0(t) = t/2 reaches 1 at t = 1") {
  const auto u = builtin_descriptor(CompactSet::interval(0, 1));
  CHECK(u.M() == 0.5);
  CHECK(u.m() == 1);
  const double ts[] = {1.0};
  const Point ws[] = {Point::real(1.0)};
  const auto pts = cusp_set_samples(u, Point::real(0.0), ts, ws);
  CHECK(pts[0].x() == doctest::Approx(1.0));
}

TEST_CASE("power cusp samples satisfy |y| <= x^2") {
  // No model attached: for t near 1 the first coordinate t + t^2/4 passes the
  // extent, so only the defining inequality of the cusp is checked.
  AffineTerm t0, t1;
  t0.linear = {{{1.0, 0.0}, {0.0, 1.0}}};
  t0.offset = Point::real(0.0, 0.0);
  t1.offset = Point::real(1.0, 0.0);
  const UpcDescriptor u(0.25, 2, {t0, t1}, 2, Ambient::Real);
  const auto ts = t_grid(1.0, 64);
  const auto ws = unit_cube_grid(2, Ambient::Real, 16);
  const auto pts = cusp_set_samples(u, Point::real(0.0, 0.0), ts, ws);
  for (const auto& p : pts) CHECK(std::abs(p.x(1)) <= p.x(0) * p.x(0) + 1e-12);
}

TEST_CASE("pyramid radius for the interval family is 1/3") {
  const auto iv = CompactSet::interval(0, 1);
  const auto u = builtin_descriptor(iv);
  const auto anchors = generate_mesh(iv, 4, 1.0).points;
  const auto ws = unit_cube_grid(1, Ambient::Real, 16);
  const auto img = pyramid_image(u, Point::real(0.0), 1.0, anchors, 64, ws);
  CHECK(img.r_prime == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(img.samples.front().x == Point::real(0.0));
  CHECK_THROWS_AS(pyramid_image(u, Point::real(0.0), 1.5, anchors, 64, ws), Error);
  CHECK_THROWS_AS(pyramid_image(u, Point::real(0.0), 0.0, anchors, 64, ws), Error);

  // r'/r does not depend on the anchor
  const auto other = pyramid_image(u, Point::real(0.7), 0.5, anchors, 8, ws);
  CHECK(other.r_prime / 0.5 == doctest::Approx(img.r_prime));
}

TEST_CASE("cusp inclusion holds for valid descriptors and fails when M is doubled") {
  const auto iv = CompactSet::interval(0, 1);
  const auto u = builtin_descriptor(iv);
  const auto anchors = generate_mesh(iv, 4, 1.0).points;
  const auto ws = unit_cube_grid(1, Ambient::Real, 16);
  for (const auto& a : anchors) CHECK(check_cusp_inclusion(u, a, 1.0, anchors, 64, ws).ok);
  CHECK(check_cusp_inclusion(u, Point::real(0.0), 1.0, anchors, 1, ws).ok);

  const auto bad = check_cusp_inclusion(u.with_M(1.0), Point::real(0.0), 1.0, anchors, 64, ws);
  CHECK_FALSE(bad.ok);
  CHECK_FALSE(bad.witnesses.empty());

  const auto cusp = CompactSet::power_cusp(1, 2, 1);
  const auto uc = builtin_descriptor(cusp);
  const auto canchors = generate_mesh(cusp, 2, 1.0).points;
  const auto ws2 = unit_cube_grid(2, Ambient::Real, 16);
  for (const auto& a : canchors) {
    const auto rep = check_cusp_inclusion(uc, a, 1.0, canchors, 64, ws2);
    CHECK(rep.ok);
  }
}

TEST_CASE("coefficient bounds") {
  const auto iv = CompactSet::interval(0, 1);
  const auto anchors = generate_mesh(iv, 4, 1.0).points;
  AffineTerm c0;
  c0.linear = {{{1.0, 0.0}, {0.0, 0.0}}};
  c0.offset = Point::real(0.0);
  const UpcDescriptor constant(1.0, 1, {c0}, 1, Ambient::Real);
  const auto b0 = coefficient_bound(constant, anchors);
  CHECK(b0.per_degree == std::vector<double>{1.0});

  const auto b1 = coefficient_bound(builtin_descriptor(iv), anchors);
  REQUIRE(b1.per_degree.size() == 2);
  CHECK(b1.per_degree[0] == doctest::Approx(1.0));
  CHECK(b1.per_degree[1] == doctest::Approx(0.5));

  // A fixed degree-3 family with irregular coefficients.
  std::vector<AffineTerm> terms(4);
  const double lin[4] = {1.0, -0.37, 0.81, -0.12};
  const double off[4] = {0.0, 0.43, -0.29, 0.055};
  for (int k = 0; k < 4; ++k) {
    terms[static_cast<std::size_t>(k)].linear = {{{lin[k], 0.0}, {0.0, 0.0}}};
    terms[static_cast<std::size_t>(k)].offset = Point::real(off[k]);
  }
  const UpcDescriptor cubic(0.1, 1, terms, 1, Ambient::Real);
  const auto b3 = coefficient_bound(cubic, anchors);
  CHECK(b3.max_roundtrip_error < 1e-8);
  CHECK_THROWS_AS(coefficient_bound(cubic, std::span<const Point>(anchors).first(2)), Error);
}

TEST_CASE("built-in descriptors validate") {
  for (const auto& set : {CompactSet::interval(-1, 1), CompactSet::box({0, 0}, {1, 1}), CompactSet::disk(0.0, 1.0),
                          CompactSet::power_cusp(1, 2, 1)}) {
    const auto u = builtin_descriptor(set);
    const auto anchors = generate_mesh(set, 2, 1.0).points;
    const auto rep = validate_upc(u, anchors, UpcSampling{});
    CHECK_MESSAGE(rep.ok, set.kind_name());
    CHECK(rep.min_ratio >= u.M() - 1e-12);
  }
  CHECK_THROWS_AS(builtin_descriptor(CompactSet::comb_default()), Error);
}

TEST_CASE("mesh defect on the interval") {
  const auto iv = CompactSet::interval(-1, 1);
  const auto m = generate_mesh(iv, 8, 1.0);
  const double eps = mesh_defect(iv, m, 8);
  CHECK(eps > 0.0);
  CHECK(eps < 0.1);
  CHECK(std::isinf(mesh_defect(iv, uniform_interval_mesh(-1, 1, 5, 8), 8)));
}
