#include "upcfekete/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "upcfekete/error.hpp"

namespace upcfekete::geometry {

namespace {

constexpr double kBoundaryTol = 1e-12;

Error input_error(const std::string& msg) { return Error("geometry", ErrorKind::Input, msg); }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double cross(const std::array<double, 2>& o, const std::array<double, 2>& a, const std::array<double, 2>& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

bool real_coordinates(const Point& z) { return z.is_real(kBoundaryTol); }

// Largest rho in [0, hi] with ok(rho); ok must be monotone (true then false).
template <class Pred>
double bisect_radius(double hi, Pred ok) {
  if (hi <= 0.0) return 0.0;
  if (ok(hi)) return hi;
  double lo = 0.0;
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    if (ok(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

std::string fmt_point(const Point& p) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (int i = 0; i < p.n; ++i) {
    if (i) os << ", ";
    os << p[i].real();
    if (p[i].imag() != 0.0) os << (p[i].imag() < 0 ? "-" : "+") << std::abs(p[i].imag()) << "i";
  }
  os << ")";
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// CompactSet

CompactSet CompactSet::interval(double a, double b) {
  if (!(a < b)) throw input_error("interval requires a < b");
  return CompactSet(Interval{a, b}, 1, Ambient::Real);
}

CompactSet CompactSet::box(std::array<double, 2> lo, std::array<double, 2> hi) {
  if (!(lo[0] < hi[0] && lo[1] < hi[1])) throw input_error("box requires lo < hi on both axes");
  return CompactSet(Box{lo, hi}, 2, Ambient::Real);
}

CompactSet CompactSet::disk(cplx center, double radius) {
  if (!(radius > 0.0)) throw input_error("disk radius must be positive");
  return CompactSet(Disk{center, radius}, 1, Ambient::Complex);
}

CompactSet CompactSet::circle(cplx center, double radius, int mesh_points) {
  if (!(radius > 0.0)) throw input_error("circle radius must be positive");
  if (mesh_points < 0) throw input_error("circle mesh_points must be nonnegative");
  return CompactSet(Circle{center, radius, mesh_points}, 1, Ambient::Complex);
}

CompactSet CompactSet::convex_polygon(std::vector<std::array<double, 2>> vertices) {
  if (vertices.size() < 3) throw input_error("polygon needs at least 3 vertices");
  const std::size_t k = vertices.size();
  for (std::size_t i = 0; i < k; ++i) {
    if (cross(vertices[i], vertices[(i + 1) % k], vertices[(i + 2) % k]) <= 0.0)
      throw input_error("polygon vertices must be strictly convex and counter-clockwise");
  }
  return CompactSet(ConvexPolygon{std::move(vertices)}, 2, Ambient::Real);
}

CompactSet CompactSet::power_cusp(double M, int m, double extent) {
  if (!(M > 0.0) || m < 1 || !(extent > 0.0)) throw input_error("power cusp requires M > 0, m >= 1, extent > 0");
  return CompactSet(PowerCusp{M, m, extent}, 2, Ambient::Real);
}

CompactSet CompactSet::comb(std::vector<double> a, std::vector<double> eps) {
  if (a.size() != eps.size()) throw input_error("comb sequences must have equal length");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] > 0.0 && eps[i] > 0.0)) throw input_error("comb sequences must be positive");
    if (i + 1 < a.size()) {
      if (!(a[i] > a[i + 1] && eps[i] > eps[i + 1])) throw input_error("comb sequences must be strictly decreasing");
      if (!(a[i] - a[i + 1] > eps[i] + eps[i + 1])) throw input_error("comb requires a_k - a_{k+1} > eps_k + eps_{k+1}");
    }
  }
  return CompactSet(Comb{std::move(a), std::move(eps)}, 2, Ambient::Real);
}

CompactSet CompactSet::comb_default(int k_max) {
  if (k_max < 2) throw input_error("comb k_max must be >= 2");
  std::vector<double> a, eps;
  for (int k = 2; k <= k_max; ++k) {
    a.push_back(1.0 / k);
    eps.push_back(0.5 * std::exp(-static_cast<double>(k) * k));
  }
  return comb(std::move(a), std::move(eps));
}

CompactSet CompactSet::union_of(std::vector<CompactSet> parts) {
  if (parts.empty()) throw input_error("union needs at least one part");
  const int n = parts.front().dim();
  const Ambient amb = parts.front().ambient();
  for (const auto& p : parts)
    if (p.dim() != n || p.ambient() != amb) throw input_error("union parts must share dimension and ambient");
  return CompactSet(Union{std::move(parts)}, n, amb);
}

CompactSet CompactSet::ball_clip(const CompactSet& base, const Point& center, double radius) {
  if (!(radius > 0.0)) throw input_error("ball radius must be positive");
  if (center.n != base.dim()) throw input_error("ball center dimension mismatch");
  return CompactSet(BallClip{std::make_shared<const CompactSet>(base), center, radius}, base.dim(), base.ambient());
}

std::string CompactSet::kind_name() const {
  return std::visit(overloaded{[](const Interval&) { return std::string("interval"); },
                               [](const Box&) { return std::string("box"); },
                               [](const Disk&) { return std::string("disk"); },
                               [](const Circle&) { return std::string("circle"); },
                               [](const ConvexPolygon&) { return std::string("polygon"); },
                               [](const PowerCusp&) { return std::string("power_cusp"); },
                               [](const Comb&) { return std::string("comb"); },
                               [](const Union&) { return std::string("union"); },
                               [](const BallClip&) { return std::string("ball_clip"); }},
                    kind_);
}

void CompactSet::check_dim(const Point& z) const {
  if (z.n != dim_) throw input_error("point dimension " + std::to_string(z.n) + " does not match set dimension " +
                                     std::to_string(dim_));
}

bool CompactSet::contains(const Point& z) const {
  check_dim(z);
  if (ambient_ == Ambient::Real && !real_coordinates(z)) return false;
  return std::visit(
      overloaded{
          [&](const Interval& s) {
            const double tol = kBoundaryTol * std::max(1.0, std::max(std::abs(s.a), std::abs(s.b)));
            const double x = z.x();
            return x >= s.a - tol && x <= s.b + tol;
          },
          [&](const Box& s) {
            for (int i = 0; i < 2; ++i) {
              const double tol = kBoundaryTol * std::max(1.0, std::max(std::abs(s.lo[i]), std::abs(s.hi[i])));
              if (z.x(i) < s.lo[i] - tol || z.x(i) > s.hi[i] + tol) return false;
            }
            return true;
          },
          [&](const Disk& s) { return std::abs(z[0] - s.center) <= s.radius * (1.0 + kBoundaryTol); },
          [&](const Circle& s) { return std::abs(std::abs(z[0] - s.center) - s.radius) <= 1e-9 * s.radius; },
          [&](const ConvexPolygon& s) {
            const std::array<double, 2> p{z.x(0), z.x(1)};
            const std::size_t k = s.vertices.size();
            for (std::size_t i = 0; i < k; ++i) {
              const auto& a = s.vertices[i];
              const auto& b = s.vertices[(i + 1) % k];
              const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
              if (cross(a, b, p) < -kBoundaryTol * len * std::max(1.0, len)) return false;
            }
            return true;
          },
          [&](const PowerCusp& s) {
            const double x = z.x(0), y = z.x(1);
            const double tol = kBoundaryTol * std::max(1.0, s.extent);
            if (x < -tol || x > s.extent + tol) return false;
            const double xc = std::clamp(x, 0.0, s.extent);
            return std::abs(y) <= s.M * std::pow(xc, s.m) + tol;
          },
          [&](const Comb& s) {
            const double x = z.x(0), y = z.x(1);
            if (x < -kBoundaryTol || x > 1.0 + kBoundaryTol || y < -1.0 - kBoundaryTol || y > 1.0 + kBoundaryTol)
              return false;
            for (std::size_t i = 0; i < s.a.size(); ++i) {
              if (x < y - kBoundaryTol && std::abs(y - s.a[i]) < s.eps[i] - kBoundaryTol) return false;
            }
            return true;
          },
          [&](const Union& s) {
            return std::any_of(s.parts.begin(), s.parts.end(), [&](const CompactSet& p) { return p.contains(z); });
          },
          [&](const BallClip& s) {
            return s.base->contains(z) && dist2(z, s.center) <= s.radius * (1.0 + kBoundaryTol);
          }},
      kind_);
}

Bounds CompactSet::bounds() const {
  return std::visit(
      overloaded{[](const Interval& s) { return Bounds{1, {s.a, 0.0}, {s.b, 0.0}}; },
                 [](const Box& s) { return Bounds{2, s.lo, s.hi}; },
                 [](const Disk& s) {
                   return Bounds{2,
                                 {s.center.real() - s.radius, s.center.imag() - s.radius},
                                 {s.center.real() + s.radius, s.center.imag() + s.radius}};
                 },
                 [](const Circle& s) {
                   return Bounds{2,
                                 {s.center.real() - s.radius, s.center.imag() - s.radius},
                                 {s.center.real() + s.radius, s.center.imag() + s.radius}};
                 },
                 [](const ConvexPolygon& s) {
                   Bounds b{2, {s.vertices[0][0], s.vertices[0][1]}, {s.vertices[0][0], s.vertices[0][1]}};
                   for (const auto& v : s.vertices)
                     for (int i = 0; i < 2; ++i) {
                       b.lo[i] = std::min(b.lo[i], v[i]);
                       b.hi[i] = std::max(b.hi[i], v[i]);
                     }
                   return b;
                 },
                 [](const PowerCusp& s) {
                   const double h = s.M * std::pow(s.extent, s.m);
                   return Bounds{2, {0.0, -h}, {s.extent, h}};
                 },
                 [](const Comb&) { return Bounds{2, {0.0, -1.0}, {1.0, 1.0}}; },
                 [](const Union& s) {
                   Bounds b = s.parts.front().bounds();
                   for (const auto& p : s.parts) {
                     const Bounds q = p.bounds();
                     for (int i = 0; i < b.axes; ++i) {
                       b.lo[i] = std::min(b.lo[i], q.lo[i]);
                       b.hi[i] = std::max(b.hi[i], q.hi[i]);
                     }
                   }
                   return b;
                 },
                 [](const BallClip& s) {
                   Bounds b = s.base->bounds();
                   std::array<double, 2> c{};
                   if (s.base->is_real()) {
                     for (int i = 0; i < b.axes; ++i) c[i] = s.center.x(i);
                   } else {
                     c = {s.center[0].real(), s.center[0].imag()};
                   }
                   for (int i = 0; i < b.axes; ++i) {
                     b.lo[i] = std::max(b.lo[i], c[i] - s.radius);
                     b.hi[i] = std::min(b.hi[i], c[i] + s.radius);
                   }
                   if (b.hi[0] < b.lo[0] || (b.axes > 1 && b.hi[1] < b.lo[1]))
                     throw Error("geometry", ErrorKind::DegenerateSet, "ball does not meet the set");
                   return b;
                 }},
      kind_);
}

double CompactSet::cube_inradius(const Point& p) const {
  check_dim(p);
  if (ambient_ == Ambient::Real && !real_coordinates(p)) return -1.0;
  return std::visit(
      overloaded{
          [&](const Interval& s) { return std::min(p.x() - s.a, s.b - p.x()); },
          [&](const Box& s) {
            return std::min({p.x(0) - s.lo[0], s.hi[0] - p.x(0), p.x(1) - s.lo[1], s.hi[1] - p.x(1)});
          },
          [&](const Disk& s) { return s.radius - std::abs(p[0] - s.center); },
          [&](const Circle& s) { return -std::abs(std::abs(p[0] - s.center) - s.radius); },
          [&](const ConvexPolygon& s) {
            const std::size_t k = s.vertices.size();
            double rho = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < k; ++i) {
              const auto& a = s.vertices[i];
              const auto& b = s.vertices[(i + 1) % k];
              const double ex = b[0] - a[0], ey = b[1] - a[1];
              const double len = std::hypot(ex, ey);
              const double nx = -ey / len, ny = ex / len;  // inward for CCW order
              const double signed_dist = nx * (p.x(0) - a[0]) + ny * (p.x(1) - a[1]);
              rho = std::min(rho, signed_dist / (std::abs(nx) + std::abs(ny)));
            }
            return rho;
          },
          [&](const PowerCusp& s) {
            const double x = p.x(0), y = p.x(1);
            if (!contains(p)) return -1.0;
            return bisect_radius(std::min(x, s.extent - x), [&](double rho) {
              return std::abs(y) + rho <= s.M * std::pow(std::max(0.0, x - rho), s.m);
            });
          },
          [&](const Comb&) {
            if (!contains(p)) return -1.0;
            // Sampled square containment; the teeth are axis-aligned strips,
            // so a 9x9 probe plus the strip edges is exact for them.
            return bisect_radius(1.0, [&](double rho) {
              for (int i = 0; i <= 8; ++i)
                for (int j = 0; j <= 8; ++j) {
                  Point q = Point::real(p.x(0) - rho + rho * i / 4.0, p.x(1) - rho + rho * j / 4.0);
                  if (!contains(q)) return false;
                }
              return true;
            });
          },
          [&](const Union& s) {
            double rho = -std::numeric_limits<double>::infinity();
            for (const auto& part : s.parts) rho = std::max(rho, part.cube_inradius(p));
            return rho;
          },
          [&](const BallClip& s) {
            // A cube (polydisc) of radius rho has Euclidean circumradius rho sqrt(n).
            const double ball = (s.radius - dist2(p, s.center)) / std::sqrt(static_cast<double>(dim_));
            return std::min(s.base->cube_inradius(p), ball);
          }},
      kind_);
}

// ---------------------------------------------------------------------------
// Meshes

CandidateMesh generate_mesh(const CompactSet& set, int degree, double density, int max_intervals) {
  if (degree < 1) throw input_error("mesh degree must be >= 1");
  if (!(density >= 1.0)) throw input_error("mesh density factor must be >= 1");
  const double d2 = static_cast<double>(degree) * degree;

  if (const auto* c = std::get_if<Circle>(&set.kind())) {
    const double h = c->radius / (density * d2);
    int count = c->mesh_points > 0 ? c->mesh_points
                                    : static_cast<int>(std::ceil(2.0 * std::numbers::pi * c->radius / h));
    const bool capped = c->mesh_points == 0 && max_intervals > 0 &&
                        count > static_cast<int>(std::ceil(std::numbers::pi * max_intervals));
    if (capped) count = static_cast<int>(std::ceil(std::numbers::pi * max_intervals));
    auto mesh = roots_of_unity_mesh(c->center, c->radius, count, degree);
    mesh.capped = capped;
    return mesh;
  }

  const Bounds b = set.bounds();
  int k = static_cast<int>(std::ceil(2.0 * density * d2));
  CandidateMesh mesh;
  mesh.max_valid_degree = degree;
  if (max_intervals > 0 && k > max_intervals) {
    k = max_intervals;
    mesh.capped = true;
  }
  for (int i = 0; i < b.axes; ++i) mesh.spacing = std::max(mesh.spacing, b.side(i) / k);

  auto coord = [&](int axis, int j) {
    if (j == k) return b.hi[axis];
    return b.lo[axis] + b.side(axis) * static_cast<double>(j) / k;
  };

  const Disk* disk = std::get_if<Disk>(&set.kind());
  if (b.axes == 1) {
    for (int j = 0; j <= k; ++j) {
      Point p = Point::real(coord(0, j));
      if (set.contains(p)) mesh.points.push_back(p);
    }
  } else {
    for (int i = 0; i <= k; ++i)
      for (int j = 0; j <= k; ++j) {
        const double x = coord(0, i), y = coord(1, j);
        Point p = set.is_real() ? Point::real(x, y) : Point::complex(cplx(x, y));
        if (disk && std::abs(p[0] - disk->center) >= disk->radius * (1.0 - kBoundaryTol)) continue;
        if (set.contains(p)) mesh.points.push_back(p);
      }
  }
  if (disk) {
    // ring step equal to the grid step side/k
    const int count = static_cast<int>(std::ceil(std::numbers::pi * k));
    const auto ring = roots_of_unity_mesh(disk->center, disk->radius, count, degree);
    mesh.points.insert(mesh.points.end(), ring.points.begin(), ring.points.end());
  }
  if (mesh.points.empty())
    throw Error("geometry", ErrorKind::DegenerateSet,
                "mesh is empty: set " + set.kind_name() + " too thin for spacing " + std::to_string(mesh.spacing));
  return mesh;
}

CandidateMesh uniform_interval_mesh(double a, double b, int count, int max_valid_degree) {
  if (count < 2 || !(a < b)) throw input_error("uniform mesh needs count >= 2 and a < b");
  CandidateMesh mesh;
  mesh.spacing = (b - a) / (count - 1);
  mesh.max_valid_degree = max_valid_degree;
  for (int j = 0; j < count; ++j)
    mesh.points.push_back(Point::real(j == count - 1 ? b : a + (b - a) * static_cast<double>(j) / (count - 1)));
  return mesh;
}

CandidateMesh roots_of_unity_mesh(cplx center, double radius, int count, int max_valid_degree) {
  if (count < 1) throw input_error("roots-of-unity mesh needs count >= 1");
  CandidateMesh mesh;
  mesh.spacing = 2.0 * std::numbers::pi * radius / count;
  mesh.max_valid_degree = max_valid_degree;
  for (int j = 0; j < count; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / count;
    mesh.points.push_back(Point::complex(center + radius * cplx(std::cos(theta), std::sin(theta))));
  }
  return mesh;
}

double interval_mesh_defect(std::span<const double> sorted_nodes, int degree) {
  if (sorted_nodes.size() < 2) return std::numeric_limits<double>::infinity();
  const double a = sorted_nodes.front(), b = sorted_nodes.back();
  double half_gap = 0.0;
  for (std::size_t i = 1; i < sorted_nodes.size(); ++i)
    half_gap = std::max(half_gap, 0.5 * (sorted_nodes[i] - sorted_nodes[i - 1]));
  const double markov = 2.0 * degree * degree / (b - a);
  const double x = markov * half_gap;
  if (x >= 1.0) return std::numeric_limits<double>::infinity();
  return -std::log1p(-x) / degree;
}

namespace {

std::vector<double> real_axis_nodes(const CandidateMesh& mesh) {
  std::vector<double> xs;
  xs.reserve(mesh.points.size());
  for (const auto& p : mesh.points) xs.push_back(p.x());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

double circle_defect(cplx center, double radius, const CandidateMesh& mesh, int degree) {
  std::size_t ring = 0;
  for (const auto& p : mesh.points)
    if (std::abs(std::abs(p[0] - center) - radius) <= 1e-9 * radius) ++ring;
  if (ring == 0) return std::numeric_limits<double>::infinity();
  const double step = 2.0 * std::numbers::pi / static_cast<double>(ring);
  const double x = 0.5 * step * degree;  // Bernstein on the circle
  if (x >= 1.0) return std::numeric_limits<double>::infinity();
  return -std::log1p(-x) / degree;
}

}  // namespace

double mesh_defect(const CompactSet& set, const CandidateMesh& mesh, int degree) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (set.dim() == 1 && set.is_real()) {
    // Interval or interval clipped by a ball: the set is the interval spanned
    // by its bounds, and the mesh must reach both ends.
    const auto xs = real_axis_nodes(mesh);
    const Bounds b = set.bounds();
    if (xs.empty()) return std::numeric_limits<double>::infinity();
    const double end_gap = std::max(xs.front() - b.lo[0], b.hi[0] - xs.back());
    std::vector<double> nodes = xs;
    if (end_gap > 0.0) {
      // Account for uncovered ends by treating them as full gaps.
      nodes.insert(nodes.begin(), xs.front() - 2.0 * (xs.front() - b.lo[0]));
      nodes.push_back(xs.back() + 2.0 * (b.hi[0] - xs.back()));
    }
    const double markov_len = b.side(0);
    double half_gap = 0.0;
    for (std::size_t i = 1; i < nodes.size(); ++i) half_gap = std::max(half_gap, 0.5 * (nodes[i] - nodes[i - 1]));
    const double x = 2.0 * degree * degree / markov_len * half_gap;
    if (x >= 1.0) return std::numeric_limits<double>::infinity();
    return -std::log1p(-x) / degree;
  }
  if (const auto* s = std::get_if<Box>(&set.kind())) {
    const int k = static_cast<int>(std::llround(std::sqrt(static_cast<double>(mesh.points.size())))) - 1;
    if (k < 1 || static_cast<std::size_t>((k + 1) * (k + 1)) != mesh.points.size())
      return nan;
    double x = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double side = s->hi[i] - s->lo[i];
      x += 0.5 * (side / k) * 2.0 * degree * degree / side;
    }
    if (x >= 1.0) return std::numeric_limits<double>::infinity();
    return -std::log1p(-x) / degree;
  }
  if (const auto* s = std::get_if<Disk>(&set.kind())) return circle_defect(s->center, s->radius, mesh, degree);
  if (const auto* s = std::get_if<Circle>(&set.kind())) return circle_defect(s->center, s->radius, mesh, degree);
  return nan;
}

std::vector<Point> boundary_net(const CompactSet& set, const CandidateMesh& mesh, std::size_t max_count) {
  std::vector<Point> net;
  const double h = mesh.spacing;
  for (const auto& p : mesh.points) {
    bool boundary = false;
    if (const auto* c = std::get_if<Circle>(&set.kind())) {
      (void)c;
      boundary = true;
    } else if (set.is_real()) {
      for (int i = 0; i < set.dim() && !boundary; ++i)
        for (double sgn : {-1.0, 1.0}) {
          Point q = p;
          q[i] += sgn * h;
          if (!set.contains(q)) boundary = true;
        }
    } else {
      for (cplx dir : {cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)}) {
        Point q = p;
        q[0] += h * dir;
        if (!set.contains(q)) boundary = true;
      }
    }
    if (boundary) net.push_back(p);
  }
  if (net.size() <= max_count || max_count == 0) return net;
  std::vector<Point> thinned;
  for (std::size_t i = 0; i < max_count; ++i) thinned.push_back(net[i * net.size() / max_count]);
  return thinned;
}

// ---------------------------------------------------------------------------
// UPC descriptors

UpcDescriptor::UpcDescriptor(double M, int m, std::vector<AffineTerm> terms, int n, Ambient ambient,
                             std::shared_ptr<const CompactSet> model)
    : M_(M), m_(m), terms_(std::move(terms)), n_(n), ambient_(ambient), model_(std::move(model)) {
  if (!(M_ > 0.0)) throw input_error("UPC constant M must be positive");
  if (m_ < 1) throw input_error("UPC exponent m must be a positive integer");
  if (terms_.empty()) throw input_error("UPC family needs at least the constant term");
  if (n_ < 1 || n_ > 2) throw input_error("UPC dimension must be 1 or 2");
  for (auto& t : terms_) {
    if (t.offset.n != n_) {
      if (t.offset == Point{}) t.offset = zero_point(n_);
      else throw input_error("UPC term offset dimension mismatch");
    }
  }
  if (model_ && (model_->dim() != n_ || model_->ambient() != ambient_))
    throw input_error("UPC descriptor and attached set disagree on dimension or ambient");
}

Point UpcDescriptor::coefficient(int k, const Point& x) const {
  const auto& term = terms_.at(static_cast<std::size_t>(k));
  Point out = term.offset;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) out[i] += term.linear[i][j] * x[j];
  return out;
}

Point UpcDescriptor::curve(const Point& x, double t) const {
  Point acc = coefficient(degree(), x);
  for (int k = degree() - 1; k >= 0; --k) acc = coefficient(k, x) + t * acc;
  return acc;
}

UpcDescriptor UpcDescriptor::with_M(double M) const { return UpcDescriptor(M, m_, terms_, n_, ambient_, model_); }

namespace {

std::vector<AffineTerm> segment_terms(const Point& target) {
  const int n = target.n;
  AffineTerm a0, a1;
  a0.offset = zero_point(n);
  a1.offset = target;
  for (int i = 0; i < n; ++i) {
    a0.linear[i][i] = 1.0;
    a1.linear[i][i] = -1.0;
  }
  return {a0, a1};
}

double calibrate_cusp_M(const CompactSet& set, const PowerCusp& s, const Point& target) {
  // min over anchors x and t of inradius(h_x(t)) / t^m, on a grid finer than
  // the default validation grid; a 3/4 safety factor absorbs the gaps.
  const UpcDescriptor probe(1.0, s.m, segment_terms(target), 2, Ambient::Real);
  double ratio = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 40; ++i) {
    const double x = s.extent * i / 40.0;
    const double ymax = s.M * std::pow(x, s.m);
    for (int j = -10; j <= 10; ++j) {
      const Point anchor = Point::real(x, ymax * j / 10.0);
      for (int l = 1; l <= 200; ++l) {
        const double t = l / 200.0;
        const double rho = set.cube_inradius(probe.curve(anchor, t));
        ratio = std::min(ratio, rho / std::pow(t, s.m));
      }
    }
  }
  return 0.75 * ratio;
}

}  // namespace

UpcDescriptor builtin_descriptor(const CompactSet& set) {
  auto model = std::make_shared<const CompactSet>(set);
  if (const auto* s = std::get_if<Interval>(&set.kind())) {
    const Point c = Point::real(0.5 * (s->a + s->b));
    return UpcDescriptor(0.5 * (s->b - s->a), 1, segment_terms(c), 1, Ambient::Real, model);
  }
  if (const auto* s = std::get_if<Box>(&set.kind())) {
    const Point c = Point::real(0.5 * (s->lo[0] + s->hi[0]), 0.5 * (s->lo[1] + s->hi[1]));
    return UpcDescriptor(set.cube_inradius(c), 1, segment_terms(c), 2, Ambient::Real, model);
  }
  if (const auto* s = std::get_if<ConvexPolygon>(&set.kind())) {
    double cx = 0.0, cy = 0.0;
    for (const auto& v : s->vertices) {
      cx += v[0];
      cy += v[1];
    }
    const Point c = Point::real(cx / s->vertices.size(), cy / s->vertices.size());
    return UpcDescriptor(set.cube_inradius(c), 1, segment_terms(c), 2, Ambient::Real, model);
  }
  if (const auto* s = std::get_if<Disk>(&set.kind())) {
    return UpcDescriptor(s->radius, 1, segment_terms(Point::complex(s->center)), 1, Ambient::Complex, model);
  }
  if (const auto* s = std::get_if<PowerCusp>(&set.kind())) {
    const Point c = Point::real(0.5 * s->extent, 0.0);
    return UpcDescriptor(calibrate_cusp_M(set, *s, c), s->m, segment_terms(c), 2, Ambient::Real, model);
  }
  throw input_error("no built-in UPC descriptor for set kind " + set.kind_name());
}

std::vector<double> t_grid(double t_max, int count) {
  if (count < 1) throw input_error("t grid needs at least one point");
  if (count == 1) return {0.0};
  std::vector<double> ts(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) ts[static_cast<std::size_t>(i)] = i == count - 1 ? t_max : t_max * i / (count - 1);
  return ts;
}

std::vector<Point> unit_cube_grid(int n, Ambient ambient, int per_axis) {
  if (per_axis < 1) throw input_error("u grid needs at least one point per axis");
  std::vector<cplx> axis;
  if (ambient == Ambient::Real) {
    if (per_axis == 1) axis.push_back(0.0);
    for (int j = 0; j < per_axis && per_axis > 1; ++j) axis.emplace_back(-1.0 + 2.0 * j / (per_axis - 1), 0.0);
  } else {
    axis.emplace_back(0.0, 0.0);
    for (int ring = 1; ring <= 4; ++ring)
      for (int j = 0; j < per_axis; ++j) {
        const double th = 2.0 * std::numbers::pi * j / per_axis;
        axis.push_back(std::polar(ring / 4.0, th));
      }
  }
  std::vector<Point> out;
  if (n == 1) {
    for (auto a : axis) out.push_back(Point::complex(a));
  } else {
    for (auto a : axis)
      for (auto b : axis) out.push_back(Point::complex(a, b));
  }
  return out;
}

std::vector<Point> cusp_set_samples(const UpcDescriptor& u, const Point& anchor, std::span<const double> ts,
                                    std::span<const Point> ws) {
  if (ts.empty() || ws.empty()) throw input_error("cusp sampling grids must be nonempty");
  if (anchor.n != u.dim()) throw input_error("anchor dimension mismatch");
  if (u.model() && !u.model()->contains(anchor)) throw input_error("anchor is not in the set");
  std::vector<Point> out;
  for (double t : ts) {
    const Point h = u.curve(anchor, t);
    const double radius = u.M() * std::pow(t, u.m());
    if (radius == 0.0) {
      out.push_back(h);
      continue;
    }
    for (const auto& w : ws) {
      if (norm_inf(w) > 1.0 + 1e-15) throw input_error("u grid point outside the unit cube");
      Point x = h + radius * w;
      if (u.model() && !u.model()->contains(x)) {
        std::ostringstream os;
        os.precision(17);
        os << "UPC condition violated: h_a(t) + M t^m w = " << fmt_point(x) << " is outside the set at t = " << t
           << ", w = " << fmt_point(w);
        throw Error("geometry", ErrorKind::DescriptorInvalid, os.str());
      }
      out.push_back(x);
    }
  }
  return out;
}

namespace {

double factorial(int d) {
  double f = 1.0;
  for (int i = 2; i <= d; ++i) f *= i;
  return f;
}

std::vector<double> coefficient_sups(const UpcDescriptor& u, std::span<const Point> anchors) {
  std::vector<double> sup(static_cast<std::size_t>(u.degree() + 1), 0.0);
  for (const auto& x : anchors)
    for (int l = 0; l <= u.degree(); ++l)
      sup[static_cast<std::size_t>(l)] = std::max(sup[static_cast<std::size_t>(l)], norm_inf(u.coefficient(l, x)));
  return sup;
}

}  // namespace

PyramidImage pyramid_image(const UpcDescriptor& u, const Point& anchor, double r,
                           std::span<const Point> anchor_samples, int t_points, std::span<const Point> ws) {
  if (!(r > 0.0 && r <= 1.0)) throw input_error("pyramid radius r must lie in (0, 1]");
  if (anchor_samples.empty()) throw input_error("pyramid needs anchor samples for the coefficient sup");
  if (ws.empty()) throw input_error("pyramid needs a nonempty u grid");
  PyramidImage img;
  img.coefficient_sup = coefficient_sups(u, anchor_samples);
  double sum = 0.0;
  for (double b : img.coefficient_sup) sum += b;
  img.r_prime = r / (1.0 + factorial(u.degree()) * sum + u.M());
  for (double t : t_grid(img.r_prime, t_points)) {
    const Point h = u.curve(anchor, t);
    for (const auto& w : ws) {
      Point x = h;
      for (int i = 0; i < u.dim(); ++i) x[i] += u.M() * std::pow(t * w[i], u.m());
      img.samples.push_back({t, w, x});
    }
  }
  return img;
}

InclusionReport check_cusp_inclusion(const UpcDescriptor& u, const Point& anchor, double r,
                                     std::span<const Point> anchor_samples, int t_points,
                                     std::span<const Point> ws) {
  const PyramidImage img = pyramid_image(u, anchor, r, anchor_samples, t_points, ws);
  InclusionReport rep;
  rep.r_prime = img.r_prime;
  rep.t_points = t_points;
  rep.u_samples = static_cast<int>(ws.size());
  double last_t = -1.0;
  bool upc_ok = true;
  for (const auto& s : img.samples) {
    const Point h = u.curve(anchor, s.t);
    const double radius = u.M() * std::pow(s.t, u.m());
    if (s.t != last_t) {
      last_t = s.t;
      upc_ok = !u.model() || u.model()->cube_inradius(h) >= radius - 1e-12;
    }
    if (!upc_ok) {
      rep.witnesses.push_back({s.t, s.u, s.x, "UPC inequality fails: cube D(h_a(t), M t^m) leaves the set"});
    } else if (dist_inf(s.x, h) > radius * (1.0 + 1e-12) + 1e-15) {
      rep.witnesses.push_back({s.t, s.u, s.x, "point outside the cusp set E_a"});
    }
    if (dist_inf(s.x, anchor) > r * (1.0 + 1e-12)) rep.witnesses.push_back({s.t, s.u, s.x, "point outside D(a, r)"});
  }
  rep.ok = rep.witnesses.empty();
  return rep;
}

CoefficientBounds coefficient_bound(const UpcDescriptor& u, std::span<const Point> anchors, double tolerance) {
  const int d = u.degree();
  if (anchors.size() < static_cast<std::size_t>(d + 1))
    throw input_error("coefficient bound needs at least d + 1 anchors");
  Eigen::MatrixXcd nodal(d + 1, d + 1);
  for (int j = 1; j <= d + 1; ++j)
    for (int k = 0; k <= d; ++k) nodal(j - 1, k) = std::pow(1.0 / j, k);
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(nodal);
  if (!lu.isInvertible()) throw Error("geometry", ErrorKind::Internal, "nodal system at t_j = 1/j is singular");

  CoefficientBounds out;
  out.per_degree.assign(static_cast<std::size_t>(d + 1), 0.0);
  out.per_coordinate.assign(static_cast<std::size_t>(d + 1), std::vector<double>(static_cast<std::size_t>(u.dim()), 0.0));
  double scale = 1.0;
  for (const auto& x : anchors) {
    Eigen::MatrixXcd rhs(d + 1, u.dim());
    for (int j = 1; j <= d + 1; ++j) {
      const Point h = u.curve(x, 1.0 / j);
      for (int s = 0; s < u.dim(); ++s) rhs(j - 1, s) = h[s];
    }
    const Eigen::MatrixXcd coeffs = lu.solve(rhs);
    for (int k = 0; k <= d; ++k) {
      const Point stored = u.coefficient(k, x);
      for (int s = 0; s < u.dim(); ++s) {
        const double mag = std::abs(coeffs(k, s));
        auto& cell = out.per_coordinate[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)];
        cell = std::max(cell, mag);
        out.per_degree[static_cast<std::size_t>(k)] = std::max(out.per_degree[static_cast<std::size_t>(k)], mag);
        out.max_roundtrip_error = std::max(out.max_roundtrip_error, std::abs(coeffs(k, s) - stored[s]));
        scale = std::max(scale, std::abs(stored[s]));
      }
    }
  }
  if (out.max_roundtrip_error > tolerance * scale)
    throw Error("geometry", ErrorKind::Internal,
                "recovered UPC coefficients disagree with the stored family (error " +
                    std::to_string(out.max_roundtrip_error) + ")");
  return out;
}

UpcValidation validate_upc(const UpcDescriptor& u, std::span<const Point> anchors, const UpcSampling& sampling) {
  if (!u.model()) throw input_error("UPC validation needs an attached set model");
  UpcValidation rep;
  rep.t_points = sampling.t_points;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  const auto ts = t_grid(1.0, sampling.t_points);
  for (const auto& x : anchors) {
    if (!u.model()->contains(x)) continue;
    ++rep.anchors_checked;
    if (dist_inf(u.curve(x, 0.0), x) > 1e-12 * std::max(1.0, norm_inf(x)))
      rep.witnesses.push_back({0.0, zero_point(u.dim()), x, "h_x(0) != x"});
    for (double t : ts) {
      if (t == 0.0) continue;
      const Point h = u.curve(x, t);
      if (!u.model()->contains(h)) {
        rep.witnesses.push_back({t, zero_point(u.dim()), h, "h_x(t) outside the set"});
        continue;
      }
      const double rho = u.model()->cube_inradius(h);
      const double need = u.M() * std::pow(t, u.m());
      rep.min_ratio = std::min(rep.min_ratio, rho / std::pow(t, u.m()));
      if (rho < need - 1e-12) rep.witnesses.push_back({t, zero_point(u.dim()), h, "dist_inf(h_x(t), complement) < M t^m"});
    }
  }
  rep.ok = rep.witnesses.empty();
  return rep;
}

}  // namespace upcfekete::geometry
