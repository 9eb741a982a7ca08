#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "upcfekete/point.hpp"

namespace upcfekete::geometry {

enum class Ambient { Real, Complex };

struct Interval {
  double a = -1.0, b = 1.0;
};

struct Box {
  std::array<double, 2> lo{0.0, 0.0}, hi{1.0, 1.0};
};

struct Disk {
  cplx center{};
  double radius = 1.0;
};

// Not fat; only used for boundary-supported experiments (roots-of-unity meshes).
struct Circle {
  cplx center{};
  double radius = 1.0;
  int mesh_points = 0;  // 0: derive the count from the degree
};

// Convex polygon in R^2, vertices counter-clockwise.
struct ConvexPolygon {
  std::vector<std::array<double, 2>> vertices;
};

// {(x, y): 0 <= x <= extent, |y| <= M x^m}
struct PowerCusp {
  double M = 1.0;
  int m = 2;
  double extent = 1.0;
};

// [0,1] x [-1,1] minus the teeth {0 <= x < y, |y - a_k| < eps_k}, k = 2..k_max, closed.
struct Comb {
  std::vector<double> a, eps;  // indexed by k - 2
};

class CompactSet;

struct Union {
  std::vector<CompactSet> parts;
};

// base ∩ closed Euclidean ball B(center, radius)
struct BallClip {
  std::shared_ptr<const CompactSet> base;
  Point center;
  double radius = 1.0;
};

// Axis ranges of the real coordinates: (x, y) for real sets in R^2,
// (re, im) for sets in C.
struct Bounds {
  int axes = 1;
  std::array<double, 2> lo{}, hi{};
  double side(int i) const { return hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]; }
};

class CompactSet {
 public:
  using Kind = std::variant<Interval, Box, Disk, Circle, ConvexPolygon, PowerCusp, Comb, Union, BallClip>;

  static CompactSet interval(double a, double b);
  static CompactSet box(std::array<double, 2> lo, std::array<double, 2> hi);
  static CompactSet disk(cplx center, double radius);
  static CompactSet circle(cplx center, double radius, int mesh_points = 0);
  static CompactSet convex_polygon(std::vector<std::array<double, 2>> vertices);
  static CompactSet power_cusp(double M, int m, double extent);
  static CompactSet comb(std::vector<double> a, std::vector<double> eps);
  // a_k = 1/k, eps_k = exp(-k^2)/2 for k = 2..k_max
  static CompactSet comb_default(int k_max = 8);
  static CompactSet union_of(std::vector<CompactSet> parts);
  static CompactSet ball_clip(const CompactSet& base, const Point& center, double radius);

  const Kind& kind() const { return kind_; }
  std::string kind_name() const;
  int dim() const { return dim_; }
  Ambient ambient() const { return ambient_; }
  bool is_real() const { return ambient_ == Ambient::Real; }

  // Closed set membership; boundary points are inside.
  bool contains(const Point& z) const;
  Bounds bounds() const;
  // Largest rho with the closed cube D(p, rho) inside the set (0 if p is on
  // the boundary, negative if outside). Cubes are taken in K^n.
  double cube_inradius(const Point& p) const;

 private:
  CompactSet(Kind kind, int dim, Ambient ambient) : kind_(std::move(kind)), dim_(dim), ambient_(ambient) {}
  void check_dim(const Point& z) const;

  Kind kind_;
  int dim_;
  Ambient ambient_;
};

struct CandidateMesh {
  std::vector<Point> points;
  double spacing = 0.0;
  int max_valid_degree = 0;
  bool capped = false;  // coarser than the d^-2 rule (max_intervals was hit)
};

// Axis grid with per-axis step at most (side/2)/(density d^2), filtered by
// membership. Disks get an extra boundary ring at the same spacing; circles
// are meshed by roots of unity. max_intervals > 0 caps the per-axis count
// (reference meshes at high degree in the plane).
CandidateMesh generate_mesh(const CompactSet& set, int degree, double density, int max_intervals = 0);
CandidateMesh uniform_interval_mesh(double a, double b, int count, int max_valid_degree);
CandidateMesh roots_of_unity_mesh(cplx center, double radius, int count, int max_valid_degree);

// Markov/Bernstein estimate of the norming defect: eps such that
// ||p||_K <= exp(d eps) ||p||_mesh for deg p <= d. NaN when no estimate is
// available for the set type, +inf when the mesh is too coarse.
double mesh_defect(const CompactSet& set, const CandidateMesh& mesh, int degree);
double interval_mesh_defect(std::span<const double> sorted_nodes, int degree);

// Mesh points with a grid neighbour outside the set, thinned to at most
// max_count deterministic anchors.
std::vector<Point> boundary_net(const CompactSet& set, const CandidateMesh& mesh, std::size_t max_count);

// ---------------------------------------------------------------------------
// Uniformly polynomially cuspidal descriptors.

// a_k(x) = linear * x + offset, one term per power t^k.
struct AffineTerm {
  std::array<std::array<cplx, 2>, 2> linear{};
  Point offset;
};

class UpcDescriptor {
 public:
  UpcDescriptor(double M, int m, std::vector<AffineTerm> terms, int n, Ambient ambient,
                std::shared_ptr<const CompactSet> model = nullptr);

  double M() const { return M_; }
  int m() const { return m_; }
  int degree() const { return static_cast<int>(terms_.size()) - 1; }
  int dim() const { return n_; }
  Ambient ambient() const { return ambient_; }
  const std::vector<AffineTerm>& terms() const { return terms_; }
  const CompactSet* model() const { return model_.get(); }
  std::shared_ptr<const CompactSet> model_ptr() const { return model_; }

  Point coefficient(int k, const Point& anchor) const;
  Point curve(const Point& anchor, double t) const;
  UpcDescriptor with_M(double M) const;

 private:
  double M_;
  int m_;
  std::vector<AffineTerm> terms_;
  int n_;
  Ambient ambient_;
  std::shared_ptr<const CompactSet> model_;
};

// Straight-segment family h_x(t) = x + t (c - x) for convex sets (m = 1) and
// the power cusp (m = cusp exponent, M calibrated on a fine sample grid).
UpcDescriptor builtin_descriptor(const CompactSet& set);

struct UpcSampling {
  int t_points = 64;
  int u_points = 16;
};

std::vector<double> t_grid(double t_max, int count);
// Points w of K^n with ||w||_inf <= 1: a per-axis grid for real ambient,
// polar rings for complex ambient.
std::vector<Point> unit_cube_grid(int n, Ambient ambient, int per_axis);

struct Witness {
  double t = 0.0;
  Point u;
  Point x;
  std::string reason;
};

// E_a sampled: {h_a(t) + M t^m w}. Throws DescriptorInvalid carrying the
// first witness if the model is attached and a sample falls outside it.
std::vector<Point> cusp_set_samples(const UpcDescriptor& u, const Point& anchor, std::span<const double> ts,
                                    std::span<const Point> ws);

struct PyramidSample {
  double t = 0.0;
  Point u;
  Point x;
};

struct PyramidImage {
  double r_prime = 0.0;
  std::vector<double> coefficient_sup;  // sup_x ||a_l(x)||_inf per l
  std::vector<PyramidSample> samples;
};

// r' = r / (1 + d! sum_l sup|a_l| + M) with the sup over anchor_samples,
// and p(t, t u) = h_a(t) + M ((t u_1)^m, ..., (t u_n)^m) for t in [0, r'].
PyramidImage pyramid_image(const UpcDescriptor& u, const Point& anchor, double r,
                           std::span<const Point> anchor_samples, int t_points, std::span<const Point> ws);

struct InclusionReport {
  bool ok = true;
  double r_prime = 0.0;
  int t_points = 0;
  int u_samples = 0;
  std::vector<Witness> witnesses;
};

InclusionReport check_cusp_inclusion(const UpcDescriptor& u, const Point& anchor, double r,
                                     std::span<const Point> anchor_samples, int t_points,
                                     std::span<const Point> ws);

struct CoefficientBounds {
  std::vector<double> per_degree;                   // B_k = max_s max_x |a_k^s(x)|
  std::vector<std::vector<double>> per_coordinate;  // [k][s]
  double max_roundtrip_error = 0.0;
};

// Recovers a_k(x) from h_x(1/j), j = 1..d+1, by solving the nodal system.
CoefficientBounds coefficient_bound(const UpcDescriptor& u, std::span<const Point> anchors,
                                    double tolerance = 1e-8);

struct UpcValidation {
  bool ok = true;
  int t_points = 0;
  std::size_t anchors_checked = 0;
  double min_ratio = 0.0;  // min over samples of inradius / t^m
  std::vector<Witness> witnesses;
};

UpcValidation validate_upc(const UpcDescriptor& u, std::span<const Point> anchors, const UpcSampling& sampling);

}  // namespace upcfekete::geometry
