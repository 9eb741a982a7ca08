#pragma once

#include <array>
#include <cassert>
#include <complex>
#include <functional>
#include <vector>

namespace upcfekete {

using cplx = std::complex<double>;

// A point of C^n (n = 1 or 2). Real sets live on R^n + i*0.
struct Point {
  int n = 1;
  std::array<cplx, 2> z{};

  static Point real(double x) { return Point{1, {cplx(x, 0.0), cplx()}}; }
  static Point real(double x, double y) { return Point{2, {cplx(x, 0.0), cplx(y, 0.0)}}; }
  static Point complex(cplx w) { return Point{1, {w, cplx()}}; }
  static Point complex(cplx w0, cplx w1) { return Point{2, {w0, w1}}; }

  cplx& operator[](int i) { return z[static_cast<std::size_t>(i)]; }
  const cplx& operator[](int i) const { return z[static_cast<std::size_t>(i)]; }

  double x(int i = 0) const { return z[static_cast<std::size_t>(i)].real(); }

  bool is_real(double tol = 0.0) const {
    for (int i = 0; i < n; ++i)
      if (std::abs((*this)[i].imag()) > tol) return false;
    return true;
  }

  friend bool operator==(const Point& a, const Point& b) {
    if (a.n != b.n) return false;
    for (int i = 0; i < a.n; ++i)
      if (a[i] != b[i]) return false;
    return true;
  }

  // Lexicographic on (re, im) per coordinate; used to canonicalize point sets.
  friend bool operator<(const Point& a, const Point& b) {
    if (a.n != b.n) return a.n < b.n;
    for (int i = 0; i < a.n; ++i) {
      if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
      if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
    }
    return false;
  }
};

inline Point operator+(Point a, const Point& b) {
  assert(a.n == b.n);
  for (int i = 0; i < a.n; ++i) a[i] += b[i];
  return a;
}

inline Point operator-(Point a, const Point& b) {
  assert(a.n == b.n);
  for (int i = 0; i < a.n; ++i) a[i] -= b[i];
  return a;
}

inline Point operator*(cplx s, Point a) {
  for (int i = 0; i < a.n; ++i) a[i] *= s;
  return a;
}

inline Point operator*(double s, Point a) { return cplx(s, 0.0) * a; }

// max_i |a_i - b_i|, the metric whose balls are the closed cubes D(p, r).
inline double dist_inf(const Point& a, const Point& b) {
  double m = 0.0;
  for (int i = 0; i < a.n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double norm_inf(const Point& a) {
  double m = 0.0;
  for (int i = 0; i < a.n; ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

// Euclidean distance in C^n = R^{2n}.
inline double dist2(const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < a.n; ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

inline Point zero_point(int n) {
  Point p;
  p.n = n;
  return p;
}

// Real-valued weight phi on K; an empty function means phi == 0.
using Weight = std::function<double(const Point&)>;

// Runs body(i) for i in [0, count). The default runs sequentially; the
// CLI passes a pool-backed implementation.
using ParallelFor = std::function<void(std::size_t count, const std::function<void(std::size_t)>& body)>;

inline void sequential_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  for (std::size_t i = 0; i < count; ++i) body(i);
}

}  // namespace upcfekete
