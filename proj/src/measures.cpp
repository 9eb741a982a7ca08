#include "upcfekete/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "upcfekete/error.hpp"

namespace upcfekete::measures {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

Error input_error(const std::string& msg) { return Error("measures", ErrorKind::Input, msg); }

// --- arcsine law on [a, b] -------------------------------------------------

struct Arcsine {
  double a, b;
  double c() const { return 0.5 * (a + b); }
  double h() const { return 0.5 * (b - a); }
  double u(double x) const { return std::clamp((x - c()) / h(), -1.0, 1.0); }
  double cdf(double x) const {
    if (x <= a) return 0.0;
    if (x >= b) return 1.0;
    return 0.5 + std::asin(u(x)) / kPi;
  }
  // int_a^x cdf; the u-antiderivative u/2 + (u asin u + sqrt(1 - u^2))/pi vanishes at u = -1
  double cdf_integral(double x) const {
    if (x <= a) return 0.0;
    const double v = u(x);
    const double inside = h() * (0.5 * v + (v * std::asin(v) + std::sqrt(std::max(0.0, 1.0 - v * v))) / kPi);
    return x > b ? inside + (x - b) : inside;
  }
  double quantile(double p) const { return c() + h() * std::sin(kPi * (p - 0.5)); }
};

// --- Gauss-Legendre nodes --------------------------------------------------

struct GaussRule {
  std::vector<double> x, w;
};

const GaussRule& gauss16() {
  static const GaussRule rule = [] {
    constexpr int n = 16;
    GaussRule r;
    for (int i = 1; i <= n; ++i) {
      double x = std::cos(kPi * (i - 0.25) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      r.x.push_back(x);
      r.w.push_back(2.0 / ((1.0 - x * x) * dp * dp));
    }
    return r;
  }();
  return rule;
}

// --- measures on the real line ---------------------------------------------

struct LineMeasure {
  std::vector<double> xs, cum;  // sorted positions, cumulative mass through each
  std::optional<Arcsine> arc;

  double cdf(double x) const {
    if (arc) return arc->cdf(x);
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    return it == xs.begin() ? 0.0 : cum[static_cast<std::size_t>(it - xs.begin()) - 1];
  }
};

bool atoms_on_line(const DiscreteMeasure& m) {
  return std::all_of(m.atoms.begin(), m.atoms.end(), [](const Point& p) { return p.n == 1 && p.is_real(1e-12); });
}

LineMeasure to_line(const MeasureDescriptor& m) {
  LineMeasure out;
  if (m.kind == MeasureKind::Arcsine) {
    out.arc = Arcsine{m.a, m.b};
    return out;
  }
  if (!m.is_atomic() || !atoms_on_line(m.discrete)) throw input_error("measure is not supported on the real line");
  std::vector<std::pair<double, double>> pw;
  for (std::size_t i = 0; i < m.discrete.atoms.size(); ++i) pw.emplace_back(m.discrete.atoms[i].x(), m.discrete.weights[i]);
  std::sort(pw.begin(), pw.end());
  double acc = 0.0;
  for (const auto& [x, w] : pw) {
    acc += w;
    out.xs.push_back(x);
    out.cum.push_back(acc);
  }
  return out;
}

struct Piece {
  double x0, x1, integral;  // signed integral of F_mu - F_nu; sign constant on the piece
};

class LineDifference {
 public:
  LineDifference(LineMeasure mu, LineMeasure nu) : mu_(std::move(mu)), nu_(std::move(nu)) {
    for (const auto* m : {&mu_, &nu_}) {
      breaks_.insert(breaks_.end(), m->xs.begin(), m->xs.end());
      if (m->arc) {
        breaks_.push_back(m->arc->a);
        breaks_.push_back(m->arc->b);
      }
    }
    std::sort(breaks_.begin(), breaks_.end());
    breaks_.erase(std::unique(breaks_.begin(), breaks_.end()), breaks_.end());
  }

  bool empty() const { return breaks_.empty(); }
  double lo() const { return breaks_.front(); }
  double hi() const { return breaks_.back(); }
  bool used_quadrature() const { return quadrature_; }

  double integrate(double x0, double x1, bool absolute, std::vector<Piece>* pieces = nullptr) const {
    if (!(x1 > x0)) return 0.0;
    std::vector<double> pts{x0};
    for (double b : breaks_)
      if (b > x0 && b < x1) pts.push_back(b);
    pts.push_back(x1);
    double total = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) total += piece(pts[i - 1], pts[i], absolute, pieces);
    return total;
  }

 private:
  double piece(double p, double q, bool absolute, std::vector<Piece>* pieces) const {
    const double mid = 0.5 * (p + q);
    double constant = 0.0;
    std::vector<std::pair<double, Arcsine>> terms;
    auto add = [&](const LineMeasure& m, double sign) {
      if (m.arc && m.arc->a <= p && q <= m.arc->b)
        terms.emplace_back(sign, *m.arc);
      else
        constant += sign * m.cdf(mid);
    };
    add(mu_, 1.0);
    add(nu_, -1.0);

    auto emit = [&](double a, double b, double v) {
      if (pieces && b > a) pieces->push_back({a, b, v});
      return absolute ? std::abs(v) : v;
    };
    if (terms.empty()) return emit(p, q, constant * (q - p));
    if (terms.size() == 1) {
      const auto& [s, g] = terms.front();
      auto integral = [&](double a, double b) { return s * (g.cdf_integral(b) - g.cdf_integral(a)) + constant * (b - a); };
      const double level = -constant / s;
      if (level > g.cdf(p) && level < g.cdf(q)) {
        const double r = std::clamp(g.quantile(level), p, q);
        return emit(p, r, integral(p, r)) + emit(r, q, integral(r, q));
      }
      return emit(p, q, integral(p, q));
    }
    // Two continuous laws overlap: composite Gauss-Legendre.
    quadrature_ = true;
    const auto& rule = gauss16();
    constexpr int kPanels = 64;
    double total = 0.0;
    for (int k = 0; k < kPanels; ++k) {
      const double a = p + (q - p) * k / kPanels, b = p + (q - p) * (k + 1) / kPanels;
      double v = 0.0, va = 0.0;
      for (std::size_t i = 0; i < rule.x.size(); ++i) {
        const double x = 0.5 * (a + b) + 0.5 * (b - a) * rule.x[i];
        double f = constant;
        for (const auto& [s, g] : terms) f += s * g.cdf(x);
        v += rule.w[i] * f;
        va += rule.w[i] * std::abs(f);
      }
      v *= 0.5 * (b - a);
      va *= 0.5 * (b - a);
      if (pieces) pieces->push_back({a, b, v});
      total += absolute ? va : v;
    }
    return total;
  }

  LineMeasure mu_, nu_;
  std::vector<double> breaks_;
  mutable bool quadrature_ = false;
};

// --- measures on a circle --------------------------------------------------

struct CircleMeasure {
  bool uniform = false;
  std::vector<double> angles, weights;  // sorted angles in [0, 2 pi)
  double projection_cost = 0.0;         // sum w | |z - c| - R |
  bool on_circle = true;
  std::vector<Point> atoms;  // original atoms, parallel to angles
};

double angle_of(cplx w) {
  double th = std::arg(w);
  if (th < 0.0) th += 2.0 * kPi;
  if (th >= 2.0 * kPi) th = 0.0;
  return th;
}

CircleMeasure to_circle(const MeasureDescriptor& m, cplx center, double radius) {
  CircleMeasure out;
  if (m.kind == MeasureKind::UniformCircle) {
    if (std::abs(m.center - center) > 1e-12 * radius || std::abs(m.radius - radius) > 1e-12 * radius)
      throw input_error("uniform circle measures on different circles");
    out.uniform = true;
    return out;
  }
  if (!m.is_atomic()) throw input_error("measure is not supported on a circle");
  std::vector<std::size_t> order(m.discrete.atoms.size());
  std::vector<double> th(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Point& p = m.discrete.atoms[i];
    if (p.n != 1) throw input_error("circle measures need atoms in C");
    const double rho = std::abs(p[0] - center);
    if (!(rho > 0.0)) throw input_error("atom at the circle centre has no angle");
    th[i] = angle_of(p[0] - center);
    const double off = std::abs(rho - radius);
    out.projection_cost += m.discrete.weights[i] * off;
    if (off > 1e-9 * radius) out.on_circle = false;
  }
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return th[a] < th[b]; });
  for (auto i : order) {
    out.angles.push_back(th[i]);
    out.weights.push_back(m.discrete.weights[i]);
    out.atoms.push_back(m.discrete.atoms[i]);
  }
  return out;
}

// F(theta) = mass of [0, theta]; D = F_mu - F_nu is linear between atoms.
struct CirclePiece {
  double p, q, d0, slope;
  double at(double t) const { return d0 + slope * (t - p); }
};

class CircleDifference {
 public:
  CircleDifference(const CircleMeasure& mu, const CircleMeasure& nu) {
    std::vector<double> breaks{0.0, 2.0 * kPi};
    for (const auto* m : {&mu, &nu}) breaks.insert(breaks.end(), m->angles.begin(), m->angles.end());
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    const double slope = ((mu.uniform ? 1.0 : 0.0) - (nu.uniform ? 1.0 : 0.0)) / (2.0 * kPi);
    auto mass_through = [](const CircleMeasure& m, double t) {
      if (m.uniform) return t / (2.0 * kPi);
      double s = 0.0;
      for (std::size_t i = 0; i < m.angles.size() && m.angles[i] <= t; ++i) s += m.weights[i];
      return s;
    };
    for (std::size_t i = 1; i < breaks.size(); ++i) {
      const double p = breaks[i - 1], q = breaks[i];
      pieces_.push_back({p, q, mass_through(mu, p) - mass_through(nu, p), slope});
    }
  }

  // int_0^{2 pi} |D - c|
  double cost(double c) const {
    double total = 0.0;
    for (const auto& pc : pieces_) {
      const double len = pc.q - pc.p;
      const double a = pc.d0 - c, b = pc.at(pc.q) - c;
      if (a * b >= 0.0)
        total += 0.5 * len * std::abs(a + b);
      else
        total += 0.5 * len * (a * a + b * b) / (std::abs(a) + std::abs(b));
    }
    return total;
  }

  // min_c cost(c): candidates at piece ends, then golden section between the
  // neighbours of the best candidate (cost is convex in c).
  std::pair<double, double> minimize() const {
    std::vector<double> cands;
    for (const auto& pc : pieces_) {
      cands.push_back(pc.d0);
      cands.push_back(pc.at(pc.q));
    }
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    std::size_t best = 0;
    double best_cost = kInf;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const double v = cost(cands[i]);
      if (v < best_cost) {
        best_cost = v;
        best = i;
      }
    }
    double lo = cands[best > 0 ? best - 1 : 0], hi = cands[std::min(best + 1, cands.size() - 1)];
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = cost(x1), f2 = cost(x2);
    for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - g * (hi - lo);
        f1 = cost(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + g * (hi - lo);
        f2 = cost(x2);
      }
    }
    const double c = f1 <= f2 ? x1 : x2;
    const double v = std::min(f1, f2);
    if (v < best_cost) return {c, v};
    return {cands[best], best_cost};
  }

  const std::vector<CirclePiece>& pieces() const { return pieces_; }

 private:
  std::vector<CirclePiece> pieces_;
};

// --- geometry of a pair ----------------------------------------------------

enum class Geometry { Line, Circle, Plane };

struct PairGeometry {
  Geometry kind;
  cplx center{};
  double radius = 1.0;
};

PairGeometry classify(const MeasureDescriptor& mu, const MeasureDescriptor& nu) {
  const bool circ_mu = mu.kind == MeasureKind::UniformCircle, circ_nu = nu.kind == MeasureKind::UniformCircle;
  const bool arc_mu = mu.kind == MeasureKind::Arcsine, arc_nu = nu.kind == MeasureKind::Arcsine;
  if ((circ_mu || circ_nu) && (arc_mu || arc_nu)) throw input_error("arcsine and circle measures live on different spaces");
  if (circ_mu || circ_nu) {
    const auto& c = circ_mu ? mu : nu;
    return {Geometry::Circle, c.center, c.radius};
  }
  if (arc_mu || arc_nu) return {Geometry::Line};
  if (atoms_on_line(mu.discrete) && atoms_on_line(nu.discrete)) return {Geometry::Line};
  const int n = mu.discrete.atoms.front().n;
  for (const auto* m : {&mu, &nu})
    for (const auto& p : m->discrete.atoms)
      if (p.n != n) throw input_error("measures live in different dimensions");
  return {Geometry::Plane};
}

// --- optimal transport -----------------------------------------------------

std::vector<long long> integer_masses(const std::vector<double>& w, long long& total) {
  const std::size_t n = w.size();
  const bool uniform = std::all_of(w.begin(), w.end(), [&](double x) { return std::abs(x - 1.0 / n) <= 1e-12; });
  std::vector<long long> out(n);
  if (uniform) {
    total = static_cast<long long>(n);
    std::fill(out.begin(), out.end(), 1);
    return out;
  }
  total = 1LL << 30;
  long long sum = 0;
  for (std::size_t i = 0; i < n; ++i) sum += out[i] = std::llround(w[i] * static_cast<double>(total));
  const auto big = static_cast<std::size_t>(std::max_element(out.begin(), out.end()) - out.begin());
  out[big] += total - sum;
  return out;
}

// --- 2-D coordinates for the plane dictionary ------------------------------

std::array<double, 2> plane_coords(const Point& p) {
  if (p.n == 2) {
    if (!p.is_real(1e-12)) throw input_error("plane dictionary needs real points of R^2 or points of C");
    return {p.x(0), p.x(1)};
  }
  return {p[0].real(), p[0].imag()};
}

// ||v||_gamma bounds, see dist_gamma.
double wave_norm(double omega, double gamma) {
  if (gamma <= 1.0) return 1.0 + std::pow(2.0, 1.0 - gamma) * std::pow(omega, gamma);
  return 1.0 + omega + std::pow(2.0, 2.0 - gamma) * std::pow(omega, gamma);
}

double lipschitz_norm(double osc, double lip, double gamma) {
  if (osc <= 0.0) return kInf;
  return 0.5 * osc + std::pow(osc, 1.0 - gamma) * std::pow(lip, gamma);
}

struct Best {
  double value = 0.0;
  std::string name;
  void offer(double pairing, double norm, const std::string& label) {
    if (!(norm > 0.0) || !std::isfinite(norm)) return;
    const double v = std::abs(pairing) / norm;
    if (v > value) {
      value = v;
      name = label;
    }
  }
};

double wave(double omega, double x, bool cosine) { return cosine ? std::cos(omega * x) : std::sin(omega * x); }

// <m, cos/sin(omega <e, .>)> for any measure kind
double wave_pairing(const MeasureDescriptor& m, std::array<double, 2> e, double omega, bool cosine) {
  switch (m.kind) {
    case MeasureKind::Arcsine: {
      const Arcsine g{m.a, m.b};
      return wave(omega, e[0] * g.c(), cosine) * std::cyl_bessel_j(0.0, omega * std::abs(e[0]) * g.h());
    }
    case MeasureKind::UniformCircle: {
      const double xc = e[0] * m.center.real() + e[1] * m.center.imag();
      return wave(omega, xc, cosine) * std::cyl_bessel_j(0.0, omega * m.radius);
    }
    default: {
      double s = 0.0;
      for (std::size_t i = 0; i < m.discrete.atoms.size(); ++i) {
        const auto x = plane_coords(m.discrete.atoms[i]);
        s += m.discrete.weights[i] * wave(omega, e[0] * x[0] + e[1] * x[1], cosine);
      }
      return s;
    }
  }
}

void offer_waves(Best& best, const MeasureDescriptor& mu, const MeasureDescriptor& nu,
                 const std::vector<std::array<double, 2>>& dirs, double half_width, int count, double gamma) {
  for (std::size_t di = 0; di < dirs.size(); ++di)
    for (int k = 1; k <= count; ++k) {
      const double omega = k * kPi / half_width;
      const double norm = wave_norm(omega, gamma);
      for (bool cosine : {true, false}) {
        const double pairing = wave_pairing(mu, dirs[di], omega, cosine) - wave_pairing(nu, dirs[di], omega, cosine);
        best.offer(pairing, norm,
                   std::string(cosine ? "cos" : "sin") + "(k=" + std::to_string(k) + ",dir=" + std::to_string(di) + ")");
      }
    }
}

// --- per-geometry dictionaries ---------------------------------------------

Best line_dictionary(const MeasureDescriptor& mu, const MeasureDescriptor& nu, double gamma, int count) {
  Best best;
  const LineDifference diff(to_line(mu), to_line(nu));
  if (diff.empty()) return best;
  const double lo = diff.lo(), hi = diff.hi();
  const double half = std::max(0.5 * (hi - lo), 1e-300);
  offer_waves(best, mu, nu, {{1.0, 0.0}}, half, count, gamma);
  if (gamma > 1.0 || !(hi > lo)) return best;

  // Centred ramps clamp(x - t, 0, h) - h/2: pairing -int_t^{t+h} (F_mu - F_nu).
  for (int level = 0; level < 6; ++level) {
    const double h = (hi - lo) / std::pow(2.0, level);
    const int positions = level == 0 ? 1 : count;
    for (int i = 0; i < positions; ++i) {
      const double t = positions == 1 ? lo : lo + (hi - lo - h) * i / (positions - 1);
      const double pairing = -diff.integrate(t, t + h, false);
      best.offer(pairing, 0.5 * h + std::pow(h, 1.0 - gamma), "ramp(h=" + std::to_string(h) + ")");
    }
  }

  // Kantorovich potential v' = sign(F_mu - F_nu): pairing = -W1.
  std::vector<Piece> pieces;
  const double w1 = diff.integrate(lo, hi, true, &pieces);
  if (!diff.used_quadrature() && w1 > 0.0) {
    double v = 0.0, vmin = 0.0, vmax = 0.0;
    for (const auto& pc : pieces) {
      v += (pc.integral > 0.0 ? 1.0 : pc.integral < 0.0 ? -1.0 : 0.0) * (pc.x1 - pc.x0);
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
    best.offer(w1, lipschitz_norm(vmax - vmin, 1.0, gamma), "transport-potential");
  }
  return best;
}

// Mean of f over the atomic side or the uniform circle side.
template <class F>
double circle_mean(const CircleMeasure& m, F f_at_atom, double uniform_value) {
  if (m.uniform) return uniform_value;
  double s = 0.0;
  for (std::size_t i = 0; i < m.atoms.size(); ++i) s += m.weights[i] * f_at_atom(m.atoms[i], m.angles[i]);
  return s;
}

Best circle_dictionary(const MeasureDescriptor& mu, const MeasureDescriptor& nu, const PairGeometry& g, double gamma,
                       int count) {
  Best best;
  const CircleMeasure cm = to_circle(mu, g.center, g.radius), cn = to_circle(nu, g.center, g.radius);
  const double R = g.radius;
  const std::vector<std::array<double, 2>> dirs{
      {1.0, 0.0}, {0.0, 1.0}, {std::sqrt(0.5), std::sqrt(0.5)}, {std::sqrt(0.5), -std::sqrt(0.5)}};
  offer_waves(best, mu, nu, dirs, R, count, gamma);

  // Harmonic polynomials Re/Im ((z - c)/R)^k, mean zero on the circle. The
  // hull of the supports must sit inside the closed disk.
  bool in_disk = true;
  for (const auto* m : {&cm, &cn})
    for (const auto& p : m->atoms) in_disk = in_disk && std::abs(p[0] - g.center) <= R * (1.0 + 1e-9);
  if (in_disk) {
    for (int k = 1; k <= count; ++k) {
      const double kr = k / R;
      const double norm = gamma <= 1.0
                              ? 1.0 + std::pow(2.0, 1.0 - gamma) * std::pow(kr, gamma)
                              : 1.0 + kr + std::pow(2.0 * kr, 2.0 - gamma) *
                                               std::pow(k * (k - 1.0) / (R * R), gamma - 1.0);
      for (bool real_part : {true, false}) {
        auto f = [&](const Point& p, double) {
          const cplx w = std::pow((p[0] - g.center) / R, k);
          return real_part ? w.real() : w.imag();
        };
        const double pairing = circle_mean(cm, f, 0.0) - circle_mean(cn, f, 0.0);
        best.offer(pairing, norm, std::string(real_part ? "Re" : "Im") + "(z^" + std::to_string(k) + ")");
      }
    }
  }

  // Circle Kantorovich potential v(theta) = R int_0^theta sign(D - c*).
  if (gamma <= 1.0 && cm.on_circle && cn.on_circle) {
    const CircleDifference diff(cm, cn);
    const double cstar = diff.minimize().first;
    struct Seg {
      double p, q, sign;
    };
    std::vector<Seg> segs;
    double pos = 0.0, neg = 0.0, zero = 0.0;
    for (const auto& pc : diff.pieces()) {
      const double a = pc.d0 - cstar, b = pc.at(pc.q) - cstar;
      auto push = [&](double p, double q, double val) {
        const double s = val > 1e-15 ? 1.0 : val < -1e-15 ? -1.0 : 0.0;
        (s > 0 ? pos : s < 0 ? neg : zero) += q - p;
        segs.push_back({p, q, s});
      };
      if (a * b < 0.0) {
        const double r = pc.p + (pc.q - pc.p) * a / (a - b);
        push(pc.p, r, a);
        push(r, pc.q, b);
      } else {
        push(pc.p, pc.q, 0.5 * (a + b));
      }
    }
    const double tie = zero > 0.0 ? std::clamp((neg - pos) / zero, -1.0, 1.0) : 0.0;
    const double drift = pos - neg + tie * zero;  // nonzero only through rounding
    std::vector<double> knots{0.0}, values{0.0};
    double v = 0.0, vmin = 0.0, vmax = 0.0;
    for (const auto& s : segs) {
      const double sg = s.sign != 0.0 ? s.sign : tie;
      v += R * (sg - drift / (2.0 * kPi)) * (s.q - s.p);
      knots.push_back(s.q);
      values.push_back(v);
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
    auto value_at = [&](double th) {
      const auto it = std::upper_bound(knots.begin(), knots.end(), th);
      const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - knots.begin()), knots.size() - 1);
      if (i == 0) return values[0];
      const double t = (th - knots[i - 1]) / (knots[i] - knots[i - 1]);
      return values[i - 1] + t * (values[i] - values[i - 1]);
    };
    double uniform_mean = 0.0;  // trapezoid is exact on linear pieces
    for (std::size_t i = 1; i < knots.size(); ++i)
      uniform_mean += 0.5 * (values[i] + values[i - 1]) * (knots[i] - knots[i - 1]);
    uniform_mean /= 2.0 * kPi;
    auto at_atom = [&](const Point&, double th) { return value_at(th); };
    const double pairing = circle_mean(cm, at_atom, uniform_mean) - circle_mean(cn, at_atom, uniform_mean);
    // Geodesic Lipschitz constant lg; the chord/arc ratio turns it into a
    // Euclidean constant that depends on how far the oscillation reaches.
    const double lg = 1.0 + std::abs(drift) / (2.0 * kPi);
    const double osc = vmax - vmin;
    const double gstar = osc / lg;
    const double lip = gstar >= kPi * R ? lg * 0.5 * kPi
                       : gstar > 0.0    ? lg * gstar / (2.0 * R * std::sin(gstar / (2.0 * R)))
                                        : lg;
    best.offer(pairing, lipschitz_norm(osc, lip, gamma), "circle-potential");
  }
  return best;
}

Best plane_dictionary(const MeasureDescriptor& mu, const MeasureDescriptor& nu, double gamma, int count,
                      const TransportResult* ot) {
  Best best;
  std::array<double, 2> lo{kInf, kInf}, hi{-kInf, -kInf};
  for (const auto* m : {&mu, &nu})
    for (const auto& p : m->discrete.atoms) {
      const auto x = plane_coords(p);
      for (int i = 0; i < 2; ++i) {
        lo[i] = std::min(lo[i], x[i]);
        hi[i] = std::max(hi[i], x[i]);
      }
    }
  const double half = std::max({0.5 * (hi[0] - lo[0]), 0.5 * (hi[1] - lo[1]), 1e-300});
  const std::vector<std::array<double, 2>> dirs{
      {1.0, 0.0}, {0.0, 1.0}, {std::sqrt(0.5), std::sqrt(0.5)}, {std::sqrt(0.5), -std::sqrt(0.5)}};
  offer_waves(best, mu, nu, dirs, half, count, gamma);

  if (gamma <= 1.0 && ot && ot->cost > 0.0) {
    // c-transform phi(x) = min_j (v_j + |x - y_j|): 1-Lipschitz, phi(x_i) >= u_i, phi(y_j) <= v_j.
    std::vector<std::array<double, 2>> ys;
    for (const auto& p : nu.discrete.atoms) ys.push_back(plane_coords(p));
    auto phi = [&](std::array<double, 2> x) {
      double m = kInf;
      for (std::size_t j = 0; j < ys.size(); ++j)
        m = std::min(m, ot->target_potential[j] + std::hypot(x[0] - ys[j][0], x[1] - ys[j][1]));
      return m;
    };
    double pairing = 0.0;
    for (std::size_t i = 0; i < mu.discrete.atoms.size(); ++i)
      pairing += mu.discrete.weights[i] * phi(plane_coords(mu.discrete.atoms[i]));
    for (std::size_t j = 0; j < ys.size(); ++j) pairing -= nu.discrete.weights[j] * phi(ys[j]);
    // Oscillation over the bounding box from a grid plus the covering radius.
    constexpr int G = 48;
    double pmin = kInf, pmax = -kInf;
    const double hx = (hi[0] - lo[0]) / G, hy = (hi[1] - lo[1]) / G;
    for (int i = 0; i <= G; ++i)
      for (int j = 0; j <= G; ++j) {
        const double v = phi({lo[0] + hx * i, lo[1] + hy * j});
        pmin = std::min(pmin, v);
        pmax = std::max(pmax, v);
      }
    const double osc = pmax - pmin + std::hypot(hx, hy);
    best.offer(pairing, lipschitz_norm(osc, 1.0, gamma), "transport-potential");
  }
  return best;
}

}  // namespace

// --- public API ------------------------------------------------------------

DiscreteMeasure make_discrete(std::vector<Point> atoms, std::vector<double> weights) {
  if (atoms.empty()) throw input_error("a measure needs at least one atom");
  if (atoms.size() != weights.size()) throw input_error("atom and weight counts differ");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw input_error("weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw input_error("weights must sum to 1");
  std::vector<Point> sorted = atoms;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw input_error("atoms must be distinct");
  return {std::move(atoms), std::move(weights)};
}

DiscreteMeasure uniform_measure(std::vector<Point> atoms) {
  std::vector<double> w(atoms.size(), atoms.empty() ? 0.0 : 1.0 / static_cast<double>(atoms.size()));
  return make_discrete(std::move(atoms), std::move(w));
}

DiscreteMeasure fekete_measure(const fekete::Configuration& config) { return uniform_measure(config.points); }

const char* measure_kind_name(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::Arcsine: return "arcsine";
    case MeasureKind::UniformCircle: return "uniform-circle";
    case MeasureKind::Discrete: return "discrete";
    case MeasureKind::EmpiricalReference: return "empirical-reference";
  }
  return "unknown";
}

MeasureDescriptor MeasureDescriptor::arcsine(double a, double b) {
  if (!(a < b)) throw input_error("arcsine law needs a < b");
  MeasureDescriptor m;
  m.kind = MeasureKind::Arcsine;
  m.a = a;
  m.b = b;
  return m;
}

MeasureDescriptor MeasureDescriptor::uniform_circle(cplx center, double radius) {
  if (!(radius > 0.0)) throw input_error("circle radius must be positive");
  MeasureDescriptor m;
  m.kind = MeasureKind::UniformCircle;
  m.center = center;
  m.radius = radius;
  return m;
}

MeasureDescriptor MeasureDescriptor::from_discrete(DiscreteMeasure d) {
  MeasureDescriptor m;
  m.kind = MeasureKind::Discrete;
  m.discrete = std::move(d);
  return m;
}

double MeasureDescriptor::cdf(double x) const { return to_line(*this).cdf(x); }

double MeasureDescriptor::angle_cdf(double theta, cplx around) const {
  if (kind == MeasureKind::UniformCircle) return std::clamp(theta / (2.0 * kPi), 0.0, 1.0);
  if (!is_atomic()) throw input_error("angular CDF needs a circle or atomic measure");
  double s = 0.0;
  for (std::size_t i = 0; i < discrete.atoms.size(); ++i)
    if (angle_of(discrete.atoms[i][0] - around) <= theta) s += discrete.weights[i];
  return s;
}

MeasureDescriptor equilibrium_closed_form(const geometry::CompactSet& set) {
  if (const auto* s = std::get_if<geometry::Interval>(&set.kind())) return MeasureDescriptor::arcsine(s->a, s->b);
  if (const auto* s = std::get_if<geometry::Disk>(&set.kind()))
    return MeasureDescriptor::uniform_circle(s->center, s->radius);
  if (const auto* s = std::get_if<geometry::Circle>(&set.kind()))
    return MeasureDescriptor::uniform_circle(s->center, s->radius);
  throw Error("measures", ErrorKind::NoClosedForm,
              "no closed-form equilibrium measure for " + set.kind_name() + "; use an empirical reference");
}

double wasserstein1_circle(const MeasureDescriptor& mu, const MeasureDescriptor& nu, cplx center, double radius) {
  const CircleMeasure cm = to_circle(mu, center, radius), cn = to_circle(nu, center, radius);
  if (!cm.on_circle || !cn.on_circle) throw input_error("atoms are not on the circle");
  return radius * CircleDifference(cm, cn).minimize().second;
}

double wasserstein1_1d(const MeasureDescriptor& mu, const MeasureDescriptor& nu) {
  const PairGeometry g = classify(mu, nu);
  if (g.kind == Geometry::Circle) return wasserstein1_circle(mu, nu, g.center, g.radius);
  if (g.kind == Geometry::Plane) throw input_error("measures are not on a common line or circle");
  const LineDifference diff(to_line(mu), to_line(nu));
  return diff.empty() ? 0.0 : diff.integrate(diff.lo(), diff.hi(), true);
}

TransportResult optimal_transport(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const std::size_t n = mu.atoms.size(), m = nu.atoms.size();
  if (n == 0 || m == 0) throw input_error("transport needs nonempty measures");
  long long tn = 0, tm = 0;
  auto sa = integer_masses(mu.weights, tn);
  auto sb = integer_masses(nu.weights, tm);
  // common total: lcm for uniform weights, otherwise both already share 2^30
  const long long total = std::lcm(tn, tm);
  if (total > (1LL << 40)) throw Error("measures", ErrorKind::Capacity, "transport masses overflow");
  for (auto& x : sa) x *= total / tn;
  for (auto& x : sb) x *= total / tm;

  std::vector<double> cost(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) cost[i * m + j] = dist2(mu.atoms[i], nu.atoms[j]);
  std::vector<long long> flow(n * m, 0);
  std::vector<double> ps(n, 0.0), pt(m, 0.0);
  long long remaining = total;

  std::vector<double> ds(n), dt(m);
  std::vector<long> par_t(m), par_s(n);
  std::vector<char> done_s(n), done_t(m);
  while (remaining > 0) {
    std::fill(done_s.begin(), done_s.end(), 0);
    std::fill(done_t.begin(), done_t.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      ds[i] = sa[i] > 0 ? 0.0 : kInf;
      par_s[i] = -1;
    }
    std::fill(dt.begin(), dt.end(), kInf);
    long target = -1;
    for (;;) {
      // pop the closest unsettled node
      double best = kInf;
      long bi = -1;
      bool is_source = true;
      for (std::size_t i = 0; i < n; ++i)
        if (!done_s[i] && ds[i] < best) {
          best = ds[i];
          bi = static_cast<long>(i);
          is_source = true;
        }
      for (std::size_t j = 0; j < m; ++j)
        if (!done_t[j] && dt[j] < best) {
          best = dt[j];
          bi = static_cast<long>(j);
          is_source = false;
        }
      if (bi < 0) break;
      if (is_source) {
        const auto i = static_cast<std::size_t>(bi);
        done_s[i] = 1;
        for (std::size_t j = 0; j < m; ++j) {
          if (done_t[j]) continue;
          const double nd = ds[i] + std::max(0.0, cost[i * m + j] + ps[i] - pt[j]);
          if (nd < dt[j]) {
            dt[j] = nd;
            par_t[j] = static_cast<long>(i);
          }
        }
      } else {
        const auto j = static_cast<std::size_t>(bi);
        done_t[j] = 1;
        if (sb[j] > 0) {
          target = bi;
          break;
        }
        for (std::size_t i = 0; i < n; ++i) {
          if (done_s[i] || flow[i * m + j] == 0) continue;
          const double nd = dt[j] + std::max(0.0, -cost[i * m + j] + pt[j] - ps[i]);
          if (nd < ds[i]) {
            ds[i] = nd;
            par_s[i] = bi;
          }
        }
      }
    }
    if (target < 0) throw Error("measures", ErrorKind::Internal, "transport augmentation failed");
    const double dlim = dt[static_cast<std::size_t>(target)];
    for (std::size_t i = 0; i < n; ++i) ps[i] += std::min(ds[i], dlim);
    for (std::size_t j = 0; j < m; ++j) pt[j] += std::min(dt[j], dlim);

    // walk back to find the bottleneck, then augment
    long long push = sb[static_cast<std::size_t>(target)];
    long j = target;
    for (;;) {
      const auto i = static_cast<std::size_t>(par_t[static_cast<std::size_t>(j)]);
      if (par_s[i] < 0) {
        push = std::min(push, sa[i]);
        break;
      }
      const auto jb = static_cast<std::size_t>(par_s[i]);
      push = std::min(push, flow[i * m + jb]);
      j = static_cast<long>(jb);
    }
    sb[static_cast<std::size_t>(target)] -= push;
    j = target;
    for (;;) {
      const auto i = static_cast<std::size_t>(par_t[static_cast<std::size_t>(j)]);
      flow[i * m + static_cast<std::size_t>(j)] += push;
      if (par_s[i] < 0) {
        sa[i] -= push;
        break;
      }
      const auto jb = static_cast<std::size_t>(par_s[i]);
      flow[i * m + jb] -= push;
      j = static_cast<long>(jb);
    }
    remaining -= push;
  }

  TransportResult out;
  long double c = 0.0L;
  for (std::size_t k = 0; k < n * m; ++k) c += static_cast<long double>(flow[k]) * cost[k];
  out.cost = static_cast<double>(c / total);
  out.source_potential.resize(n);
  out.target_potential.resize(m);
  for (std::size_t i = 0; i < n; ++i) out.source_potential[i] = -ps[i];
  for (std::size_t j = 0; j < m; ++j) out.target_potential[j] = -pt[j];
  return out;
}

W1Estimate wasserstein1(const MeasureDescriptor& mu, const MeasureDescriptor& nu) {
  const PairGeometry g = classify(mu, nu);
  switch (g.kind) {
    case Geometry::Line: {
      const LineDifference diff(to_line(mu), to_line(nu));
      if (diff.empty()) return {0.0, "line"};
      const double v = diff.integrate(diff.lo(), diff.hi(), true);
      return {v, diff.used_quadrature() ? "line-quadrature" : "line"};
    }
    case Geometry::Circle: {
      const CircleMeasure cm = to_circle(mu, g.center, g.radius), cn = to_circle(nu, g.center, g.radius);
      const double w = g.radius * CircleDifference(cm, cn).minimize().second;
      if (cm.on_circle && cn.on_circle) return {w, "circle"};
      // radial projection onto the circle, then geodesic transport
      return {w + cm.projection_cost + cn.projection_cost, "circle+projection"};
    }
    case Geometry::Plane:
      return {optimal_transport(mu.discrete, nu.discrete).cost, "transport"};
  }
  throw Error("measures", ErrorKind::Internal, "unhandled geometry");
}

GammaBracket dist_gamma(const MeasureDescriptor& mu, const MeasureDescriptor& nu, double gamma, int dictionary_size) {
  if (!(gamma > 0.0 && gamma <= 2.0)) throw input_error("γ must lie in (0,2]");
  if (dictionary_size < 1) throw input_error("dictionary size must be positive");
  const PairGeometry g = classify(mu, nu);
  GammaBracket out;
  out.gamma_above_one = gamma > 1.0;

  std::optional<TransportResult> ot;
  W1Estimate w1;
  if (g.kind == Geometry::Plane) {
    ot = optimal_transport(mu.discrete, nu.discrete);
    w1 = {ot->cost, "transport"};
  } else {
    w1 = wasserstein1(mu, nu);
  }
  // Unit C^gamma ball inside the 1-Lipschitz ball for gamma >= 1; for
  // gamma < 1, |v(x) - v(y)| <= |x - y|^gamma and Jensen under any coupling.
  out.upper = gamma >= 1.0 ? w1.value : std::pow(w1.value, gamma);
  out.upper_method = gamma >= 1.0 ? w1.method : w1.method + "^gamma";

  Best best;
  switch (g.kind) {
    case Geometry::Line: best = line_dictionary(mu, nu, gamma, dictionary_size); break;
    case Geometry::Circle: best = circle_dictionary(mu, nu, g, gamma, dictionary_size); break;
    case Geometry::Plane: best = plane_dictionary(mu, nu, gamma, dictionary_size, ot ? &*ot : nullptr); break;
  }
  out.lower = best.value;
  out.best_test = best.name;
  if (out.lower > out.upper * (1.0 + 1e-9) + 1e-14)
    throw Error("measures", ErrorKind::Internal,
                "dist_gamma bracket inverted (" + std::to_string(out.lower) + " > " + std::to_string(out.upper) + ")");
  out.lower = std::min(out.lower, out.upper);
  return out;
}

MeasureDescriptor empirical_reference(const geometry::CompactSet& set, int degree, const ReferenceOptions& options) {
  if (degree < 2) throw input_error("reference degree must be >= 2");
  auto measure_at = [&](int d, bool& capped) {
    const auto mesh = geometry::generate_mesh(set, d, options.density, options.max_intervals);
    capped = capped || mesh.capped;
    const fekete::Problem problem(mesh, poly::Basis::default_for(set, d));
    return MeasureDescriptor::from_discrete(fekete_measure(fekete::solve(problem, options.solver)));
  };
  bool capped = false;
  MeasureDescriptor ref = measure_at(degree, capped);
  const MeasureDescriptor half = measure_at(degree / 2, capped);
  ref.kind = MeasureKind::EmpiricalReference;
  ref.quality = ReferenceQuality{degree, degree / 2, wasserstein1(ref, half).value, capped};
  return ref;
}

}  // namespace upcfekete::measures
