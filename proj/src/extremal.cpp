#include "upcfekete/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "upcfekete/error.hpp"

namespace upcfekete::extremal {

namespace {

Error input_error(const std::string& msg) { return Error("extremal", ErrorKind::Input, msg); }

double nan_to_zero(double x) { return std::isnan(x) ? 0.0 : x; }

}  // namespace

ExtremalEstimate::ExtremalEstimate(fekete::Configuration config, poly::Basis basis,
                                   const geometry::CandidateMesh& mesh)
    : config_(std::move(config)), basis_(std::move(basis)), mesh_spacing_(mesh.spacing) {
  if (basis_.degree() < 1) throw input_error("extremal brackets need degree >= 1");
  if (config_.points.size() != basis_.size())
    throw Error("extremal", ErrorKind::Shape, "configuration size differs from N_d of the basis");
  config_.degree = basis_.degree();
  const Eigen::MatrixXcd v = poly::evaluation_matrix<cplx>(basis_, config_.points);
  if (!std::isfinite(poly::log_abs_det(v)))
    throw Error("extremal", ErrorKind::DegenerateConfiguration, "interpolation at the configuration is singular");
  lu_.compute(v);
  const Eigen::MatrixXcd lag = lu_.solve(poly::evaluation_matrix<cplx>(basis_, mesh.points));
  // l_j(x_j) = 1, so every norm is at least 1 even if the nodes are off-mesh.
  norms_.assign(basis_.size(), 1.0);
  for (Eigen::Index j = 0; j < lag.rows(); ++j)
    norms_[static_cast<std::size_t>(j)] = std::max(1.0, lag.row(j).cwiseAbs().maxCoeff());
  max_norm_ = *std::max_element(norms_.begin(), norms_.end());
}

double ExtremalEstimate::count_slack() const {
  return std::log(static_cast<double>(basis_.size())) / basis_.degree();
}

Bracket ExtremalEstimate::bracket(const Point& z) const {
  Eigen::VectorXcd e(static_cast<Eigen::Index>(basis_.size()));
  basis_.evaluate(z, std::span<cplx>(e.data(), basis_.size()));
  const Eigen::VectorXcd l = lu_.solve(e);
  double best = 0.0, sum = 0.0;
  for (Eigen::Index j = 0; j < l.size(); ++j) {
    const double a = std::abs(l(j));
    best = std::max(best, a / norms_[static_cast<std::size_t>(j)]);
    sum += a;
  }
  const double d = basis_.degree();
  Bracket b{std::log(best) / d, std::log(sum * std::max(1.0, max_norm_)) / d};
  if (b.lower > b.upper + 1e-9) throw Error("extremal", ErrorKind::Internal, "bracket order violated");
  return b;
}

poly::Basis conditioning_basis(const geometry::CandidateMesh& mesh, int degree) {
  if (mesh.points.empty()) throw input_error("empty mesh");
  const int n = mesh.points.front().n;
  const bool real = std::all_of(mesh.points.begin(), mesh.points.end(), [](const Point& p) { return p.is_real(); });
  if (real) {
    geometry::Bounds b;
    b.axes = n;
    for (int i = 0; i < n; ++i) {
      auto [lo, hi] = std::minmax_element(mesh.points.begin(), mesh.points.end(),
                                          [i](const Point& p, const Point& q) { return p.x(i) < q.x(i); });
      b.lo[static_cast<std::size_t>(i)] = lo->x(i);
      b.hi[static_cast<std::size_t>(i)] = hi->x(i);
    }
    if (b.side(0) > 0.0 && (n == 1 || b.side(1) > 0.0)) return poly::Basis::chebyshev(n, degree, b);
  }
  Point c = zero_point(n);
  for (const auto& p : mesh.points) c = c + p;
  return poly::Basis::monomial(n, degree, (1.0 / static_cast<double>(mesh.points.size())) * c);
}

Bracket extremal_bracket(const fekete::Configuration& config, const geometry::CandidateMesh& mesh, const Point& z) {
  return ExtremalEstimate(config, conditioning_basis(mesh, config.degree), mesh).bracket(z);
}

double SetEstimate::slack() const { return estimate.count_slack() + nan_to_zero(mesh_defect); }

SetEstimate estimate_for_set(const geometry::CompactSet& set, int degree, double density, fekete::SolverKind solver) {
  auto mesh = geometry::generate_mesh(set, degree, density);
  auto basis = poly::Basis::default_for(set, degree);
  const fekete::Problem problem(mesh, basis);
  auto config = fekete::solve(problem, solver);
  const double defect = geometry::mesh_defect(set, mesh, degree);
  ExtremalEstimate est(std::move(config), std::move(basis), mesh);
  return SetEstimate{std::move(mesh), std::move(est), defect};
}

ModulusSamples modulus_samples(const ExtremalEstimate& est, const Point& anchor, std::span<const double> deltas,
                               double r) {
  if (deltas.empty()) throw input_error("delta grid is empty");
  ModulusSamples out;
  out.anchor = anchor;
  out.r = r;
  out.degree = est.degree();
  out.mesh_spacing = est.mesh_spacing();
  out.deltas.assign(deltas.begin(), deltas.end());
  std::sort(out.deltas.begin(), out.deltas.end());
  if (!(out.deltas.front() > 0.0)) throw input_error("delta grid must be positive");

  constexpr int kAngles1 = 48, kAngles2 = 12, kLatitudes = 5;
  double running = 0.0;
  for (double delta : out.deltas) {
    double sup = 0.0;
    if (anchor.n == 1) {
      for (int k = 0; k < kAngles1; ++k) {
        const double th = 2.0 * std::numbers::pi * k / kAngles1;
        sup = std::max(sup, est.upper(anchor + Point::complex(std::polar(delta, th))));
      }
    } else {
      for (int c = 0; c < kLatitudes; ++c) {
        const double chi = 0.5 * std::numbers::pi * c / (kLatitudes - 1);
        for (int k1 = 0; k1 < kAngles2; ++k1)
          for (int k2 = 0; k2 < kAngles2; ++k2) {
            const double t1 = 2.0 * std::numbers::pi * k1 / kAngles2, t2 = 2.0 * std::numbers::pi * k2 / kAngles2;
            const Point step = Point::complex(std::polar(delta * std::cos(chi), t1), std::polar(delta * std::sin(chi), t2));
            sup = std::max(sup, est.upper(anchor + step));
          }
      }
    }
    running = std::max(running, sup);
    out.values.push_back(running);
  }
  return out;
}

ModulusSamples modulus_of_continuity(const geometry::CompactSet& set, const Point& anchor, double r,
                                     std::span<const double> deltas, int degree, fekete::SolverKind solver,
                                     double density) {
  if (!set.contains(anchor)) throw input_error("anchor is not in the set");
  if (!(r > 0.0)) throw input_error("radius must be positive");
  const auto clip = geometry::CompactSet::ball_clip(set, anchor, r);
  try {
    const SetEstimate se = estimate_for_set(clip, degree, density, solver);
    return modulus_samples(se.estimate, anchor, deltas, r);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::DegenerateMesh || e.kind() == ErrorKind::DegenerateSet)
      throw Error("extremal", ErrorKind::DegenerateSet,
                  "K ∩ B(a, r) is too thin to mesh at degree " + std::to_string(degree) + ": " + e.what());
    throw;
  }
}

HcpFit hcp_fit(std::span<const ModulusSamples> samples) {
  HcpFit fit;
  std::vector<std::array<double, 3>> rows;  // log delta, log r, log w
  std::vector<double> radii;
  for (const auto& s : samples) {
    if (!(s.r > 0.0)) throw Error("extremal", ErrorKind::Fit, "modulus samples need a positive radius");
    std::size_t good = 0;
    for (std::size_t i = 0; i < s.deltas.size(); ++i) {
      if (!(s.values[i] > 0.0) || !(s.deltas[i] > 0.0)) {
        ++fit.excluded;
        continue;
      }
      rows.push_back({std::log(s.deltas[i]), std::log(s.r), std::log(s.values[i])});
      ++good;
    }
    if (good >= 4) radii.push_back(s.r);
  }
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  if (rows.empty()) throw Error("extremal", ErrorKind::Fit, "every modulus sample was non-positive");
  if (radii.size() < 2) throw Error("extremal", ErrorKind::Fit, "HCP fit needs >= 2 radii with >= 4 positive samples");

  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), 3);
  Eigen::VectorXd b(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    a(i, 0) = 1.0;
    a(i, 1) = r[0];
    a(i, 2) = -r[1];
    b(i) = r[2];
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 3) throw Error("extremal", ErrorKind::Fit, "HCP design matrix is rank deficient");
  const Eigen::Vector3d x = qr.solve(b);
  fit.C = std::exp(x(0));
  fit.mu = x(1);
  fit.q = x(2);
  fit.max_residual = (a * x - b).cwiseAbs().maxCoeff();
  fit.used = rows.size();
  return fit;
}

namespace {

void finish(InequalityReport& rep) {
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& row : rep.rows) rep.worst_margin = std::min(rep.worst_margin, row.margin);
  if (rep.rows.empty()) rep.worst_margin = 0.0;
  rep.ok = rep.worst_margin >= 0.0;
}

}  // namespace

InequalityReport check_polynomial_image_inequality(const geometry::CompactSet& E, const PolynomialMap& h,
                                                   std::span<const Point> ws, int degree, double density) {
  if (!h.eval) throw input_error("polynomial map is empty");
  if (h.degree < 1) throw input_error("polynomial map degree must be >= 1");
  const SetEstimate est_e = estimate_for_set(E, degree, density);

  std::vector<Point> image;
  image.reserve(est_e.mesh.points.size());
  for (const auto& p : est_e.mesh.points) image.push_back(h.eval(p));
  std::sort(image.begin(), image.end());
  std::vector<Point> distinct;
  double extent = 0.0;
  for (const auto& p : image) extent = std::max(extent, norm_inf(p));
  for (const auto& p : image)
    if (distinct.empty() || dist_inf(p, distinct.back()) > 1e-12 * std::max(1.0, extent)) distinct.push_back(p);
  if (distinct.size() < 2)
    throw Error("extremal", ErrorKind::DegenerateSet, "h(E) is a single point; its extremal function is +inf off it");

  geometry::CandidateMesh image_mesh;
  image_mesh.points = std::move(distinct);
  image_mesh.max_valid_degree = degree;
  const bool real_line = image_mesh.points.front().n == 1 &&
                         std::all_of(image_mesh.points.begin(), image_mesh.points.end(),
                                     [](const Point& p) { return p.is_real(); });
  double defect_h = 0.0;
  std::vector<double> xs;
  for (const auto& p : image_mesh.points) xs.push_back(p.x());
  if (real_line) {
    // sorted by Point order, which is the real order on the line
    defect_h = geometry::interval_mesh_defect(xs, degree);
  }
  for (std::size_t i = 1; i < xs.size(); ++i) image_mesh.spacing = std::max(image_mesh.spacing, xs[i] - xs[i - 1]);

  const auto basis = conditioning_basis(image_mesh, degree);
  const fekete::Problem problem(image_mesh, basis);
  const ExtremalEstimate est_h(fekete::solve(problem, fekete::SolverKind::GreedyExchange), basis, image_mesh);

  const double k = h.degree;
  const double slack = defect_h + k * est_e.slack();
  InequalityReport rep;
  for (const auto& w : ws) {
    InequalityRow row;
    row.z = w;
    row.w = h.eval(w);
    row.lhs = est_h.lower(row.w);
    row.rhs = k * est_e.estimate.upper(w);
    row.slack = slack;
    row.margin = row.rhs + row.slack - row.lhs;
    rep.rows.push_back(row);
  }
  finish(rep);
  return rep;
}

InequalityReport check_blocki_inequality(const geometry::CompactSet& set,
                                         std::span<const std::pair<Point, Point>> pairs, const BlockiOptions& options) {
  std::vector<double> deltas = options.deltas;
  if (deltas.empty())
    for (int i = 0; i < 24; ++i) deltas.push_back(std::pow(10.0, -3.0 + 3.0 * i / 23.0));
  std::sort(deltas.begin(), deltas.end());
  for (const auto& [z, w] : pairs)
    if (dist2(z, w) > 1.0 + 1e-12) throw input_error("Blocki pairs need |z - w| <= 1");

  const SetEstimate se = estimate_for_set(set, options.degree, options.density);
  const auto anchors = geometry::boundary_net(set, se.mesh, options.max_anchors);
  if (anchors.empty()) throw Error("extremal", ErrorKind::DegenerateSet, "boundary net is empty");
  std::vector<double> global(deltas.size(), 0.0);
  for (const auto& a : anchors) {
    const auto ms = modulus_samples(se.estimate, a, deltas);
    for (std::size_t i = 0; i < deltas.size(); ++i) global[i] = std::max(global[i], ms.values[i]);
  }

  InequalityReport rep;
  for (const auto& [z, w] : pairs) {
    const Bracket bz = se.estimate.bracket(z), bw = se.estimate.bracket(w);
    const double dist = dist2(z, w);
    const auto it = std::lower_bound(deltas.begin(), deltas.end(), dist);
    if (it == deltas.end()) throw input_error("pair distance exceeds the delta grid");
    const double omega = global[static_cast<std::size_t>(it - deltas.begin())];
    InequalityRow row;
    row.z = z;
    row.w = w;
    row.lhs = std::abs(0.5 * (bz.lower + bz.upper) - 0.5 * (bw.lower + bw.upper));
    row.rhs = omega;
    // half-widths of both brackets, each bracket's own slack, and the
    // count slack separating the sampled modulus from the true one
    row.slack = 0.5 * (bz.upper - bz.lower) + 0.5 * (bw.upper - bw.lower) + 2.0 * se.slack() +
                se.estimate.count_slack();
    row.margin = row.rhs + row.slack - row.lhs;
    rep.rows.push_back(row);
  }
  finish(rep);
  return rep;
}

double interval_green(cplx z) {
  const cplx s = std::sqrt(z * z - 1.0);
  return std::log(std::max(std::abs(z + s), std::abs(z - s)));
}

}  // namespace upcfekete::extremal
