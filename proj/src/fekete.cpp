#include "upcfekete/fekete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "upcfekete/error.hpp"

namespace upcfekete::fekete {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Relative score tolerance treating two candidates as tied (lowest index wins).
constexpr double kTieTol = 1e-9;

Error solver_error(ErrorKind kind, const std::string& msg) { return Error("fekete", kind, msg); }

template <class Scalar>
using Mat = poly::Matrix<Scalar>;
template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
Mat<Scalar> mesh_matrix(const Problem& p) {
  return poly::evaluation_matrix<Scalar>(p.basis(), p.mesh().points, p.weight(), p.scale());
}

// Rows of the returned N x M matrix are orthonormal and span the same row
// space as the mesh evaluation matrix, so any other basis of P_d gives the
// same matrix up to a unitary factor on the left.
template <class Scalar>
Mat<Scalar> orthonormal_rows(const Mat<Scalar>& a) {
  const Eigen::Index n = a.rows(), m = a.cols();
  if (m < n) throw solver_error(ErrorKind::DegenerateMesh, "mesh has fewer points than N_d");
  Eigen::HouseholderQR<Mat<Scalar>> qr(a.adjoint());
  const auto& r = qr.matrixQR();
  double rmax = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) rmax = std::max(rmax, std::abs(r(i, i)));
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(std::abs(r(i, i)) > 1e-13 * rmax))
      throw solver_error(ErrorKind::DegenerateMesh, "mesh is not unisolvent for degree " + std::to_string(n));
  Mat<Scalar> q = qr.householderQ() * Mat<Scalar>::Identity(m, n);
  return q.adjoint();
}

// Lowest index among candidates whose score is within kTieTol of the best.
template <class ScoreFn>
std::optional<std::size_t> pick_max(std::size_t count, const std::vector<char>& taken, ScoreFn score) {
  double best = -1.0;
  for (std::size_t j = 0; j < count; ++j)
    if (!taken[j]) best = std::max(best, score(j));
  if (best < 0.0) return std::nullopt;
  for (std::size_t j = 0; j < count; ++j)
    if (!taken[j] && score(j) >= best * (1.0 - kTieTol)) return j;
  return std::nullopt;
}

template <class Scalar>
std::vector<std::size_t> greedy_indices(const Problem& p) {
  Mat<Scalar> u = orthonormal_rows<Scalar>(mesh_matrix<Scalar>(p));
  const auto n = static_cast<std::size_t>(u.rows());
  const auto m = static_cast<std::size_t>(u.cols());
  std::vector<char> taken(m, 0);
  std::vector<std::size_t> chosen;
  Mat<Scalar> basis(u.rows(), 0);
  std::vector<double> norms(m);
  for (std::size_t j = 0; j < m; ++j) norms[j] = u.col(static_cast<Eigen::Index>(j)).norm();
  const double initial = *std::max_element(norms.begin(), norms.end());
  for (std::size_t step = 0; step < n; ++step) {
    const auto pick = pick_max(m, taken, [&](std::size_t j) { return norms[j]; });
    if (!pick || norms[*pick] <= 1e-10 * initial)
      throw solver_error(ErrorKind::DegenerateMesh, "rank deficiency after " + std::to_string(step) + " points");
    const std::size_t j = *pick;
    Vec<Scalar> q = u.col(static_cast<Eigen::Index>(j)) / norms[j];
    // Re-orthogonalize against the accepted directions.
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index c = 0; c < basis.cols(); ++c) q -= basis.col(c) * basis.col(c).dot(q);
    q.normalize();
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = q;
    // one pass per column keeps the update cache-resident on large meshes
    for (std::size_t c = 0; c < m; ++c) {
      auto col = u.col(static_cast<Eigen::Index>(c));
      col -= q * q.dot(col);
      norms[c] = col.norm();
    }
    taken[j] = 1;
    chosen.push_back(j);
  }
  return chosen;
}

template <class Scalar>
LejaSequence leja_impl(const Problem& p, std::size_t count, std::optional<std::size_t> start) {
  Mat<Scalar> g = mesh_matrix<Scalar>(p);
  const auto m = static_cast<std::size_t>(g.cols());
  std::vector<char> taken(m, 0);
  LejaSequence out;
  double initial = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    std::optional<std::size_t> pick;
    if (k == 0 && start) {
      if (*start >= m) throw solver_error(ErrorKind::Input, "Leja start index outside the mesh");
      pick = *start;
    } else {
      pick = pick_max(m, taken, [&](std::size_t j) { return std::abs(g(row, static_cast<Eigen::Index>(j))); });
    }
    const double pivot_abs = pick ? std::abs(g(row, static_cast<Eigen::Index>(*pick))) : 0.0;
    if (k == 0) initial = std::max(pivot_abs, 1e-300);
    if (!pick || pivot_abs <= 1e-13 * initial)
      throw solver_error(ErrorKind::DegenerateMesh, "rank deficiency after " + std::to_string(k) + " Leja points");
    const auto pj = static_cast<Eigen::Index>(*pick);
    const Scalar pivot = g(row, pj);
    for (Eigen::Index i = row + 1; i < g.rows(); ++i) {
      const Scalar f = g(i, pj) / pivot;
      if (f != Scalar(0)) g.row(i) -= f * g.row(row);
    }
    taken[*pick] = 1;
    out.indices.push_back(*pick);
    out.points.push_back(p.mesh().points[*pick]);
  }
  return out;
}

template <class Scalar>
Configuration exchange_impl(const Problem& p, const Configuration& config, int max_rounds, double tol) {
  const Mat<Scalar> a = mesh_matrix<Scalar>(p);
  const auto m = static_cast<std::size_t>(a.cols());
  const auto n = static_cast<Eigen::Index>(p.size());
  std::vector<std::size_t> s = config.mesh_indices;
  auto solve_all = [&]() {
    Mat<Scalar> v(n, n);
    for (Eigen::Index i = 0; i < n; ++i) v.col(i) = a.col(static_cast<Eigen::Index>(s[static_cast<std::size_t>(i)]));
    Eigen::PartialPivLU<Mat<Scalar>> lu(v);
    return Mat<Scalar>(lu.solve(a));
  };
  Mat<Scalar> c = solve_all();
  double current = p.objective(s);
  int swaps = 0;
  for (int round = 0; round < max_rounds; ++round) {
    std::vector<char> in_config(m, 0);
    for (auto idx : s) in_config[idx] = 1;
    double best = 1.0;
    Eigen::Index bi = -1, bj = -1;
    for (Eigen::Index i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        if (in_config[j]) continue;
        const double v = std::abs(c(i, static_cast<Eigen::Index>(j)));
        if (v > best) {
          best = v;
          bi = i;
          bj = static_cast<Eigen::Index>(j);
        }
      }
    if (bi < 0 || std::log(best) <= tol) break;
    s[static_cast<std::size_t>(bi)] = static_cast<std::size_t>(bj);
    ++swaps;
    if (swaps % 8 == 0) {
      c = solve_all();
    } else {
      // Sherman-Morrison update of V^{-1} A after replacing column bi.
      Vec<Scalar> col = c.col(bj);
      const Scalar piv = col(bi);
      col(bi) -= Scalar(1);
      const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> row = c.row(bi) / piv;
      c.noalias() -= col * row;
    }
    const double next = p.objective(s);
    if (next < current - 1e-10 * std::max(1.0, std::abs(current)))
      throw solver_error(ErrorKind::Internal, "exchange step decreased the objective");
    current = next;
  }
  if (swaps == 0) return config;
  return p.make_configuration(std::move(s), Provenance::Refined);
}

// --- brute force -----------------------------------------------------------

template <class Scalar>
class BruteSearch {
 public:
  BruteSearch(Mat<Scalar> u, std::vector<std::size_t> seed, double seed_value)
      : u_(std::move(u)),
        n_(static_cast<std::size_t>(u_.rows())),
        m_(static_cast<std::size_t>(u_.cols())),
        best_(std::move(seed)),
        best_value_(seed_value) {
    residuals_.resize(n_ + 1);
    log_norms_.resize(n_ + 1, std::vector<double>(m_));
    residuals_[0] = u_;
    current_.resize(n_);
  }

  std::vector<std::size_t> run() {
    refresh_norms(0, 0);
    descend(0, 0, 0.0);
    return best_;
  }

 private:
  double tol() const { return 1e-10 * std::max(1.0, std::abs(best_value_)); }

  void refresh_norms(std::size_t depth, std::size_t start) {
    for (std::size_t j = start; j < m_; ++j) {
      const double nrm = residuals_[depth].col(static_cast<Eigen::Index>(j)).norm();
      log_norms_[depth][j] = nrm > 0.0 ? std::log(nrm) : kNegInf;
    }
  }

  // Sum of the `count` largest log-norms among candidates j >= start.
  double top_sum(std::size_t depth, std::size_t start, std::size_t count) {
    if (count == 0) return 0.0;
    scratch_.assign(log_norms_[depth].begin() + static_cast<std::ptrdiff_t>(start), log_norms_[depth].end());
    if (scratch_.size() < count) return kNegInf;
    std::nth_element(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(count - 1), scratch_.end(),
                     std::greater<double>());
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += scratch_[i];
    return s;
  }

  void consider_leaf(double value) {
    const bool better = value > best_value_ + tol();
    const bool tie_smaller = std::abs(value - best_value_) <= tol() &&
                             std::lexicographical_compare(current_.begin(), current_.end(), best_.begin(), best_.end());
    if (better || tie_smaller) {
      best_value_ = std::max(best_value_, value);
      best_ = current_;
    }
  }

  void descend(std::size_t depth, std::size_t start, double partial) {
    const std::size_t remaining = n_ - depth;
    if (partial + top_sum(depth, start, remaining) < best_value_ - tol()) return;
    const std::size_t last = m_ - remaining;
    for (std::size_t j = start; j <= last; ++j) {
      const double lj = log_norms_[depth][j];
      if (lj == kNegInf) continue;
      const double value = partial + lj;
      current_[depth] = j;
      if (remaining == 1) {
        consider_leaf(value);
        continue;
      }
      if (value + top_sum(depth, j + 1, remaining - 1) < best_value_ - tol()) continue;
      // Project the new direction out of every later candidate.
      const auto& res = residuals_[depth];
      Vec<Scalar> q = res.col(static_cast<Eigen::Index>(j)) / std::exp(lj);
      auto& next = residuals_[depth + 1];
      const auto tail = static_cast<Eigen::Index>(m_ - (j + 1));
      next.resize(res.rows(), res.cols());
      next.rightCols(tail) = res.rightCols(tail);
      next.rightCols(tail) -= q * (q.adjoint() * res.rightCols(tail));
      refresh_norms(depth + 1, j + 1);
      descend(depth + 1, j + 1, value);
    }
  }

  Mat<Scalar> u_;
  std::size_t n_, m_;
  std::vector<Mat<Scalar>> residuals_;
  std::vector<std::vector<double>> log_norms_;
  std::vector<std::size_t> current_;
  std::vector<std::size_t> best_;
  double best_value_;
  std::vector<double> scratch_;
};

template <class Scalar>
std::vector<std::size_t> brute_indices(const Problem& p, const std::vector<std::size_t>& seed) {
  Mat<Scalar> u = orthonormal_rows<Scalar>(mesh_matrix<Scalar>(p));
  std::vector<std::size_t> sorted_seed = seed;
  std::sort(sorted_seed.begin(), sorted_seed.end());
  Mat<Scalar> v(u.rows(), u.rows());
  for (Eigen::Index i = 0; i < u.rows(); ++i) v.col(i) = u.col(static_cast<Eigen::Index>(sorted_seed[static_cast<std::size_t>(i)]));
  // Seed slightly below its value so the search itself certifies the optimum.
  double seed_value = poly::log_abs_det(v);
  seed_value -= 1e-9 * std::max(1.0, std::abs(seed_value));
  BruteSearch<Scalar> search(std::move(u), sorted_seed, seed_value);
  return search.run();
}

}  // namespace

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Brute: return "brute";
    case Provenance::Greedy: return "greedy";
    case Provenance::LejaPrefix: return "leja-prefix";
    case Provenance::Refined: return "refined";
  }
  return "unknown";
}

Problem::Problem(const geometry::CandidateMesh& mesh, poly::Basis basis, Weight weight, double scale)
    : mesh_(&mesh), basis_(std::move(basis)), weight_(std::move(weight)), scale_(scale) {
  if (mesh.points.empty()) throw solver_error(ErrorKind::Input, "empty mesh");
  if (mesh.points.front().n != basis_.n()) throw solver_error(ErrorKind::Shape, "mesh and basis dimensions differ");
  if (scale_ < 0.0) throw solver_error(ErrorKind::Input, "weight scale must be nonnegative");
  real_ = std::all_of(mesh.points.begin(), mesh.points.end(), [](const Point& p) { return p.is_real(); });
  if (!real_ && basis_.flavor() == poly::Flavor::ChebyshevTensor)
    throw solver_error(ErrorKind::Input, "Chebyshev flavour is only available on real boxes");
  shift_ = poly::change_basis_logdet_shift(poly::Basis::monomial(basis_.n(), basis_.degree()), basis_);
}

double Problem::objective(std::span<const std::size_t> indices) const {
  if (indices.size() != basis_.size())
    throw solver_error(ErrorKind::Shape, "configuration must have N_d = " + std::to_string(basis_.size()) + " points");
  std::vector<Point> pts;
  pts.reserve(indices.size());
  for (auto i : indices) pts.push_back(mesh_->points.at(i));
  double ld;
  if (real_)
    ld = poly::log_abs_det(poly::evaluation_matrix<double>(basis_, pts, weight_, scale_));
  else
    ld = poly::log_abs_det(poly::evaluation_matrix<cplx>(basis_, pts, weight_, scale_));
  return ld - shift_;
}

Configuration Problem::make_configuration(std::vector<std::size_t> indices, Provenance provenance) const {
  Configuration c;
  c.degree = basis_.degree();
  c.scale = scale_;
  c.provenance = provenance;
  c.mesh_spacing = mesh_->spacing;
  c.objective = objective(indices);
  if (!std::isfinite(c.objective))
    throw solver_error(ErrorKind::DegenerateConfiguration, "configuration has a vanishing determinant");
  for (auto i : indices) c.points.push_back(mesh_->points[i]);
  c.mesh_indices = std::move(indices);
  return c;
}

double subset_count(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(c);
}

Configuration greedy_afp(const Problem& p) {
  if (p.mesh().max_valid_degree < p.degree())
    throw solver_error(ErrorKind::Input, "mesh is only valid up to degree " + std::to_string(p.mesh().max_valid_degree));
  auto idx = p.real() ? greedy_indices<double>(p) : greedy_indices<cplx>(p);
  return p.make_configuration(std::move(idx), Provenance::Greedy);
}

LejaSequence leja_sequence(const Problem& p, std::size_t count, std::optional<std::size_t> start) {
  if (count > p.mesh().points.size()) throw solver_error(ErrorKind::Input, "Leja count exceeds the mesh size");
  if (count > p.size()) throw solver_error(ErrorKind::Input, "Leja count exceeds the basis dimension; raise the degree");
  return p.real() ? leja_impl<double>(p, count, start) : leja_impl<cplx>(p, count, start);
}

Configuration leja_configuration(const Problem& p) {
  auto seq = leja_sequence(p, p.size());
  return p.make_configuration(std::move(seq.indices), Provenance::LejaPrefix);
}

Configuration exchange_refine(const Problem& p, const Configuration& config, int max_rounds, double tol) {
  if (config.mesh_indices.size() != p.size())
    throw solver_error(ErrorKind::Shape, "configuration size does not match the problem");
  return p.real() ? exchange_impl<double>(p, config, max_rounds, tol) : exchange_impl<cplx>(p, config, max_rounds, tol);
}

Configuration brute_force_fekete(const Problem& p, std::uint64_t budget) {
  const double required = subset_count(p.mesh().points.size(), p.size());
  if (required > static_cast<double>(budget))
    throw solver_error(ErrorKind::Capacity, "brute force needs " + std::to_string(static_cast<long double>(required)) +
                                                " subsets, budget is " + std::to_string(budget));
  if (p.mesh().points.size() < p.size()) throw solver_error(ErrorKind::DegenerateMesh, "mesh has fewer points than N_d");
  const Configuration seed = exchange_refine(p, greedy_afp(p));
  auto idx = p.real() ? brute_indices<double>(p, seed.mesh_indices) : brute_indices<cplx>(p, seed.mesh_indices);
  return p.make_configuration(std::move(idx), Provenance::Brute);
}

const char* solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::Brute: return "brute";
    case SolverKind::Greedy: return "greedy";
    case SolverKind::GreedyExchange: return "greedy+exchange";
    case SolverKind::Leja: return "leja";
    case SolverKind::LejaExchange: return "leja+exchange";
  }
  return "unknown";
}

SolverKind parse_solver(const std::string& name) {
  for (auto k : {SolverKind::Brute, SolverKind::Greedy, SolverKind::GreedyExchange, SolverKind::Leja,
                 SolverKind::LejaExchange})
    if (name == solver_name(k)) return k;
  throw solver_error(ErrorKind::Input, "unknown solver '" + name + "'");
}

Configuration solve(const Problem& p, SolverKind kind, std::uint64_t brute_budget) {
  switch (kind) {
    case SolverKind::Brute: return brute_force_fekete(p, brute_budget);
    case SolverKind::Greedy: return greedy_afp(p);
    case SolverKind::GreedyExchange: return exchange_refine(p, greedy_afp(p));
    case SolverKind::Leja: return leja_configuration(p);
    case SolverKind::LejaExchange: return exchange_refine(p, leja_configuration(p));
  }
  throw solver_error(ErrorKind::Internal, "unhandled solver kind");
}

std::vector<Point> canonical_points(const Configuration& c) {
  auto pts = c.points;
  std::sort(pts.begin(), pts.end());
  return pts;
}

bool same_point_set(const Configuration& a, const Configuration& b) { return canonical_points(a) == canonical_points(b); }

}  // namespace upcfekete::fekete
