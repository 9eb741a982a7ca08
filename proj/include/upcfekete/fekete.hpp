#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "upcfekete/geometry.hpp"
#include "upcfekete/polyspace.hpp"

namespace upcfekete::fekete {

enum class Provenance { Brute, Greedy, LejaPrefix, Refined };
const char* provenance_name(Provenance p);

struct Configuration {
  std::vector<Point> points;
  std::vector<std::size_t> mesh_indices;
  int degree = 0;
  double scale = 0.0;
  double objective = 0.0;  // log|VDM| in the monomial basis
  Provenance provenance = Provenance::Greedy;
  double mesh_spacing = 0.0;
};

// A degree-d determinant maximization over a candidate mesh. The basis only
// affects conditioning; objectives are reported monomial-equivalent.
class Problem {
 public:
  Problem(const geometry::CandidateMesh& mesh, poly::Basis basis, Weight weight = {}, double scale = 0.0);

  const geometry::CandidateMesh& mesh() const { return *mesh_; }
  const poly::Basis& basis() const { return basis_; }
  const Weight& weight() const { return weight_; }
  double scale() const { return scale_; }
  int degree() const { return basis_.degree(); }
  std::size_t size() const { return basis_.size(); }
  bool real() const { return real_; }

  // Monomial-normalized log|VDM| of the mesh points at the given indices.
  double objective(std::span<const std::size_t> indices) const;
  Configuration make_configuration(std::vector<std::size_t> indices, Provenance provenance) const;

 private:
  const geometry::CandidateMesh* mesh_;
  poly::Basis basis_;
  Weight weight_;
  double scale_;
  bool real_;
  double shift_;
};

inline constexpr std::uint64_t kDefaultBruteBudget = 2'000'000;

// Exhaustive search over all N_d-subsets (branch and bound, exact up to the
// tie tolerance); ties go to the lexicographically smallest index tuple.
Configuration brute_force_fekete(const Problem& problem, std::uint64_t budget = kDefaultBruteBudget);

// Column-pivoted selection on the mesh-orthonormalized evaluation matrix:
// each step takes the column farthest from the span of those already taken.
Configuration greedy_afp(const Problem& problem);

struct LejaSequence {
  std::vector<std::size_t> indices;
  std::vector<Point> points;
};

// Row-pivoted elimination: point k+1 maximizes the (k+1)-th basis function's
// residual after interpolation at the first k points.
LejaSequence leja_sequence(const Problem& problem, std::size_t count, std::optional<std::size_t> start = {});
Configuration leja_configuration(const Problem& problem);

// Best single-point swap per round while it raises log|VDM| by more than tol.
Configuration exchange_refine(const Problem& problem, const Configuration& config, int max_rounds = 50,
                              double tol = 1e-12);

enum class SolverKind { Brute, Greedy, GreedyExchange, Leja, LejaExchange };
const char* solver_name(SolverKind kind);
SolverKind parse_solver(const std::string& name);

Configuration solve(const Problem& problem, SolverKind kind, std::uint64_t brute_budget = kDefaultBruteBudget);

// Points sorted lexicographically; configurations compare equal up to order.
std::vector<Point> canonical_points(const Configuration& c);
bool same_point_set(const Configuration& a, const Configuration& b);

// Binomial coefficient as a double (saturates at +inf).
double subset_count(std::size_t n, std::size_t k);

}  // namespace upcfekete::fekete
