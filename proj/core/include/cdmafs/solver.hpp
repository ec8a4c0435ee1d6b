#pragma once

#include <functional>
#include <vector>

#include "cdmafs/alignment.hpp"

namespace cdmafs {

struct SolverConfig {
  int lbfgs_memory = 10;
  int spg_max_iters = 10;   // t_p: inner iterations per subproblem
  int outer_max_iters = 500;
  double armijo_c1 = 1e-4;
  double grad_tol = 1e-6;   // projected-gradient stopping tolerance
  double bb_min = 1e-10;    // spectral step clamps
  double bb_max = 1e10;
};

// Coordinatewise min(1, max(0, s_p)).
Vector project_box(const Vector& s);

// Quadratic model q(s) = g^T (s - s0) + 0.5 (s - s0)^T B (s - s0) with B
// available only through matrix-vector products.
using HessVec = std::function<Vector(const Vector&)>;

// Minimizes q over the [0,1] box with spectral projected gradient
// (Barzilai-Borwein steps, non-monotone line search on q). Initialized at
// s0; the returned point never has a larger model value than s0.
Vector spg_solve(const Vector& s0, const Vector& grad_at_s0,
                 const HessVec& hess_vec, const SolverConfig& config);

struct SolveResult {
  Vector s;
  std::vector<double> trace;  // objective value per outer iteration
  int iterations = 0;
  bool converged = false;
  bool line_search_failed = false;
};

// Projected quasi-Newton minimization of the alignment objective over the
// [0,1] box: L-BFGS quadratic models solved inexactly by spg_solve, Armijo
// backtracking on the true objective. Starts from all-ones unless `start`
// is given.
SolveResult pqn_minimize(const AlignmentContext& ctx,
                         const SolverConfig& config,
                         const Vector* start = nullptr);

namespace detail {

// Limited-memory BFGS pairs in the compact (Byrd-Nocedal) representation,
// yielding Hessian-approximation products B*v in O(memory^2 * D).
class LbfgsHessian {
 public:
  explicit LbfgsHessian(int memory) : memory_(memory) {}

  // Returns false (and stores nothing) when the curvature y^T u is too
  // small to keep B positive definite.
  bool push(const Vector& u, const Vector& y);
  bool empty() const { return pairs_ == 0; }
  void set_initial_scale(double gamma) { fallback_scale_ = gamma; }

  Vector apply(const Vector& v) const;

 private:
  void rebuild();

  int memory_;
  int pairs_ = 0;
  double fallback_scale_ = 1.0;  // B = fallback_scale * I when empty
  double gamma_ = 1.0;
  std::vector<Vector> us_, ys_;
  Matrix n_;        // D x 2k block [gamma*S  Y]
  Matrix m_inv_;    // inverse of the 2k x 2k middle matrix
};

}  // namespace detail

}  // namespace cdmafs
