#include "cdmafs/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include <Eigen/LU>

#include "cdmafs/errors.hpp"

namespace cdmafs {

namespace detail {

bool LbfgsHessian::push(const Vector& u, const Vector& y) {
  if (y.dot(u) <= 1e-10) return false;  // curvature condition
  us_.push_back(u);
  ys_.push_back(y);
  if (static_cast<int>(us_.size()) > memory_) {
    us_.erase(us_.begin());
    ys_.erase(ys_.begin());
  }
  pairs_ = static_cast<int>(us_.size());
  rebuild();
  return true;
}

void LbfgsHessian::rebuild() {
  const int k = pairs_;
  const Eigen::Index dim = us_.back().size();
  gamma_ = ys_.back().dot(ys_.back()) / ys_.back().dot(us_.back());

  Matrix s(dim, k), y(dim, k);
  for (int i = 0; i < k; ++i) {
    s.col(i) = us_[static_cast<std::size_t>(i)];
    y.col(i) = ys_[static_cast<std::size_t>(i)];
  }
  n_.resize(dim, 2 * k);
  n_.leftCols(k) = gamma_ * s;
  n_.rightCols(k) = y;

  const Matrix sty = s.transpose() * y;
  Matrix middle(2 * k, 2 * k);
  middle.topLeftCorner(k, k) = gamma_ * (s.transpose() * s);
  Matrix l = sty;
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) l(i, j) = 0.0;  // strictly lower part only
  middle.topRightCorner(k, k) = l;
  middle.bottomLeftCorner(k, k) = l.transpose();
  middle.bottomRightCorner(k, k) =
      -Matrix(sty.diagonal().asDiagonal());
  m_inv_ = middle.partialPivLu().inverse();
}

Vector LbfgsHessian::apply(const Vector& v) const {
  if (pairs_ == 0) return fallback_scale_ * v;
  return gamma_ * v - n_ * (m_inv_ * (n_.transpose() * v));
}

}  // namespace detail

Vector project_box(const Vector& s) {
  if (!s.allFinite()) throw DataError("cannot project non-finite vector");
  return s.cwiseMax(0.0).cwiseMin(1.0);
}

Vector spg_solve(const Vector& s0, const Vector& grad_at_s0,
                 const HessVec& hess_vec, const SolverConfig& config) {
  if (((s0.array() < 0.0) || (s0.array() > 1.0)).any())
    throw ConfigError("spg_solve requires a feasible start");

  // model value and gradient at s0 + w, relative to q(s0) = 0
  const auto model = [&](const Vector& w, Vector* grad_out) {
    const Vector bw = hess_vec(w);
    if (grad_out) *grad_out = grad_at_s0 + bw;
    return grad_at_s0.dot(w) + 0.5 * w.dot(bw);
  };

  Vector z = s0;
  Vector gq = grad_at_s0;
  double qz = 0.0;
  Vector best_z = z;
  double best_q = 0.0;
  double bb_step = 1.0;
  std::deque<double> history{0.0};  // non-monotone reference window

  for (int it = 0; it < config.spg_max_iters; ++it) {
    const Vector d = project_box(z - bb_step * gq) - z;
    if (d.lpNorm<Eigen::Infinity>() < 1e-12) break;
    const double gtd = gq.dot(d);
    if (gtd >= -1e-14) break;

    const double q_ref = *std::max_element(history.begin(), history.end());
    double step = 1.0;
    Vector z_new;
    Vector gq_new;
    double q_new = 0.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 30; ++halvings) {
      z_new = z + step * d;
      q_new = model(z_new - s0, &gq_new);
      if (q_new <= q_ref + 1e-4 * step * gtd) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    const Vector u = z_new - z;
    const Vector y = gq_new - gq;
    const double uy = u.dot(y);
    bb_step = uy > 0 ? std::clamp(u.dot(u) / uy, config.bb_min, config.bb_max)
                     : config.bb_max;
    z = z_new;
    gq = gq_new;
    qz = q_new;
    history.push_back(qz);
    if (history.size() > 10) history.pop_front();
    if (qz < best_q) {
      best_q = qz;
      best_z = z;
    }
  }
  return best_z;
}

SolveResult pqn_minimize(const AlignmentContext& ctx,
                         const SolverConfig& config, const Vector* start) {
  if (config.lbfgs_memory < 1 || config.spg_max_iters < 1 ||
      config.outer_max_iters < 1)
    throw ConfigError("solver iteration counts must be >= 1");
  if (config.armijo_c1 <= 0 || config.armijo_c1 >= 1)
    throw ConfigError("armijo_c1 must be in (0, 1)");
  if (config.bb_min <= 0 || config.bb_min >= config.bb_max)
    throw ConfigError("bb step bounds must satisfy 0 < min < max");

  const Eigen::Index dim = ctx.feature_count();
  Vector s = start ? project_box(*start) : Vector::Ones(dim);
  Evaluation eval = evaluate(ctx, s);

  SolveResult result;
  result.trace.push_back(eval.value);

  detail::LbfgsHessian hessian(config.lbfgs_memory);
  {
    // cold-start Hessian scale from one projected-gradient probe
    const Vector probe = project_box(s - eval.grad);
    if ((probe - s).lpNorm<Eigen::Infinity>() > 1e-12) {
      const Vector g_probe = gradient(ctx, probe);
      const Vector u = probe - s;
      const Vector y = g_probe - eval.grad;
      const double uy = u.dot(y);
      if (uy > 1e-10)
        hessian.set_initial_scale(
            std::clamp(uy / u.dot(u), 1.0 / config.bb_max, config.bb_max));
    }
  }

  for (int t = 0; t < config.outer_max_iters; ++t) {
    const double pg_norm =
        (project_box(s - eval.grad) - s).lpNorm<Eigen::Infinity>();
    if (pg_norm < config.grad_tol) {
      result.converged = true;
      break;
    }

    const Vector s_star = spg_solve(
        s, eval.grad, [&](const Vector& v) { return hessian.apply(v); },
        config);
    const Vector d = s_star - s;
    const double gtd = eval.grad.dot(d);
    if (d.lpNorm<Eigen::Infinity>() < 1e-12 || gtd >= -1e-14) {
      result.converged = true;
      break;
    }

    double eta = 1.0;
    Vector s_new;
    Evaluation eval_new;
    bool accepted = false;
    for (int halvings = 0; halvings < 30; ++halvings) {
      s_new = project_box(s + eta * d);
      eval_new = evaluate(ctx, s_new);
      if (eval_new.value <= eval.value + config.armijo_c1 * eta * gtd) {
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) {
      result.line_search_failed = true;
      break;
    }

    hessian.push(s_new - s, eval_new.grad - eval.grad);
    s = s_new;
    eval = eval_new;
    result.trace.push_back(eval.value);
    result.iterations = t + 1;
  }

  result.s = s;
  return result;
}

}  // namespace cdmafs
