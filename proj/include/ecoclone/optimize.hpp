// Small dense local optimizers used by the feasibility searches.
//
// levenberg_marquardt minimizes ||f(x)||^2 for a residual functor
// f: R^n -> R^m using a central-difference Jacobian. nelder_mead minimizes a
// scalar function of a few variables. Both are deterministic.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace ecoclone {

using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

struct LmOptions {
  int max_iterations = 500;
  double step = 1e-6;           ///< relative central-difference step
  double ftol = 1e-30;          ///< stop once ||f||^2 drops below this
  double xtol = 1e-15;          ///< stop once the relative step is this small
  double initial_lambda = 1e-3;
};

struct LmResult {
  RVec x;
  double cost;  ///< ||f(x)||
  int iterations;
};

template <class Residual>
RMat numeric_jacobian(Residual& f, const RVec& x, const RVec& fx, double rel_step) {
  RMat j(fx.size(), x.size());
  RVec xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x[i]));
    xp[i] = x[i] + h;
    const RVec fp = f(xp);
    xp[i] = x[i] - h;
    const RVec fm = f(xp);
    xp[i] = x[i];
    j.col(i) = (fp - fm) / (2.0 * h);
  }
  return j;
}

template <class Residual>
LmResult levenberg_marquardt(Residual f, RVec x, const LmOptions& opt = {}) {
  RVec fx = f(x);
  double cost = fx.squaredNorm();
  double lambda = opt.initial_lambda;
  int it = 0;
  for (; it < opt.max_iterations && cost > opt.ftol; ++it) {
    const RMat j = numeric_jacobian(f, x, fx, opt.step);
    const RMat jtj = j.transpose() * j;
    const RVec g = j.transpose() * fx;
    bool accepted = false;
    for (int tries = 0; tries < 30 && !accepted; ++tries) {
      RMat a = jtj;
      a.diagonal() += lambda * (jtj.diagonal().array() + 1e-12).matrix();
      const RVec step = a.ldlt().solve(-g);
      const RVec xn = x + step;
      const RVec fn = f(xn);
      const double cn = fn.squaredNorm();
      if (std::isfinite(cn) && cn < cost) {
        const double rel = step.norm() / std::max(1.0, x.norm());
        x = xn;
        fx = fn;
        cost = cn;
        lambda = std::max(lambda / 10.0, 1e-15);
        accepted = true;
        if (rel < opt.xtol) return {x, std::sqrt(cost), it + 1};
      } else {
        lambda *= 10.0;
      }
    }
    if (!accepted) break;
  }
  return {x, std::sqrt(cost), it};
}

struct NmOptions {
  int max_evaluations = 20000;
  double xtol = 1e-13;
  double ftol = 1e-16;
  double initial_step = 0.2;
};

struct NmResult {
  RVec x;
  double value;
  int evaluations;
};

template <class Objective>
NmResult nelder_mead(Objective f, const RVec& x0, const NmOptions& opt = {}) {
  const Eigen::Index n = x0.size();
  std::vector<RVec> simplex(n + 1, x0);
  std::vector<double> values(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) simplex[i + 1][i] += opt.initial_step;
  int evals = 0;
  auto eval = [&](const RVec& x) {
    ++evals;
    return f(x);
  };
  for (Eigen::Index i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  while (evals < opt.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

    double spread = 0.0;
    for (Eigen::Index i = 0; i <= n; ++i) spread = std::max(spread, (simplex[i] - simplex[best]).cwiseAbs().maxCoeff());
    if (spread < opt.xtol && std::abs(values[worst] - values[best]) < opt.ftol) break;

    RVec centroid = RVec::Zero(n);
    for (std::size_t i : order)
      if (i != worst) centroid += simplex[i];
    centroid /= static_cast<double>(n);

    const RVec xr = centroid + (centroid - simplex[worst]);
    const double fr = eval(xr);
    if (fr < values[best]) {
      const RVec xe = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        values[worst] = fe;
      } else {
        simplex[worst] = xr;
        values[worst] = fr;
      }
    } else if (fr < values[second]) {
      simplex[worst] = xr;
      values[worst] = fr;
    } else {
      const bool outside = fr < values[worst];
      const RVec xc = outside ? RVec(centroid + 0.5 * (xr - centroid)) : RVec(centroid + 0.5 * (simplex[worst] - centroid));
      const double fc = eval(xc);
      if (fc < std::min(fr, values[worst])) {
        simplex[worst] = xc;
        values[worst] = fc;
      } else {
        for (Eigen::Index i = 0; i <= n; ++i) {
          if (static_cast<std::size_t>(i) == best) continue;
          simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
          values[i] = eval(simplex[i]);
        }
      }
    }
  }
  const auto it = std::min_element(values.begin(), values.end());
  const auto idx = static_cast<std::size_t>(it - values.begin());
  return {simplex[idx], *it, evals};
}

}  // namespace ecoclone
