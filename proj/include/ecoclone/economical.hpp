// Economical (ancilla-free) cloning.
//
// An economical cloner is a unitary on input + blank copy, so its Choi
// operator is rank one, S = |S><S|. An optimal economical cloner exists iff
// some |S> = sum_k c_k v_k in the maximal eigenspace of R, with ||c||^2 = d,
// satisfies Tr_{BE} |S><S| = 1. This header provides that search, the
// closed-form no-go criteria, the qubit Niu-Griffiths cloner and the
// suboptimal |k> -> |kl+> cloner in any dimension.

#pragma once

#include "ecoclone/figures_of_merit.hpp"
#include "ecoclone/maps.hpp"
#include "ecoclone/optimize.hpp"
#include "ecoclone/sampling.hpp"

#include <optional>
#include <string>

namespace ecoclone {

enum class Verdict { feasible, infeasible, indeterminate };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::feasible: return "feasible";
    case Verdict::infeasible: return "infeasible";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "unknown";
}

/// Residual thresholds separating the two verdicts. A result between them is
/// indeterminate and must be investigated rather than reported as a verdict.
struct FeasibilityThresholds {
  double feasibility_tol = 1e-8;
  double infeasibility_floor = 1e-3;

  Verdict classify(double residual) const {
    if (residual <= feasibility_tol) return Verdict::feasible;
    if (residual >= infeasibility_floor) return Verdict::infeasible;
    return Verdict::indeterminate;
  }
};

struct FeasibilityReport {
  double residual = 0.0;             ///< best ||Tr_{BE}|S><S| - 1||_F over all restarts
  Vec best_coeffs;                   ///< c at the best restart, ||c||^2 = d
  Verdict verdict = Verdict::indeterminate;
  int restarts = 0;
  std::vector<double> run_residuals; ///< final residual of every restart
  int gap_runs = 0;                  ///< restarts that ended strictly between the thresholds
  FeasibilityThresholds thresholds;
  std::optional<std::string> analytic_note;
};

namespace detail {

// Row-major reshape of a vector on (in, B, E) into a d x d^2 matrix whose rows
// are indexed by `in`.
inline Mat in_by_out(const Ket& v, int d) {
  Mat x(d, d * d);
  for (int i = 0; i < d; ++i)
    for (int o = 0; o < d * d; ++o) x(i, o) = v[i * d * d + o];
  return x;
}

inline void require_choi_basis(const std::vector<Ket>& basis, int d) {
  if (basis.empty()) throw std::invalid_argument("feasibility search needs a non-empty basis");
  for (const Ket& v : basis)
    if (v.dims() != Dims{d, d, d}) throw std::invalid_argument("basis vectors must live on (in, B, E)");
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j)
      if (std::abs(basis[i].inner(basis[j]) - (i == j ? 1.0 : 0.0)) > kStructureTol)
        throw std::invalid_argument("basis is not orthonormal");
}

}  // namespace detail

/// ||Tr_{BE} |S><S| - 1||_F for |S> = sum_k c_k basis_k.
inline double trace_residual(const std::vector<Ket>& basis, const Vec& c, int d) {
  if (static_cast<std::size_t>(c.size()) != basis.size()) throw std::invalid_argument("coefficient count mismatch");
  Mat y = Mat::Zero(d, d * d);
  for (std::size_t k = 0; k < basis.size(); ++k) y += c[static_cast<Eigen::Index>(k)] * detail::in_by_out(basis[k], d);
  return (y * y.adjoint() - Mat::Identity(d, d)).norm();
}

/// Multistart minimization of the trace-preservation residual over |S> in
/// span(basis) with Tr|S><S| = d. Restart r starts from a Gaussian point drawn
/// from the stream (seed, r).
inline FeasibilityReport feasibility_search(const std::vector<Ket>& basis, int d, int restarts = 100,
                                            std::uint64_t seed = 0, FeasibilityThresholds thr = {}) {
  detail::require_dim(d);
  detail::require_choi_basis(basis, d);
  if (restarts < 1) throw std::invalid_argument("need at least one restart");
  const auto n = static_cast<Eigen::Index>(basis.size());
  std::vector<Mat> xs;
  for (const Ket& v : basis) xs.push_back(detail::in_by_out(v, d));
  const double scale = std::sqrt(static_cast<double>(d));

  auto coeffs = [&](const RVec& z) {
    Vec c(n);
    for (Eigen::Index k = 0; k < n; ++k) c[k] = cplx(z[k], z[n + k]);
    return Vec(scale * c / c.norm());
  };
  auto residual = [&](const RVec& z) {
    const Vec c = coeffs(z);
    Mat y = Mat::Zero(d, d * d);
    for (Eigen::Index k = 0; k < n; ++k) y += c[k] * xs[static_cast<std::size_t>(k)];
    const Mat t = y * y.adjoint() - Mat::Identity(d, d);
    RVec r(2 * d * d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        r[2 * (i * d + j)] = t(i, j).real();
        r[2 * (i * d + j) + 1] = t(i, j).imag();
      }
    return r;
  };

  FeasibilityReport rep;
  rep.thresholds = thr;
  rep.restarts = restarts;
  rep.residual = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(r));
    std::normal_distribution<double> g(0.0, 1.0);
    RVec z0(2 * n);
    for (Eigen::Index i = 0; i < 2 * n; ++i) z0[i] = g(rng);
    const LmResult res = levenberg_marquardt(residual, z0);
    rep.run_residuals.push_back(res.cost);
    if (thr.classify(res.cost) == Verdict::indeterminate) ++rep.gap_runs;
    if (res.cost < rep.residual) {
      rep.residual = res.cost;
      rep.best_coeffs = coeffs(res.x);
    }
  }
  rep.verdict = rep.gap_runs > 0 ? Verdict::indeterminate : thr.classify(rep.residual);
  return rep;
}

/// |S> = sum_k c_k basis_k.
inline Ket combine(const std::vector<Ket>& basis, const Vec& c) {
  if (basis.empty() || static_cast<std::size_t>(c.size()) != basis.size())
    throw std::invalid_argument("coefficient count mismatch");
  Vec s = Vec::Zero(basis.front().size());
  for (std::size_t k = 0; k < basis.size(); ++k) s += c[static_cast<Eigen::Index>(k)] * basis[k].amps();
  return Ket(basis.front().dims(), std::move(s));
}

/// Closed-form residual for the universal maximal eigenspace:
/// || (sum|c_k|^2 1 + sum c_k c_l^* |l><k|)/(d+1) - 1 ||_F.
inline double universal_nogo_residual(const Vec& c, int d) {
  if (c.size() != d) throw std::invalid_argument("coefficient vector must have length d");
  if (std::abs(c.squaredNorm() - d) > 1e-10 * d) throw std::invalid_argument("coefficients must satisfy ||c||^2 = d");
  const Mat outer = c.conjugate() * c.transpose();  // |c*><c*|, entry (l,k) = c_l^* c_k
  const Mat t = (c.squaredNorm() * Mat::Identity(d, d) + outer) / (d + 1.0);
  return (t - Mat::Identity(d, d)).norm();
}

/// The universal residual above does not depend on c: sqrt(d(d-1))/(d+1).
inline double universal_nogo_bound(int d) { return std::sqrt(d * (d - 1.0)) / (d + 1.0); }

/// gamma = beta^2 + 4 alpha beta / sqrt(d) + 2 alpha^2 / d.
inline double gamma_pc(int d, double alpha, double beta) {
  const double dd = d;
  return beta * beta + 4.0 * alpha * beta / std::sqrt(dd) + 2.0 * alpha * alpha / dd;
}

/// gamma evaluated at the normalized phase-covariant eigenvector coefficients.
inline double gamma_pc(int d) {
  const auto [alpha, beta] = pc_eigenstate_coefficients(d);
  return gamma_pc(d, alpha, beta);
}

/// Searches the numerically computed maximal eigenspace of R for the family
/// and attaches the closed-form criterion where one exists.
inline FeasibilityReport economical_feasibility(Family f, int d, int restarts = 100, std::uint64_t seed = 0,
                                                FeasibilityThresholds thr = {}) {
  const EigenspaceReport es = max_eigenspace(r_operator(f, d));
  FeasibilityReport rep = feasibility_search(es.basis, d, restarts, seed, thr);
  if (f == Family::universal) {
    rep.analytic_note = "universal: residual is sqrt(d(d-1))/(d+1) = " + std::to_string(universal_nogo_bound(d)) +
                        " for every admissible c";
  } else if (f == Family::phase_covariant) {
    const double g = gamma_pc(d);
    rep.analytic_note = "phase-covariant: gamma = " + std::to_string(g) +
                        (std::abs(g) < 1e-9 ? " (zero: c = sqrt(d/2) e_l solves trace preservation)"
                                            : " (nonzero: trace preservation forces c_k c_j^* ~ delta_jk)");
  }
  return rep;
}

/// Niu-Griffiths unitary on B (x) E (qubits):
/// |00> -> |00>, |10> -> cos a |10> + sin a |01>, completed by
/// |01> -> cos a |01> - sin a |10>, |11> -> |11> (real orthogonal).
inline Op niu_griffiths(double alpha) {
  Mat u = Mat::Zero(4, 4);
  const double c = std::cos(alpha), s = std::sin(alpha);
  // index = 2*b + e
  u(0, 0) = 1.0;
  u(2, 2) = c;
  u(1, 2) = s;
  u(1, 1) = c;
  u(2, 1) = -s;
  u(3, 3) = 1.0;
  return Op({2, 2}, std::move(u));
}

/// |k> -> |kl+> on (B, E).
inline Isometry suboptimal_economical(int d, int l = 0) {
  detail::require_dim(d);
  detail::check_index(d, l, "l");
  Mat v(d * d, d);
  for (int k = 0; k < d; ++k) v.col(k) = symmetric_ket(d, k, l).amps();
  return Isometry(d, {d, d}, std::move(v));
}

/// (d - 1 + |sum_{k != l} e^{i theta_k} + sqrt(2) e^{i theta_l}|^2) / (2 d^2).
inline double theta_fidelity(int d, const std::vector<double>& thetas, int l = 0) {
  if (static_cast<int>(thetas.size()) != d) throw std::invalid_argument("need exactly d phases");
  detail::check_index(d, l, "l");
  cplx s = 0.0;
  for (int k = 0; k < d; ++k) s += (k == l ? std::sqrt(2.0) : 1.0) * std::polar(1.0, thetas[k]);
  return (d - 1.0 + std::norm(s)) / (2.0 * d * d);
}

/// F_U = (d - 1 + (d - 1 + sqrt 2)^2) / (2 d^2).
inline double economical_pc_fidelity(int d) {
  const double t = d - 1.0 + std::sqrt(2.0);
  return (d - 1.0 + t * t) / (2.0 * d * d);
}

}  // namespace ecoclone
