// Bell-biorthogonal cloning states on (A, B, E, M):
//
//   |Psi> = sum_{m,n} a_{m,n} |B_{m,n}>_{A,B} |B_{m,-n}>_{E,M}
//
// where A plays the role of the input, B and E are the clones and M is the
// ancilla. The amplitude matrix a determines the machine. This header builds
// the universal, phase-covariant and Fourier-covariant families, their Choi
// operators and support states, and the constraint systems an ancilla-free
// realization of such a machine would have to satisfy.

#pragma once

#include "ecoclone/economical.hpp"
#include "ecoclone/figures_of_merit.hpp"
#include "ecoclone/maps.hpp"
#include "ecoclone/optimize.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <optional>

namespace ecoclone {

/// Parameters of the three amplitude-matrix families. Signed values are
/// accepted: the optimal phase-covariant machine has x2 < 0.
struct XParams {
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;

  std::array<double, 3> as_array() const { return {x1, x2, x3}; }
  friend bool operator==(const XParams&, const XParams&) = default;
};

class AmplitudeMatrix {
 public:
  /// `family` is empty for a user-supplied matrix.
  AmplitudeMatrix(Mat a, std::optional<Family> family = std::nullopt, double tol = 1e-10)
      : a_(std::move(a)), family_(family) {
    if (a_.rows() != a_.cols() || a_.rows() < 2) throw std::invalid_argument("amplitude matrix must be d x d with d >= 2");
    if (std::abs(a_.norm() - 1.0) > tol) throw std::invalid_argument("amplitude matrix must have unit Frobenius norm");
  }

  int dim() const { return static_cast<int>(a_.rows()); }
  const Mat& mat() const { return a_; }
  cplx operator()(int m, int n) const { return a_(m, n); }
  std::optional<Family> family() const { return family_; }
  std::string label() const { return family_ ? to_string(*family_) : "custom"; }

 private:
  Mat a_;
  std::optional<Family> family_;
};

namespace detail {

// x1 [m=0][n=0] + x2 (first row, and first column for Fourier) + x3 everywhere.
inline Mat family_matrix(Family f, const XParams& x, int d) {
  require_dim(d);
  Mat a = Mat::Constant(d, d, x.x3);
  a(0, 0) += x.x1;
  if (f == Family::phase_covariant || f == Family::fourier) a.row(0).array() += x.x2;
  if (f == Family::fourier) a.col(0).array() += x.x2;
  return a;
}

}  // namespace detail

/// Squared Frobenius norm of the family's amplitude matrix at x.
inline double amplitude_norm2(Family f, const XParams& x, int d) { return detail::family_matrix(f, x, d).squaredNorm(); }

/// Rescales x so that the family's amplitude matrix is normalized.
inline XParams normalize_params(Family f, const XParams& x, int d) {
  const double n = std::sqrt(amplitude_norm2(f, x, d));
  if (!(n > 0.0)) throw std::invalid_argument("parameters give a zero amplitude matrix");
  return {x.x1 / n, x.x2 / n, x.x3 / n};
}

/// a_{m,n} = x1 [m=n=0] + x3.
inline AmplitudeMatrix amp_universal(const XParams& x, int d) {
  if (x.x2 != 0.0) throw std::invalid_argument("universal amplitudes require x2 = 0");
  return AmplitudeMatrix(detail::family_matrix(Family::universal, x, d), Family::universal);
}

/// a_{m,n} = x1 [m=n=0] + x2 [m=0] + x3.
inline AmplitudeMatrix amp_phase_covariant(const XParams& x, int d) {
  return AmplitudeMatrix(detail::family_matrix(Family::phase_covariant, x, d), Family::phase_covariant);
}

/// a_{m,n} = x1 [m=n=0] + x2 ([m=0] + [n=0]) + x3.
inline AmplitudeMatrix amp_fourier(const XParams& x, int d) {
  return AmplitudeMatrix(detail::family_matrix(Family::fourier, x, d), Family::fourier);
}

inline AmplitudeMatrix amp_family(Family f, const XParams& x, int d) {
  switch (f) {
    case Family::universal: return amp_universal(x, d);
    case Family::phase_covariant: return amp_phase_covariant(x, d);
    case Family::fourier: return amp_fourier(x, d);
  }
  throw std::invalid_argument("unknown family");
}

/// Symmetric optimal universal machine: x1^2 = d/(2(d+1)) and x1 = d x3, the
/// normalized point at which both clones reach (d+3)/(2(d+1)).
inline XParams symmetric_universal_params(int d) {
  detail::require_dim(d);
  const double x1 = std::sqrt(d / (2.0 * (d + 1.0)));
  return {x1, 0.0, x1 / d};
}

/// The cloning state on (A, B, E, M).
inline Ket cloning_state(const AmplitudeMatrix& a) {
  const int d = a.dim();
  // <i j k l|Psi> = [l - k = j - i] (1/d) sum_n a_{j-i, n} w^{(i - k) n}
  Vec psi = Vec::Zero(d * d * d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const int m = ((j - i) % d + d) % d;
      for (int k = 0; k < d; ++k) {
        const int l = (k + m) % d;
        cplx s = 0.0;
        for (int n = 0; n < d; ++n) s += a(m, n) * root_of_unity(d, static_cast<long long>(i - k) * n);
        psi[((i * d + j) * d + k) * d + l] = s / static_cast<double>(d);
      }
    }
  return Ket({d, d, d, d}, std::move(psi));
}

/// |r_p> = <p|_M |Psi> for p = 0..d-1, on (A, B, E).
inline std::vector<Ket> support_states(const Ket& psi) {
  const Dims& dims = psi.dims();
  if (dims.size() != 4 || dims[0] != dims[1] || dims[1] != dims[2] || dims[2] != dims[3])
    throw std::invalid_argument("cloning state must live on four equal factors (A, B, E, M)");
  const int d = dims[0];
  std::vector<Ket> out;
  for (int p = 0; p < d; ++p) {
    Vec r(d * d * d);
    for (int abe = 0; abe < d * d * d; ++abe) r[abe] = psi[abe * d + p];
    out.emplace_back(Dims{d, d, d}, std::move(r));
  }
  return out;
}

inline std::vector<Ket> support_states(const AmplitudeMatrix& a) { return support_states(cloning_state(a)); }

/// S_{ABE} = d Tr_M |Psi><Psi|, with A read as the input factor.
inline ChoiOp reduced_choi(const Ket& psi) {
  psi.require_unit(1e-10);
  std::vector<Ket> rs = support_states(psi);
  const double s = std::sqrt(static_cast<double>(psi.dims()[0]));
  for (Ket& r : rs) r = s * r;
  return ChoiOp::from_vectors(rs);
}

// ---------------------------------------------------------------------------
// Optimal parameters

struct OptimalParams {
  Family family;
  int d;
  XParams x;             ///< normalized, x1 >= 0
  double fidelity;       ///< Tr(S R) of the normalized machine at x
  double bound;          ///< d * r_max of the family's R
};

namespace detail {

// Quadratic forms P, Q with Tr(S(x) R) = x^T P x and ||a(x)||^2 = x^T Q x.
struct FidelityForm {
  Eigen::Matrix3d p;
  Eigen::Matrix3d q;
};

inline FidelityForm fidelity_form(Family f, int d, const Op& r) {
  std::array<Mat, 3> basis;
  for (int i = 0; i < 3; ++i) {
    XParams e;
    (i == 0 ? e.x1 : i == 1 ? e.x2 : e.x3) = 1.0;
    basis[static_cast<std::size_t>(i)] = family_matrix(f, e, d);
  }
  // Support states are linear in a; build them for unnormalized basis matrices
  // by scaling a unit-norm copy back up.
  std::array<std::vector<Ket>, 3> sup;
  for (std::size_t i = 0; i < 3; ++i) {
    const double n = basis[i].norm();
    auto s = support_states(AmplitudeMatrix(basis[i] / n));
    for (Ket& k : s) k = cplx(n) * k;
    sup[i] = std::move(s);
  }
  FidelityForm form;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      cplx t = 0.0;
      for (int p = 0; p < d; ++p)
        t += sup[i][static_cast<std::size_t>(p)].amps().dot(r.mat() * sup[j][static_cast<std::size_t>(p)].amps());
      form.p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d * t.real();
      form.q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = basis[i].cwiseProduct(basis[j].conjugate()).sum().real();
    }
  form.p = 0.5 * (form.p + form.p.transpose()).eval();
  return form;
}

}  // namespace detail

/// Maximizes Tr(S R) over the family's parameters on the normalization
/// surface. The objective x^T P x / x^T Q x is a generalized Rayleigh
/// quotient, so the optimum is the top eigenvector of P v = lambda Q v.
inline OptimalParams optimize_xparams(Family f, int d) {
  detail::require_dim(d);
  const Op r = r_operator(f, d);
  const detail::FidelityForm form = detail::fidelity_form(f, d, r);
  // Universal machines have x2 = 0: restrict to the (x1, x3) block.
  const std::vector<int> idx = f == Family::universal ? std::vector<int>{0, 2} : std::vector<int>{0, 1, 2};
  const auto n = static_cast<Eigen::Index>(idx.size());
  RMat p(n, n), q(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      p(i, j) = form.p(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
      q(i, j) = form.q(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
  Eigen::GeneralizedSelfAdjointEigenSolver<RMat> es(p, q);
  if (es.info() != Eigen::Success) throw std::runtime_error("generalized eigensolver failed");
  const RVec v = es.eigenvectors().col(n - 1);
  std::array<double, 3> xs{0.0, 0.0, 0.0};
  for (Eigen::Index i = 0; i < n; ++i) xs[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = v[i];
  XParams x = normalize_params(f, {xs[0], xs[1], xs[2]}, d);
  if (x.x1 < 0.0 || (x.x1 == 0.0 && x.x3 < 0.0)) x = {-x.x1, -x.x2, -x.x3};
  const Eigen::Vector3d xv(x.x1, x.x2, x.x3);
  return {f, d, x, xv.dot(form.p * xv), d * max_eigenspace(r).r_max};
}

// ---------------------------------------------------------------------------
// Economical-realization constraints

struct ConstraintResiduals {
  double f = 0.0;                  ///< f_d(x)
  double g = 0.0;                  ///< g_d(x)
  double normalization_defect = 0.0;
  std::vector<double> diagonal;    ///< per-k residual of <w_k|w_k> = 1
  Mat off_diagonal;                ///< entry (k', k) = <w_k'|w_k> for k != k', zero diagonal

  double norm() const {
    double s = off_diagonal.squaredNorm();
    for (double r : diagonal) s += r * r;
    return std::sqrt(s);
  }
};

/// f_d = x1^2 + d x2^2 + d^2 x3^2 + 2 x1 x2 + 2 d x2 x3.
inline double poly_f(const XParams& x, int d) {
  const double dd = d;
  return x.x1 * x.x1 + dd * x.x2 * x.x2 + dd * dd * x.x3 * x.x3 + 2 * x.x1 * x.x2 + 2 * dd * x.x2 * x.x3;
}

/// g_d = (d^2 + 2d) x2^2 + 2d x1 x2 + 2d x1 x3 + 2d^2 x2 x3.
inline double poly_g(const XParams& x, int d) {
  const double dd = d;
  return (dd * dd + 2 * dd) * x.x2 * x.x2 + 2 * dd * x.x1 * x.x2 + 2 * dd * x.x1 * x.x3 + 2 * dd * dd * x.x2 * x.x3;
}

/// Residuals of the unitarity conditions <w_k'|w_k> = delta_{kk'} on the
/// vectors w_k = U|k>_B|0>_E that an economical machine with amplitudes alpha
/// would need to produce.
///
/// Universal and Fourier families (universal is x2 = 0):
///   diagonal:  sum_j|alpha_j|^2 f_d + |alpha_k|^2 g_d - 1
///   (k', k):   (d x2^2 + 2 x1 x2 + 2d x2 x3) sum_j alpha_j alpha*_{j+k-k'}
///              + d x2^2 (alpha_k alpha*_{2k-k'} + alpha_{2k'-k} alpha*_{k'})
///              + 2d x1 x3 alpha_{k'} alpha*_k
/// Phase-covariant family:
///   diagonal:  sum_j|alpha_j|^2 (x1^2 + d^2 x3^2) + |alpha_k|^2 (g_d - 2d x2^2) - 1
///   (k', k):   2d x1 x3 alpha_{k'} alpha*_k
inline ConstraintResiduals constraint_residuals(Family fam, const XParams& x, const Vec& alpha, int d) {
  detail::require_dim(d);
  if (alpha.size() != d) throw std::invalid_argument("alpha must have length d");
  auto al = [&](int i) { return alpha[((i % d) + d) % d]; };
  const double dd = d;
  ConstraintResiduals c;
  c.f = poly_f(x, d);
  c.g = poly_g(x, d);
  c.normalization_defect = amplitude_norm2(fam, x, d) - 1.0;
  const double a2 = alpha.squaredNorm();
  c.off_diagonal = Mat::Zero(d, d);
  if (fam == Family::phase_covariant) {
    const double base = x.x1 * x.x1 + dd * dd * x.x3 * x.x3;
    const double extra = c.g - 2 * dd * x.x2 * x.x2;
    for (int k = 0; k < d; ++k) c.diagonal.push_back(a2 * base + std::norm(al(k)) * extra - 1.0);
    for (int k = 0; k < d; ++k)
      for (int kp = 0; kp < d; ++kp)
        if (k != kp) c.off_diagonal(kp, k) = 2 * dd * x.x1 * x.x3 * al(kp) * std::conj(al(k));
    return c;
  }
  if (fam == Family::universal && x.x2 != 0.0) throw std::invalid_argument("universal family requires x2 = 0");
  for (int k = 0; k < d; ++k) c.diagonal.push_back(a2 * c.f + std::norm(al(k)) * c.g - 1.0);
  const double lead = dd * x.x2 * x.x2 + 2 * x.x1 * x.x2 + 2 * dd * x.x2 * x.x3;
  for (int k = 0; k < d; ++k)
    for (int kp = 0; kp < d; ++kp) {
      if (k == kp) continue;
      cplx auto_corr = 0.0;
      for (int j = 0; j < d; ++j) auto_corr += al(j) * std::conj(al(j + k - kp));
      c.off_diagonal(kp, k) = lead * auto_corr +
                              dd * x.x2 * x.x2 * (al(k) * std::conj(al(2 * k - kp)) + al(2 * kp - k) * std::conj(al(kp))) +
                              2 * dd * x.x1 * x.x3 * al(kp) * std::conj(al(k));
    }
  return c;
}

struct AnsatzFeasibility {
  double residual = 0.0;            ///< best constraint-residual norm over restarts
  Vec best_alpha;                   ///< unit norm
  Verdict verdict = Verdict::indeterminate;
  int restarts = 0;
  int gap_runs = 0;
  FeasibilityThresholds thresholds;
};

/// Multistart minimization of the constraint residual over unit-norm alpha.
inline AnsatzFeasibility economical_ansatz_search(Family fam, const XParams& x, int d, int restarts = 100,
                                                  std::uint64_t seed = 0, FeasibilityThresholds thr = {}) {
  detail::require_dim(d);
  if (restarts < 1) throw std::invalid_argument("need at least one restart");
  auto to_alpha = [d](const RVec& z) {
    Vec a(d);
    for (int k = 0; k < d; ++k) a[k] = cplx(z[k], z[d + k]);
    return Vec(a / a.norm());
  };
  auto residual = [&](const RVec& z) {
    const ConstraintResiduals c = constraint_residuals(fam, x, to_alpha(z), d);
    RVec r(d + 2 * d * d);
    for (int k = 0; k < d; ++k) r[k] = c.diagonal[static_cast<std::size_t>(k)];
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        r[d + 2 * (i * d + j)] = c.off_diagonal(i, j).real();
        r[d + 2 * (i * d + j) + 1] = c.off_diagonal(i, j).imag();
      }
    return r;
  };
  AnsatzFeasibility rep;
  rep.thresholds = thr;
  rep.restarts = restarts;
  rep.residual = std::numeric_limits<double>::infinity();
  for (int s = 0; s < restarts; ++s) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(s));
    std::normal_distribution<double> g(0.0, 1.0);
    RVec z0(2 * d);
    for (int i = 0; i < 2 * d; ++i) z0[i] = g(rng);
    const LmResult res = levenberg_marquardt(residual, z0);
    if (thr.classify(res.cost) == Verdict::indeterminate) ++rep.gap_runs;
    if (res.cost < rep.residual) {
      rep.residual = res.cost;
      rep.best_alpha = to_alpha(res.x);
    }
  }
  rep.verdict = rep.gap_runs > 0 ? Verdict::indeterminate : thr.classify(rep.residual);
  return rep;
}

struct RecurrenceReport {
  int d = 0;
  int grid = 0;
  bool shift_two_trivial = false;               ///< 2 = 0 mod d, so the m = 2 condition is vacuous
  std::optional<double> min_shift_two;          ///< min over the grid of |sum_j alpha_j alpha*_{j+2}|
  double min_system_residual = 0.0;             ///< min over the grid of the full residual
  double theta_at_min = 0.0;
  Verdict verdict = Verdict::indeterminate;     ///< feasible means "solvable"
  FeasibilityThresholds thresholds;
};

/// Amplitudes generated by alpha~_{k+1} = -alpha~_k^2 conj(alpha~_{k-1}) from
/// alpha~_0 = 1, alpha~_1 = e^{i theta}, scaled to unit norm.
inline Vec recurrence_amplitudes(int d, double theta) {
  const cplx a1 = std::polar(1.0, theta);
  Vec a(d);
  for (int j = 0; j < d; ++j) {
    const double sign = (j / 2) % 2 == 0 ? 1.0 : -1.0;
    a[j] = sign * std::pow(a1, j);
  }
  return a / std::sqrt(static_cast<double>(d));
}

/// Scans alpha~_1 over the unit circle and evaluates the Fourier-covariant
/// economical conditions on the recurrence amplitudes: every autocorrelation
/// sum_j alpha_j alpha*_{j+m} (m != 0) and every equation
/// alpha_k alpha*_{2k-k'} + alpha_{2k'-k} alpha*_{k'} + 2 alpha_{k'} alpha*_k = 0.
inline RecurrenceReport fourier_recurrence_check(int d, int grid = 4096, FeasibilityThresholds thr = {}) {
  detail::require_dim(d);
  if (grid < 4) throw std::invalid_argument("grid too coarse");
  RecurrenceReport rep;
  rep.d = d;
  rep.grid = grid;
  rep.thresholds = thr;
  rep.shift_two_trivial = (2 % d) == 0;
  rep.min_system_residual = std::numeric_limits<double>::infinity();
  double min_two = std::numeric_limits<double>::infinity();
  for (int g = 0; g < grid; ++g) {
    const double theta = 2.0 * std::numbers::pi * g / grid;
    const Vec a = recurrence_amplitudes(d, theta);
    auto al = [&](int i) { return a[((i % d) + d) % d]; };
    double sq = 0.0;
    for (int m = 1; m < d; ++m) {
      cplx s = 0.0;
      for (int j = 0; j < d; ++j) s += al(j) * std::conj(al(j + m));
      sq += std::norm(s);
      if (m == 2) min_two = std::min(min_two, std::abs(s));
    }
    for (int k = 0; k < d; ++k)
      for (int kp = 0; kp < d; ++kp)
        if (k != kp)
          sq += std::norm(al(k) * std::conj(al(2 * k - kp)) + al(2 * kp - k) * std::conj(al(kp)) +
                          2.0 * al(kp) * std::conj(al(k)));
    const double res = std::sqrt(sq);
    if (res < rep.min_system_residual) {
      rep.min_system_residual = res;
      rep.theta_at_min = theta;
    }
  }
  if (!rep.shift_two_trivial) rep.min_shift_two = min_two;
  rep.verdict = thr.classify(rep.min_system_residual);
  return rep;
}

struct PcSystemReport {
  double off_support = 0.0;           ///< x1^2 + d^2 x3^2 - 1 (equation for k != l)
  double on_support = 0.0;            ///< x1^2 + d^2 x3^2 + g_d - 2d x2^2 - 1 (equation for k = l)
  double normalization_defect = 0.0;  ///< x1^2 + d^2x3^2 + dx2^2 + 2x1x2 + 2x1x3 + 2d x2x3 - 1
  double identity_defect = 0.0;       ///< x3^2 - (x1 + x2 + x3)(x2 + x3)
  bool degenerate = false;            ///< x3 <= 0: not a cloning machine
  bool solvable = false;
  double tol = 0.0;
};

/// Phase-covariant economical system with alpha_k = delta_{k,l}.
inline PcSystemReport pc_system_check(const XParams& x, int d, double tol = 1e-9) {
  detail::require_dim(d);
  const double dd = d;
  PcSystemReport r;
  r.tol = tol;
  const double base = x.x1 * x.x1 + dd * dd * x.x3 * x.x3;
  r.off_support = base - 1.0;
  r.on_support = base + poly_g(x, d) - 2 * dd * x.x2 * x.x2 - 1.0;
  r.normalization_defect = base + dd * x.x2 * x.x2 + 2 * x.x1 * x.x2 + 2 * x.x1 * x.x3 + 2 * dd * x.x2 * x.x3 - 1.0;
  r.identity_defect = x.x3 * x.x3 - (x.x1 + x.x2 + x.x3) * (x.x2 + x.x3);
  r.degenerate = !(x.x3 > 0.0);
  r.solvable = !r.degenerate && std::abs(r.off_support) <= tol && std::abs(r.on_support) <= tol &&
               std::abs(r.normalization_defect) <= tol;
  return r;
}

}  // namespace ecoclone
