// Fidelity operators R for universal, phase-covariant and Fourier-covariant
// cloning, their sampling oracles, and maximal-eigenspace analysis.
//
// For a state family with measure dpsi, R_B = int psi^T (x) psi (x) 1 dpsi and
// R_E is the same with the roles of B and E exchanged; R = (R_B + R_E)/2 on
// the factors (in, B, E), so that the mean clone fidelity is Tr(S R) and is
// bounded by d * r_max for any trace-preserving S.

#pragma once

#include "ecoclone/qudit.hpp"
#include "ecoclone/sampling.hpp"

#include <Eigen/Eigenvalues>

#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace ecoclone {

enum class Family { universal, phase_covariant, fourier };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::universal: return "universal";
    case Family::phase_covariant: return "phase-covariant";
    case Family::fourier: return "fourier";
  }
  return "unknown";
}

inline Family parse_family(std::string_view s) {
  if (s == "universal") return Family::universal;
  if (s == "phase-covariant" || s == "phase_covariant" || s == "pc") return Family::phase_covariant;
  if (s == "fourier" || s == "fourier-covariant") return Family::fourier;
  throw std::invalid_argument("unknown cloner family '" + std::string(s) + "'");
}

/// F_{jk} = w^{jk} / sqrt(d).
inline Mat fourier_matrix(int d) {
  Mat f(d, d);
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) f(j, k) = s * root_of_unity(d, static_cast<long long>(j) * k);
  return f;
}

namespace detail {

inline void require_dim(int d) {
  if (d < 2) throw std::invalid_argument("dimension must be at least 2");
}

// (X_{in,B} (x) 1_E + X_{in,E} (x) 1_B) / 2 for a two-factor X.
inline Op symmetrize_clones(const Op& pair) {
  const Op rb = embed_pair(pair, 3, 0, 1);
  const Op re = embed_pair(pair, 3, 0, 2);
  return 0.5 * (rb + re);
}

}  // namespace detail

/// Closed form (2*1 + d Phi_{in,B} (x) 1_E + d Phi_{in,E} (x) 1_B) / (2d(d+1)).
inline Op r_universal(int d) {
  detail::require_dim(d);
  const Op phi = Op::projector(max_entangled(d));
  const Op pair = (1.0 / (d * (d + 1.0))) * (Op::identity({d, d}) + static_cast<double>(d) * phi);
  return detail::symmetrize_clones(pair);
}

/// Closed form of the uniform-phase average:
/// 1/d^2 + (Phi_{in,B} + Phi_{in,E})/(2d) - sum_j (|jj><jj|_{in,B} + |jj><jj|_{in,E})/(2d^2).
inline Op r_phase_covariant(int d) {
  detail::require_dim(d);
  const Op phi = Op::projector(max_entangled(d));
  Mat diag = Mat::Zero(d * d, d * d);
  for (int j = 0; j < d; ++j) diag(j * d + j, j * d + j) = 1.0;
  const double dd = static_cast<double>(d);
  const Op pair = (1.0 / dd) * phi + (1.0 / (dd * dd)) * Op::identity({d, d}) -
                  (1.0 / (dd * dd)) * Op({d, d}, diag);
  return detail::symmetrize_clones(pair);
}

/// The 2d states |k> and F|k> of the computational and Fourier bases.
inline std::vector<Ket> fourier_family_states(int d) {
  std::vector<Ket> states;
  const Mat f = fourier_matrix(d);
  for (int k = 0; k < d; ++k) states.push_back(basis_ket(d, k));
  for (int k = 0; k < d; ++k) states.emplace_back(Dims{d}, f.col(k));
  return states;
}

/// Equal-weight average over the computational and Fourier bases.
inline Op r_fourier(int d) {
  detail::require_dim(d);
  Mat pair = Mat::Zero(d * d, d * d);
  for (const Ket& psi : fourier_family_states(d)) {
    const Ket u = tensor(Ket(psi.dims(), psi.amps().conjugate()), psi);
    pair += u.amps() * u.amps().adjoint();
  }
  pair /= 2.0 * d;
  return detail::symmetrize_clones(Op({d, d}, std::move(pair)));
}

inline Op r_operator(Family f, int d) {
  switch (f) {
    case Family::universal: return r_universal(d);
    case Family::phase_covariant: return r_phase_covariant(d);
    case Family::fourier: return r_fourier(d);
  }
  throw std::invalid_argument("unknown family");
}

// ---------------------------------------------------------------------------
// Eigenspace analysis

struct SpectrumCluster {
  double value;
  int multiplicity;
};

struct EigenspaceReport {
  double r_max = 0.0;
  int degeneracy = 0;
  std::vector<Ket> basis;                   ///< orthonormal basis of the top cluster
  std::vector<SpectrumCluster> spectrum;    ///< distinct eigenvalues, descending
  std::optional<double> gap;                ///< r_max minus next distinct value; empty if one cluster
};

/// Full eigendecomposition of a Hermitian R, with eigenvalues identified when
/// they differ by at most degeneracy_tol * ||R||.
inline EigenspaceReport max_eigenspace(const Op& r, double degeneracy_tol = 1e-8) {
  r.require_hermitian(1e-12);
  Eigen::SelfAdjointEigenSolver<Mat> es(r.mat());
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  const Eigen::VectorXd& w = es.eigenvalues();  // ascending
  const Eigen::Index n = w.size();
  const double scale = std::max(std::abs(w[0]), std::abs(w[n - 1]));
  const double tol = degeneracy_tol * std::max(scale, 1e-300);

  EigenspaceReport rep;
  // Cluster from the top, comparing against the first member of each cluster.
  Eigen::Index i = n - 1;
  while (i >= 0) {
    const double head = w[i];
    Eigen::Index j = i;
    double sum = 0.0;
    while (j >= 0 && head - w[j] <= tol) sum += w[j--];
    const int mult = static_cast<int>(i - j);
    rep.spectrum.push_back({sum / mult, mult});
    if (rep.spectrum.size() == 1) {
      for (Eigen::Index k = i; k > j; --k) rep.basis.emplace_back(r.dims(), es.eigenvectors().col(k));
    }
    i = j;
  }
  rep.r_max = rep.spectrum.front().value;
  rep.degeneracy = rep.spectrum.front().multiplicity;
  if (rep.spectrum.size() > 1) rep.gap = rep.r_max - rep.spectrum[1].value;
  return rep;
}

/// Largest principal-angle sine between span(a) and span(b). Both sets are
/// orthonormalized first; returns 1 if the dimensions differ.
inline double subspace_distance(const std::vector<Ket>& a, const std::vector<Ket>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty subspace");
  if (a.size() != b.size()) return 1.0;
  const Eigen::Index n = a.front().size();
  Mat ma(n, static_cast<Eigen::Index>(a.size()));
  Mat mb(n, static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) ma.col(static_cast<Eigen::Index>(i)) = a[i].amps();
  for (std::size_t i = 0; i < b.size(); ++i) mb.col(static_cast<Eigen::Index>(i)) = b[i].amps();
  const auto k = static_cast<Eigen::Index>(a.size());
  Eigen::HouseholderQR<Mat> qa(ma), qb(mb);
  const Mat oa = qa.householderQ() * Mat::Identity(n, k);
  const Mat ob = qb.householderQ() * Mat::Identity(n, k);
  // Singular values of (1 - P_b) Q_a are the sines of the principal angles.
  const Mat resid = oa - ob * (ob.adjoint() * oa);
  Eigen::JacobiSVD<Mat> svd(resid);
  return svd.singularValues()[0];
}

// ---------------------------------------------------------------------------
// Conjectured maximal eigenvectors

/// alpha/beta = -(sqrt(d)/4)(d + 2 + sqrt(d^2 + 4d - 4)).
inline double pc_alpha_beta_ratio(int d) {
  const double dd = d;
  return -(std::sqrt(dd) / 4.0) * (dd + 2.0 + std::sqrt(dd * dd + 4.0 * dd - 4.0));
}

struct PcCoefficients {
  double alpha;  ///< < 0
  double beta;   ///< > 0
};

/// alpha, beta with the ratio above, scaled so each phase-covariant
/// eigenvector has unit norm.
inline PcCoefficients pc_eigenstate_coefficients(int d) {
  detail::require_dim(d);
  const double ratio = pc_alpha_beta_ratio(d);
  const double dd = d;
  // || ratio (a + b) + |kkk> ||^2 with <a|b> = 1/d and <a|kkk> = <b|kkk> = 1/sqrt(d).
  const double n2 = ratio * ratio * (2.0 + 2.0 / dd) + 1.0 + 4.0 * ratio / std::sqrt(dd);
  const double beta = 1.0 / std::sqrt(n2);
  return {ratio * beta, beta};
}

/// |Phi+>_{in,B}|k>_E and |Phi+>_{in,E}|k>_B on (in, B, E).
inline std::pair<Ket, Ket> entangled_pair_states(int d, int k) {
  const Ket a = tensor(max_entangled(d), basis_ket(d, k));
  const Ket b = permute(a, {0, 2, 1});
  return {a, b};
}

inline std::vector<Ket> conjectured_eigenstates(Family f, int d) {
  detail::require_dim(d);
  std::vector<Ket> out;
  for (int k = 0; k < d; ++k) {
    auto [a, b] = entangled_pair_states(d, k);
    switch (f) {
      case Family::universal: {
        const double n = std::sqrt(d / (2.0 * (d + 1.0)));
        out.push_back(n * (a + b));
        break;
      }
      case Family::phase_covariant: {
        const auto [alpha, beta] = pc_eigenstate_coefficients(d);
        out.push_back(alpha * (a + b) + beta * product_basis_ket({d, d, d}, {k, k, k}));
        break;
      }
      case Family::fourier:
        throw std::invalid_argument("no conjectured eigenstates for the Fourier family");
    }
  }
  return out;
}

struct ConjectureReport {
  Family family;
  int d;
  double r_max;              ///< numerically computed
  int degeneracy;            ///< numerically computed
  double eigen_residual;     ///< max_k ||R v_k - r_max v_k||
  double norm_error;         ///< max_k | ||v_k|| - 1 |
  double subspace_distance;  ///< largest principal-angle sine against the top eigenspace
  bool passed;
};

inline constexpr double kEigenResidualTol = 1e-9;
inline constexpr double kPrincipalAngleTol = 1e-8;

/// Checks that the conjectured states are unit-norm eigenvectors at r_max and
/// span the whole maximal eigenspace. d beyond 7 is an extrapolation and must
/// be requested explicitly.
inline ConjectureReport check_conjectured_eigenstates(Family f, int d, bool extrapolate = false,
                                                      double degeneracy_tol = 1e-8) {
  if (d < 2 || (d > 7 && !extrapolate))
    throw std::invalid_argument("conjectured eigenstates are verified for 2 <= d <= 7");
  const Op r = r_operator(f, d);
  const EigenspaceReport es = max_eigenspace(r, degeneracy_tol);
  const std::vector<Ket> states = conjectured_eigenstates(f, d);
  ConjectureReport rep{f, d, es.r_max, es.degeneracy, 0.0, 0.0, 0.0, false};
  for (const Ket& v : states) {
    rep.eigen_residual = std::max(rep.eigen_residual, (r.mat() * v.amps() - es.r_max * v.amps()).norm());
    rep.norm_error = std::max(rep.norm_error, std::abs(v.norm() - 1.0));
  }
  rep.subspace_distance = subspace_distance(states, es.basis);
  rep.passed = rep.eigen_residual <= kEigenResidualTol && rep.norm_error <= 1e-12 &&
               rep.subspace_distance <= kPrincipalAngleTol && es.degeneracy == d;
  return rep;
}

class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline ConjectureReport verify_conjectured_eigenstates(Family f, int d, bool extrapolate = false) {
  ConjectureReport rep = check_conjectured_eigenstates(f, d, extrapolate);
  if (!rep.passed)
    throw VerificationError("conjectured " + to_string(f) + " eigenstates failed verification at d=" +
                            std::to_string(d));
  return rep;
}

// ---------------------------------------------------------------------------
// Integration oracles

struct SampledOperator {
  Op mean;
  Mat std_error;  ///< real, entrywise standard error of the mean (complex modulus)
  long samples;
};

namespace detail {

// Visits the nonzero entries ((a,b,e),(a',b',e')) of
// (psi^T (x) psi (x) 1 + psi^T (x) 1 (x) psi)/2, which are
// (u_ab u*_a'b' [e=e'] + u_ae u*_a'e' [b=b'])/2 with u_ab = psi*_a psi_b.
template <class Visit>
void for_each_clone_entry(const Ket& psi, Visit visit) {
  const int d = static_cast<int>(psi.size());
  Vec u(d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) u[a * d + b] = std::conj(psi[a]) * psi[b];
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int e = 0; e < d; ++e) {
        const int row = (a * d + b) * d + e;
        for (int a2 = 0; a2 < d; ++a2)
          for (int b2 = 0; b2 < d; ++b2)
            for (int e2 = 0; e2 < d; ++e2) {
              if (e != e2 && b != b2) continue;
              cplx v = 0.0;
              if (e == e2) v += u[a * d + b] * std::conj(u[a2 * d + b2]);
              if (b == b2) v += u[a * d + e] * std::conj(u[a2 * d + e2]);
              visit(row, (a2 * d + b2) * d + e2, 0.5 * v);
            }
      }
}

}  // namespace detail

/// Uniform average of the clone-fidelity integrand over a finite state list.
inline Op average_r(const std::vector<Ket>& states) {
  if (states.empty()) throw std::invalid_argument("need at least one state");
  const int d = static_cast<int>(states.front().size());
  Mat sum = Mat::Zero(d * d * d, d * d * d);
  for (const Ket& psi : states) {
    if (psi.dims() != Dims{d}) throw std::invalid_argument("states must be single qudits of equal dimension");
    detail::for_each_clone_entry(psi, [&](int row, int col, cplx v) { sum(row, col) += v; });
  }
  return Op({d, d, d}, sum / static_cast<double>(states.size()));
}

/// Monte-Carlo estimate of R by averaging (psi^T (x) psi (x) 1 + psi^T (x) 1 (x) psi)/2
/// over states drawn from the family's measure: Haar for universal, uniform
/// phases for phase-covariant, uniform over the 2d basis states for Fourier.
inline SampledOperator sample_r(Family f, int d, long samples, std::uint64_t seed) {
  detail::require_dim(d);
  if (samples < 2) throw std::invalid_argument("need at least two samples");
  Rng rng = make_rng(seed, 0);
  const std::vector<Ket> fourier_states = f == Family::fourier ? fourier_family_states(d) : std::vector<Ket>{};
  std::uniform_int_distribution<int> pick(0, 2 * d - 1);

  const int n = d * d * d;
  Mat sum = Mat::Zero(n, n);
  Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(n, n);
  for (long s = 0; s < samples; ++s) {
    Ket psi = f == Family::universal         ? haar_ket(d, rng)
              : f == Family::phase_covariant ? random_balanced_ket(d, rng)
                                             : fourier_states[pick(rng)];
    detail::for_each_clone_entry(psi, [&](int row, int col, cplx v) {
      sum(row, col) += v;
      sum_sq(row, col) += std::norm(v);
    });
  }
  const double ns = static_cast<double>(samples);
  Mat mean = sum / ns;
  Mat se(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double var = std::max(0.0, sum_sq(i, j) / ns - std::norm(mean(i, j))) * ns / (ns - 1.0);
      se(i, j) = std::sqrt(var / ns);
    }
  return {Op({d, d, d}, std::move(mean)), std::move(se), samples};
}

struct OracleComparison {
  double max_deviation;   ///< max |sampled - closed form|
  double worst_sigma;     ///< max deviation / standard error over entries with nonzero SE
  int violations;         ///< entries outside sigmas * SE + abs_floor
  double sigmas;
  double abs_floor;
  bool passed;
};

/// Entrywise check |sampled - exact| <= sigmas * SE + abs_floor. The floor only
/// absorbs rounding in entries whose per-sample value is constant.
inline OracleComparison compare_to_samples(const SampledOperator& s, const Op& exact, double sigmas = 3.0,
                                           double abs_floor = 1e-12) {
  if (exact.dims() != s.mean.dims()) throw std::invalid_argument("layout mismatch");
  OracleComparison c{0.0, 0.0, 0, sigmas, abs_floor, true};
  for (Eigen::Index i = 0; i < exact.side(); ++i)
    for (Eigen::Index j = 0; j < exact.side(); ++j) {
      const double dev = std::abs(s.mean.mat()(i, j) - exact.mat()(i, j));
      const double se = s.std_error(i, j).real();
      c.max_deviation = std::max(c.max_deviation, dev);
      if (se > 0.0) c.worst_sigma = std::max(c.worst_sigma, dev / se);
      if (dev > sigmas * se + abs_floor) ++c.violations;
    }
  c.passed = c.violations == 0;
  return c;
}

}  // namespace ecoclone
