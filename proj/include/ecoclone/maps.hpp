// Choi-operator representation of 1->2 cloning maps.
//
// A map from one d-dimensional input to two clones B and E is stored as a
// positive operator S on the factors (in, B, E). S is normalized so that a
// trace-preserving map has Tr_{BE} S = 1_in, hence Tr S = d.

#pragma once

#include "ecoclone/qudit.hpp"

#include <Eigen/Eigenvalues>

#include <utility>

namespace ecoclone {

/// Eigenvalue floor below which an operator is not considered PSD.
inline constexpr double kPsdFloor = -1e-10;

/// A linear map V from a d-dimensional input into the product space `out_dims`.
class Isometry {
 public:
  Isometry(int in_dim, Dims out_dims, Mat v, double tol = kStructureTol)
      : in_dim_(in_dim), out_dims_(std::move(out_dims)), v_(std::move(v)) {
    const auto n_out = static_cast<Eigen::Index>(detail::product(out_dims_));
    if (v_.rows() != n_out || v_.cols() != in_dim_)
      throw std::invalid_argument("isometry matrix shape does not match dimensions");
    if (defect() > tol) throw std::invalid_argument("matrix is not an isometry (V^dagger V != 1)");
  }

  int in_dim() const { return in_dim_; }
  const Dims& out_dims() const { return out_dims_; }
  const Mat& mat() const { return v_; }

  /// max |V^dagger V - 1| entrywise.
  double defect() const {
    return (v_.adjoint() * v_ - Mat::Identity(in_dim_, in_dim_)).cwiseAbs().maxCoeff();
  }

  Ket apply(const Ket& k) const {
    if (k.dims() != Dims{in_dim_}) throw std::invalid_argument("input ket has wrong dimension");
    return Ket(out_dims_, v_ * k.amps());
  }

 private:
  int in_dim_;
  Dims out_dims_;
  Mat v_;
};

/// V|k> = U (|k>_B |blank>_E) for a unitary U on B (x) E.
inline Isometry isometry_from_unitary(const Op& u, int blank = 0, double tol = kStructureTol) {
  if (u.dims().size() != 2 || u.dims()[0] != u.dims()[1])
    throw std::invalid_argument("expected a unitary on two equal factors");
  const int d = u.dims()[0];
  detail::check_index(d, blank, "blank");
  if ((u.mat().adjoint() * u.mat() - Mat::Identity(u.side(), u.side())).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("operator is not unitary");
  Mat v(d * d, d);
  for (int k = 0; k < d; ++k) v.col(k) = u.mat().col(k * d + blank);
  return Isometry(d, {d, d}, std::move(v), tol);
}

class ChoiOp {
 public:
  /// Wraps an operator on (in, B, E) after checking factor layout, Hermiticity
  /// and the PSD floor.
  static ChoiOp from_operator(Op op, double psd_floor = kPsdFloor) {
    const int d = check_layout(op);
    if (!op.is_hermitian(1e-12 * std::max(1.0, op.mat().cwiseAbs().maxCoeff())))
      throw std::invalid_argument("Choi operator must be Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(op.mat(), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < psd_floor)
      throw std::invalid_argument("Choi operator is not positive semidefinite");
    return ChoiOp(std::move(op), d);
  }

  /// Rank-one Choi operator |s><s|; PSD by construction.
  static ChoiOp from_vector(const Ket& s) {
    Op op = Op::projector(s);
    const int d = check_layout(op);
    return ChoiOp(std::move(op), d);
  }

  /// Sum of projectors onto the given vectors; PSD by construction.
  static ChoiOp from_vectors(const std::vector<Ket>& vs) {
    if (vs.empty()) throw std::invalid_argument("need at least one vector");
    Mat m = Mat::Zero(vs.front().size(), vs.front().size());
    for (const Ket& v : vs) {
      if (v.dims() != vs.front().dims()) throw std::invalid_argument("vectors with mixed dims");
      m += v.amps() * v.amps().adjoint();
    }
    Op op(vs.front().dims(), std::move(m));
    const int d = check_layout(op);
    return ChoiOp(std::move(op), d);
  }

  const Op& op() const { return op_; }
  const Mat& mat() const { return op_.mat(); }
  int dim() const { return d_; }

 private:
  ChoiOp(Op op, int d) : op_(std::move(op)), d_(d) {}

  static int check_layout(const Op& op) {
    const Dims& dims = op.dims();
    if (dims.size() != 3 || dims[0] != dims[1] || dims[1] != dims[2])
      throw std::invalid_argument("Choi operator must act on three equal factors (in, B, E)");
    return dims[0];
  }

  Op op_;
  int d_;
};

/// |S> = sum_k |k>_in (x) V|k>, giving S = |S><S| with Tr S = d.
inline Ket choi_vector(const Isometry& v) {
  const int d = v.in_dim();
  if (v.out_dims() != Dims{d, d}) throw std::invalid_argument("cloning isometry must map d into d x d");
  Vec s(d * d * d);
  for (int k = 0; k < d; ++k) s.segment(k * d * d, d * d) = v.mat().col(k);
  return Ket({d, d, d}, std::move(s));
}

inline ChoiOp choi_from_isometry(const Isometry& v) { return ChoiOp::from_vector(choi_vector(v)); }

struct TraceCheck {
  bool trace_preserving;
  double residual;  ///< ||Tr_{BE} S - 1||_F
};

inline TraceCheck is_trace_preserving(const ChoiOp& s, double tol = 1e-10) {
  const Op reduced = partial_trace(s.op(), {0});
  const double r = (reduced.mat() - Mat::Identity(s.dim(), s.dim())).norm();
  return {r <= tol, r};
}

namespace detail {

inline void require_density_matrix(const Op& rho, double tol) {
  if (!rho.is_hermitian(tol)) throw std::invalid_argument("rho is not Hermitian");
  if (std::abs(rho.trace() - 1.0) > tol) throw std::invalid_argument("rho does not have unit trace");
  Eigen::SelfAdjointEigenSolver<Mat> es(rho.mat(), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol) throw std::invalid_argument("rho is not positive semidefinite");
}

}  // namespace detail

/// rho_out = Tr_in[(rho^T (x) 1_out) S], a state on (B, E).
inline Op apply_map(const ChoiOp& s, const Op& rho, double tol = kStructureTol) {
  const int d = s.dim();
  if (rho.dims() != Dims{d}) throw std::invalid_argument("input state has wrong dimension");
  detail::require_density_matrix(rho, tol);
  const int n_out = d * d;
  Mat out = Mat::Zero(n_out, n_out);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const cplx w = rho.mat()(i, j);  // (rho^T)_{ji}
      if (w == cplx(0.0)) continue;
      out += w * s.mat().block(i * n_out, j * n_out, n_out, n_out);
    }
  return Op({d, d}, std::move(out));
}

struct CloneFidelities {
  double bob;
  double eve;
};

/// F_B = Tr(psi^T (x) psi (x) 1 S) and F_E = Tr(psi^T (x) 1 (x) psi S).
inline CloneFidelities clone_fidelities(const ChoiOp& s, const Ket& psi) {
  const int d = s.dim();
  if (psi.dims() != Dims{d}) throw std::invalid_argument("input ket has wrong dimension");
  psi.require_unit();
  const Ket conj(psi.dims(), psi.amps().conjugate());
  double fb = 0.0;
  double fe = 0.0;
  for (int e = 0; e < d; ++e) {
    const Ket vb = tensor(conj, psi, basis_ket(d, e));
    const Ket ve = tensor(conj, basis_ket(d, e), psi);
    fb += vb.amps().dot(s.mat() * vb.amps()).real();
    fe += ve.amps().dot(s.mat() * ve.amps()).real();
  }
  return {fb, fe};
}

/// Tr(S R): the average clone fidelity for the figure of merit R.
inline double mean_fidelity(const ChoiOp& s, const Op& r) {
  if (r.dims() != s.op().dims()) throw std::invalid_argument("R and S have different factor layouts");
  r.require_hermitian(1e-12 * std::max(1.0, r.mat().cwiseAbs().maxCoeff()));
  // Tr(SR) = sum_ij S_ij R_ji
  const cplx t = (s.mat().cwiseProduct(r.mat().transpose())).sum();
  if (std::abs(t.imag()) > 1e-10 * std::max(1.0, std::abs(t.real())))
    throw std::runtime_error("Tr(SR) has a non-negligible imaginary part");
  return t.real();
}

}  // namespace ecoclone
