// Dense tensor-product linear algebra over d-dimensional complex factors.
//
// Kets and operators carry their factor dimensions so that partial traces,
// partial transposes and factor permutations can be expressed by factor
// index. Factor 0 is the most significant digit of the flat index.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecoclone {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using Dims = std::vector<int>;

/// Tolerance for exact-structure assertions (orthonormality, unitarity,
/// Hermiticity) unless a caller supplies its own.
inline constexpr double kStructureTol = 1e-10;

namespace detail {

inline std::size_t product(const Dims& dims) {
  std::size_t n = 1;
  for (int d : dims) {
    if (d <= 0) throw std::invalid_argument("factor dimensions must be positive");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

// Row-major strides: stride[i] = prod(dims[i+1..]).
inline std::vector<std::size_t> strides(const Dims& dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t i = dims.size(); i-- > 1;) s[i - 1] = s[i] * static_cast<std::size_t>(dims[i]);
  return s;
}

inline void check_factor(const Dims& dims, int factor) {
  if (factor < 0 || factor >= static_cast<int>(dims.size()))
    throw std::out_of_range("factor index " + std::to_string(factor) + " out of range");
}

inline void check_index(int d, int k, const char* what) {
  if (k < 0 || k >= d)
    throw std::out_of_range(std::string(what) + " index " + std::to_string(k) +
                            " out of range for dimension " + std::to_string(d));
}

// Validates that perm is a permutation of 0..n-1.
inline void check_permutation(const std::vector<int>& perm, std::size_t n) {
  if (perm.size() != n) throw std::invalid_argument("permutation has wrong length");
  std::vector<int> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < n; ++i)
    if (sorted[i] != static_cast<int>(i)) throw std::invalid_argument("not a permutation");
}

// For each flat index of the permuted layout, the flat index in the original layout.
inline std::vector<std::size_t> permutation_map(const Dims& dims, const std::vector<int>& perm) {
  check_permutation(perm, dims.size());
  Dims out_dims(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) out_dims[i] = dims[perm[i]];
  const auto in_strides = strides(dims);
  const std::size_t n = product(dims);
  std::vector<std::size_t> map(n);
  std::vector<int> digits(dims.size(), 0);
  for (std::size_t flat = 0; flat < n; ++flat) {
    std::size_t src = 0;
    for (std::size_t i = 0; i < dims.size(); ++i) src += digits[i] * in_strides[perm[i]];
    map[flat] = src;
    for (std::size_t i = dims.size(); i-- > 0;) {
      if (++digits[i] < out_dims[i]) break;
      digits[i] = 0;
    }
  }
  return map;
}

}  // namespace detail

/// A vector on a tensor product of finite-dimensional factors.
class Ket {
 public:
  Ket(Dims dims, Vec amps) : dims_(std::move(dims)), amps_(std::move(amps)) {
    if (dims_.empty()) throw std::invalid_argument("Ket needs at least one factor");
    if (static_cast<std::size_t>(amps_.size()) != detail::product(dims_))
      throw std::invalid_argument("Ket amplitude count does not match factor dimensions");
  }

  const Dims& dims() const { return dims_; }
  const Vec& amps() const { return amps_; }
  Eigen::Index size() const { return amps_.size(); }
  int factors() const { return static_cast<int>(dims_.size()); }
  cplx operator[](Eigen::Index i) const { return amps_[i]; }

  double norm() const { return amps_.norm(); }

  /// Throws unless the norm is within tol of one.
  const Ket& require_unit(double tol = 1e-12) const {
    if (!std::isfinite(norm()) || std::abs(norm() - 1.0) > tol)
      throw std::invalid_argument("ket is not unit norm");
    return *this;
  }

  Ket normalized() const {
    const double n = norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("cannot normalize a zero ket");
    return Ket(dims_, amps_ / n);
  }

  cplx inner(const Ket& other) const {
    if (other.dims_ != dims_) throw std::invalid_argument("inner product of kets with different dims");
    return amps_.dot(other.amps_);  // conjugate-linear in *this
  }

  Ket operator+(const Ket& other) const {
    if (other.dims_ != dims_) throw std::invalid_argument("sum of kets with different dims");
    return Ket(dims_, amps_ + other.amps_);
  }
  Ket operator-(const Ket& other) const { return *this + Ket(other.dims_, -other.amps_); }
  friend Ket operator*(cplx s, const Ket& k) { return Ket(k.dims_, s * k.amps_); }

 private:
  Dims dims_;
  Vec amps_;
};

/// A square operator on a tensor product of finite-dimensional factors.
class Op {
 public:
  Op(Dims dims, Mat mat) : dims_(std::move(dims)), mat_(std::move(mat)) {
    if (dims_.empty()) throw std::invalid_argument("Op needs at least one factor");
    const auto n = static_cast<Eigen::Index>(detail::product(dims_));
    if (mat_.rows() != n || mat_.cols() != n)
      throw std::invalid_argument("Op matrix side does not match factor dimensions");
  }

  static Op identity(Dims dims) {
    const auto n = static_cast<Eigen::Index>(detail::product(dims));
    return Op(std::move(dims), Mat::Identity(n, n));
  }

  /// |k><k|.
  static Op projector(const Ket& k) { return Op(k.dims(), k.amps() * k.amps().adjoint()); }

  const Dims& dims() const { return dims_; }
  const Mat& mat() const { return mat_; }
  Eigen::Index side() const { return mat_.rows(); }
  int factors() const { return static_cast<int>(dims_.size()); }

  cplx trace() const { return mat_.trace(); }

  /// max |M - M^dagger| entrywise.
  double hermiticity_defect() const { return (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff(); }
  bool is_hermitian(double tol = 1e-12) const { return hermiticity_defect() <= tol; }
  const Op& require_hermitian(double tol = 1e-12) const {
    if (!is_hermitian(tol)) throw std::invalid_argument("operator is not Hermitian");
    return *this;
  }

  Op adjoint() const { return Op(dims_, mat_.adjoint()); }

  Op operator+(const Op& o) const {
    if (o.dims_ != dims_) throw std::invalid_argument("sum of ops with different dims");
    return Op(dims_, mat_ + o.mat_);
  }
  Op operator-(const Op& o) const {
    if (o.dims_ != dims_) throw std::invalid_argument("difference of ops with different dims");
    return Op(dims_, mat_ - o.mat_);
  }
  Op operator*(const Op& o) const {
    if (o.dims_ != dims_) throw std::invalid_argument("product of ops with different dims");
    return Op(dims_, mat_ * o.mat_);
  }
  Ket operator*(const Ket& k) const {
    if (k.dims() != dims_) throw std::invalid_argument("op/ket dims mismatch");
    return Ket(dims_, mat_ * k.amps());
  }
  friend Op operator*(cplx s, const Op& op) { return Op(op.dims_, s * op.mat_); }

 private:
  Dims dims_;
  Mat mat_;
};

/// The k-th computational basis vector of a single d-dimensional factor.
inline Ket basis_ket(int d, int k) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  detail::check_index(d, k, "basis");
  Vec v = Vec::Zero(d);
  v[k] = 1.0;
  return Ket({d}, std::move(v));
}

/// Basis ket |i_0 i_1 ...> on the given factors.
inline Ket product_basis_ket(const Dims& dims, const std::vector<int>& digits) {
  if (digits.size() != dims.size()) throw std::invalid_argument("digit count does not match factors");
  const auto st = detail::strides(dims);
  std::size_t flat = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    detail::check_index(dims[i], digits[i], "basis");
    flat += digits[i] * st[i];
  }
  Vec v = Vec::Zero(static_cast<Eigen::Index>(detail::product(dims)));
  v[static_cast<Eigen::Index>(flat)] = 1.0;
  return Ket(dims, std::move(v));
}

/// Principal d-th root of unity exp(2 pi i / d) raised to the integer power p.
inline cplx root_of_unity(int d, long long p) {
  const long long r = ((p % d) + d) % d;
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / d);
}

/// |B_{m,n}> = d^{-1/2} sum_k w^{kn} |k>|k+m mod d>, w = exp(2 pi i/d).
inline Ket bell_state(int d, int m, int n) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  detail::check_index(d, m, "shift");
  detail::check_index(d, n, "phase");
  Vec v = Vec::Zero(d * d);
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  for (int k = 0; k < d; ++k) v[k * d + (k + m) % d] = s * root_of_unity(d, static_cast<long long>(k) * n);
  return Ket({d, d}, std::move(v));
}

/// d^{-1/2} sum_j |j>|j>.
inline Ket max_entangled(int d) {
  if (d < 2) throw std::invalid_argument("maximally entangled state needs d >= 2");
  return bell_state(d, 0, 0);
}

/// (|kl> + |lk>)/sqrt(2) for k != l, |kk> otherwise.
inline Ket symmetric_ket(int d, int k, int l) {
  detail::check_index(d, k, "first");
  detail::check_index(d, l, "second");
  Vec v = Vec::Zero(d * d);
  if (k == l) {
    v[k * d + k] = 1.0;
  } else {
    v[k * d + l] = (1.0 / std::numbers::sqrt2);
    v[l * d + k] = (1.0 / std::numbers::sqrt2);
  }
  return Ket({d, d}, std::move(v));
}

/// Kronecker product; factors of a precede factors of b.
inline Ket tensor(const Ket& a, const Ket& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  Vec v(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) v.segment(i * b.size(), b.size()) = a[i] * b.amps();
  return Ket(std::move(dims), std::move(v));
}

inline Op tensor(const Op& a, const Op& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  const Eigen::Index nb = b.side();
  Mat m(a.side() * nb, a.side() * nb);
  for (Eigen::Index i = 0; i < a.side(); ++i)
    for (Eigen::Index j = 0; j < a.side(); ++j) m.block(i * nb, j * nb, nb, nb) = a.mat()(i, j) * b.mat();
  return Op(std::move(dims), std::move(m));
}

template <class T, class... Rest>
T tensor(const T& a, const T& b, const Rest&... rest) {
  return tensor(tensor(a, b), rest...);
}

/// Reorders factors: factor i of the result is factor perm[i] of the input.
inline Ket permute(const Ket& k, const std::vector<int>& perm) {
  const auto map = detail::permutation_map(k.dims(), perm);
  Dims dims(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) dims[i] = k.dims()[perm[i]];
  Vec v(k.size());
  for (std::size_t i = 0; i < map.size(); ++i) v[static_cast<Eigen::Index>(i)] = k[static_cast<Eigen::Index>(map[i])];
  return Ket(std::move(dims), std::move(v));
}

inline Op permute(const Op& op, const std::vector<int>& perm) {
  const auto map = detail::permutation_map(op.dims(), perm);
  Dims dims(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) dims[i] = op.dims()[perm[i]];
  const auto n = static_cast<Eigen::Index>(map.size());
  Mat m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = op.mat()(static_cast<Eigen::Index>(map[i]), static_cast<Eigen::Index>(map[j]));
  return Op(std::move(dims), std::move(m));
}

/// Traces out every factor whose index is not in `keep`. Kept factors retain
/// their relative order.
inline Op partial_trace(const Op& op, std::vector<int> keep) {
  const Dims& dims = op.dims();
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (int f : keep) detail::check_factor(dims, f);
  if (keep.empty()) return Op({1}, Mat::Constant(1, 1, op.trace()));

  std::vector<int> traced;
  for (int f = 0; f < static_cast<int>(dims.size()); ++f)
    if (!std::binary_search(keep.begin(), keep.end(), f)) traced.push_back(f);

  // Move kept factors to the front, then sum over diagonal blocks.
  std::vector<int> perm = keep;
  perm.insert(perm.end(), traced.begin(), traced.end());
  const Op p = permute(op, perm);
  Dims kept_dims;
  for (int f : keep) kept_dims.push_back(dims[f]);
  const auto nk = static_cast<Eigen::Index>(detail::product(kept_dims));
  const Eigen::Index nt = p.side() / nk;
  Mat out = Mat::Zero(nk, nk);
  for (Eigen::Index i = 0; i < nk; ++i)
    for (Eigen::Index j = 0; j < nk; ++j) {
      cplx s = 0.0;
      for (Eigen::Index t = 0; t < nt; ++t) s += p.mat()(i * nt + t, j * nt + t);
      out(i, j) = s;
    }
  return Op(std::move(kept_dims), std::move(out));
}

/// Reduced density matrix Tr_{not keep} |k><k| computed without forming |k><k|.
inline Op reduced_density(const Ket& k, std::vector<int> keep) {
  const Dims& dims = k.dims();
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (int f : keep) detail::check_factor(dims, f);
  std::vector<int> perm = keep;
  for (int f = 0; f < static_cast<int>(dims.size()); ++f)
    if (!std::binary_search(keep.begin(), keep.end(), f)) perm.push_back(f);
  const Ket p = permute(k, perm);
  Dims kept_dims;
  for (int f : keep) kept_dims.push_back(dims[f]);
  if (kept_dims.empty()) return Op({1}, Mat::Constant(1, 1, k.amps().squaredNorm()));
  const auto nk = static_cast<Eigen::Index>(detail::product(kept_dims));
  const Eigen::Index nt = p.size() / nk;
  // Row-major reshape: rows are kept indices.
  Mat x(nk, nt);
  for (Eigen::Index i = 0; i < nk; ++i)
    for (Eigen::Index t = 0; t < nt; ++t) x(i, t) = p[i * nt + t];
  return Op(std::move(kept_dims), x * x.adjoint());
}

/// Transposes one factor in the computational basis.
inline Op partial_transpose(const Op& op, int factor) {
  const Dims& dims = op.dims();
  detail::check_factor(dims, factor);
  const auto st = detail::strides(dims);
  const std::size_t stride = st[factor];
  const auto d = static_cast<std::size_t>(dims[factor]);
  const auto n = static_cast<std::size_t>(op.side());
  Mat out(op.side(), op.side());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t di = (i / stride) % d;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t dj = (j / stride) % d;
      // Swap the factor's digit between row and column.
      const std::size_t i2 = i - di * stride + dj * stride;
      const std::size_t j2 = j - dj * stride + di * stride;
      out(static_cast<Eigen::Index>(i2), static_cast<Eigen::Index>(j2)) = op.mat()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return Op(dims, std::move(out));
}

/// Places a two-factor operator on factors (a, b) of an n-factor space of
/// dimension d each, acting as identity elsewhere.
inline Op embed_pair(const Op& pair_op, int n, int a, int b) {
  if (pair_op.dims().size() != 2 || pair_op.dims()[0] != pair_op.dims()[1])
    throw std::invalid_argument("embed_pair expects an operator on two equal factors");
  if (a == b) throw std::invalid_argument("embed_pair needs two distinct factors");
  const int d = pair_op.dims()[0];
  Op full = pair_op;
  for (int i = 2; i < n; ++i) full = tensor(full, Op::identity({d}));
  // full acts on (a, b, rest...) in that order; move to natural positions.
  std::vector<int> order = {a, b};
  for (int f = 0; f < n; ++f)
    if (f != a && f != b) order.push_back(f);
  detail::check_permutation(order, static_cast<std::size_t>(n));
  std::vector<int> inverse(n);
  for (int i = 0; i < n; ++i) inverse[order[i]] = i;
  return permute(full, inverse);
}

}  // namespace ecoclone
