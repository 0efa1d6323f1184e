// Seeded random states.
//
// Every stream is derived from (seed, stream index) so that partitioned work
// reproduces the same numbers regardless of how it is scheduled.

#pragma once

#include "ecoclone/qudit.hpp"

#include <cstdint>
#include <random>

namespace ecoclone {

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x9e3779b9u};
  return Rng(seq);
}

/// Haar-random pure state: normalized vector of i.i.d. standard complex Gaussians.
inline Ket haar_ket(int d, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(d);
  for (int i = 0; i < d; ++i) v[i] = cplx(g(rng), g(rng));
  return Ket({d}, v / v.norm());
}

/// d^{-1/2} sum_j exp(i phi_j) |j> with the given phases.
inline Ket balanced_ket(const std::vector<double>& phases) {
  const int d = static_cast<int>(phases.size());
  if (d < 1) throw std::invalid_argument("need at least one phase");
  Vec v(d);
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j) v[j] = std::polar(s, phases[j]);
  return Ket({d}, std::move(v));
}

/// Balanced superposition with independent uniform phases.
inline Ket random_balanced_ket(int d, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  std::vector<double> phases(d);
  for (double& p : phases) p = u(rng);
  return balanced_ket(phases);
}

/// Random square matrix of i.i.d. standard complex Gaussians.
inline Mat gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

/// Random isometry C^in -> C^out from the QR factorization of a Gaussian matrix.
inline Mat random_isometry_matrix(Eigen::Index out, Eigen::Index in, Rng& rng) {
  if (out < in) throw std::invalid_argument("isometry needs out >= in");
  Eigen::HouseholderQR<Mat> qr(gaussian_matrix(out, in, rng));
  return qr.householderQ() * Mat::Identity(out, in);
}

}  // namespace ecoclone
