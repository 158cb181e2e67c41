#pragma once
// Brute-force reference implementations built from explicit 2x2 Pauli
// matrices on the full 2^N space. Nothing here calls the library kernels.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "kondo/hamiltonian.hpp"
#include "kondo/reduced_density.hpp"

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Local basis (|down>, |up>), so local index 1 means spin up.
inline Mat pauli(int axis) {
  Mat m = Mat::Zero(2, 2);
  const cplx i(0.0, 1.0);
  if (axis == 0) {
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
  } else if (axis == 1) {
    m(0, 1) = i;
    m(1, 0) = -i;
  } else {
    m(0, 0) = -1.0;
    m(1, 1) = 1.0;
  }
  return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Operator `op` on `site` (1-based); site 1 is the least significant factor.
inline Mat site_op(const Mat& op, int site, int n) {
  Mat out = Mat::Identity(1, 1);
  for (int s = n; s >= 1; --s) out = kron(out, s == site ? op : Mat::Identity(2, 2));
  return out;
}

// Two single-site operators on distinct sites, as one Kronecker product.
inline Mat pair_op(const Mat& op_a, int a, const Mat& op_b, int b, int n) {
  Mat out = Mat::Identity(1, 1);
  for (int s = n; s >= 1; --s) out = kron(out, s == a ? op_a : s == b ? op_b : Mat::Identity(2, 2));
  return out;
}

struct RawBond {
  int a, b;
  double j;
};

// Bond list written straight from the model definition.
inline std::vector<RawBond> bonds(int n, double j1, double j2, double jp, kondo::Variant v) {
  using kondo::Variant;
  std::vector<RawBond> out;
  auto add = [&](int a, int b, double j) {
    if (j != 0.0 && b <= n) out.push_back({a, b, j});
  };
  if (v == Variant::uniform) {
    for (int i = 1; i < n; ++i) add(i, i + 1, j1);
    for (int i = 1; i + 2 <= n; ++i) add(i, i + 2, j2);
    return out;
  }
  const double left = v == Variant::double_quenched ? 0.0 : jp;
  add(1, 2, left * j1);
  add(1, 3, left * j2);
  const bool right = v != Variant::initial;
  for (int i = 2; i <= (right ? n - 2 : n - 1); ++i) add(i, i + 1, j1);
  for (int i = 2; i <= (right ? n - 3 : n - 2); ++i) add(i, i + 2, j2);
  if (right) {
    add(n - 1, n, jp * j1);
    add(n - 2, n, jp * j2);
  }
  return out;
}

inline Mat hamiltonian(int n, const std::vector<RawBond>& bl) {
  const Eigen::Index d = Eigen::Index{1} << n;
  Mat h = Mat::Zero(d, d);
  for (const auto& b : bl)
    for (int axis = 0; axis < 3; ++axis) h += b.j * pair_op(pauli(axis), b.a, pauli(axis), b.b, n);
  return h;
}

inline Mat hamiltonian(const kondo::ChainSpec& s) {
  return hamiltonian(s.n_sites, bonds(s.n_sites, s.j1, s.j2, s.j_prime, s.variant));
}

// Rows/cols of the full matrix restricted to the configurations of a sector.
inline Mat restrict(const Mat& full, const kondo::SectorBasis& basis) {
  const auto d = static_cast<Eigen::Index>(basis.size());
  Mat out(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) out(i, j) = full(basis.config(i), basis.config(j));
  return out;
}

inline Vec embed(const kondo::PureState& s) {
  Vec out = Vec::Zero(Eigen::Index{1} << s.n_sites());
  for (std::size_t k = 0; k < s.basis->size(); ++k) out[s.basis->config(k)] = s.amplitudes[static_cast<Eigen::Index>(k)];
  return out;
}

// Partial trace by looping over every pair of full-space indices.
inline Mat reduced(const Vec& psi, int n, const std::vector<int>& keep) {
  std::size_t keep_mask = 0;
  for (int s : keep) keep_mask |= std::size_t{1} << (s - 1);
  const Eigen::Index d = Eigen::Index{1} << keep.size();
  Mat rho = Mat::Zero(d, d);
  auto local = [&](std::size_t c) {
    Eigen::Index r = 0;
    for (std::size_t j = 0; j < keep.size(); ++j)
      if ((c >> (keep[j] - 1)) & 1u) r |= Eigen::Index{1} << j;
    return r;
  };
  const std::size_t full = std::size_t{1} << n;
  for (std::size_t i = 0; i < full; ++i) {
    if (psi[static_cast<Eigen::Index>(i)] == cplx(0.0)) continue;
    for (std::size_t j = 0; j < full; ++j) {
      if ((i & ~keep_mask) != (j & ~keep_mask)) continue;
      rho(local(i), local(j)) += psi[static_cast<Eigen::Index>(i)] * std::conj(psi[static_cast<Eigen::Index>(j)]);
    }
  }
  return rho;
}

// Partial transpose on local bits given by `mask`.
inline Mat transpose_bits(const Mat& rho, std::size_t mask) {
  Mat out(rho.rows(), rho.cols());
  for (Eigen::Index i = 0; i < rho.rows(); ++i)
    for (Eigen::Index j = 0; j < rho.cols(); ++j) {
      const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
      out(static_cast<Eigen::Index>((ui & ~mask) | (uj & mask)), static_cast<Eigen::Index>((uj & ~mask) | (ui & mask))) =
          rho(i, j);
    }
  return out;
}

inline double negativity(const Mat& rho, std::size_t mask) {
  const Mat pt = transpose_bits(rho, mask);
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Mat>(0.5 * (pt + pt.adjoint()), Eigen::EigenvaluesOnly).eigenvalues();
  double s = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) s += std::abs(ev[i]);
  return std::max(0.0, s - 1.0);
}

// Wootters: square roots of the eigenvalues of rho (sy x sy) rho* (sy x sy).
inline double concurrence(const Mat& rho) {
  const Mat yy = kron(pauli(1), pauli(1));
  const Mat r = rho * yy * rho.conjugate() * yy;
  Eigen::ComplexEigenSolver<Mat> es(r);
  std::vector<double> l;
  for (Eigen::Index i = 0; i < 4; ++i) l.push_back(std::sqrt(std::max(0.0, es.eigenvalues()[i].real())));
  std::sort(l.rbegin(), l.rend());
  return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

inline Eigen::VectorXd eigenvalues(const Mat& h) {
  return Eigen::SelfAdjointEigenSolver<Mat>(h, Eigen::EigenvaluesOnly).eigenvalues();
}

inline Vec random_vector(std::mt19937_64& rng, Eigen::Index d) {
  std::normal_distribution<double> g;
  Vec v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = cplx(g(rng), g(rng));
  return v.normalized();
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace oracle
