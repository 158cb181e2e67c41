#include "kondo/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kondo {

namespace {

std::string describe(const Sites& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

double negativity_from_spectrum(const Eigen::VectorXd& ev) {
  const double e = ev.cwiseAbs().sum() - 1.0;
  return e < 1e-12 ? 0.0 : e;
}

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m) {
  const Eigen::MatrixXcd herm = 0.5 * (m + m.adjoint());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(herm, Eigen::EigenvaluesOnly).eigenvalues();
}

// Orthonormal basis (columns) of the span of the given vectors; vectors whose
// residual after two projection passes falls below `drop` are discarded.
Eigen::MatrixXcd gram_schmidt_span(const std::vector<Eigen::VectorXcd>& vecs, Eigen::Index dim, double drop) {
  Eigen::MatrixXcd q(dim, std::min<Eigen::Index>(dim, static_cast<Eigen::Index>(vecs.size())));
  Eigen::Index rank = 0;
  for (const auto& v : vecs) {
    if (rank == dim) break;
    if (v.norm() <= drop) continue;
    Eigen::VectorXcd w = v;
    for (int pass = 0; pass < 2; ++pass)
      if (rank > 0) w -= q.leftCols(rank) * (q.leftCols(rank).adjoint() * w);
    const double nrm = w.norm();
    if (nrm <= drop) continue;
    q.col(rank++) = w / nrm;
  }
  return q.leftCols(rank);
}

double low_rank_impurity_negativity(const PureState& state, int block_a_len) {
  const int n = state.n_sites();
  Sites rows{1};
  for (int s = 2; s <= block_a_len + 1; ++s) rows.push_back(s);
  Sites block_b;
  for (int s = block_a_len + 2; s <= n; ++s) block_b.push_back(s);

  const Eigen::MatrixXcd m = amplitude_matrix(state, rows, block_b);
  const Eigen::Index dim_a = m.rows() / 2;
  const Eigen::Index dim_b = m.cols();
  // Row bit 0 is the impurity: X_s = rows 2a + s.
  Eigen::MatrixXcd x[2] = {Eigen::MatrixXcd(dim_a, dim_b), Eigen::MatrixXcd(dim_a, dim_b)};
  for (Eigen::Index a = 0; a < dim_a; ++a) {
    x[0].row(a) = m.row(2 * a);
    x[1].row(a) = m.row(2 * a + 1);
  }

  std::vector<Eigen::VectorXcd> rows_b;
  rows_b.reserve(static_cast<std::size_t>(2 * dim_a));
  for (int s = 0; s < 2; ++s)
    for (Eigen::Index a = 0; a < dim_a; ++a) rows_b.emplace_back(x[s].row(a).transpose());
  const Eigen::MatrixXcd q = gram_schmidt_span(rows_b, dim_b, 1e-12);
  const Eigen::Index r = q.cols();

  // Q^H Tr_A(|x_s><x_t|) Q = Y_s^T conj(Y_t) with Y_s = X_s conj(Q).
  const Eigen::MatrixXcd y0 = x[0] * q.conjugate();
  const Eigen::MatrixXcd y1 = x[1] * q.conjugate();
  const Eigen::MatrixXcd* y[2] = {&y0, &y1};
  Eigen::MatrixXcd pt(2 * r, 2 * r);
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t) pt.block(t * r, s * r, r, r) = y[s]->transpose() * y[t]->conjugate();
  return negativity_from_spectrum(hermitian_eigenvalues(pt));
}

}  // namespace

Eigen::MatrixXcd partial_transpose(const ReducedDensity& rho, const Sites& transpose_sites) {
  const Sites t = normalize_sites(transpose_sites, rho.sites.empty() ? 0 : rho.sites.back());
  std::size_t mask = 0;
  for (int s : t) {
    const auto it = std::find(rho.sites.begin(), rho.sites.end(), s);
    if (it == rho.sites.end()) throw std::invalid_argument("transpose site " + std::to_string(s) + " not retained");
    mask |= std::size_t{1} << (it - rho.sites.begin());
  }
  const Eigen::Index d = rho.matrix.rows();
  Eigen::MatrixXcd out(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
      const std::size_t ip = (ui & ~mask) | (uj & mask);
      const std::size_t jp = (uj & ~mask) | (ui & mask);
      out(static_cast<Eigen::Index>(ip), static_cast<Eigen::Index>(jp)) = rho.matrix(i, j);
    }
  }
  return out;
}

MeasureResult negativity(const ReducedDensity& rho, const Sites& transpose_sites) {
  if (transpose_sites.empty() || transpose_sites.size() >= rho.sites.size())
    throw std::invalid_argument("negativity: transpose set must be a nonempty proper subset");
  const double e = negativity_from_spectrum(hermitian_eigenvalues(partial_transpose(rho, transpose_sites)));
  return {MeasureKind::negativity, e, "rho" + describe(rho.sites) + " T" + describe(transpose_sites)};
}

MeasureResult impurity_block_negativity(const PureState& state, int block_a_len, NegativityPath path) {
  const int n = state.n_sites();
  if (block_a_len < 0 || block_a_len > n - 2)
    throw std::invalid_argument("block A length must lie in [0, N-2], got " + std::to_string(block_a_len));
  const int kept = n - block_a_len;  // impurity plus block B
  if (path == NegativityPath::automatic)
    path = kept <= kDenseImpurityBlockSites ? NegativityPath::dense : NegativityPath::low_rank;

  double value = 0.0;
  if (path == NegativityPath::dense) {
    if (kept > kMaxReducedSites) throw std::invalid_argument("dense impurity-block path limited to 14 sites");
    Sites keep{1};
    for (int s = block_a_len + 2; s <= n; ++s) keep.push_back(s);
    value = negativity(reduce(state, keep), {1}).value;
  } else {
    value = low_rank_impurity_negativity(state, block_a_len);
  }
  return {MeasureKind::negativity, value, "impurity vs B, L=" + std::to_string(block_a_len)};
}

MeasureResult concurrence(const ReducedDensity& rho) {
  if (rho.sites.size() != 2 || rho.matrix.rows() != 4 || rho.matrix.cols() != 4)
    throw std::invalid_argument("concurrence requires a two-qubit density matrix");
  Eigen::Matrix4cd flip = Eigen::Matrix4cd::Zero();
  flip(0, 3) = -1.0;
  flip(1, 2) = 1.0;
  flip(2, 1) = 1.0;
  flip(3, 0) = -1.0;
  const Eigen::Matrix4cd r = 0.5 * (rho.matrix + rho.matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(r);
  const Eigen::Vector4d p = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::Matrix4cd sqrt_rho = es.eigenvectors() * p.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  // sqrt(rho) rho~ sqrt(rho) = A A^H with A = sqrt(rho) F sqrt(rho)*, so the
  // lambdas are singular values of A. This avoids square roots of rounding
  // noise near rank deficiency.
  const Eigen::Matrix4cd a = sqrt_rho * flip * sqrt_rho.conjugate();
  Eigen::Vector4d lam = Eigen::JacobiSVD<Eigen::Matrix4cd>(a).singularValues();
  std::sort(lam.data(), lam.data() + 4, std::greater<>());
  const double c = std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
  return {MeasureKind::concurrence, std::min(c, 1.0), "rho" + describe(rho.sites)};
}

MeasureResult von_neumann_entropy(const ReducedDensity& rho) {
  const Eigen::VectorXd ev = hermitian_eigenvalues(rho.matrix);
  double s = 0.0;
  for (double p : ev)
    if (p > 1e-14) s -= p * std::log2(p);
  return {MeasureKind::entropy, std::max(0.0, s), "rho" + describe(rho.sites)};
}

MeasureResult purity(const ReducedDensity& rho) {
  const double p = (rho.matrix * rho.matrix).trace().real();
  return {MeasureKind::purity, p, "rho" + describe(rho.sites)};
}

double entanglement_entropy(const SchmidtData& s) {
  double e = 0.0;
  for (double c : s.coefficients) {
    const double p = c * c;
    if (p > 1e-14) e -= p * std::log2(p);
  }
  return std::max(0.0, e);
}

}  // namespace kondo
