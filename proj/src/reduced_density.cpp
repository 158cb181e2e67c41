#include "kondo/reduced_density.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace kondo {

Sites normalize_sites(const Sites& sites, int n_sites) {
  Sites s = sites;
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw std::invalid_argument("duplicate site in subset");
  for (int x : s)
    if (x < 1 || x > n_sites) throw std::invalid_argument("site " + std::to_string(x) + " out of range");
  return s;
}

Sites complement(const Sites& sites, int n_sites) {
  Sites out;
  for (int i = 1; i <= n_sites; ++i)
    if (std::find(sites.begin(), sites.end(), i) == sites.end()) out.push_back(i);
  return out;
}

std::size_t local_index(Config c, const Sites& sites) {
  std::size_t k = 0;
  for (std::size_t j = 0; j < sites.size(); ++j) k |= static_cast<std::size_t>((c >> (sites[j] - 1)) & 1u) << j;
  return k;
}

ReducedDensity reduce(const PureState& state, const Sites& keep_in) {
  const int n = state.n_sites();
  const Sites keep = normalize_sites(keep_in, n);
  if (keep.empty()) throw std::invalid_argument("reduce: keep set is empty");
  if (static_cast<int>(keep.size()) > kMaxReducedSites)
    throw std::invalid_argument("reduce: at most " + std::to_string(kMaxReducedSites) + " retained sites");
  if (state.amplitudes.size() != static_cast<Eigen::Index>(state.basis->size()))
    throw std::invalid_argument("reduce: amplitude vector does not match basis");

  Config keep_mask = 0;
  for (int s : keep) keep_mask |= Config{1} << (s - 1);

  struct Entry {
    Config env;
    std::uint32_t local;
    std::uint32_t index;
  };
  const std::size_t d = state.basis->size();
  std::vector<Entry> entries;
  entries.reserve(d);
  for (std::size_t i = 0; i < d; ++i) {
    const Config c = state.basis->config(i);
    if (state.amplitudes[i] == cplx(0.0)) continue;
    entries.push_back({c & ~keep_mask, static_cast<std::uint32_t>(local_index(c, keep)),
                       static_cast<std::uint32_t>(i)});
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.env < b.env; });

  const Eigen::Index dk = Eigen::Index{1} << keep.size();
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dk, dk);
  for (std::size_t lo = 0; lo < entries.size();) {
    std::size_t hi = lo;
    while (hi < entries.size() && entries[hi].env == entries[lo].env) ++hi;
    for (std::size_t a = lo; a < hi; ++a) {
      const cplx pa = state.amplitudes[entries[a].index];
      for (std::size_t b = lo; b < hi; ++b)
        rho(entries[a].local, entries[b].local) += pa * std::conj(state.amplitudes[entries[b].index]);
    }
    lo = hi;
  }
  return {keep, std::move(rho)};
}

Eigen::MatrixXcd amplitude_matrix(const PureState& state, const Sites& rows, const Sites& cols) {
  const int n = state.n_sites();
  if (rows.size() + cols.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("amplitude_matrix: rows and cols must partition the chain");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(Eigen::Index{1} << rows.size(), Eigen::Index{1} << cols.size());
  for (std::size_t i = 0; i < state.basis->size(); ++i) {
    const Config c = state.basis->config(i);
    m(local_index(c, rows), local_index(c, cols)) = state.amplitudes[i];
  }
  return m;
}

SchmidtData schmidt(const PureState& state, const Sites& left_in) {
  const int n = state.n_sites();
  SchmidtData out;
  out.left_sites = normalize_sites(left_in, n);
  out.right_sites = complement(out.left_sites, n);
  if (std::min(out.left_sites.size(), out.right_sites.size()) > static_cast<std::size_t>(kMaxReducedSites))
    throw std::invalid_argument("schmidt: smaller side exceeds " + std::to_string(kMaxReducedSites) + " sites");

  if (out.right_sites.empty() || out.left_sites.empty()) {
    // Trivial split: the whole state is the single Schmidt vector.
    const Eigen::VectorXcd full = to_full_space(state);
    const double nrm = full.norm();
    out.coefficients = {nrm};
    const Eigen::MatrixXcd one = Eigen::MatrixXcd::Ones(1, 1);
    if (out.left_sites.empty()) {
      out.left_vectors = one;
      out.right_vectors = full / nrm;
    } else {
      out.left_vectors = full / nrm;
      out.right_vectors = one;
    }
    return out;
  }

  const Eigen::MatrixXcd psi = amplitude_matrix(state, out.left_sites, out.right_sites);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(psi, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < s.size() && s[rank] >= 1e-12) ++rank;
  out.coefficients.assign(s.data(), s.data() + rank);
  out.left_vectors = svd.matrixU().leftCols(rank);
  // psi = U S V^H, so the right Schmidt vectors are the conjugated columns of V.
  out.right_vectors = svd.matrixV().leftCols(rank).conjugate();
  return out;
}

Eigen::VectorXcd to_full_space(const PureState& state) {
  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(Eigen::Index{1} << state.n_sites());
  for (std::size_t i = 0; i < state.basis->size(); ++i) full[state.basis->config(i)] = state.amplitudes[i];
  return full;
}

}  // namespace kondo
