#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "kondo/hamiltonian.hpp"
#include "kondo/sector_basis.hpp"

namespace kondo {

/// 1-based site indices.
using Sites = std::vector<int>;

struct PureState {
  std::shared_ptr<const SectorBasis> basis;
  Eigen::VectorXcd amplitudes;

  static PureState from_real(std::shared_ptr<const SectorBasis> basis, const Eigen::VectorXd& v) {
    return {std::move(basis), v.cast<cplx>()};
  }
  int n_sites() const { return basis->n_sites(); }
};

/// Reduced state on `sites` (ascending). Bit j of a local index is the spin
/// of sites[j], set = up.
struct ReducedDensity {
  Sites sites;
  Eigen::MatrixXcd matrix;
};

struct SchmidtData {
  Sites left_sites;
  Sites right_sites;
  std::vector<double> coefficients;  // descending, > 1e-12
  Eigen::MatrixXcd left_vectors;     // columns, local index over left_sites
  Eigen::MatrixXcd right_vectors;    // columns, local index over right_sites
};

inline constexpr int kMaxReducedSites = 14;

/// Sorted copy; throws on duplicates or sites outside [1, n_sites].
Sites normalize_sites(const Sites& sites, int n_sites);
Sites complement(const Sites& sites, int n_sites);

/// Local index of configuration `c` restricted to `sites` (bit j <- sites[j]).
std::size_t local_index(Config c, const Sites& sites);

/// Exact partial trace over the complement of `keep`, accumulated directly
/// from the sector amplitudes without expanding to 2^N.
ReducedDensity reduce(const PureState& state, const Sites& keep);

/// Dense amplitude matrix psi[local(rows)][local(cols)]; rows and cols must
/// partition the chain.
Eigen::MatrixXcd amplitude_matrix(const PureState& state, const Sites& rows, const Sites& cols);

SchmidtData schmidt(const PureState& state, const Sites& left_sites);

/// Embeds a full-space vector (local index over all N sites, 2^N entries).
Eigen::VectorXcd to_full_space(const PureState& state);

}  // namespace kondo
