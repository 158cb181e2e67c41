#pragma once

#include <string>

#include <Eigen/Dense>

#include "kondo/hamiltonian.hpp"
#include "kondo/reduced_density.hpp"

namespace kondo {

enum class MeasureKind { negativity, concurrence, entropy, purity };

struct MeasureResult {
  MeasureKind kind;
  double value;
  std::string context;
};

/// Partial transpose of `rho` over the subset `transpose_sites` of rho.sites.
Eigen::MatrixXcd partial_transpose(const ReducedDensity& rho, const Sites& transpose_sites);

/// E = sum_i |a_i| - 1 over the partial-transpose spectrum, clamped to 0
/// below 1e-12.
MeasureResult negativity(const ReducedDensity& rho, const Sites& transpose_sites);

enum class NegativityPath { automatic, dense, low_rank };

/// Largest impurity+B size handled by the dense path under `automatic`.
inline constexpr int kDenseImpurityBlockSites = 8;

/// Negativity between site 1 and block B = {L+2, ..., N}, block A = {2..L+1}
/// traced out.
///
/// The low-rank path writes |psi> = |0>|a> + |1>|b>, collects the B-side row
/// spaces of a and b (viewed as A x B matrices) into an orthonormal basis Q by
/// rank-revealing Gram-Schmidt, and diagonalizes the partial transpose
/// projected onto C^2 (x) span(Q). Its dimension is at most 4 x Schmidt rank.
MeasureResult impurity_block_negativity(const PureState& state, int block_a_len,
                                        NegativityPath path = NegativityPath::automatic);

/// Wootters concurrence of a two-qubit density matrix.
MeasureResult concurrence(const ReducedDensity& rho);

/// Base-2 von Neumann entropy over eigenvalues above 1e-14.
MeasureResult von_neumann_entropy(const ReducedDensity& rho);

MeasureResult purity(const ReducedDensity& rho);

/// Entropy of either side of a pure bipartition from its Schmidt coefficients.
double entanglement_entropy(const SchmidtData& s);

}  // namespace kondo
