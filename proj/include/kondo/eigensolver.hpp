#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kondo/hamiltonian.hpp"

namespace kondo {

inline constexpr std::uint64_t kDefaultSeed = 20090527;

struct EigenPair {
  double value;
  Eigen::VectorXd vector;  // unit norm, largest-magnitude amplitude positive
};

struct LanczosOptions {
  int max_krylov = 200;  // vectors per restart cycle
  int max_restarts = 60;
  double tolerance = 1e-10;  // residual norm, scaled by max(1, |value|)
  std::uint64_t seed = kDefaultSeed;
};

struct SolveReport {
  int matvecs = 0;
  int restarts = 0;
  double residual = 0.0;
  bool degenerate = false;  // two lowest levels closer than 1e-10
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual, int matvecs)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + " after " +
                           std::to_string(matvecs) + " matvecs)"),
        residual_(residual),
        matvecs_(matvecs) {}
  double residual() const { return residual_; }
  int matvecs() const { return matvecs_; }

 private:
  double residual_;
  int matvecs_;
};

/// Lowest eigenpair by Lanczos with full reorthogonalization. When `report`
/// is given a second, deflated solve fills in the degeneracy flag.
EigenPair ground_state(const HamiltonianOperator& h, const LanczosOptions& opts = {},
                       SolveReport* report = nullptr);

/// k lowest eigenpairs, ascending, each found by Lanczos on the operator
/// deflated by the pairs already converged.
std::vector<EigenPair> lowest_k(const HamiltonianOperator& h, int k, const LanczosOptions& opts = {},
                                SolveReport* report = nullptr);

inline constexpr std::size_t kFullSpectrumLimit = 5000;

/// Complete eigenbasis by dense diagonalization (sector dimension <= 5000).
std::vector<EigenPair> full_spectrum(const HamiltonianOperator& h);

/// Flip the sign so the first largest-magnitude amplitude is positive.
void fix_phase(Eigen::VectorXd& v);

}  // namespace kondo
