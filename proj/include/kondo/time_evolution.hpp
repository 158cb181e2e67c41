#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kondo/eigensolver.hpp"
#include "kondo/hamiltonian.hpp"
#include "kondo/reduced_density.hpp"

namespace kondo {

struct KrylovOptions {
  int max_subspace = 30;
  double step_tolerance = 1e-9;  // local error per accepted step
  double min_step = 1e-12;       // relative to max(1, |t|)
};

struct EvolveStats {
  int steps = 0;
  int matvecs = 0;
  int rejected = 0;
};

class EvolutionError : public std::runtime_error {
 public:
  EvolutionError(const std::string& what, double t_reached, double step)
      : std::runtime_error(what + " (reached t=" + std::to_string(t_reached) + ", step " + std::to_string(step) + ")") {}
};

/// exp(-i H t)|state> by short-iterate Lanczos exponentials with step halving.
/// Negative t propagates backwards.
PureState evolve(const PureState& state, const HamiltonianOperator& h, double t, const KrylovOptions& opts = {},
                 EvolveStats* stats = nullptr);

/// Ground state of the initial Hamiltonian and the operator it is quenched to.
struct QuenchSetup {
  ChainSpec spec_initial;
  ChainSpec spec_final;
  double initial_energy;
  PureState initial;
  std::shared_ptr<const HamiltonianOperator> h_final;
};

QuenchSetup prepare_quench(const ChainSpec& spec, Variant final_variant = Variant::end_quenched,
                           const LanczosOptions& lanczos = {});

/// Concurrence of the end pair rho_{1N}.
double end_concurrence(const PureState& state);

/// <sigma_a . sigma_b> summed with the bond strengths.
double bond_expectation(const PureState& state, const std::vector<Bond>& bonds);

struct QuenchOptions {
  Variant final_variant = Variant::end_quenched;
  KrylovOptions krylov;
  LanczosOptions lanczos;
  bool check_reversal = true;
  std::vector<Bond> observables;  // extra sigma.sigma expectations per sample
};

struct QuenchTrajectory {
  ChainSpec spec_initial;
  ChainSpec spec_final;
  std::vector<double> times;
  std::vector<double> concurrence;
  std::vector<std::vector<double>> observables;  // [observable][sample]
  double initial_energy = 0.0;   // <GS_I|H_I|GS_I>
  double norm_drift = 0.0;       // max | ||psi(t)|| - 1 |
  double energy_drift = 0.0;     // max relative drift of <H_F>
  double reversal_fidelity = 1.0;
};

/// Concurrence of rho_{1N}(t) on the grid {0, dt, ..., t_max}.
QuenchTrajectory run_quench(const ChainSpec& spec, double t_max, double dt, const QuenchOptions& opts = {});
QuenchTrajectory run_quench(const QuenchSetup& setup, double t_max, double dt, const QuenchOptions& opts = {});

inline constexpr double kThermalTruncation = 1e-8;

enum class ThermalScope { full_space, sz_zero };

struct ThermalComponent {
  std::shared_ptr<const SectorBasis> basis;
  std::vector<double> energies;
  std::vector<Eigen::VectorXd> vectors;
  std::vector<double> weights;  // retained levels only, all components sum to 1
};

/// Truncated spectral Gibbs state; beta = 1 / (k_B T) with k_B = 1.
struct MixedState {
  double beta = 0.0;
  double log_partition = 0.0;  // ln Z over every level before truncation
  std::vector<ThermalComponent> components;

  std::size_t retained() const;
  double total_weight() const;
};

/// Normalized Boltzmann weights; levels below kThermalTruncation relative to
/// the largest weight are zeroed before renormalizing.
std::vector<double> gibbs_weights(const std::vector<double>& energies, double beta, double* log_partition = nullptr);

/// Full spectra of the sectors making up a thermal state.
struct ThermalSpectrum {
  struct Sector {
    std::shared_ptr<const SectorBasis> basis;
    std::vector<EigenPair> pairs;
  };
  std::vector<Sector> sectors;

  std::size_t levels() const;
  std::vector<double> energies() const;  // sector order, then ascending
};

ThermalSpectrum thermal_spectrum(const ChainSpec& spec, ThermalScope scope = ThermalScope::full_space);
MixedState gibbs_state(const ThermalSpectrum& spectrum, double beta);

/// Gibbs state of a single sector operator.
MixedState thermal_state(const HamiltonianOperator& h, double beta);

/// Gibbs state assembled sector by sector (Sz is conserved by every variant).
MixedState thermal_state(const ChainSpec& spec, double beta, ThermalScope scope = ThermalScope::full_space);

/// Reduced state of the ensemble on `sites` without evolution.
ReducedDensity thermal_reduced(const MixedState& ms, const Sites& sites);

/// rho_{1N}(t) of the ensemble evolved under the `final_spec` Hamiltonian.
ReducedDensity evolve_mixed(const MixedState& ms, const ChainSpec& final_spec, double t,
                            const KrylovOptions& opts = {});

}  // namespace kondo
