#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kondo/entanglement.hpp"
#include "kondo/time_evolution.hpp"

namespace kondo {

inline constexpr double kDefaultEhlThreshold = 1e-3;

// ---------------------------------------------------------------------------
// Static entanglement: healing length, scaling, ansatz diagnostics

struct EhlResult {
  ChainSpec spec;
  std::vector<std::pair<int, double>> curve;  // (L, negativity), L = 0..N-2
  double l_star = 0.0;
  double threshold = kDefaultEhlThreshold;
  bool saturated = false;  // negativity never fell below threshold
  double ground_energy = 0.0;
  bool degenerate = false;
};

/// L* from a sampled curve: the last L whose negativity is >= threshold,
/// linearly interpolated towards the next sample.
double healing_length(const std::vector<std::pair<int, double>>& curve, double threshold, bool* saturated = nullptr);

EhlResult ehl_curve(const PureState& ground, const ChainSpec& spec, double threshold = kDefaultEhlThreshold);
EhlResult ehl_curve(const ChainSpec& spec, double threshold = kDefaultEhlThreshold, const LanczosOptions& lanczos = {});

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct EhlFit {
  LinearFit fit;  // ln L* = intercept + alpha / sqrt(J')
  double alpha() const { return fit.slope; }
  std::vector<double> j_prime;
  std::vector<double> l_star;
  bool flagged = false;  // fit made outside the Kondo regime
};

/// Least squares of ln L* against 1/sqrt(J') over non-saturated results.
EhlFit ehl_scaling_fit(const std::vector<EhlResult>& results);

struct CollapseRecord {
  std::vector<double> grid;                 // L/N
  std::vector<std::vector<double>> curves;  // resampled negativity per input
  std::vector<double> ratios;               // N/L* per input
  double max_deviation = 0.0;
};

/// Resamples negativity-vs-L/N curves to a common grid and returns the largest
/// pointwise spread. Inputs must share N/L* within 10%.
CollapseRecord scaling_collapse(const std::vector<EhlResult>& results, std::size_t grid_points = 101);

/// Bisects J' in [jp_lo, jp_hi] until N/L* is within 1% of `target_ratio`.
EhlResult match_ratio(int n, double j2, double target_ratio, double threshold = kDefaultEhlThreshold,
                      double jp_lo = 0.05, double jp_hi = 1.0, const LanczosOptions& lanczos = {});

struct AnsatzReport {
  int block_a_len = 0;           // ceil(L*)
  double impurity_purity = 0.0;  // 1/2 for a maximally entangled impurity
  double block_b_entropy = 0.0;
  double negativity = 0.0;  // impurity vs B at block_a_len
  bool negativity_below_threshold = false;
};

AnsatzReport ansatz_check(const PureState& ground, double l_star, double threshold = kDefaultEhlThreshold);

// ---------------------------------------------------------------------------
// Quench dynamics

/// Peak structure of one concurrence trajectory.
struct PeakSummary {
  bool entangling = false;        // some sample exceeds 1e-3
  double first_peak_time = 0.0;   // first local max reaching half the global max
  double window_end = 0.0;        // 2.5 x first_peak_time
  double e_m = 0.0;               // max over [0, window_end], refined
  double t_opt = 0.0;
  double second_peak_time = 0.0;  // argmax over (window_end, window_end + 2 first_peak_time]
  double trough_time = 0.0;       // argmin over [t_opt, second_peak_time]
};

/// Grid-only analysis of a sampled trajectory (no refinement).
PeakSummary analyze_trajectory(const std::vector<double>& times, const std::vector<double>& values);

/// Golden-section refinement of the window maximum to dt/10.
PeakSummary refine_peak(const QuenchSetup& setup, const QuenchTrajectory& traj, PeakSummary summary,
                        const KrylovOptions& krylov = {});

struct ScanPoint {
  double j_prime = 0.0;
  bool ok = false;
  std::string error;
  QuenchTrajectory trajectory;
  PeakSummary peaks;
};

struct ScanResult {
  int n_sites = 0;
  double j2 = 0.0;
  Variant final_variant = Variant::end_quenched;
  double t_max = 0.0;
  double dt = 0.0;
  std::vector<ScanPoint> points;
  double e_m = 0.0;
  double t_opt = 0.0;
  double j_prime_opt = 0.0;
  std::size_t best_index = 0;
};

struct ScanOptions {
  Variant final_variant = Variant::end_quenched;
  QuenchOptions quench;
  bool refine = true;
};

inline double default_t_max(int n) { return 4.0 * n; }
inline double default_dt(double t_max) { return t_max / 400.0; }

/// Quench trajectories for each J' in the grid; grid points run in parallel
/// and are merged in grid order. Failures are recorded per point.
ScanResult quench_scan(int n, double j2, const std::vector<double>& j_grid, double t_max, double dt,
                       const ScanOptions& opts = {});

ScanResult double_quench_scan(int n, double j2, const std::vector<double>& j_grid, double t_max, double dt,
                              ScanOptions opts = {});

std::vector<double> default_j_grid();  // 0.10, 0.15, ..., 0.90

struct XiPoint {
  int n_sites;
  double j_prime_opt;
  double t_opt;
  double xi;     // exp(intercept + alpha / sqrt(J'_opt))
  double ratio;  // xi / (N - 2)
};

struct XiReport {
  std::vector<XiPoint> points;
  LinearFit t_opt_fit;  // ln t_opt vs 1/sqrt(J'_opt), needs >= 2 sizes
  bool flagged = false;
};

XiReport xi_consistency(const std::vector<ScanResult>& scans, const EhlFit& fit);

// ---------------------------------------------------------------------------
// Two-level interference picture

struct EigenstateComponents {
  double energy = 0.0;
  double overlap = 0.0;  // |<E_k|GS_I>|
  double singlet = 0.0;  // alpha_k: norm of the end-pair singlet component
  double triplet_rms = 0.0;  // beta_k
  double triplet_spread = 0.0;  // max - min of the three triplet norms
};

struct InterferenceReport {
  ChainSpec spec;
  std::vector<EigenstateComponents> states;  // ascending energy
  bool complete = false;                     // full sector spectrum used
  double captured_mass = 0.0;                // sum of overlap^2 over `states`
  std::size_t first = 0, second = 0;         // dominant pair, by overlap
  double dominant_mass = 0.0;
  bool dominance_failure = false;            // dominant_mass < 0.5
  double delta_e = 0.0;
  double condition_ratio = 0.0;
  double t_predicted = 0.0;  // pi / delta_e
};

/// Overlaps of |GS_I> with H_F eigenstates and their end-pair Bell content.
/// Uses the full sector spectrum when it has <= 5000 states, otherwise the
/// lowest `k` states (k >= 20).
InterferenceReport interference_analysis(const ChainSpec& spec, int k = 40, const LanczosOptions& lanczos = {});

// ---------------------------------------------------------------------------
// Thermal robustness

struct ThermalRow {
  double beta;
  double e_m_dynamic;
  double c_static;
};

struct ThermalComparison {
  int n_sites = 0;
  double epsilon = 0.1;
  double j_prime_dynamic = 0.0;
  double j_prime_static = 0.0;
  double window_end = 0.0;  // first-period window of the zero-T trajectory
  double e_m_zero_t = 0.0;  // pure-state E_m in the same window
  double norm_drift = 0.0;  // of the zero-T trajectory
  double energy_drift = 0.0;
  double reversal_fidelity = 1.0;
  std::vector<ThermalRow> rows;  // in beta-grid order
  double t_half_dynamic = 0.0;   // temperature at which the value halves
  double t_half_static = 0.0;
};

struct ThermalOptions {
  double t_max = 0.0;  // 0 -> 4N
  double dt = 0.0;     // 0 -> t_max / 400
  ThermalScope scope = ThermalScope::full_space;
  KrylovOptions krylov;
  LanczosOptions lanczos;
};

/// Dynamic scheme: Gibbs state of H_I(dynamic_spec) evolved under the end
/// quench, maximized over the zero-T first-period window. Static scheme:
/// end-pair concurrence of the Gibbs state of the end_quenched chain with
/// J' = epsilon / sqrt(N).
ThermalComparison thermal_comparison(const ChainSpec& dynamic_spec, const std::vector<double>& beta_grid,
                                     double epsilon = 0.1, const ThermalOptions& opts = {});

/// Temperature where `values` (ordered by ascending temperature) first drops
/// below half of its lowest-temperature value; log-linear interpolation.
double half_value_temperature(const std::vector<double>& temperatures, const std::vector<double>& values);

}  // namespace kondo
