#include "kondo/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace kondo {

namespace {

PureState sz_zero_ground(const ChainSpec& spec, const LanczosOptions& lanczos, double* energy, bool* degenerate) {
  spec.validate();
  auto basis = std::make_shared<const SectorBasis>(spec.n_sites, sector_of_ground_state(spec.n_sites));
  const HamiltonianOperator h(spec, basis, true);
  SolveReport report;
  const EigenPair gs = ground_state(h, lanczos, &report);
  if (energy != nullptr) *energy = gs.value;
  if (degenerate != nullptr) *degenerate = report.degenerate;
  return PureState::from_real(basis, gs.vector);
}

double interpolate(const std::vector<double>& x, const std::vector<double>& y, double at) {
  if (at <= x.front()) return y.front();
  if (at >= x.back()) return y.back();
  const auto it = std::upper_bound(x.begin(), x.end(), at);
  const auto i = static_cast<std::size_t>(it - x.begin());
  const double f = (at - x[i - 1]) / (x[i] - x[i - 1]);
  return y[i - 1] + f * (y[i] - y[i - 1]);
}

template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

// Index of the largest value with t <= t_end; first occurrence wins.
std::size_t argmax_until(const std::vector<double>& t, const std::vector<double>& v, double t_end) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < t.size() && t[i] <= t_end + 1e-12; ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

// Rows of the (1,N) amplitude matrix projected on the singlet and triplets.
struct BellNorms {
  double singlet;
  double triplet[3];
};

BellNorms bell_norms(const PureState& state) {
  const int n = state.n_sites();
  Sites env;
  for (int s = 2; s < n; ++s) env.push_back(s);
  const Eigen::MatrixXcd m = amplitude_matrix(state, {1, n}, env);
  const double r = std::numbers::sqrt2 / 2.0;
  BellNorms out{};
  out.singlet = (r * (m.row(1) - m.row(2))).norm();
  out.triplet[0] = m.row(0).norm();
  out.triplet[1] = (r * (m.row(1) + m.row(2))).norm();
  out.triplet[2] = m.row(3).norm();
  return out;
}

}  // namespace

double healing_length(const std::vector<std::pair<int, double>>& curve, double threshold, bool* saturated) {
  if (curve.empty()) throw std::invalid_argument("healing_length: empty curve");
  if (saturated != nullptr) *saturated = false;
  std::size_t last = curve.size();
  for (std::size_t i = 0; i < curve.size(); ++i)
    if (curve[i].second >= threshold) last = i;
  if (last == curve.size()) return static_cast<double>(curve.front().first);
  if (last + 1 == curve.size()) {
    if (saturated != nullptr) *saturated = true;
    return static_cast<double>(curve.back().first);
  }
  const auto [l0, e0] = curve[last];
  const auto [l1, e1] = curve[last + 1];
  return l0 + (e0 - threshold) / (e0 - e1) * (l1 - l0);
}

EhlResult ehl_curve(const PureState& ground, const ChainSpec& spec, double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
  EhlResult r;
  r.spec = spec;
  r.threshold = threshold;
  for (int l = 0; l <= spec.n_sites - 2; ++l) r.curve.emplace_back(l, impurity_block_negativity(ground, l).value);
  r.l_star = healing_length(r.curve, threshold, &r.saturated);
  return r;
}

EhlResult ehl_curve(const ChainSpec& spec, double threshold, const LanczosOptions& lanczos) {
  double energy = 0.0;
  bool degenerate = false;
  const PureState gs = sz_zero_ground(spec, lanczos, &energy, &degenerate);
  EhlResult r = ehl_curve(gs, spec, threshold);
  r.ground_energy = energy;
  r.degenerate = degenerate;
  return r;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line needs >= 2 paired points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: abscissae are all equal");
  LinearFit f;
  f.points = x.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += e * e;
  }
  f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

EhlFit ehl_scaling_fit(const std::vector<EhlResult>& results) {
  EhlFit out;
  std::vector<double> x, y;
  for (const auto& r : results) {
    if (r.saturated || !(r.l_star > 0.0)) continue;
    out.j_prime.push_back(r.spec.j_prime);
    out.l_star.push_back(r.l_star);
    x.push_back(1.0 / std::sqrt(r.spec.j_prime));
    y.push_back(std::log(r.l_star));
    if (r.spec.regime() != Regime::kondo) out.flagged = true;
  }
  if (x.size() < 4)
    throw std::invalid_argument("ehl_scaling_fit needs >= 4 non-saturated points, got " + std::to_string(x.size()));
  out.fit = fit_line(x, y);
  return out;
}

CollapseRecord scaling_collapse(const std::vector<EhlResult>& results, std::size_t grid_points) {
  if (results.size() < 2) throw std::invalid_argument("scaling_collapse needs at least two curves");
  if (grid_points < 2) throw std::invalid_argument("scaling_collapse needs at least two grid points");
  CollapseRecord out;
  double x_max = 1.0;
  for (const auto& r : results) {
    if (!(r.l_star > 0.0)) throw std::invalid_argument("scaling_collapse: L* must be positive");
    out.ratios.push_back(r.spec.n_sites / r.l_star);
    x_max = std::min(x_max, static_cast<double>(r.spec.n_sites - 2) / r.spec.n_sites);
  }
  const auto [lo, hi] = std::minmax_element(out.ratios.begin(), out.ratios.end());
  if (*hi > 1.1 * *lo) throw std::invalid_argument("scaling_collapse: N/L* differs by more than 10%");

  for (std::size_t g = 0; g < grid_points; ++g)
    out.grid.push_back(x_max * static_cast<double>(g) / static_cast<double>(grid_points - 1));
  for (const auto& r : results) {
    std::vector<double> x, y;
    for (const auto& [l, e] : r.curve) {
      x.push_back(static_cast<double>(l) / r.spec.n_sites);
      y.push_back(e);
    }
    std::vector<double> resampled;
    for (double g : out.grid) resampled.push_back(interpolate(x, y, g));
    out.curves.push_back(std::move(resampled));
  }
  for (std::size_t g = 0; g < grid_points; ++g) {
    double mn = out.curves[0][g], mx = mn;
    for (const auto& c : out.curves) {
      mn = std::min(mn, c[g]);
      mx = std::max(mx, c[g]);
    }
    out.max_deviation = std::max(out.max_deviation, mx - mn);
  }
  return out;
}

EhlResult match_ratio(int n, double j2, double target_ratio, double threshold, double jp_lo, double jp_hi,
                      const LanczosOptions& lanczos) {
  auto at = [&](double jp) {
    ChainSpec s;
    s.n_sites = n;
    s.j2 = j2;
    s.j_prime = jp;
    return ehl_curve(s, threshold, lanczos);
  };
  auto ratio = [](const EhlResult& r) { return r.spec.n_sites / std::max(r.l_star, 1e-300); };
  EhlResult lo = at(jp_lo), hi = at(jp_hi);
  // N/L* grows with J' because the cloud shrinks.
  if (target_ratio < ratio(lo) || target_ratio > ratio(hi))
    throw std::invalid_argument("match_ratio: N/L* = " + std::to_string(target_ratio) + " not bracketed for N=" +
                                std::to_string(n) + " (range " + std::to_string(ratio(lo)) + " .. " +
                                std::to_string(ratio(hi)) + ")");
  EhlResult best = std::abs(ratio(lo) - target_ratio) < std::abs(ratio(hi) - target_ratio) ? lo : hi;
  for (int it = 0; it < 40 && std::abs(ratio(best) - target_ratio) > 0.01 * target_ratio; ++it) {
    const double mid = 0.5 * (lo.spec.j_prime + hi.spec.j_prime);
    EhlResult m = at(mid);
    if (ratio(m) < target_ratio)
      lo = m;
    else
      hi = m;
    if (std::abs(ratio(m) - target_ratio) < std::abs(ratio(best) - target_ratio)) best = m;
  }
  return best;
}

AnsatzReport ansatz_check(const PureState& ground, double l_star, double threshold) {
  const int n = ground.n_sites();
  AnsatzReport r;
  r.block_a_len = std::clamp(static_cast<int>(std::ceil(l_star)), 0, n - 2);
  r.impurity_purity = purity(reduce(ground, {1})).value;
  Sites left;
  for (int s = 1; s <= r.block_a_len + 1; ++s) left.push_back(s);
  r.block_b_entropy = entanglement_entropy(schmidt(ground, left));
  r.negativity = impurity_block_negativity(ground, r.block_a_len).value;
  r.negativity_below_threshold = r.negativity < threshold;
  return r;
}

PeakSummary analyze_trajectory(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size() || times.empty())
    throw std::invalid_argument("analyze_trajectory: mismatched or empty samples");
  PeakSummary p;
  const double gmax = *std::max_element(values.begin(), values.end());
  p.entangling = gmax > 1e-3;
  if (!p.entangling) {
    p.window_end = times.back();
    return p;
  }
  std::size_t first = values.size();
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    if (values[i] > values[i - 1] && values[i] >= values[i + 1] && values[i] >= 0.5 * gmax) {
      first = i;
      break;
    }
  }
  if (first == values.size()) first = argmax_until(times, values, times.back());
  p.first_peak_time = times[first];
  p.window_end = std::min(2.5 * p.first_peak_time, times.back());
  const std::size_t best = argmax_until(times, values, p.window_end);
  p.e_m = values[best];
  p.t_opt = times[best];

  const double second_end = p.window_end + 2.0 * p.first_peak_time;
  std::size_t second = values.size();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (times[i] <= p.window_end + 1e-12 || times[i] > second_end + 1e-12) continue;
    if (second == values.size() || values[i] > values[second]) second = i;
  }
  if (second != values.size()) {
    p.second_peak_time = times[second];
    std::size_t trough = best;
    for (std::size_t i = best; i <= second; ++i)
      if (values[i] < values[trough]) trough = i;
    p.trough_time = times[trough];
  }
  return p;
}

PeakSummary refine_peak(const QuenchSetup& setup, const QuenchTrajectory& traj, PeakSummary summary,
                        const KrylovOptions& krylov) {
  if (!summary.entangling || traj.times.size() < 2) return summary;
  const double dt = traj.times[1] - traj.times[0];
  const double lo = std::max(0.0, summary.t_opt - dt);
  const double hi = std::min(summary.window_end, summary.t_opt + dt);
  if (!(hi > lo)) return summary;
  const HamiltonianOperator& hf = *setup.h_final;
  const PureState anchor = evolve(setup.initial, hf, lo, krylov);
  auto f = [&](double t) { return end_concurrence(evolve(anchor, hf, t - lo, krylov)); };
  const auto [t, v] = golden_max(f, lo, hi, dt / 10.0);
  if (v > summary.e_m) {
    summary.e_m = v;
    summary.t_opt = t;
  }
  return summary;
}

std::vector<double> default_j_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 16; ++i) g.push_back(std::round(10.0 + 5.0 * i) / 100.0);
  return g;
}

ScanResult quench_scan(int n, double j2, const std::vector<double>& j_grid, double t_max, double dt,
                       const ScanOptions& opts) {
  if (j_grid.empty()) throw std::invalid_argument("quench_scan: empty J' grid");
  ScanResult out;
  out.n_sites = n;
  out.j2 = j2;
  out.final_variant = opts.final_variant;
  out.t_max = t_max;
  out.dt = dt;
  out.points.resize(j_grid.size());

  // Reject bad parameters up front rather than per grid point.
  for (double jp : j_grid) {
    ChainSpec s;
    s.n_sites = n;
    s.j2 = j2;
    s.j_prime = jp;
    s.with_variant(opts.final_variant).validate();
  }
  if (!(dt > 0.0) || !(t_max > 0.0)) throw std::invalid_argument("quench_scan requires t_max > 0 and dt > 0");

  QuenchOptions qopts = opts.quench;
  qopts.final_variant = opts.final_variant;
  const auto count = static_cast<long>(j_grid.size());
#ifdef KONDO_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (long i = 0; i < count; ++i) {
    ScanPoint& p = out.points[static_cast<std::size_t>(i)];
    p.j_prime = j_grid[static_cast<std::size_t>(i)];
    try {
      ChainSpec s;
      s.n_sites = n;
      s.j2 = j2;
      s.j_prime = p.j_prime;
      const QuenchSetup setup = prepare_quench(s, opts.final_variant, qopts.lanczos);
      p.trajectory = run_quench(setup, t_max, dt, qopts);
      p.peaks = analyze_trajectory(p.trajectory.times, p.trajectory.concurrence);
      if (opts.refine) p.peaks = refine_peak(setup, p.trajectory, p.peaks, qopts.krylov);
      p.ok = true;
    } catch (const std::exception& e) {
      p.ok = false;
      p.error = e.what();
    }
  }

  bool any = false;
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    const ScanPoint& p = out.points[i];
    if (!p.ok) continue;
    const ScanPoint* b = any ? &out.points[out.best_index] : nullptr;
    bool better = b == nullptr;
    if (!better) {
      if (p.peaks.e_m > b->peaks.e_m + 1e-9) {
        better = true;
      } else if (std::abs(p.peaks.e_m - b->peaks.e_m) <= 1e-9) {
        better = p.peaks.t_opt < b->peaks.t_opt || (p.peaks.t_opt == b->peaks.t_opt && p.j_prime < b->j_prime);
      }
    }
    if (better) {
      out.best_index = i;
      any = true;
    }
  }
  if (any) {
    const ScanPoint& b = out.points[out.best_index];
    out.e_m = b.peaks.e_m;
    out.t_opt = b.peaks.t_opt;
    out.j_prime_opt = b.j_prime;
  }
  return out;
}

ScanResult double_quench_scan(int n, double j2, const std::vector<double>& j_grid, double t_max, double dt,
                              ScanOptions opts) {
  opts.final_variant = Variant::double_quenched;
  return quench_scan(n, j2, j_grid, t_max, dt, opts);
}

XiReport xi_consistency(const std::vector<ScanResult>& scans, const EhlFit& fit) {
  if (fit.fit.points == 0) throw std::invalid_argument("xi_consistency: missing EHL fit");
  XiReport out;
  out.flagged = fit.flagged;
  std::vector<double> x, y;
  for (const auto& s : scans) {
    if (!(s.j_prime_opt > 0.0) || !(s.t_opt > 0.0)) continue;
    if (s.j2 > kCriticalJ2) out.flagged = true;
    const double xi = std::exp(fit.fit.intercept + fit.alpha() / std::sqrt(s.j_prime_opt));
    out.points.push_back({s.n_sites, s.j_prime_opt, s.t_opt, xi, xi / (s.n_sites - 2)});
    x.push_back(1.0 / std::sqrt(s.j_prime_opt));
    y.push_back(std::log(s.t_opt));
  }
  if (x.size() >= 2 && *std::max_element(x.begin(), x.end()) > *std::min_element(x.begin(), x.end()))
    out.t_opt_fit = fit_line(x, y);
  return out;
}

InterferenceReport interference_analysis(const ChainSpec& spec, int k, const LanczosOptions& lanczos) {
  if (spec.n_sites > 16) throw std::invalid_argument("interference_analysis is limited to N <= 16");
  InterferenceReport r;
  r.spec = spec;
  const QuenchSetup setup = prepare_quench(spec, Variant::end_quenched, lanczos);
  const HamiltonianOperator& hf = *setup.h_final;
  std::vector<EigenPair> pairs;
  if (hf.dim() <= kFullSpectrumLimit) {
    pairs = full_spectrum(hf);
    r.complete = true;
  } else {
    pairs = lowest_k(hf, std::max(k, 20), lanczos);
  }
  const Eigen::VectorXd gs = setup.initial.amplitudes.real();
  for (const auto& p : pairs) {
    EigenstateComponents c;
    c.energy = p.value;
    c.overlap = std::abs(p.vector.dot(gs));
    const BellNorms b = bell_norms(PureState::from_real(setup.initial.basis, p.vector));
    c.singlet = b.singlet;
    const auto [tmin, tmax] = std::minmax({b.triplet[0], b.triplet[1], b.triplet[2]});
    c.triplet_rms = std::sqrt((b.triplet[0] * b.triplet[0] + b.triplet[1] * b.triplet[1] +
                               b.triplet[2] * b.triplet[2]) / 3.0);
    c.triplet_spread = tmax - tmin;
    r.captured_mass += c.overlap * c.overlap;
    r.states.push_back(c);
  }
  if (r.states.size() < 2) return r;

  std::vector<std::size_t> order(r.states.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return r.states[a].overlap > r.states[b].overlap; });
  r.first = std::min(order[0], order[1]);
  r.second = std::max(order[0], order[1]);
  const auto& e1 = r.states[r.first];
  const auto& e2 = r.states[r.second];
  r.dominant_mass = e1.overlap * e1.overlap + e2.overlap * e2.overlap;
  r.dominance_failure = r.dominant_mass < 0.5;
  r.delta_e = std::abs(e2.energy - e1.energy);
  const double den = std::abs(e2.overlap * e2.triplet_rms);
  r.condition_ratio = den > 0.0 ? std::abs(e1.overlap * e1.triplet_rms) / den : std::numeric_limits<double>::infinity();
  r.t_predicted = r.delta_e > 0.0 ? std::numbers::pi / r.delta_e : std::numeric_limits<double>::infinity();
  return r;
}

double half_value_temperature(const std::vector<double>& temperatures, const std::vector<double>& values) {
  if (temperatures.size() != values.size() || temperatures.empty())
    throw std::invalid_argument("half_value_temperature: mismatched or empty input");
  const double half = 0.5 * values.front();
  if (!(values.front() > 0.0)) return 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] >= half) continue;
    const double f = (values[i - 1] - half) / (values[i - 1] - values[i]);
    const double l0 = std::log(temperatures[i - 1]), l1 = std::log(temperatures[i]);
    return std::exp(l0 + f * (l1 - l0));
  }
  return std::numeric_limits<double>::infinity();
}

ThermalComparison thermal_comparison(const ChainSpec& dynamic_spec, const std::vector<double>& beta_grid,
                                     double epsilon, const ThermalOptions& opts) {
  const int n = dynamic_spec.n_sites;
  if (n > 12) throw std::invalid_argument("thermal_comparison needs full spectra; N must be <= 12");
  if (beta_grid.empty()) throw std::invalid_argument("thermal_comparison: empty beta grid");
  for (double b : beta_grid)
    if (!(b >= 0.0) || !std::isfinite(b)) throw std::invalid_argument("beta values must be finite and >= 0");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");

  ThermalComparison out;
  out.n_sites = n;
  out.epsilon = epsilon;
  out.j_prime_dynamic = dynamic_spec.j_prime;
  out.j_prime_static = epsilon / std::sqrt(static_cast<double>(n));
  const double t_max = opts.t_max > 0.0 ? opts.t_max : default_t_max(n);
  const double dt = opts.dt > 0.0 ? opts.dt : default_dt(t_max);

  // Zero-temperature reference fixes the first-period window.
  const QuenchSetup setup = prepare_quench(dynamic_spec, Variant::end_quenched, opts.lanczos);
  QuenchOptions qopts;
  qopts.krylov = opts.krylov;
  const QuenchTrajectory traj = run_quench(setup, t_max, dt, qopts);
  PeakSummary zero = refine_peak(setup, traj, analyze_trajectory(traj.times, traj.concurrence), opts.krylov);
  out.window_end = zero.window_end;
  out.e_m_zero_t = zero.e_m;
  out.norm_drift = traj.norm_drift;
  out.energy_drift = traj.energy_drift;
  out.reversal_fidelity = traj.reversal_fidelity;

  // Dynamic scheme: per-level rho_1N(t) on the window grid, reweighted per beta.
  const ChainSpec init_spec = dynamic_spec.with_variant(Variant::initial);
  const ChainSpec final_spec = dynamic_spec.with_variant(Variant::end_quenched);
  const ThermalSpectrum spec_i = thermal_spectrum(init_spec, opts.scope);
  const std::vector<double> e_i = spec_i.energies();
  std::vector<double> times;
  for (std::size_t j = 0; j < traj.times.size() && traj.times[j] <= out.window_end + 1e-12; ++j)
    times.push_back(traj.times[j]);

  struct Level {
    std::size_t sector;
    std::size_t index;
  };
  std::vector<Level> levels;
  for (std::size_t s = 0; s < spec_i.sectors.size(); ++s)
    for (std::size_t k = 0; k < spec_i.sectors[s].pairs.size(); ++k) levels.push_back({s, k});
  std::vector<std::shared_ptr<const HamiltonianOperator>> h_final;
  for (const auto& s : spec_i.sectors) h_final.push_back(std::make_shared<const HamiltonianOperator>(final_spec, s.basis, true));

  // Only levels that survive truncation at the hottest requested beta are needed.
  const double beta_min = *std::min_element(beta_grid.begin(), beta_grid.end());
  const std::vector<double> w_hot = gibbs_weights(e_i, beta_min);
  std::vector<std::vector<Eigen::Matrix4cd>> rho_t(levels.size());
  std::vector<std::exception_ptr> errors(levels.size());
  const auto n_levels = static_cast<long>(levels.size());
#ifdef KONDO_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 4)
#endif
  for (long li = 0; li < n_levels; ++li) {
    const auto l = static_cast<std::size_t>(li);
    if (w_hot[l] == 0.0) continue;
    try {
      const auto& sec = spec_i.sectors[levels[l].sector];
      PureState psi = PureState::from_real(sec.basis, sec.pairs[levels[l].index].vector);
      for (std::size_t j = 0; j < times.size(); ++j) {
        if (j > 0) psi = evolve(psi, *h_final[levels[l].sector], times[j] - times[j - 1], opts.krylov);
        rho_t[l].push_back(reduce(psi, {1, n}).matrix);
      }
    } catch (...) {
      errors[l] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  auto mixed_concurrence = [&](const std::vector<double>& w, auto&& rho_of) {
    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
    for (std::size_t l = 0; l < levels.size(); ++l)
      if (w[l] != 0.0) rho += w[l] * rho_of(l);
    return concurrence(ReducedDensity{{1, n}, rho}).value;
  };

  // Static scheme: both ends weakly attached, Gibbs state of the chain itself.
  ChainSpec static_spec = dynamic_spec.with_variant(Variant::end_quenched);
  static_spec.j_prime = out.j_prime_static;
  const ThermalSpectrum spec_s = thermal_spectrum(static_spec, opts.scope);
  const std::vector<double> e_s = spec_s.energies();
  std::vector<Eigen::Matrix4cd> rho_s;
  for (const auto& sec : spec_s.sectors)
    for (const auto& p : sec.pairs) rho_s.push_back(reduce(PureState::from_real(sec.basis, p.vector), {1, n}).matrix);

  for (double beta : beta_grid) {
    ThermalRow row{beta, 0.0, 0.0};
    const std::vector<double> w = gibbs_weights(e_i, beta);
    std::vector<double> c(times.size());
    for (std::size_t j = 0; j < times.size(); ++j)
      c[j] = mixed_concurrence(w, [&](std::size_t l) -> const Eigen::Matrix4cd& { return rho_t[l][j]; });
    const std::size_t best = argmax_until(times, c, out.window_end);
    row.e_m_dynamic = c[best];
    if (row.e_m_dynamic > 0.0 && times.size() > 1) {
      const double lo = std::max(0.0, times[best] - dt);
      const double hi = std::min(out.window_end, times[best] + dt);
      std::vector<PureState> anchors(levels.size());
      for (std::size_t l = 0; l < levels.size(); ++l) {
        if (w[l] == 0.0) continue;
        const auto& sec = spec_i.sectors[levels[l].sector];
        anchors[l] = evolve(PureState::from_real(sec.basis, sec.pairs[levels[l].index].vector),
                            *h_final[levels[l].sector], lo, opts.krylov);
      }
      auto f = [&](double t) {
        return mixed_concurrence(w, [&](std::size_t l) -> Eigen::Matrix4cd {
          return reduce(evolve(anchors[l], *h_final[levels[l].sector], t - lo, opts.krylov), {1, n}).matrix;
        });
      };
      if (hi > lo) row.e_m_dynamic = std::max(row.e_m_dynamic, golden_max(f, lo, hi, dt / 10.0).second);
    }
    const std::vector<double> ws = gibbs_weights(e_s, beta);
    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
    for (std::size_t l = 0; l < rho_s.size(); ++l)
      if (ws[l] != 0.0) rho += ws[l] * rho_s[l];
    row.c_static = concurrence(ReducedDensity{{1, n}, rho}).value;
    out.rows.push_back(row);
  }

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < out.rows.size(); ++i)
    if (out.rows[i].beta > 0.0) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return out.rows[a].beta > out.rows[b].beta; });
  std::vector<double> temps, dyn, sta;
  for (std::size_t i : order) {
    temps.push_back(1.0 / out.rows[i].beta);
    dyn.push_back(out.rows[i].e_m_dynamic);
    sta.push_back(out.rows[i].c_static);
  }
  if (!temps.empty()) {
    out.t_half_dynamic = half_value_temperature(temps, dyn);
    out.t_half_static = half_value_temperature(temps, sta);
  }
  return out;
}

}  // namespace kondo
