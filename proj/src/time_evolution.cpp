#include "kondo/time_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "kondo/entanglement.hpp"

namespace kondo {

namespace {

// tail * |e_m^T exp(-i T dt) e_1| for the current tridiagonal T.
double krylov_error(const std::vector<double>& alpha, const std::vector<double>& beta, double tail, double dt) {
  const auto m = static_cast<Eigen::Index>(alpha.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
  const Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
  const Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(beta.data(), m - 1);
  tri.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
  cplx c = 0.0;
  for (Eigen::Index k = 0; k < m; ++k)
    c += tri.eigenvectors()(m - 1, k) * std::polar(tri.eigenvectors()(0, k), -dt * tri.eigenvalues()[k]);
  return tail * std::abs(c);
}

}  // namespace

PureState evolve(const PureState& state, const HamiltonianOperator& h, double t, const KrylovOptions& opts,
                 EvolveStats* stats) {
  if (state.amplitudes.size() != static_cast<Eigen::Index>(h.dim()))
    throw std::invalid_argument("evolve: state is not in the operator's sector");
  EvolveStats local;
  Eigen::VectorXcd psi = state.amplitudes;
  const double sign = t < 0 ? -1.0 : 1.0;
  double remaining = std::abs(t);
  double done = 0.0;
  double tau = remaining;
  const auto dim = static_cast<Eigen::Index>(h.dim());
  const Eigen::Index m_max = std::min<Eigen::Index>(opts.max_subspace, dim);
  Eigen::MatrixXcd v(dim, m_max);

  while (remaining > 0.0) {
    const double nrm = psi.norm();
    if (nrm == 0.0) break;
    v.col(0) = psi / nrm;
    std::vector<double> alpha;
    std::vector<double> beta;
    double scale = 1.0;
    double tail = 0.0;  // coupling out of the Krylov space
    Eigen::Index m = 0;
    for (Eigen::Index j = 0; j < m_max; ++j) {
      Eigen::VectorXcd w = h.apply(Eigen::VectorXcd(v.col(j)));
      ++local.matvecs;
      const double a = v.col(j).dot(w).real();
      alpha.push_back(a);
      scale = std::max(scale, std::abs(a));
      for (int pass = 0; pass < 2; ++pass) w.noalias() -= v.leftCols(j + 1) * (v.leftCols(j + 1).adjoint() * w);
      const double b = w.norm();
      m = j + 1;
      if (b < 1e-12 * scale) {
        tail = 0.0;
        break;
      }
      tail = b;
      if (m == m_max) break;
      if (m >= 4 && krylov_error(alpha, beta, b, sign * std::min(tau, remaining)) <= opts.step_tolerance) break;
      beta.push_back(b);
      v.col(j + 1) = w / b;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd e = m > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1)) : Eigen::VectorXd();
    tri.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
    const Eigen::MatrixXd& s = tri.eigenvectors();
    const Eigen::VectorXd& lam = tri.eigenvalues();
    const Eigen::VectorXd s0 = s.row(0).transpose();

    double step = std::min(tau, remaining);
    Eigen::VectorXcd c;
    for (;;) {
      Eigen::VectorXcd phase(m);
      for (Eigen::Index k = 0; k < m; ++k) phase[k] = std::polar(s0[k], -sign * step * lam[k]);
      c = s.cast<cplx>() * phase;
      const double err = tail * std::abs(c[m - 1]);
      if (err <= opts.step_tolerance) break;
      ++local.rejected;
      step *= 0.5;
      if (step < opts.min_step * std::max(1.0, std::abs(t)))
        throw EvolutionError("Krylov step size underflow", sign * done, step);
    }
    psi = nrm * (v.leftCols(m) * c);
    ++local.steps;
    remaining -= step;
    done += step;
    if (remaining < 1e-15 * std::max(1.0, std::abs(t))) remaining = 0.0;
    tau = step == tau ? 2.0 * tau : step;
  }
  if (stats != nullptr) {
    stats->steps += local.steps;
    stats->matvecs += local.matvecs;
    stats->rejected += local.rejected;
  }
  return {state.basis, std::move(psi)};
}

QuenchSetup prepare_quench(const ChainSpec& spec, Variant final_variant, const LanczosOptions& lanczos) {
  ChainSpec initial = spec.with_variant(Variant::initial);
  ChainSpec final_spec = spec.with_variant(final_variant);
  initial.validate();
  final_spec.validate();
  auto basis = std::make_shared<const SectorBasis>(spec.n_sites, sector_of_ground_state(spec.n_sites));
  const HamiltonianOperator h_initial(initial, basis, true);
  EigenPair gs = ground_state(h_initial, lanczos);
  auto h_final = std::make_shared<const HamiltonianOperator>(final_spec, basis, true);
  return {initial, final_spec, gs.value, PureState::from_real(basis, gs.vector), std::move(h_final)};
}

double end_concurrence(const PureState& state) { return concurrence(reduce(state, {1, state.n_sites()})).value; }

double bond_expectation(const PureState& state, const std::vector<Bond>& bonds) {
  const HamiltonianOperator op(bonds, state.basis);
  return op.expectation(state.amplitudes);
}

QuenchTrajectory run_quench(const ChainSpec& spec, double t_max, double dt, const QuenchOptions& opts) {
  return run_quench(prepare_quench(spec, opts.final_variant, opts.lanczos), t_max, dt, opts);
}

QuenchTrajectory run_quench(const QuenchSetup& setup, double t_max, double dt, const QuenchOptions& opts) {
  if (!(dt > 0.0) || !(t_max >= 0.0)) throw std::invalid_argument("run_quench requires dt > 0 and t_max >= 0");
  QuenchTrajectory traj;
  traj.spec_initial = setup.spec_initial;
  traj.spec_final = setup.spec_final;
  traj.initial_energy = setup.initial_energy;

  std::vector<std::unique_ptr<HamiltonianOperator>> obs_ops;
  for (const Bond& b : opts.observables)
    obs_ops.push_back(std::make_unique<HamiltonianOperator>(std::vector<Bond>{b}, setup.initial.basis));
  traj.observables.assign(obs_ops.size(), {});

  const auto n_steps = static_cast<long>(std::llround(t_max / dt));
  const HamiltonianOperator& hf = *setup.h_final;
  const double e0 = hf.expectation(setup.initial.amplitudes);
  PureState psi = setup.initial;
  for (long k = 0; k <= n_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (k > 0) psi = evolve(psi, hf, dt, opts.krylov);
    traj.times.push_back(t);
    traj.concurrence.push_back(end_concurrence(psi));
    for (std::size_t o = 0; o < obs_ops.size(); ++o)
      traj.observables[o].push_back(obs_ops[o]->expectation(psi.amplitudes));
    const double nrm = psi.amplitudes.norm();
    traj.norm_drift = std::max(traj.norm_drift, std::abs(nrm - 1.0));
    const double e = hf.expectation(psi.amplitudes);
    traj.energy_drift = std::max(traj.energy_drift, std::abs(e - e0) / std::max(std::abs(e0), 1e-300));
  }
  if (opts.check_reversal && n_steps > 0) {
    const PureState back = evolve(psi, hf, -static_cast<double>(n_steps) * dt, opts.krylov);
    traj.reversal_fidelity = std::abs(setup.initial.amplitudes.dot(back.amplitudes));
  }
  return traj;
}

std::size_t MixedState::retained() const {
  std::size_t n = 0;
  for (const auto& c : components) n += c.vectors.size();
  return n;
}

double MixedState::total_weight() const {
  double w = 0.0;
  for (const auto& c : components)
    for (double x : c.weights) w += x;
  return w;
}

std::vector<double> gibbs_weights(const std::vector<double>& energies, double beta, double* log_partition) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  if (energies.empty()) throw std::invalid_argument("gibbs_weights: empty spectrum");
  const double e_min = *std::min_element(energies.begin(), energies.end());
  std::vector<double> w(energies.size());
  double z_shifted = 0.0;
  double kept = 0.0;
  for (std::size_t i = 0; i < energies.size(); ++i) {
    w[i] = std::exp(-beta * (energies[i] - e_min));  // relative to the largest weight
    z_shifted += w[i];
    if (w[i] < kThermalTruncation) w[i] = 0.0;
    kept += w[i];
  }
  for (double& x : w) x /= kept;
  if (log_partition != nullptr) *log_partition = -beta * e_min + std::log(z_shifted);
  return w;
}

std::size_t ThermalSpectrum::levels() const {
  std::size_t n = 0;
  for (const auto& s : sectors) n += s.pairs.size();
  return n;
}

std::vector<double> ThermalSpectrum::energies() const {
  std::vector<double> e;
  for (const auto& s : sectors)
    for (const auto& p : s.pairs) e.push_back(p.value);
  return e;
}

ThermalSpectrum thermal_spectrum(const ChainSpec& spec, ThermalScope scope) {
  spec.validate();
  ThermalSpectrum out;
  const int n = spec.n_sites;
  for (int up = 0; up <= n; ++up) {
    if (scope == ThermalScope::sz_zero && up != n / 2) continue;
    auto basis = std::make_shared<const SectorBasis>(n, up);
    const HamiltonianOperator h(spec, basis);
    out.sectors.push_back({basis, full_spectrum(h)});
  }
  return out;
}

MixedState gibbs_state(const ThermalSpectrum& spectrum, double beta) {
  MixedState ms;
  ms.beta = beta;
  const std::vector<double> w = gibbs_weights(spectrum.energies(), beta, &ms.log_partition);
  std::size_t i = 0;
  for (const auto& s : spectrum.sectors) {
    ThermalComponent comp;
    comp.basis = s.basis;
    for (const auto& p : s.pairs) {
      const double wi = w[i++];
      if (wi == 0.0) continue;
      comp.energies.push_back(p.value);
      comp.weights.push_back(wi);
      comp.vectors.push_back(p.vector);
    }
    if (!comp.vectors.empty()) ms.components.push_back(std::move(comp));
  }
  return ms;
}

MixedState thermal_state(const HamiltonianOperator& h, double beta) {
  ThermalSpectrum spectrum;
  spectrum.sectors.push_back({h.basis_ptr(), full_spectrum(h)});
  return gibbs_state(spectrum, beta);
}

MixedState thermal_state(const ChainSpec& spec, double beta, ThermalScope scope) {
  return gibbs_state(thermal_spectrum(spec, scope), beta);
}

ReducedDensity thermal_reduced(const MixedState& ms, const Sites& sites) {
  ReducedDensity out;
  for (const auto& comp : ms.components) {
    for (std::size_t k = 0; k < comp.vectors.size(); ++k) {
      ReducedDensity r = reduce(PureState::from_real(comp.basis, comp.vectors[k]), sites);
      if (out.matrix.size() == 0) {
        out.sites = r.sites;
        out.matrix = Eigen::MatrixXcd::Zero(r.matrix.rows(), r.matrix.cols());
      }
      out.matrix += comp.weights[k] * r.matrix;
    }
  }
  return out;
}

ReducedDensity evolve_mixed(const MixedState& ms, const ChainSpec& final_spec, double t, const KrylovOptions& opts) {
  const int n = final_spec.n_sites;
  ReducedDensity out{{1, n}, Eigen::MatrixXcd::Zero(4, 4)};
  for (const auto& comp : ms.components) {
    const HamiltonianOperator hf(final_spec, comp.basis, true);
    const auto count = static_cast<long>(comp.vectors.size());
    std::vector<Eigen::Matrix4cd> parts(comp.vectors.size());
    std::vector<std::exception_ptr> errors(comp.vectors.size());
#ifdef KONDO_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long k = 0; k < count; ++k) {
      try {
        const PureState psi = evolve(PureState::from_real(comp.basis, comp.vectors[k]), hf, t, opts);
        parts[k] = reduce(psi, {1, n}).matrix;
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
    for (long k = 0; k < count; ++k) out.matrix += comp.weights[k] * parts[k];
  }
  return out;
}

}  // namespace kondo
