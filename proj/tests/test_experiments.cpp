#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "kondo/experiments.hpp"
#include "oracle.hpp"

using namespace kondo;

namespace {

ChainSpec spec_of(int n, double j2, double jp, Variant v = Variant::initial) {
  ChainSpec s;
  s.n_sites = n;
  s.j2 = j2;
  s.j_prime = jp;
  s.variant = v;
  return s;
}

PureState ground(const ChainSpec& s) {
  auto b = std::make_shared<const SectorBasis>(s.n_sites, s.n_sites / 2);
  return PureState::from_real(b, ground_state(HamiltonianOperator(s, b)).vector);
}

EhlResult synthetic(int n, double j2, double jp, double l_star) {
  EhlResult r;
  r.spec = spec_of(n, j2, jp);
  r.l_star = l_star;
  for (int l = 0; l <= n - 2; ++l) r.curve.emplace_back(l, std::exp(-l / l_star));
  return r;
}

}  // namespace

TEST_CASE("healing length from sampled curves") {
  const std::vector<std::pair<int, double>> c{{0, 1.0}, {1, 0.1}, {2, 0.01}, {3, 5e-4}, {4, 1e-4}};
  bool sat = true;
  CHECK(healing_length(c, 1e-3, &sat) == doctest::Approx(2.0 + 0.009 / 0.0095));
  CHECK_FALSE(sat);
  // a late excursion above threshold moves L* past it
  auto bump = c;
  bump[3].second = 2e-3;
  CHECK(healing_length(bump, 1e-3) == doctest::Approx(3.0 + 1e-3 / 1.9e-3));
  const std::vector<std::pair<int, double>> flat{{0, 1.0}, {1, 0.5}, {2, 0.2}};
  CHECK(healing_length(flat, 1e-3, &sat) == 2.0);
  CHECK(sat);
}

TEST_CASE("EHL curves of ground states") {
  const EhlResult mg = ehl_curve(spec_of(8, 0.5, 1.0));
  CHECK(mg.curve.size() == 7);
  CHECK(mg.l_star <= 1.0);
  CHECK(mg.curve.front().second == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(mg.ground_energy == doctest::Approx(-12.0).epsilon(1e-9));

  double prev = 0.0;
  for (double jp : {0.9, 0.5, 0.3}) {
    const EhlResult r = ehl_curve(spec_of(14, 0.0, jp));
    CHECK(std::abs(r.curve.front().second - 1.0) < 1e-6);
    CHECK(r.l_star > prev);
    CHECK(r.l_star >= 0.0);
    CHECK(r.l_star <= 12.0);
    for (std::size_t i = 1; i < r.curve.size(); ++i) CHECK(r.curve[i].second <= r.curve[i - 1].second + 1e-9);
    prev = r.l_star;
  }
}

TEST_CASE("EHL curves are non-increasing on random chains") {
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 2 * static_cast<int>(oracle::uniform(rng, 3, 7));
    const EhlResult r = ehl_curve(spec_of(n, oracle::uniform(rng, 0.0, 0.6), oracle::uniform(rng, 0.1, 1.0)));
    REQUIRE(r.curve.size() == static_cast<std::size_t>(n - 1));
    CHECK(std::abs(r.curve.front().second - 1.0) < 1e-6);
    for (std::size_t i = 1; i < r.curve.size(); ++i) CHECK(r.curve[i].second <= r.curve[i - 1].second + 1e-9);
    CHECK(r.l_star >= 0.0);
    CHECK(r.l_star <= n - 2);
  }
}

TEST_CASE("linear fits") {
  const LinearFit f = fit_line({0.0, 1.0, 2.0, 3.0}, {1.0, 3.0, 5.0, 7.0});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(f.points == 4);
}

TEST_CASE("exponential EHL law is recovered from synthetic data") {
  std::vector<EhlResult> rs;
  for (double jp : {0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) rs.push_back(synthetic(16, 0.0, jp, std::exp(2.0 / std::sqrt(jp))));
  const EhlFit fit = ehl_scaling_fit(rs);
  CHECK(std::abs(fit.alpha() - 2.0) < 1e-6);
  CHECK(std::abs(fit.fit.intercept) < 1e-6);
  CHECK(fit.fit.r2 == doctest::Approx(1.0));
  CHECK_FALSE(fit.flagged);

  for (auto& r : rs) r.spec.j2 = 0.42;
  CHECK(ehl_scaling_fit(rs).flagged);

  rs.resize(4);
  rs[0].saturated = true;
  CHECK_THROWS_AS(ehl_scaling_fit(rs), std::invalid_argument);
}

TEST_CASE("scaling collapse") {
  const EhlResult a = synthetic(12, 0.0, 0.5, 4.0);
  const CollapseRecord same = scaling_collapse({a, a});
  CHECK(same.max_deviation == 0.0);
  CHECK(same.grid.size() == 101);
  // curves that depend on L/N only collapse exactly
  EhlResult b = synthetic(16, 0.0, 0.4, 16.0 / 3.0);
  EhlResult c = synthetic(12, 0.0, 0.5, 4.0);
  for (auto* r : {&b, &c})
    for (auto& [l, e] : r->curve) e = std::exp(-3.0 * l / r->spec.n_sites);
  CHECK(scaling_collapse({b, c}).max_deviation < 0.05);
  CHECK_THROWS_AS(scaling_collapse({synthetic(12, 0, 0.5, 4.0), synthetic(12, 0, 0.5, 6.0)}), std::invalid_argument);
  CHECK_THROWS_AS(scaling_collapse({a}), std::invalid_argument);
}

TEST_CASE("trajectory peak analysis on a synthetic signal") {
  std::vector<double> t, v;
  const double dt = 1e-3;
  for (int i = 0; i <= 12000; ++i) {
    t.push_back(i * dt);
    v.push_back(std::abs(std::sin(t.back())) * std::exp(-0.01 * t.back()));
  }
  const PeakSummary p = analyze_trajectory(t, v);
  // maxima where tan t = 100
  const double pi = std::numbers::pi, shift = std::atan(0.01);
  REQUIRE(p.entangling);
  CHECK(std::abs(p.first_peak_time - (pi / 2 - shift)) < 2 * dt);
  CHECK(std::abs(p.t_opt - (pi / 2 - shift)) < 2 * dt);
  CHECK(p.window_end == doctest::Approx(2.5 * p.first_peak_time));
  CHECK(std::abs(p.second_peak_time - (1.5 * pi - shift)) < 2 * dt);
  CHECK(std::abs(p.trough_time - pi) < 2 * dt);

  const std::vector<double> quiet(t.size(), 1e-4);
  CHECK_FALSE(analyze_trajectory(t, quiet).entangling);
}

TEST_CASE("N=8 Kondo quench scan") {
  const auto grid = default_j_grid();
  REQUIRE(grid.size() == 17);
  CHECK(grid.front() == doctest::Approx(0.10));
  CHECK(grid.back() == doctest::Approx(0.90));
  const ScanResult s = quench_scan(8, 0.0, grid, default_t_max(8), default_dt(default_t_max(8)));
  CHECK(s.e_m > 0.5);
  double best = 0.0;
  for (const auto& p : s.points) {
    REQUIRE(p.ok);
    best = std::max(best, p.peaks.e_m);
    CHECK(p.trajectory.concurrence.size() == 401);
  }
  CHECK(s.e_m == best);
  CHECK(s.j_prime_opt == s.points[s.best_index].j_prime);
  CHECK(s.t_opt == s.points[s.best_index].peaks.t_opt);
  // interior maximum
  CHECK(s.e_m > s.points.front().peaks.e_m);
  CHECK(s.e_m > s.points.back().peaks.e_m);
  // refinement only improves on the grid maximum
  for (const auto& p : s.points) {
    double grid_max = 0.0;
    for (std::size_t i = 0; i < p.trajectory.times.size() && p.trajectory.times[i] <= p.peaks.window_end; ++i)
      grid_max = std::max(grid_max, p.trajectory.concurrence[i]);
    CHECK(p.peaks.e_m >= grid_max - 1e-12);
  }
}

TEST_CASE("scan points fail individually") {
  ScanOptions o;
  o.quench.krylov.step_tolerance = 1e-30;
  o.quench.krylov.max_subspace = 4;
  const ScanResult s = quench_scan(8, 0.0, {0.3, 0.5}, 4.0, 0.1, o);
  for (const auto& p : s.points) {
    CHECK_FALSE(p.ok);
    CHECK_FALSE(p.error.empty());
  }
  CHECK(s.e_m == 0.0);
  CHECK_THROWS_AS(quench_scan(8, 0.0, {}, 4.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(quench_scan(8, 0.0, {1.5}, 4.0, 0.1), std::invalid_argument);
}

TEST_CASE("xi consistency on a synthetic scan") {
  EhlFit fit;
  fit.fit = {2.0, 0.1, 1.0, 6};
  std::vector<ScanResult> scans;
  for (int n : {10, 12, 14}) {
    ScanResult s;
    s.n_sites = n;
    const double root = 2.0 / (std::log(n - 2.0) - 0.1);
    s.j_prime_opt = root * root;
    s.t_opt = 0.5 * n;
    scans.push_back(s);
  }
  const XiReport r = xi_consistency(scans, fit);
  REQUIRE(r.points.size() == 3);
  for (const auto& p : r.points) CHECK(p.ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.t_opt_fit.points == 3);
  CHECK_THROWS_AS(xi_consistency(scans, EhlFit{}), std::invalid_argument);
}

TEST_CASE("interference analysis") {
  const InterferenceReport near_uniform = interference_analysis(spec_of(8, 0.0, 0.95));
  REQUIRE(near_uniform.complete);
  CHECK(near_uniform.states.front().overlap > 0.95);
  CHECK(std::abs(near_uniform.captured_mass - 1.0) < 1e-8);
  double second = 0.0;
  for (std::size_t i = 1; i < near_uniform.states.size(); ++i) second = std::max(second, near_uniform.states[i].overlap);
  CHECK(second < 0.3);

  const ChainSpec s = spec_of(8, 0.0, 0.25);
  const InterferenceReport r = interference_analysis(s);
  CHECK(r.complete);
  CHECK(std::abs(r.captured_mass - 1.0) < 1e-8);
  CHECK(r.first != r.second);
  CHECK(r.delta_e == doctest::Approx(std::abs(r.states[r.second].energy - r.states[r.first].energy)));
  CHECK(r.t_predicted == doctest::Approx(std::numbers::pi / r.delta_e));
  CHECK(r.dominant_mass ==
        doctest::Approx(r.states[r.first].overlap * r.states[r.first].overlap +
                        r.states[r.second].overlap * r.states[r.second].overlap));
  CHECK(r.dominance_failure == (r.dominant_mass < 0.5));
  for (std::size_t i = 0; i < r.states.size(); ++i) {
    if (i == r.first || i == r.second) continue;
    CHECK(r.states[i].overlap <= std::min(r.states[r.first].overlap, r.states[r.second].overlap));
  }

  // Bell norms against <b|rho_1N|b> of each eigenstate from the dense oracle
  const ChainSpec fin = s.with_variant(Variant::end_quenched);
  auto basis = std::make_shared<const SectorBasis>(8, 4);
  Eigen::SelfAdjointEigenSolver<oracle::Mat> es(oracle::restrict(oracle::hamiltonian(fin), *basis));
  const double r2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index k = 0; k < 6; ++k) {
    const oracle::Mat rho = oracle::reduced(oracle::embed({basis, es.eigenvectors().col(k)}), 8, {1, 8});
    oracle::Vec singlet = oracle::Vec::Zero(4);
    singlet[1] = r2;
    singlet[2] = -r2;
    oracle::Vec t0 = oracle::Vec::Zero(4);
    t0[1] = t0[2] = r2;
    const double a2 = singlet.dot(rho * singlet).real();
    const double b2 = (rho(0, 0).real() + t0.dot(rho * t0).real() + rho(3, 3).real()) / 3.0;
    const auto& c = r.states[static_cast<std::size_t>(k)];
    CHECK(c.energy == doctest::Approx(es.eigenvalues()[k]).epsilon(1e-10));
    // skip levels that are degenerate in the oracle, where the basis choice is free
    if (k > 0 && std::abs(es.eigenvalues()[k] - es.eigenvalues()[k - 1]) < 1e-8) continue;
    if (std::abs(es.eigenvalues()[k + 1] - es.eigenvalues()[k]) < 1e-8) continue;
    CHECK(c.singlet * c.singlet == doctest::Approx(a2).epsilon(1e-9));
    CHECK(c.triplet_rms * c.triplet_rms == doctest::Approx(b2).epsilon(1e-9));
  }
  for (const auto& c : r.states) CHECK(c.singlet * c.singlet + 3.0 * c.triplet_rms * c.triplet_rms <= 1.0 + 1e-10);
}

TEST_CASE("double quench keeps the impurity decoupled") {
  const int n = 8;
  QuenchOptions o;
  o.final_variant = Variant::double_quenched;
  // spin 1 has no bonds, and H_F is rotation invariant on sites 2..N, so
  // sigma_1 . (sigma_2 + ... + sigma_N) is conserved
  for (int j = 2; j <= n; ++j) o.observables.push_back({1, j, 1.0});
  const QuenchTrajectory tr = run_quench(spec_of(n, 0.0, 0.25), 10.0, 0.1, o);
  REQUIRE(tr.observables.size() == static_cast<std::size_t>(n - 1));
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    double sum = 0.0;
    for (const auto& obs : tr.observables) sum += obs[k];
    CHECK(sum == doctest::Approx(-3.0).epsilon(1e-9));
  }
  const ScanResult s = double_quench_scan(n, 0.0, {0.25}, default_t_max(n), default_dt(default_t_max(n)));
  CHECK(s.final_variant == Variant::double_quenched);
  CHECK(s.points.front().ok);
  CHECK(s.e_m > 0.0);
}

TEST_CASE("thermal comparison limits") {
  const ChainSpec s = spec_of(8, 0.0, 0.25);
  const ThermalComparison tc = thermal_comparison(s, {1e6, 0.0});
  REQUIRE(tc.rows.size() == 2);
  CHECK(std::abs(tc.rows[0].e_m_dynamic - tc.e_m_zero_t) < 1e-4);
  CHECK(tc.rows[1].e_m_dynamic == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(tc.rows[1].c_static == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(tc.j_prime_static == doctest::Approx(0.1 / std::sqrt(8.0)));
  CHECK(tc.norm_drift < 1e-10);
  CHECK_THROWS_AS(thermal_comparison(spec_of(14, 0.0, 0.25), {1.0}), std::invalid_argument);
}

TEST_CASE("half-value temperature") {
  CHECK(half_value_temperature({0.01, 0.1, 1.0, 10.0}, {1.0, 0.8, 0.4, 0.1}) ==
        doctest::Approx(std::pow(10.0, -0.25)));
  CHECK(std::isinf(half_value_temperature({0.1, 1.0}, {1.0, 0.9})));
}

TEST_CASE("ansatz diagnostics") {
  const PureState uni = ground(spec_of(10, 0.0, 1.0, Variant::uniform));
  CHECK(ansatz_check(uni, 3.0).impurity_purity == doctest::Approx(0.5).epsilon(1e-6));

  const ChainSpec kondo = spec_of(14, 0.0, 0.5);
  const EhlResult r = ehl_curve(kondo);
  const AnsatzReport k = ansatz_check(ground(kondo), r.l_star);
  CHECK(k.block_a_len == static_cast<int>(std::ceil(r.l_star)));
  CHECK(k.block_b_entropy > 0.1);
  CHECK(k.negativity < r.threshold);
  CHECK(k.negativity_below_threshold);

  const ChainSpec mg = spec_of(8, 0.5, 1.0);
  const AnsatzReport m = ansatz_check(ground(mg), 1.0);
  CHECK(m.block_a_len == 1);
  CHECK(m.block_b_entropy < 1e-8);
  CHECK(m.impurity_purity == doctest::Approx(0.5).epsilon(1e-6));
}
