#include "kondo/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace kondo {

namespace {

void project_out(const std::vector<Eigen::VectorXd>& deflate, Eigen::VectorXd& w) {
  for (const auto& u : deflate) w -= u.dot(w) * u;
}

Eigen::VectorXd random_start(std::size_t dim, const std::vector<Eigen::VectorXd>& deflate, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(dim);
  for (int attempt = 0; attempt < 8; ++attempt) {
    for (std::size_t i = 0; i < dim; ++i) v[i] = dist(rng);
    project_out(deflate, v);
    project_out(deflate, v);
    const double n = v.norm();
    if (n > 1e-6) return v / n;
  }
  throw std::runtime_error("could not draw a start vector outside the deflated space");
}

// Lowest eigenpair of H restricted to the orthogonal complement of `deflate`.
EigenPair lanczos_lowest(const HamiltonianOperator& h, const std::vector<Eigen::VectorXd>& deflate,
                         const LanczosOptions& opts, std::uint64_t seed, SolveReport& rep) {
  const auto dim = static_cast<Eigen::Index>(h.dim());
  const auto free_dim = dim - static_cast<Eigen::Index>(deflate.size());
  if (free_dim <= 0) throw std::invalid_argument("no states left outside the deflated space");

  std::mt19937_64 rng(seed);
  Eigen::VectorXd start = random_start(h.dim(), deflate, rng);
  const Eigen::Index m_max = std::min<Eigen::Index>(opts.max_krylov, free_dim);
  Eigen::MatrixXd basis(dim, m_max);
  double residual = std::numeric_limits<double>::infinity();

  for (int cycle = 0; cycle <= opts.max_restarts; ++cycle) {
    basis.col(0) = start;
    std::vector<double> alpha;
    std::vector<double> beta;
    Eigen::VectorXd ritz;
    double scale = 1.0;
    Eigen::Index m = 0;
    for (Eigen::Index j = 0; j < m_max; ++j) {
      Eigen::VectorXd w = h.apply(Eigen::VectorXd(basis.col(j)));
      ++rep.matvecs;
      project_out(deflate, w);
      const double a = basis.col(j).dot(w);
      alpha.push_back(a);
      scale = std::max(scale, std::abs(a));
      for (int pass = 0; pass < 2; ++pass) {
        w.noalias() -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
        project_out(deflate, w);
      }
      const double b = w.norm();
      m = j + 1;
      const bool exhausted = b < 1e-12 * scale;
      if (m % 5 == 0 || exhausted || m == m_max) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
        Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
        Eigen::VectorXd e = m > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1))
                                  : Eigen::VectorXd();
        tri.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
        ritz = tri.eigenvectors().col(0);
        const double theta = tri.eigenvalues()[0];
        if (exhausted || b * std::abs(ritz[m - 1]) < 0.1 * opts.tolerance * std::max(1.0, std::abs(theta)))
          break;
      }
      if (m == m_max) break;
      beta.push_back(b);
      basis.col(j + 1) = w / b;
    }

    Eigen::VectorXd y = basis.leftCols(m) * ritz;
    project_out(deflate, y);
    y.normalize();
    Eigen::VectorXd r = h.apply(y);
    ++rep.matvecs;
    project_out(deflate, r);
    const double theta = y.dot(r);
    r -= theta * y;
    residual = r.norm();
    rep.residual = residual;
    if (residual <= opts.tolerance * std::max(1.0, std::abs(theta))) {
      fix_phase(y);
      return {theta, std::move(y)};
    }
    ++rep.restarts;
    start = y;
  }
  throw ConvergenceError("Lanczos did not converge", residual, rep.matvecs);
}

}  // namespace

void fix_phase(Eigen::VectorXd& v) {
  if (v.size() == 0) return;
  const double top = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) >= top - 1e-9 * std::max(1.0, top)) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

EigenPair ground_state(const HamiltonianOperator& h, const LanczosOptions& opts, SolveReport* report) {
  SolveReport local;
  EigenPair gs = lanczos_lowest(h, {}, opts, opts.seed, local);
  if (report != nullptr) {
    if (h.dim() >= 2) {
      const EigenPair next = lanczos_lowest(h, {gs.vector}, opts, opts.seed + 1, local);
      local.degenerate = std::abs(next.value - gs.value) < 1e-10;
    }
    *report = local;
  }
  return gs;
}

std::vector<EigenPair> lowest_k(const HamiltonianOperator& h, int k, const LanczosOptions& opts,
                                SolveReport* report) {
  if (k < 1 || k > 40 || static_cast<std::size_t>(k) > h.dim())
    throw std::invalid_argument("lowest_k requires 1 <= k <= min(40, dim)");
  SolveReport local;
  std::vector<EigenPair> pairs;
  std::vector<Eigen::VectorXd> found;
  for (int i = 0; i < k; ++i) {
    EigenPair p = lanczos_lowest(h, found, opts, opts.seed + static_cast<std::uint64_t>(i), local);
    found.push_back(p.vector);
    pairs.push_back(std::move(p));
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const EigenPair& a, const EigenPair& b) { return a.value < b.value; });
  if (pairs.size() >= 2) local.degenerate = std::abs(pairs[1].value - pairs[0].value) < 1e-10;
  if (report != nullptr) *report = local;
  return pairs;
}

std::vector<EigenPair> full_spectrum(const HamiltonianOperator& h) {
  if (h.dim() > kFullSpectrumLimit)
    throw std::invalid_argument("full_spectrum limited to sectors of dimension <= " +
                                std::to_string(kFullSpectrumLimit) + ", got " + std::to_string(h.dim()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.dense());
  std::vector<EigenPair> pairs;
  pairs.reserve(h.dim());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    Eigen::VectorXd v = es.eigenvectors().col(i);
    fix_phase(v);
    pairs.push_back({es.eigenvalues()[i], std::move(v)});
  }
  return pairs;
}

}  // namespace kondo
