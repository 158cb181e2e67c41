#include "kondo/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kondo {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::initial: return "initial";
    case Variant::end_quenched: return "end_quenched";
    case Variant::double_quenched: return "double_quenched";
    case Variant::uniform: return "uniform";
  }
  return "?";
}

Variant variant_from_string(const std::string& s) {
  if (s == "initial") return Variant::initial;
  if (s == "end_quenched") return Variant::end_quenched;
  if (s == "double_quenched") return Variant::double_quenched;
  if (s == "uniform") return Variant::uniform;
  throw std::invalid_argument("unknown variant '" + s + "'");
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::kondo: return "kondo";
    case Regime::critical: return "critical";
    case Regime::dimer: return "dimer";
  }
  return "?";
}

void ChainSpec::validate() const {
  if (n_sites < 2 || n_sites > kMaxSites || n_sites % 2 != 0)
    throw std::invalid_argument("n_sites must be even and in [2, " + std::to_string(kMaxSites) +
                                "], got " + std::to_string(n_sites));
  if ((variant == Variant::end_quenched || variant == Variant::double_quenched) && n_sites < 4)
    throw std::invalid_argument("n_sites must be >= 4 for quenched variants");
  if (!(j1 > 0.0)) throw std::invalid_argument("j1 must be > 0");
  if (!(j2 >= 0.0)) throw std::invalid_argument("j2 must be >= 0");
  if (!(j_prime > 0.0 && j_prime <= 1.0)) throw std::invalid_argument("j_prime must lie in (0, 1]");
}

Regime ChainSpec::regime() const {
  if (j2 < kCriticalJ2) return Regime::kondo;
  if (j2 > kCriticalJ2) return Regime::dimer;
  return Regime::critical;
}

std::vector<Bond> build_bonds(const ChainSpec& spec) {
  spec.validate();
  const int n = spec.n_sites;
  const double j1 = spec.j1, j2 = spec.j2;
  double left = spec.j_prime;
  double right = 1.0;
  switch (spec.variant) {
    case Variant::initial: break;
    case Variant::end_quenched: right = spec.j_prime; break;
    case Variant::double_quenched:
      left = 0.0;
      right = spec.j_prime;
      break;
    case Variant::uniform: left = 1.0; break;
  }

  std::vector<Bond> bonds;
  auto add = [&](int a, int b, double s) {
    if (a >= 1 && b <= n && a < b && s != 0.0) bonds.push_back({a, b, s});
  };
  add(1, 2, left * j1);
  add(1, 3, left * j2);
  const bool quenched_end = spec.variant == Variant::end_quenched || spec.variant == Variant::double_quenched;
  const int nn_last = quenched_end ? n - 2 : n - 1;
  const int nnn_last = quenched_end ? n - 3 : n - 2;
  for (int i = 2; i <= nn_last; ++i) add(i, i + 1, j1);
  for (int i = 2; i <= nnn_last; ++i) add(i, i + 2, j2);
  if (quenched_end) {
    add(n - 1, n, right * j1);
    add(n - 2, n, right * j2);
  }
  std::sort(bonds.begin(), bonds.end(), [](const Bond& x, const Bond& y) {
    return x.site_a != y.site_a ? x.site_a < y.site_a : x.site_b < y.site_b;
  });
  return bonds;
}

std::vector<Bond> reflect_bonds(const std::vector<Bond>& bonds, int n_sites) {
  std::vector<Bond> out;
  out.reserve(bonds.size());
  for (const Bond& b : bonds) out.push_back({n_sites + 1 - b.site_b, n_sites + 1 - b.site_a, b.strength});
  std::sort(out.begin(), out.end(), [](const Bond& x, const Bond& y) {
    return x.site_a != y.site_a ? x.site_a < y.site_a : x.site_b < y.site_b;
  });
  return out;
}

HamiltonianOperator::HamiltonianOperator(const ChainSpec& spec, std::shared_ptr<const SectorBasis> basis,
                                         bool cache_sparse)
    : spec_(spec), bonds_(build_bonds(spec)), basis_(std::move(basis)) {
  if (basis_->n_sites() != spec.n_sites) throw std::invalid_argument("basis and spec disagree on n_sites");
  init(cache_sparse);
}

HamiltonianOperator::HamiltonianOperator(std::vector<Bond> bonds, std::shared_ptr<const SectorBasis> basis,
                                         bool cache_sparse)
    : bonds_(std::move(bonds)), basis_(std::move(basis)) {
  spec_.n_sites = basis_->n_sites();
  spec_.variant = Variant::uniform;
  for (const Bond& b : bonds_) {
    if (b.site_a < 1 || b.site_b > basis_->n_sites() || b.site_a >= b.site_b)
      throw std::invalid_argument("bond sites out of range");
  }
  init(cache_sparse);
}

void HamiltonianOperator::init(bool cache_sparse) {
  for (const Bond& b : bonds_) {
    const Config bits = (Config{1} << (b.site_a - 1)) | (Config{1} << (b.site_b - 1));
    masks_.push_back({bits, 2.0 * b.strength});
  }
  const std::size_t d = dim();
  diag_.assign(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    const Config c = basis_->config(i);
    double e = 0.0;
    for (std::size_t k = 0; k < masks_.size(); ++k) {
      const Config m = c & masks_[k].bits;
      const bool parallel = m == 0 || m == masks_[k].bits;
      e += parallel ? bonds_[k].strength : -bonds_[k].strength;
    }
    diag_[i] = e;
  }
  if (cache_sparse && d < kSparseCacheLimit) {
    row_ptr_.assign(d + 1, 0);
    for (std::size_t i = 0; i < d; ++i) {
      const Config c = basis_->config(i);
      for (const Mask& mk : masks_) {
        const Config m = c & mk.bits;
        if (m != 0 && m != mk.bits) {
          col_.push_back(static_cast<std::uint32_t>(basis_->index_of(c ^ mk.bits)));
          val_.push_back(mk.exchange);
        }
      }
      row_ptr_[i + 1] = col_.size();
    }
  }
}

void HamiltonianOperator::check_dims(std::size_t in, std::size_t out) const {
  if (in != dim() || out != dim())
    throw std::invalid_argument("vector length does not match sector dimension " + std::to_string(dim()));
}

template <typename Scalar>
Scalar HamiltonianOperator::row(std::size_t i, const Scalar* in) const {
  Scalar acc = diag_[i] * in[i];
  if (!row_ptr_.empty()) {
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) acc += val_[p] * in[col_[p]];
    return acc;
  }
  // H is real symmetric, so gathering row i equals scattering column i.
  const Config c = basis_->config(i);
  for (const Mask& mk : masks_) {
    const Config m = c & mk.bits;
    if (m != 0 && m != mk.bits) acc += mk.exchange * in[basis_->index_of(c ^ mk.bits)];
  }
  return acc;
}

template <typename Scalar>
void HamiltonianOperator::apply(std::span<const Scalar> in, std::span<Scalar> out) const {
  check_dims(in.size(), out.size());
  const auto d = static_cast<std::ptrdiff_t>(dim());
  const Scalar* x = in.data();
  Scalar* y = out.data();
#ifdef KONDO_HAVE_OPENMP
#pragma omp parallel for schedule(static) if (d > 4096)
#endif
  for (std::ptrdiff_t i = 0; i < d; ++i) y[i] = row(static_cast<std::size_t>(i), x);
}

template <typename Scalar>
void HamiltonianOperator::apply_serial(std::span<const Scalar> in, std::span<Scalar> out) const {
  check_dims(in.size(), out.size());
  const std::size_t d = dim();
  for (std::size_t i = 0; i < d; ++i) out[i] = row(i, in.data());
}

template void HamiltonianOperator::apply<double>(std::span<const double>, std::span<double>) const;
template void HamiltonianOperator::apply<cplx>(std::span<const cplx>, std::span<cplx>) const;
template void HamiltonianOperator::apply_serial<double>(std::span<const double>, std::span<double>) const;
template void HamiltonianOperator::apply_serial<cplx>(std::span<const cplx>, std::span<cplx>) const;

Eigen::VectorXd HamiltonianOperator::apply(const Eigen::VectorXd& v) const {
  Eigen::VectorXd out(v.size());
  apply<double>(std::span<const double>(v.data(), v.size()), std::span<double>(out.data(), out.size()));
  return out;
}

Eigen::VectorXcd HamiltonianOperator::apply(const Eigen::VectorXcd& v) const {
  Eigen::VectorXcd out(v.size());
  apply<cplx>(std::span<const cplx>(v.data(), v.size()), std::span<cplx>(out.data(), out.size()));
  return out;
}

double HamiltonianOperator::trace() const {
  double t = 0.0;
  for (double x : diag_) t += x;
  return t;
}

Eigen::MatrixXd HamiltonianOperator::dense() const {
  const std::size_t d = dim();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    m(i, i) = diag_[i];
    const Config c = basis_->config(i);
    for (const Mask& mk : masks_) {
      const Config x = c & mk.bits;
      if (x != 0 && x != mk.bits) m(basis_->index_of(c ^ mk.bits), i) += mk.exchange;
    }
  }
  return m;
}

double HamiltonianOperator::expectation(const Eigen::VectorXcd& v) const {
  return v.dot(apply(v)).real() / v.squaredNorm();
}

}  // namespace kondo
