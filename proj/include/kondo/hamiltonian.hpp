#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kondo/sector_basis.hpp"

namespace kondo {

using cplx = std::complex<double>;

/// J2 separating the gapless Kondo regime from the gapped dimer regime.
inline constexpr double kCriticalJ2 = 0.2412;

enum class Variant { initial, end_quenched, double_quenched, uniform };
enum class Regime { kondo, critical, dimer };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);
std::string to_string(Regime r);

struct ChainSpec {
  int n_sites = 8;
  double j1 = 1.0;
  double j2 = 0.0;
  double j_prime = 1.0;
  Variant variant = Variant::initial;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  Regime regime() const;
  ChainSpec with_variant(Variant v) const {
    ChainSpec s = *this;
    s.variant = v;
    return s;
  }
  ChainSpec with_j_prime(double jp) const {
    ChainSpec s = *this;
    s.j_prime = jp;
    return s;
  }
};

/// Coupling `strength` multiplying sigma_a . sigma_b (Pauli matrices, 1-based sites).
struct Bond {
  int site_a;
  int site_b;
  double strength;

  bool operator==(const Bond&) const = default;
};

std::vector<Bond> build_bonds(const ChainSpec& spec);

/// Bond list mirrored by i -> N+1-i.
std::vector<Bond> reflect_bonds(const std::vector<Bond>& bonds, int n_sites);

/// Matrix-free sector Hamiltonian H = sum_b J_b sigma_a . sigma_b.
///
/// `apply` is the OpenMP kernel; it gathers each output row independently so
/// the result is bit-identical for any thread count. `apply_serial` is the
/// single-threaded reference kept for testing and benchmarking. With
/// `cache_sparse` (honoured for sectors below 1e5 states) the off-diagonal
/// part is assembled once into CSR form.
class HamiltonianOperator {
 public:
  HamiltonianOperator(const ChainSpec& spec, std::shared_ptr<const SectorBasis> basis,
                      bool cache_sparse = false);
  HamiltonianOperator(std::vector<Bond> bonds, std::shared_ptr<const SectorBasis> basis,
                      bool cache_sparse = false);

  static constexpr std::size_t kSparseCacheLimit = 100000;

  const ChainSpec& spec() const { return spec_; }
  const std::vector<Bond>& bonds() const { return bonds_; }
  const SectorBasis& basis() const { return *basis_; }
  std::shared_ptr<const SectorBasis> basis_ptr() const { return basis_; }
  std::size_t dim() const { return basis_->size(); }
  bool sparse_cached() const { return !row_ptr_.empty(); }

  template <typename Scalar>
  void apply(std::span<const Scalar> in, std::span<Scalar> out) const;
  template <typename Scalar>
  void apply_serial(std::span<const Scalar> in, std::span<Scalar> out) const;

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;

  double diagonal(std::size_t i) const { return diag_[i]; }
  double trace() const;

  /// Dense sector matrix; intended for small sectors and oracles.
  Eigen::MatrixXd dense() const;

  double expectation(const Eigen::VectorXcd& v) const;

 private:
  struct Mask {
    Config bits;
    double exchange;  // 2 * strength
  };

  void init(bool cache_sparse);
  void check_dims(std::size_t in, std::size_t out) const;
  template <typename Scalar>
  Scalar row(std::size_t i, const Scalar* in) const;

  ChainSpec spec_;
  std::vector<Bond> bonds_;
  std::shared_ptr<const SectorBasis> basis_;
  std::vector<Mask> masks_;
  std::vector<double> diag_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> col_;
  std::vector<double> val_;
};

}  // namespace kondo
