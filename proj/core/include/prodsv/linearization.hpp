#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "prodsv/numerics.hpp"

namespace prodsv {

/// Ordered factors X_1, ..., X_M (stored 0-based), all n x n.
class FactorChain {
 public:
  explicit FactorChain(std::vector<ComplexMatrix> factors);

  static FactorChain identity(std::size_t n, std::size_t factors);

  std::size_t length() const { return factors_.size(); }
  std::size_t dimension() const { return n_; }
  /// 0-based: factor(0) is X_1.
  const ComplexMatrix& factor(std::size_t k) const { return factors_.at(k); }
  const std::vector<ComplexMatrix>& factors() const { return factors_; }

 private:
  std::vector<ComplexMatrix> factors_;
  std::size_t n_ = 0;
};

/// Element of C^{Mn} viewed as M consecutive blocks of length n.
class BlockVector {
 public:
  BlockVector(std::size_t blocks, std::size_t n);
  BlockVector(ComplexVector data, std::size_t blocks);

  static BlockVector unit(std::size_t blocks, std::size_t n, std::size_t index);

  std::size_t blocks() const { return blocks_; }
  std::size_t block_size() const { return n_; }
  std::size_t size() const { return blocks_ * n_; }

  auto block(std::size_t j) { return data_.segment(static_cast<Eigen::Index>(j * n_), static_cast<Eigen::Index>(n_)); }
  auto block(std::size_t j) const {
    return data_.segment(static_cast<Eigen::Index>(j * n_), static_cast<Eigen::Index>(n_));
  }

  const ComplexVector& data() const { return data_; }
  ComplexVector& data() { return data_; }
  double norm() const { return data_.norm(); }

 private:
  ComplexVector data_;
  std::size_t blocks_;
  std::size_t n_;
};

/// Y(z) = Y - z I for the block-cyclic linearization Y of a factor chain:
/// -z I on the diagonal, X_j in block (j, j+1) and X_M in block (M, 1).
/// Kept implicit; use materialize() only for oracles and small sizes.
class TranslatedLinearization {
 public:
  TranslatedLinearization(FactorChain chain, Complex z);

  const FactorChain& chain() const { return chain_; }
  Complex shift() const { return z_; }
  std::size_t blocks() const { return chain_.length(); }
  std::size_t block_size() const { return chain_.dimension(); }
  std::size_t size() const { return blocks() * block_size(); }

  BlockVector apply(const BlockVector& u) const;
  BlockVector apply_adjoint(const BlockVector& u) const;

 private:
  FactorChain chain_;
  Complex z_;
};

/// Ordinary left-to-right product X_1 X_2 ... X_M.
ComplexMatrix product(const FactorChain& chain);

ComplexMatrix materialize(const TranslatedLinearization& lin);

/// Thrown when the n x n core matrix z^{1-M} X - z I is (numerically) singular.
class SingularCoreError : public NumericalError {
 public:
  SingularCoreError(const std::string& what, double condition)
      : NumericalError(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

constexpr double kDefaultMaxCondition = 1e12;

/// Multiply-add counter for the per-solve phase of StructuredSolver.
struct OperationCounter {
  std::uint64_t multiply_adds = 0;
};

/// Solver for Y(z) u = w and Y(z)^* u = w that reduces the Mn x Mn system
/// to one factorization of the n x n core  C = z^{1-M} X - z I.
///
/// Block equations  -z u_j + X_j u_{j+1} = w_j  (j < M),  X_M u_1 - z u_M = w_M
/// telescope to  C u_1 = sum_j z^{1-j} (X_1 ... X_{j-1}) w_j,  after which
/// u_M, u_{M-1}, ..., u_2 follow by back substitution. Construction forms X
/// and factors C; each solve costs O(M n^2).
class StructuredSolver {
 public:
  explicit StructuredSolver(const TranslatedLinearization& lin,
                            double max_condition = kDefaultMaxCondition);

  BlockVector solve(const BlockVector& w, OperationCounter* counter = nullptr) const;
  BlockVector solve_adjoint(const BlockVector& w, OperationCounter* counter = nullptr) const;

  /// Reciprocal of the LU-based 1-norm reciprocal condition estimate of C.
  double condition_estimate() const { return condition_; }
  /// Multiply-adds spent forming X and C and factoring C.
  std::uint64_t setup_multiply_adds() const { return setup_ops_; }
  const ComplexMatrix& core() const { return core_; }
  /// C^{-1}, assembled from the stored factorization.
  ComplexMatrix core_inverse() const { return lu_.inverse(); }

 private:
  TranslatedLinearization lin_;
  ComplexMatrix core_;
  Eigen::PartialPivLU<ComplexMatrix> lu_;
  double condition_ = 0.0;
  std::uint64_t setup_ops_ = 0;
};

/// (z^{1-M} X - z I)^{-1}, the top-left n x n block of Y(z)^{-1}.
ComplexMatrix top_left_inverse_block(const FactorChain& chain, Complex z,
                                     double max_condition = kDefaultMaxCondition);

BlockVector structured_solve(const TranslatedLinearization& lin, const BlockVector& w);
BlockVector adjoint_structured_solve(const TranslatedLinearization& lin, const BlockVector& w);

struct MultiplicityReport {
  ComplexVector product_eigenvalues;  // eigenvalues of X
  ComplexVector power_eigenvalues;    // eigenvalues of Y^M
  /// Largest distance in the pairing of every lambda(X) with M distinct
  /// eigenvalues of Y^M (greedy nearest assignment).
  double max_pairing_distance = 0.0;
};

constexpr std::size_t kDefaultMultiplicityCap = 200;

/// Checks that each eigenvalue of X appears in Y^M with multiplicity M.
MultiplicityReport verify_multiplicity(const FactorChain& chain,
                                       std::size_t cap = kDefaultMultiplicityCap);

}  // namespace prodsv
