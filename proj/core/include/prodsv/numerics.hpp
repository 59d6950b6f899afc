#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace prodsv {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Raised when a computation cannot deliver a trustworthy answer
/// (ill-conditioned systems, non-convergent iterations, non-finite data).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Default accuracy targets. Factorization-level checks (SVD reconstruction,
/// solves) use `factorization`; non-Hermitian eigenproblems use `eigen`.
struct Tolerances {
  double factorization = 1e-10;
  double eigen = 1e-8;
};

/// Singular values in non-increasing order, optionally with directions
/// such that m = U * diag(values) * V^*.
///
/// Index 0 holds the LARGEST value. Code that follows the convention of
/// naming the smallest singular value sigma_1 must go through smallest().
struct SingularSpectrum {
  RealVector values;
  std::optional<ComplexMatrix> left;
  std::optional<ComplexMatrix> right;

  double largest() const;
  double smallest() const;
};

struct EigenDecomposition {
  ComplexVector values;
  /// Columns are unit-norm eigenvectors of the original (unbalanced) matrix.
  std::optional<ComplexMatrix> vectors;
};

/// Diagonal similarity B = D^{-1} A D with D = diag(scaling) chosen so that
/// the off-diagonal row and column norms of B are comparable.
struct BalancedMatrix {
  ComplexMatrix matrix;
  RealVector scaling;
};

bool all_finite(const ComplexMatrix& m);

/// Throws std::invalid_argument naming `what` if any entry is NaN or Inf.
void require_finite(const ComplexMatrix& m, std::string_view what);

SingularSpectrum full_svd(const ComplexMatrix& m, bool with_directions = false);

/// Powers-of-two balancing; exact in floating point, so eigenvalues are
/// unchanged while their computed accuracy improves.
BalancedMatrix balance(const ComplexMatrix& m);

/// Eigenvalues of a square matrix, computed after balancing.
ComplexVector eigenvalues(const ComplexMatrix& m);

EigenDecomposition eigen_decomposition(const ComplexMatrix& m, bool with_vectors);

/// Minimum-norm least-squares solution of m x = b.
ComplexVector min_norm_solve(const ComplexMatrix& m, const ComplexVector& b);

double frobenius_norm(const ComplexMatrix& m);

}  // namespace prodsv
