#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "prodsv/ensembles.hpp"
#include "prodsv/linearization.hpp"
#include "prodsv/numerics.hpp"

namespace prodsv {

enum class SvdMethod { dense, shift_invert };
enum class NormMethod { dense, power };

std::string to_string(SvdMethod m);

/// Iteration did not settle; carries the last estimate.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double last_estimate, std::size_t iterations)
      : NumericalError(what), last_estimate_(last_estimate), iterations_(iterations) {}
  double last_estimate() const { return last_estimate_; }
  std::size_t iterations() const { return iterations_; }

 private:
  double last_estimate_;
  std::size_t iterations_;
};

struct ShiftInvertOptions {
  std::size_t max_iterations = 500;
  /// Subspace width for the inverse iteration on (Y^* Y)^{-1}. Width 1 is
  /// plain power iteration.
  std::size_t block_size = 4;
  /// Relative gap (sigma_2 - sigma_1) / sigma_1 under which a result is
  /// flagged gap_limited.
  double gap_threshold = 1e-3;
  std::uint64_t seed = 0x5eed;
  double max_condition = kDefaultMaxCondition;
};

struct SmallestSingularValue {
  double value = 0.0;
  SvdMethod method = SvdMethod::dense;
  std::size_t iterations = 0;
  /// Next singular value estimate (dense: exact second smallest).
  double next_value = 0.0;
  bool gap_limited = false;
};

constexpr std::size_t kDefaultDenseCap = 1200;

/// The smallest singular value of Y(z) (sigma_1 in the "1 = smallest"
/// indexing). shift_invert runs subspace iteration on (Y^* Y)^{-1} using the
/// structured solvers and stops once successive Rayleigh-Ritz estimates of
/// sigma_1 differ by less than tol / 10 relative.
SmallestSingularValue smallest_singular_value(const TranslatedLinearization& lin, SvdMethod method,
                                              double tol = 1e-10, const ShiftInvertOptions& opts = {},
                                              std::size_t dense_cap = kDefaultDenseCap);

double smallest_singular_value(const ComplexMatrix& m);

/// Largest singular value. The power route falls back to dense on
/// non-convergence when the matrix is within dense_cap, else throws.
double operator_norm(const ComplexMatrix& m, NormMethod method = NormMethod::dense, double tol = 1e-10,
                     std::size_t max_iterations = 1000, std::size_t dense_cap = kDefaultDenseCap);

/// Upper bound ||Y(z)||_op <= max_k ||X_k||_op + |z|.
double linearization_norm_bound(const TranslatedLinearization& lin);

struct LatalaInputs {
  RealVector row_second_moments;  // sum_j E|X_ij|^2 for each row i
  RealVector col_second_moments;  // sum_i E|X_ij|^2 for each column j
  double total_fourth_moment = 0.0;
};

struct LatalaTerms {
  double max_row = 0.0;
  double max_col = 0.0;
  double fourth_root = 0.0;
  double sum() const { return max_row + max_col + fourth_root; }
};

LatalaTerms latala_terms(const LatalaInputs& inp);

/// C (max_i sqrt(row_i) + max_j sqrt(col_j) + (sum E|X_ij|^4)^{1/4}).
double latala_bound(const LatalaInputs& inp, double C);

/// Moment sums of factor k as declared by the ensemble's entry laws.
LatalaInputs latala_inputs(const EnsembleSpec& spec, std::size_t k);

/// Eigenvalues of n^{-M/2} X_1 ... X_M (balanced before the eigensolve).
ComplexVector scaled_product_eigenvalues(const FactorChain& chain, std::size_t cap = kDefaultDenseCap);

}  // namespace prodsv
