#include "prodsv/linearization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

namespace prodsv {

namespace {

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

std::uint64_t square(std::size_t n) { return static_cast<std::uint64_t>(n) * n; }

}  // namespace

// ---------------------------------------------------------------------------
// FactorChain / BlockVector

FactorChain::FactorChain(std::vector<ComplexMatrix> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw std::invalid_argument("FactorChain: at least one factor required");
  n_ = static_cast<std::size_t>(factors_.front().rows());
  if (n_ == 0) throw std::invalid_argument("FactorChain: factors must be non-empty");
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    const auto& f = factors_[k];
    if (static_cast<std::size_t>(f.rows()) != n_ || static_cast<std::size_t>(f.cols()) != n_) {
      throw std::invalid_argument("FactorChain: factor " + std::to_string(k + 1) + " is " +
                                  std::to_string(f.rows()) + "x" + std::to_string(f.cols()) +
                                  ", expected " + std::to_string(n_) + "x" + std::to_string(n_));
    }
    require_finite(f, "FactorChain");
  }
}

FactorChain FactorChain::identity(std::size_t n, std::size_t factors) {
  return FactorChain(std::vector<ComplexMatrix>(factors, ComplexMatrix::Identity(idx(n), idx(n))));
}

BlockVector::BlockVector(std::size_t blocks, std::size_t n)
    : data_(ComplexVector::Zero(idx(blocks * n))), blocks_(blocks), n_(n) {}

BlockVector::BlockVector(ComplexVector data, std::size_t blocks) : data_(std::move(data)), blocks_(blocks) {
  if (blocks_ == 0 || data_.size() % idx(blocks_) != 0) {
    throw std::invalid_argument("BlockVector: length " + std::to_string(data_.size()) +
                                " is not a multiple of " + std::to_string(blocks_));
  }
  n_ = static_cast<std::size_t>(data_.size()) / blocks_;
}

BlockVector BlockVector::unit(std::size_t blocks, std::size_t n, std::size_t index) {
  BlockVector e(blocks, n);
  e.data_(idx(index)) = 1.0;
  return e;
}

// ---------------------------------------------------------------------------
// TranslatedLinearization

TranslatedLinearization::TranslatedLinearization(FactorChain chain, Complex z)
    : chain_(std::move(chain)), z_(z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw std::invalid_argument("TranslatedLinearization: shift must be finite");
  }
}

BlockVector TranslatedLinearization::apply(const BlockVector& u) const {
  const std::size_t m = blocks();
  if (u.blocks() != m || u.block_size() != block_size()) {
    throw std::invalid_argument("TranslatedLinearization::apply: block shape mismatch");
  }
  BlockVector out(m, block_size());
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t next = (j + 1) % m;
    out.block(j).noalias() = chain_.factor(j) * u.block(next);
    out.block(j) -= z_ * u.block(j);
  }
  return out;
}

BlockVector TranslatedLinearization::apply_adjoint(const BlockVector& u) const {
  const std::size_t m = blocks();
  if (u.blocks() != m || u.block_size() != block_size()) {
    throw std::invalid_argument("TranslatedLinearization::apply_adjoint: block shape mismatch");
  }
  // Block (j+1, j) of Y(z)^* is X_j^*, block (1, M) is X_M^*.
  BlockVector out(m, block_size());
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t prev = (j + m - 1) % m;
    out.block(j).noalias() = chain_.factor(prev).adjoint() * u.block(prev);
    out.block(j) -= std::conj(z_) * u.block(j);
  }
  return out;
}

ComplexMatrix product(const FactorChain& chain) {
  ComplexMatrix x = chain.factor(0);
  for (std::size_t k = 1; k < chain.length(); ++k) x = x * chain.factor(k);
  return x;
}

ComplexMatrix materialize(const TranslatedLinearization& lin) {
  const std::size_t m = lin.blocks();
  const std::size_t n = lin.block_size();
  ComplexMatrix y = ComplexMatrix::Zero(idx(m * n), idx(m * n));
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t next = (j + 1) % m;
    y.block(idx(j * n), idx(next * n), idx(n), idx(n)) += lin.chain().factor(j);
    y.block(idx(j * n), idx(j * n), idx(n), idx(n)).diagonal().array() -= lin.shift();
  }
  return y;
}

// ---------------------------------------------------------------------------
// StructuredSolver

StructuredSolver::StructuredSolver(const TranslatedLinearization& lin, double max_condition) : lin_(lin) {
  const Complex z = lin_.shift();
  if (z == Complex(0.0, 0.0)) {
    throw std::invalid_argument("StructuredSolver: shift z must be nonzero");
  }
  const std::size_t m = lin_.blocks();
  const std::size_t n = lin_.block_size();

  core_ = product(lin_.chain()) * std::pow(z, 1.0 - static_cast<double>(m));
  core_.diagonal().array() -= z;
  setup_ops_ = (m - 1) * square(n) * n + square(n) * n / 3;

  lu_.compute(core_);
  const double rcond = lu_.rcond();
  condition_ = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(condition_ <= max_condition)) {
    throw SingularCoreError("StructuredSolver: core matrix z^{1-M}X - zI is near-singular "
                            "(condition estimate " + std::to_string(condition_) + ")",
                            condition_);
  }
}

BlockVector StructuredSolver::solve(const BlockVector& w, OperationCounter* counter) const {
  const std::size_t m = lin_.blocks();
  const std::size_t n = lin_.block_size();
  if (w.blocks() != m || w.block_size() != n) {
    throw std::invalid_argument("structured_solve: block shape mismatch");
  }
  const Complex z = lin_.shift();
  const Complex zinv = 1.0 / z;
  const auto& chain = lin_.chain();
  std::uint64_t ops = 0;

  // g = w_1 + z^{-1} X_1 (w_2 + z^{-1} X_2 (... + z^{-1} X_{M-1} w_M))
  ComplexVector g = w.block(m - 1);
  for (std::size_t j = m - 1; j-- > 0;) {
    ComplexVector t = chain.factor(j) * g;
    g = w.block(j) + zinv * t;
    ops += square(n);
  }

  BlockVector u(m, n);
  u.block(0) = lu_.solve(g);
  ops += square(n);

  if (m > 1) {
    u.block(m - 1) = zinv * (chain.factor(m - 1) * u.block(0) - w.block(m - 1));
    ops += square(n);
    for (std::size_t j = m - 1; j-- > 1;) {
      u.block(j) = zinv * (chain.factor(j) * u.block(j + 1) - w.block(j));
      ops += square(n);
    }
  }
  if (counter != nullptr) counter->multiply_adds += ops;
  return u;
}

BlockVector StructuredSolver::solve_adjoint(const BlockVector& w, OperationCounter* counter) const {
  const std::size_t m = lin_.blocks();
  const std::size_t n = lin_.block_size();
  if (w.blocks() != m || w.block_size() != n) {
    throw std::invalid_argument("adjoint_structured_solve: block shape mismatch");
  }
  const Complex zbar_inv = 1.0 / std::conj(lin_.shift());
  const auto& chain = lin_.chain();
  std::uint64_t ops = 0;

  // Rows of Y(z)^*:  -conj(z) v_1 + X_M^* v_M = w_1,
  //                  X_j^* v_j - conj(z) v_{j+1} = w_{j+1}.
  // Writing v_{j+1} = conj(z)^{-j} (X_j^* ... X_1^*) v_1 + r_{j+1} with
  // r_1 = 0 gives C^* v_1 = w_1 - X_M^* r_M.
  ComplexVector r = ComplexVector::Zero(idx(n));
  for (std::size_t j = 0; j + 1 < m; ++j) {
    ComplexVector t = chain.factor(j).adjoint() * r;
    r = zbar_inv * (t - w.block(j + 1));
    ops += square(n);
  }
  ComplexVector rhs = w.block(0);
  if (m > 1) {
    rhs -= chain.factor(m - 1).adjoint() * r;
    ops += square(n);
  }

  BlockVector v(m, n);
  v.block(0) = lu_.adjoint().solve(rhs);
  ops += square(n);
  for (std::size_t j = 0; j + 1 < m; ++j) {
    v.block(j + 1) = zbar_inv * (chain.factor(j).adjoint() * v.block(j) - w.block(j + 1));
    ops += square(n);
  }
  if (counter != nullptr) counter->multiply_adds += ops;
  return v;
}

ComplexMatrix top_left_inverse_block(const FactorChain& chain, Complex z, double max_condition) {
  StructuredSolver solver(TranslatedLinearization(chain, z), max_condition);
  return solver.core_inverse();
}

BlockVector structured_solve(const TranslatedLinearization& lin, const BlockVector& w) {
  return StructuredSolver(lin).solve(w);
}

BlockVector adjoint_structured_solve(const TranslatedLinearization& lin, const BlockVector& w) {
  return StructuredSolver(lin).solve_adjoint(w);
}

// ---------------------------------------------------------------------------
// Multiplicity check

MultiplicityReport verify_multiplicity(const FactorChain& chain, std::size_t cap) {
  const std::size_t m = chain.length();
  const std::size_t n = chain.dimension();
  if (m * n > cap) {
    throw std::invalid_argument("verify_multiplicity: Mn = " + std::to_string(m * n) +
                                " exceeds dense eigensolve cap " + std::to_string(cap));
  }
  MultiplicityReport report;
  report.product_eigenvalues = eigenvalues(product(chain));

  const ComplexMatrix y = materialize(TranslatedLinearization(chain, 0.0));
  ComplexMatrix power = y;
  for (std::size_t k = 1; k < m; ++k) power = power * y;
  report.power_eigenvalues = eigenvalues(power);

  // Global greedy: shortest (lambda_k, mu_i) pairs first, each lambda_k
  // taking M partners and each mu_i used once.
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  pairs.reserve(n * m * n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < m * n; ++i) {
      pairs.emplace_back(std::abs(report.product_eigenvalues(idx(k)) - report.power_eigenvalues(idx(i))), k, i);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<std::size_t> taken(n, 0);
  std::vector<bool> used(m * n, false);
  std::size_t assigned = 0;
  double worst = 0.0;
  for (const auto& [d, k, i] : pairs) {
    if (taken[k] == m || used[i]) continue;
    ++taken[k];
    used[i] = true;
    worst = std::max(worst, d);
    if (++assigned == m * n) break;
  }
  report.max_pairing_distance = worst;
  return report;
}

}  // namespace prodsv
