#include "prodsv/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "prodsv/rng.hpp"

namespace prodsv {

namespace {

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

ComplexMatrix random_block(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  SeedStream s(seed);
  ComplexMatrix q(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) q(i, j) = s.complex_normal();
  }
  return q;
}

ComplexMatrix orthonormalize(const ComplexMatrix& z) {
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  return qr.householderQ() * ComplexMatrix::Identity(z.rows(), z.cols());
}

struct RitzResult {
  RealVector values;  // descending
  std::size_t iterations = 0;
  bool converged = false;
};

/// Subspace iteration with Rayleigh-Ritz for the dominant eigenvalues of a
/// Hermitian positive semidefinite operator. `monitor` maps the top Ritz
/// value to the quantity whose relative change decides convergence.
RitzResult dominant_ritz_values(const std::function<ComplexMatrix(const ComplexMatrix&)>& apply,
                                Eigen::Index dim, std::size_t width, double rel_change, std::size_t max_iterations,
                                std::uint64_t seed, const std::function<double(double)>& monitor) {
  const Eigen::Index p = std::min<Eigen::Index>(idx(width), dim);
  ComplexMatrix q = orthonormalize(random_block(dim, p, seed));
  RitzResult out;
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    const ComplexMatrix z = apply(q);
    ComplexMatrix h = q.adjoint() * z;
    h = 0.5 * (h + h.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    // ascending -> descending
    out.values = es.eigenvalues().reverse();
    const ComplexMatrix s = es.eigenvectors().rowwise().reverse();
    out.iterations = it;

    const double current = monitor(out.values(0));
    if (std::isfinite(previous) && std::abs(current - previous) <= rel_change * std::abs(current)) {
      out.converged = true;
      return out;
    }
    previous = current;
    q = orthonormalize(z * s);
  }
  return out;
}

}  // namespace

std::string to_string(SvdMethod m) { return m == SvdMethod::dense ? "dense" : "shift-invert"; }

double smallest_singular_value(const ComplexMatrix& m) { return full_svd(m).smallest(); }

SmallestSingularValue smallest_singular_value(const TranslatedLinearization& lin, SvdMethod method, double tol,
                                              const ShiftInvertOptions& opts, std::size_t dense_cap) {
  SmallestSingularValue out;
  out.method = method;
  if (method == SvdMethod::dense) {
    if (lin.size() > dense_cap) {
      throw std::invalid_argument("smallest_singular_value: Mn = " + std::to_string(lin.size()) +
                                  " exceeds dense cap " + std::to_string(dense_cap));
    }
    const RealVector sv = full_svd(materialize(lin)).values;
    const Eigen::Index k = sv.size();
    out.value = sv(k - 1);
    out.next_value = k > 1 ? sv(k - 2) : sv(k - 1);
  } else {
    if (!(tol > 0.0)) throw std::invalid_argument("smallest_singular_value: tol must be positive");
    const StructuredSolver solver(lin, opts.max_condition);
    const std::size_t m = lin.blocks();
    const std::size_t n = lin.block_size();
    // (Y^* Y)^{-1} x = Y^{-1} (Y^{-*} x)
    auto apply = [&](const ComplexMatrix& x) {
      ComplexMatrix y(x.rows(), x.cols());
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        const BlockVector v = solver.solve_adjoint(BlockVector(x.col(c), m));
        y.col(c) = solver.solve(v).data();
      }
      return y;
    };
    auto sigma_of = [](double theta) { return theta > 0.0 ? 1.0 / std::sqrt(theta) : 0.0; };
    const RitzResult r = dominant_ritz_values(apply, idx(m * n), opts.block_size, tol / 10.0,
                                              opts.max_iterations, opts.seed, sigma_of);
    out.iterations = r.iterations;
    if (!r.converged) {
      throw ConvergenceError("smallest_singular_value: shift-invert iteration did not converge in " +
                                 std::to_string(r.iterations) + " iterations",
                             sigma_of(r.values(0)), r.iterations);
    }
    out.value = sigma_of(r.values(0));
    out.next_value = r.values.size() > 1 ? sigma_of(r.values(1)) : out.value;
  }
  out.gap_limited = out.value > 0.0 && (out.next_value - out.value) < opts.gap_threshold * out.value;
  return out;
}

double operator_norm(const ComplexMatrix& m, NormMethod method, double tol, std::size_t max_iterations,
                     std::size_t dense_cap) {
  require_finite(m, "operator_norm");
  if (m.size() == 0) return 0.0;
  const auto dense = [&] { return full_svd(m).largest(); };
  if (method == NormMethod::dense) return dense();

  auto apply = [&](const ComplexMatrix& x) { return ComplexMatrix(m.adjoint() * (m * x)); };
  auto sigma_of = [](double theta) { return std::sqrt(std::max(theta, 0.0)); };
  const RitzResult r = dominant_ritz_values(apply, m.cols(), 4, tol / 10.0, max_iterations, 0x0b5e55, sigma_of);
  if (r.converged) return sigma_of(r.values(0));
  if (static_cast<std::size_t>(std::max(m.rows(), m.cols())) <= dense_cap) return dense();
  throw ConvergenceError("operator_norm: power iteration did not converge", sigma_of(r.values(0)), r.iterations);
}

double linearization_norm_bound(const TranslatedLinearization& lin) {
  double worst = 0.0;
  for (const auto& f : lin.chain().factors()) worst = std::max(worst, operator_norm(f));
  return worst + std::abs(lin.shift());
}

LatalaTerms latala_terms(const LatalaInputs& inp) {
  if ((inp.row_second_moments.array() < 0.0).any() || (inp.col_second_moments.array() < 0.0).any() ||
      inp.total_fourth_moment < 0.0) {
    throw std::invalid_argument("latala_bound: moment sums must be non-negative");
  }
  LatalaTerms t;
  t.max_row = inp.row_second_moments.size() ? std::sqrt(inp.row_second_moments.maxCoeff()) : 0.0;
  t.max_col = inp.col_second_moments.size() ? std::sqrt(inp.col_second_moments.maxCoeff()) : 0.0;
  t.fourth_root = std::pow(inp.total_fourth_moment, 0.25);
  return t;
}

double latala_bound(const LatalaInputs& inp, double C) {
  if (!(C > 0.0)) throw std::invalid_argument("latala_bound: C must be positive");
  return C * latala_terms(inp).sum();
}

LatalaInputs latala_inputs(const EnsembleSpec& spec, std::size_t k) {
  if (k >= spec.factors) throw std::out_of_range("latala_inputs: factor index out of range");
  LatalaInputs inp;
  inp.row_second_moments = RealVector::Zero(idx(spec.n));
  inp.col_second_moments = RealVector::Zero(idx(spec.n));
  for (std::size_t i = 0; i < spec.n; ++i) {
    for (std::size_t j = 0; j < spec.n; ++j) {
      const MomentProfile& p = spec.distribution_for(k, i, j).profile();
      inp.row_second_moments(idx(i)) += p.second_abs();
      inp.col_second_moments(idx(j)) += p.second_abs();
      inp.total_fourth_moment += p.fourth_abs();
    }
  }
  return inp;
}

ComplexVector scaled_product_eigenvalues(const FactorChain& chain, std::size_t cap) {
  const std::size_t n = chain.dimension();
  if (n > cap) {
    throw std::invalid_argument("scaled_product_eigenvalues: n = " + std::to_string(n) + " exceeds cap " +
                                std::to_string(cap));
  }
  // Scale each factor by n^{-1/2} rather than the product by n^{-M/2}.
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  ComplexMatrix x = s * chain.factor(0);
  for (std::size_t k = 1; k < chain.length(); ++k) x = x * (s * chain.factor(k));
  return eigenvalues(x);
}

}  // namespace prodsv
