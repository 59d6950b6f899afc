#include "prodsv/numerics.hpp"

#include <cmath>
#include <string>

namespace prodsv {

double SingularSpectrum::largest() const {
  return values.size() == 0 ? 0.0 : values(0);
}

double SingularSpectrum::smallest() const {
  return values.size() == 0 ? 0.0 : values(values.size() - 1);
}

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const Complex v = m(i, j);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
  }
  return true;
}

void require_finite(const ComplexMatrix& m, std::string_view what) {
  if (!all_finite(m)) {
    throw std::invalid_argument(std::string(what) + ": matrix contains non-finite entries");
  }
}

SingularSpectrum full_svd(const ComplexMatrix& m, bool with_directions) {
  require_finite(m, "full_svd");
  SingularSpectrum out;
  if (m.size() == 0) {
    out.values = RealVector(0);
    return out;
  }
  const unsigned options = with_directions ? (Eigen::ComputeThinU | Eigen::ComputeThinV) : 0u;
  Eigen::BDCSVD<ComplexMatrix> svd(m, options);
  if (svd.info() != Eigen::Success) throw NumericalError("full_svd: decomposition failed");
  out.values = svd.singularValues();
  if (with_directions) {
    out.left = svd.matrixU();
    out.right = svd.matrixV();
  }
  return out;
}

BalancedMatrix balance(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("balance: matrix must be square");
  constexpr double kRadix = 2.0;
  constexpr double kRadixSq = kRadix * kRadix;

  BalancedMatrix out{m, RealVector::Ones(m.rows())};
  ComplexMatrix& a = out.matrix;
  const Eigen::Index n = a.rows();

  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0;
      double r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      const double s = c + r;
      double f = 1.0;
      double g = r / kRadix;
      while (c < g) {
        f *= kRadix;
        c *= kRadixSq;
      }
      g = r * kRadix;
      while (c > g) {
        f /= kRadix;
        c /= kRadixSq;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        out.scaling(i) *= f;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
  return out;
}

EigenDecomposition eigen_decomposition(const ComplexMatrix& m, bool with_vectors) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eigenvalues: matrix must be square");
  require_finite(m, "eigenvalues");
  EigenDecomposition out;
  if (m.size() == 0) {
    out.values = ComplexVector(0);
    return out;
  }
  const BalancedMatrix bal = balance(m);
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(bal.matrix, with_vectors);
  if (solver.info() != Eigen::Success) throw NumericalError("eigenvalues: QR iteration failed");
  out.values = solver.eigenvalues();
  if (with_vectors) {
    // A = D B D^{-1}, so B y = lambda y gives A (D y) = lambda (D y).
    ComplexMatrix vecs = bal.scaling.asDiagonal() * solver.eigenvectors();
    for (Eigen::Index j = 0; j < vecs.cols(); ++j) {
      const double nrm = vecs.col(j).norm();
      if (nrm > 0.0) vecs.col(j) /= nrm;
    }
    out.vectors = std::move(vecs);
  }
  return out;
}

ComplexVector eigenvalues(const ComplexMatrix& m) {
  return eigen_decomposition(m, false).values;
}

ComplexVector min_norm_solve(const ComplexMatrix& m, const ComplexVector& b) {
  if (m.rows() != b.size()) {
    throw std::invalid_argument("min_norm_solve: rhs length " + std::to_string(b.size()) +
                                " does not match " + std::to_string(m.rows()) + " rows");
  }
  require_finite(m, "min_norm_solve");
  if (m.cols() == 0) return ComplexVector(0);
  Eigen::CompleteOrthogonalDecomposition<ComplexMatrix> cod(m);
  return cod.solve(b);
}

double frobenius_norm(const ComplexMatrix& m) { return m.norm(); }

}  // namespace prodsv
