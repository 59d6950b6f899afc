#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "prodsv/linearization.hpp"
#include "prodsv/numerics.hpp"
#include "prodsv/rng.hpp"

namespace prodsv {

/// Sparse_d(a): vectors with support size <= floor(a d).
/// Comp_d(a, b): unit vectors within distance b of Sparse_d(a) (closed).
/// Incomp_d(a, b): the rest of the unit sphere.
struct SphereParams {
  double a = 0.0;
  double b = 0.0;
  std::size_t dimension = 0;

  std::size_t sparse_size() const;
  void validate() const;

  /// a = 1 / log d, b = d^{-epsilon}.
  static SphereParams log_scaled(std::size_t d, double epsilon);
};

enum class Compressibility { compressible, incompressible };

struct SphereClassification {
  double dist_to_sparse = 0.0;
  Compressibility verdict = Compressibility::compressible;
  SphereParams params;

  bool incompressible() const { return verdict == Compressibility::incompressible; }
};

constexpr double kUnitTolerance = 1e-12;

/// Norm of v after zeroing its floor(a d) largest-magnitude coordinates
/// (ties: lowest index kept as "largest").
double dist_to_sparse(const ComplexVector& v, double a, double unit_tolerance = kUnitTolerance);

SphereClassification classify(const ComplexVector& v, const SphereParams& p,
                              double unit_tolerance = kUnitTolerance);

struct NetBound {
  double log10_value = 0.0;
  /// Present when representable as a finite double.
  std::optional<double> value;
};

/// (C_net / (a b))^{2 a N}, evaluated in log space. With enforce_hypothesis
/// the covering lemma's range a, b in (0, 1/8) is required.
NetBound net_cardinality_bound(const SphereParams& p, std::size_t N, double C_net, bool enforce_hypothesis = true);

constexpr std::size_t kMaxNetDimension = 8;

struct GreedyNetOptions {
  std::size_t max_candidates = 200000;
  std::size_t verification_samples = 4000;
  std::size_t closure_rounds = 50;
  /// false: return the greedy sparse net without closure or coverage check.
  bool certify = true;
};

/// Sample points of Comp_d(a, b) drawn near random floor(a d)-sparse unit
/// vectors, each accepted only if classify() says compressible.
std::vector<ComplexVector> sample_compressible(const SphereParams& p, std::size_t count, SeedStream& stream);

/// b-separated subset of Comp_d(a, b): greedy over a cloud of
/// resolution^{-(2k-1)} sparse unit vectors per support (k = floor(a d)),
/// then closure rounds adding sampled compressible points farther than 1.8 b
/// until a whole round adds nothing. A fresh sample is finally checked to lie
/// within 2b of the net. Requires d <= 8 and b < 1/8. Throws NumericalError
/// when coverage does not settle or the check fails (resolution too coarse).
std::vector<ComplexVector> greedy_net(const SphereParams& p, double resolution, SeedStream stream,
                                      const GreedyNetOptions& opts = {});

/// Distance from row k (0-based) to the span of the other rows.
double row_distance(const ComplexMatrix& m, std::size_t k);

struct RowDistanceSummary {
  RealVector distances;
  double min = 0.0;
  std::size_t argmin = 0;
};

/// All row distances. For invertible m uses dist_k = 1 / ||m^{-1} e_k||;
/// falls back to per-row projections when m is numerically singular.
RowDistanceSummary row_distances(const ComplexMatrix& m);

struct NullVector {
  BlockVector u;
  /// ||R u|| / ||R||_F for R = Y(z) with the removed row deleted.
  double relative_residual = 0.0;
  bool degenerate = false;
};

/// Unit vector annihilated by every row of Y(z) except `removed_row`
/// (0-based), from the SVD of the row-deleted matrix. The phase is fixed by
/// making the largest-magnitude coordinate real and positive.
NullVector null_vector(const TranslatedLinearization& lin, std::size_t removed_row);

/// Same vector via the inverse route u ∝ Y(z)^{-1} e_k (cross-check only).
BlockVector null_vector_by_inverse(const TranslatedLinearization& lin, std::size_t removed_row);

/// Block norms (||u_1||, ..., ||u_M||) of a unit vector.
RealVector mass_profile(const BlockVector& u, double unit_tolerance = 1e-10);

/// Norms of the M block equations of Y(z) u = 0 with `removed_row` left
/// out; for the last row these are  z u_j - X_j u_{j+1}  (j < M) and the
/// truncated  z I~ u_M - X~_M u_1.
RealVector system_residuals(const BlockVector& u, const TranslatedLinearization& lin,
                            std::optional<std::size_t> removed_row = std::nullopt);

void phase_normalize(ComplexVector& v);

}  // namespace prodsv
