#include "prodsv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

namespace prodsv {

namespace {

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

void require_unit(const ComplexVector& v, double tol, const char* who) {
  const double nrm = v.norm();
  if (!(std::abs(nrm - 1.0) <= tol)) {
    throw std::invalid_argument(std::string(who) + ": expected a unit vector, got norm " + std::to_string(nrm));
  }
}

/// Indices of v ordered by decreasing magnitude, ties by increasing index.
std::vector<std::size_t> magnitude_order(const ComplexVector& v) {
  std::vector<std::size_t> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return std::abs(v(idx(l))) > std::abs(v(idx(r))); });
  return order;
}

double binomial(std::size_t n, std::size_t k) {
  double out = 1.0;
  for (std::size_t i = 1; i <= k; ++i) out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
  return out;
}

std::vector<std::vector<std::size_t>> all_supports(std::size_t d, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> pick(d, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
  do {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < d; ++i) {
      if (pick[i]) s.push_back(i);
    }
    out.push_back(std::move(s));
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return out;
}

ComplexVector random_sparse_unit(std::size_t d, const std::vector<std::size_t>& support, SeedStream& s) {
  ComplexVector v = ComplexVector::Zero(idx(d));
  for (std::size_t i : support) v(idx(i)) = s.complex_normal();
  return v / v.norm();
}

/// Uniform-grid hash over the real coordinates of a vector restricted to a
/// support, cell width h.
class SupportGrid {
 public:
  SupportGrid(std::vector<std::size_t> support, double h) : support_(std::move(support)), h_(h) {}

  std::vector<long> cell_of(const ComplexVector& v) const {
    std::vector<long> c;
    c.reserve(2 * support_.size());
    for (std::size_t i : support_) {
      c.push_back(static_cast<long>(std::floor(v(idx(i)).real() / h_)));
      c.push_back(static_cast<long>(std::floor(v(idx(i)).imag() / h_)));
    }
    return c;
  }

  void insert(std::size_t id, const ComplexVector& v) { cells_[key(cell_of(v))].push_back(id); }

  /// Calls f(id) for points stored within `reach` cells of v in every
  /// coordinate; scans everything when the neighbourhood is larger than the
  /// point set.
  template <typename F>
  void visit_near(const ComplexVector& v, int reach, std::size_t total, F&& f) const {
    const std::size_t dims = 2 * support_.size();
    const double width = 2.0 * reach + 1.0;
    if (std::pow(width, static_cast<double>(dims)) > static_cast<double>(total)) {
      for (const auto& [k, ids] : cells_) {
        for (std::size_t id : ids) f(id);
      }
      return;
    }
    const std::vector<long> base = cell_of(v);
    std::vector<long> offset(dims, -reach);
    while (true) {
      std::vector<long> c(dims);
      for (std::size_t t = 0; t < dims; ++t) c[t] = base[t] + offset[t];
      if (auto it = cells_.find(key(c)); it != cells_.end()) {
        for (std::size_t id : it->second) f(id);
      }
      std::size_t t = 0;
      while (t < dims && offset[t] == reach) offset[t++] = -reach;
      if (t == dims) break;
      ++offset[t];
    }
  }

 private:
  static std::string key(const std::vector<long>& c) {
    return std::string(reinterpret_cast<const char*>(c.data()), c.size() * sizeof(long));
  }

  std::vector<std::size_t> support_;
  double h_;
  std::unordered_map<std::string, std::vector<std::size_t>> cells_;
};

std::vector<std::size_t> top_support(const ComplexVector& v, std::size_t k) {
  std::vector<std::size_t> order = magnitude_order(v);
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace

// ---------------------------------------------------------------------------
// Sphere decomposition

std::size_t SphereParams::sparse_size() const {
  // Guard against a * d landing just below an integer in floating point.
  return static_cast<std::size_t>(std::floor(a * static_cast<double>(dimension) + 1e-9));
}

void SphereParams::validate() const {
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("SphereParams: a must lie in (0, 1)");
  if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("SphereParams: b must lie in (0, 1)");
  if (dimension == 0) throw std::invalid_argument("SphereParams: dimension must be positive");
}

SphereParams SphereParams::log_scaled(std::size_t d, double epsilon) {
  const double dd = static_cast<double>(d);
  return SphereParams{1.0 / std::log(dd), std::pow(dd, -epsilon), d};
}

double dist_to_sparse(const ComplexVector& v, double a, double unit_tolerance) {
  require_unit(v, unit_tolerance, "dist_to_sparse");
  const SphereParams p{a, 0.5, static_cast<std::size_t>(v.size())};
  const std::size_t k = std::min(p.sparse_size(), static_cast<std::size_t>(v.size()));
  const std::vector<std::size_t> order = magnitude_order(v);
  double tail = 0.0;
  for (std::size_t t = k; t < order.size(); ++t) tail += std::norm(v(idx(order[t])));
  return std::sqrt(tail);
}

SphereClassification classify(const ComplexVector& v, const SphereParams& p, double unit_tolerance) {
  p.validate();
  if (static_cast<std::size_t>(v.size()) != p.dimension) {
    throw std::invalid_argument("classify: vector length does not match SphereParams dimension");
  }
  SphereClassification out;
  out.params = p;
  out.dist_to_sparse = dist_to_sparse(v, p.a, unit_tolerance);
  out.verdict = out.dist_to_sparse <= p.b ? Compressibility::compressible : Compressibility::incompressible;
  return out;
}

NetBound net_cardinality_bound(const SphereParams& p, std::size_t N, double C_net, bool enforce_hypothesis) {
  if (!(C_net > 0.0)) throw std::invalid_argument("net_cardinality_bound: C_net must be positive");
  if (enforce_hypothesis) {
    if (!(p.a > 0.0 && p.a < 0.125)) {
      throw std::invalid_argument("net_cardinality_bound: a = " + std::to_string(p.a) + " outside (0, 1/8)");
    }
    if (!(p.b > 0.0 && p.b < 0.125)) {
      throw std::invalid_argument("net_cardinality_bound: b = " + std::to_string(p.b) + " outside (0, 1/8)");
    }
  } else {
    p.validate();
  }
  NetBound out;
  const double exponent = 2.0 * p.a * static_cast<double>(N);
  out.log10_value = exponent * std::log10(C_net / (p.a * p.b));
  if (out.log10_value < 300.0) out.value = std::pow(10.0, out.log10_value);
  return out;
}

std::vector<ComplexVector> sample_compressible(const SphereParams& p, std::size_t count, SeedStream& stream) {
  p.validate();
  const std::size_t d = p.dimension;
  const std::size_t k = p.sparse_size();
  if (k == 0) throw std::invalid_argument("sample_compressible: floor(a d) = 0, Comp is empty");
  std::vector<ComplexVector> out;
  out.reserve(count);
  while (out.size() < count) {
    std::vector<std::size_t> all(d);
    std::iota(all.begin(), all.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) std::swap(all[i], all[i + stream.below(d - i)]);
    std::vector<std::size_t> support(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k));
    ComplexVector v = random_sparse_unit(d, support, stream);
    ComplexVector e(idx(d));
    for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = stream.complex_normal();
    v += (p.b * stream.uniform01() / e.norm()) * e;
    v /= v.norm();
    if (dist_to_sparse(v, p.a) <= p.b) out.push_back(std::move(v));
  }
  return out;
}

std::vector<ComplexVector> greedy_net(const SphereParams& p, double resolution, SeedStream stream,
                                      const GreedyNetOptions& opts) {
  p.validate();
  if (p.dimension > kMaxNetDimension) {
    throw std::invalid_argument("greedy_net: dimension " + std::to_string(p.dimension) + " exceeds " +
                                std::to_string(kMaxNetDimension));
  }
  if (!(p.b < 0.125)) throw std::invalid_argument("greedy_net: b must be below 1/8");
  if (!(resolution > 0.0 && resolution < 1.0)) throw std::invalid_argument("greedy_net: resolution must lie in (0, 1)");
  const std::size_t d = p.dimension;
  const std::size_t k = p.sparse_size();
  if (k == 0) throw std::invalid_argument("greedy_net: floor(a d) = 0, Comp is empty");

  // Greedy b-separated subset of a cloud of k-sparse unit vectors, then
  // closure rounds that add any fresh compressible sample lying more than
  // 1.8 b from the net. Every net point is indexed in every support's grid so
  // that lookups by the top support of a query are exact.
  const auto supports = all_supports(d, k);
  const double per_support_target = std::ceil(std::pow(resolution, -(2.0 * static_cast<double>(k) - 1.0)));
  const auto per_support = static_cast<std::size_t>(
      std::max(1.0, std::min(per_support_target, static_cast<double>(opts.max_candidates) / binomial(d, k))));

  std::vector<ComplexVector> net;
  std::vector<SupportGrid> grids;
  grids.reserve(supports.size());
  for (const auto& s : supports) grids.emplace_back(s, p.b);
  auto support_index = [&](const ComplexVector& x) {
    const std::vector<std::size_t> top = top_support(x, k);
    return static_cast<std::size_t>(std::find(supports.begin(), supports.end(), top) - supports.begin());
  };
  auto nearest = [&](const ComplexVector& x, std::size_t s, int reach) {
    double best = std::numeric_limits<double>::infinity();
    grids[s].visit_near(x, reach, net.size(), [&](std::size_t id) { best = std::min(best, (net[id] - x).norm()); });
    return best;
  };
  auto add = [&](ComplexVector v) {
    for (auto& g : grids) g.insert(net.size(), v);
    net.push_back(std::move(v));
  };

  for (std::size_t s = 0; s < supports.size(); ++s) {
    SeedStream cloud = stream.substream(s);
    for (std::size_t c = 0; c < per_support; ++c) {
      ComplexVector v = random_sparse_unit(d, supports[s], cloud);
      if (!(nearest(v, s, 1) <= p.b)) add(std::move(v));
    }
  }

  if (!opts.certify) return net;

  SeedStream closure = stream.substream(supports.size() + 2);
  bool settled = false;
  for (std::size_t round = 0; round < opts.closure_rounds && !settled; ++round) {
    settled = true;
    for (ComplexVector& x : sample_compressible(p, opts.verification_samples, closure)) {
      if (!(nearest(x, support_index(x), 2) <= 1.8 * p.b)) {
        add(std::move(x));
        settled = false;
      }
    }
  }
  if (!settled) {
    throw NumericalError("greedy_net: resolution " + std::to_string(resolution) + " too coarse, coverage did not settle in " +
                         std::to_string(opts.closure_rounds) + " closure rounds");
  }

  SeedStream verify = stream.substream(supports.size() + 1);
  for (const ComplexVector& x : sample_compressible(p, opts.verification_samples, verify)) {
    const double best = nearest(x, support_index(x), 2);
    if (!(best <= 2.0 * p.b)) {
      throw NumericalError("greedy_net: resolution " + std::to_string(resolution) +
                           " too coarse, a sampled compressible vector is " + std::to_string(best) +
                           " from the net (> 2b = " + std::to_string(2.0 * p.b) + ")");
    }
  }
  return net;
}

// ---------------------------------------------------------------------------
// Row distances

double row_distance(const ComplexMatrix& m, std::size_t k) {
  if (m.rows() != m.cols()) throw std::invalid_argument("row_distance: matrix must be square");
  if (k >= static_cast<std::size_t>(m.rows())) {
    throw std::out_of_range("row_distance: row " + std::to_string(k) + " outside [0, " + std::to_string(m.rows()) + ")");
  }
  const Eigen::Index n = m.rows();
  if (n == 1) return std::abs(m(0, 0));
  // Other rows as columns of R^T; the residual of the least-squares fit of
  // row k is its distance to their span.
  ComplexMatrix others(n - 1, n);
  others.topRows(idx(k)) = m.topRows(idx(k));
  others.bottomRows(n - 1 - idx(k)) = m.bottomRows(n - 1 - idx(k));
  const ComplexMatrix basis = others.transpose();
  const ComplexVector target = m.row(idx(k)).transpose();
  const ComplexVector c = min_norm_solve(basis, target);
  return (basis * c - target).norm();
}

RowDistanceSummary row_distances(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("row_distances: matrix must be square");
  require_finite(m, "row_distances");
  const Eigen::Index n = m.rows();
  RowDistanceSummary out;
  out.distances = RealVector(n);
  Eigen::PartialPivLU<ComplexMatrix> lu(m);
  if (lu.rcond() > 1e-13) {
    const ComplexMatrix inv = lu.inverse();
    for (Eigen::Index k = 0; k < n; ++k) out.distances(k) = 1.0 / inv.col(k).norm();
  } else {
    for (Eigen::Index k = 0; k < n; ++k) out.distances(k) = row_distance(m, static_cast<std::size_t>(k));
  }
  Eigen::Index arg = 0;
  out.min = out.distances.minCoeff(&arg);
  out.argmin = static_cast<std::size_t>(arg);
  return out;
}

// ---------------------------------------------------------------------------
// Null vectors and block mass

void phase_normalize(ComplexVector& v) {
  if (v.size() == 0) return;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(best))) best = i;
  }
  const double mag = std::abs(v(best));
  if (mag > 0.0) v *= std::conj(v(best)) / mag;
  v(best) = Complex(std::abs(v(best)), 0.0);
}

NullVector null_vector(const TranslatedLinearization& lin, std::size_t removed_row) {
  const std::size_t total = lin.size();
  if (removed_row >= total) throw std::out_of_range("null_vector: removed_row out of range");
  const ComplexMatrix y = materialize(lin);
  const Eigen::Index N = idx(total);

  ComplexMatrix r(N - 1, N);
  r.topRows(idx(removed_row)) = y.topRows(idx(removed_row));
  r.bottomRows(N - 1 - idx(removed_row)) = y.bottomRows(N - 1 - idx(removed_row));

  ComplexVector u;
  bool degenerate = false;
  double scale = 0.0;
  if (N == 1) {
    u = ComplexVector::Ones(1);
  } else {
    Eigen::BDCSVD<ComplexMatrix> svd(r, Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success) throw NumericalError("null_vector: SVD failed");
    const RealVector& sv = svd.singularValues();
    scale = sv(0);
    u = svd.matrixV().col(N - 1);
    degenerate = sv(sv.size() - 1) < 1e-9 * scale;
  }
  phase_normalize(u);
  NullVector out{BlockVector(u, lin.blocks()), 0.0, degenerate};
  out.relative_residual = scale > 0.0 ? (r * u).norm() / scale : 0.0;
  return out;
}

BlockVector null_vector_by_inverse(const TranslatedLinearization& lin, std::size_t removed_row) {
  const ComplexMatrix y = materialize(lin);
  Eigen::PartialPivLU<ComplexMatrix> lu(y);
  ComplexVector e = ComplexVector::Zero(y.rows());
  e(idx(removed_row)) = 1.0;
  ComplexVector u = lu.solve(e);
  u /= u.norm();
  phase_normalize(u);
  return BlockVector(u, lin.blocks());
}

RealVector mass_profile(const BlockVector& u, double unit_tolerance) {
  require_unit(u.data(), unit_tolerance, "mass_profile");
  RealVector out(idx(u.blocks()));
  for (std::size_t j = 0; j < u.blocks(); ++j) out(idx(j)) = u.block(j).norm();
  return out;
}

RealVector system_residuals(const BlockVector& u, const TranslatedLinearization& lin,
                            std::optional<std::size_t> removed_row) {
  const std::size_t row = removed_row.value_or(lin.size() - 1);
  if (row >= lin.size()) throw std::out_of_range("system_residuals: removed_row out of range");
  BlockVector r = lin.apply(u);
  r.data()(idx(row)) = 0.0;
  RealVector out(idx(lin.blocks()));
  for (std::size_t j = 0; j < lin.blocks(); ++j) out(idx(j)) = r.block(j).norm();
  return out;
}

}  // namespace prodsv
