#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prodsv/linearization.hpp"
#include "prodsv/numerics.hpp"
#include "prodsv/rng.hpp"

namespace prodsv {

/// Mixed moments E[x^a conj(x)^b] for a + b <= 4 (15 entries including the
/// trivial (0, 0) = 1).
class MomentTable {
 public:
  static constexpr int kMaxOrder = 4;
  static constexpr std::size_t kEntries = 15;

  MomentTable();

  Complex operator()(int a, int b) const { return values_.at(index(a, b)); }
  Complex& at(int a, int b) { return values_.at(index(a, b)); }

  /// Every (a, b) with 1 <= a + b <= 4, in a fixed order.
  static std::vector<std::pair<int, int>> nontrivial_orders();

 private:
  static std::size_t index(int a, int b);
  std::array<Complex, kEntries> values_{};
};

struct MomentProfile {
  MomentTable mixed;

  Complex mean() const { return mixed(1, 0); }
  double second_abs() const { return mixed(1, 1).real(); }
  double fourth_abs() const { return mixed(2, 2).real(); }
  Complex pseudo_second() const { return mixed(2, 0); }
};

/// Moment hypotheses on the entries: centered, E|x|^2 >= c2, E|x|^4 <= C4.
struct Admissibility {
  double c2 = 1.0;
  double C4 = 16.0;
  double mean_tolerance = 1e-12;
  /// Relative slack on the c2 / C4 comparisons (absorbs rounding in atom sums).
  double moment_tolerance = 1e-12;
};

/// Empty string when admissible, otherwise the first violated condition.
std::string admissibility_violation(const MomentProfile& p, const Admissibility& adm);

struct Atom {
  Complex value;
  double probability;
};

class EntryDistribution {
 public:
  using Sampler = std::function<Complex(SeedStream&)>;

  EntryDistribution(std::string name, MomentProfile profile, Sampler sampler);

  /// Finitely supported law; the profile is computed exactly by enumeration.
  static EntryDistribution from_atoms(std::string name, std::vector<Atom> atoms);

  const std::string& name() const { return name_; }
  const MomentProfile& profile() const { return profile_; }
  const std::optional<std::vector<Atom>>& atoms() const { return atoms_; }

  Complex sample(SeedStream& stream) const { return sampler_(stream); }

  /// Copy with a different declared profile (the sampler is unchanged).
  EntryDistribution with_profile(MomentProfile profile) const;

 private:
  std::string name_;
  MomentProfile profile_;
  Sampler sampler_;
  std::optional<std::vector<Atom>> atoms_;
};

MomentTable complex_gaussian_moments();
MomentTable moments_of_atoms(const std::vector<Atom>& atoms);

EntryDistribution ginibre();
/// Real +-1 with equal probability.
EntryDistribution rademacher();
/// (+-1 +- i)/sqrt(2), each with probability 1/4.
EntryDistribution rademacher_complex();
/// Uniform on the disc of radius sqrt(2), so E|x|^2 = 1.
EntryDistribution uniform_disc();
/// 0 with probability 1/2 and sqrt(2) w for each 8th root of unity w with
/// probability 1/16; agrees with the standard complex Gaussian in every
/// mixed moment of total order <= 4.
EntryDistribution gaussian_matching_discrete();
EntryDistribution point_mass(Complex value);

/// Law of x - x' for independent copies x, x'.
EntryDistribution symmetrize(const EntryDistribution& d);

/// Names accepted by distribution_by_name().
std::vector<std::string> distribution_names();
/// Throws std::invalid_argument listing valid names on an unknown name.
EntryDistribution distribution_by_name(std::string_view name);

struct MomentCheck {
  int a = 0;
  int b = 0;
  Complex declared;
  Complex empirical;
  double standard_error = 0.0;
  double deviation_sigmas = 0.0;
  bool pass = false;
};

struct MomentReport {
  std::string distribution;
  std::size_t samples = 0;
  double tolerance_sigmas = 0.0;
  std::vector<MomentCheck> checks;
  bool all_pass = false;

  const MomentCheck& check(int a, int b) const;
};

/// Empirical vs declared mixed moments. A moment passes when it lies within
/// tolerance_sigmas standard errors; a zero standard error demands agreement
/// to 1e-12.
MomentReport verify_moments(const EntryDistribution& d, std::size_t samples,
                            double tolerance_sigmas, SeedStream stream);

/// Shape and entry laws of a factor chain. Factor indices are 0-based here.
struct EnsembleSpec {
  using EntryAssignment =
      std::function<const EntryDistribution*(std::size_t k, std::size_t i, std::size_t j)>;

  std::size_t n = 1;
  std::size_t factors = 1;
  EntryDistribution distribution = ginibre();
  std::map<std::size_t, EntryDistribution> factor_overrides;
  /// Optional per-entry law; returning nullptr falls through to the
  /// factor-level law.
  EntryAssignment entry_assignment;

  const EntryDistribution& distribution_for(std::size_t k, std::size_t i, std::size_t j) const;

  /// Throws std::invalid_argument for bad shapes or inadmissible laws.
  void validate(const Admissibility& adm = {}) const;
};

/// Entry (i, j) of factor k reads stream.substream(k).substream(i * n + j).
ComplexMatrix sample_factor(const EnsembleSpec& spec, std::size_t k, const SeedStream& stream);

FactorChain sample_chain(const EnsembleSpec& spec, const SeedStream& stream);

}  // namespace prodsv
