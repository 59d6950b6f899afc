#include "prodsv/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace prodsv {

namespace {

Complex ipow(Complex x, int k) {
  Complex out(1.0, 0.0);
  for (int i = 0; i < k; ++i) out *= x;
  return out;
}

double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// MomentTable

MomentTable::MomentTable() { values_[index(0, 0)] = 1.0; }

std::size_t MomentTable::index(int a, int b) {
  if (a < 0 || b < 0 || a + b > kMaxOrder) {
    throw std::out_of_range("MomentTable: order (" + std::to_string(a) + ", " + std::to_string(b) +
                            ") outside a + b <= 4");
  }
  const int t = a + b;
  return static_cast<std::size_t>(t * (t + 1) / 2 + b);
}

std::vector<std::pair<int, int>> MomentTable::nontrivial_orders() {
  std::vector<std::pair<int, int>> out;
  for (int t = 1; t <= kMaxOrder; ++t) {
    for (int b = 0; b <= t; ++b) out.emplace_back(t - b, b);
  }
  return out;
}

MomentTable complex_gaussian_moments() {
  // E[x^a conj(x)^b] = delta_{ab} a!
  MomentTable t;
  t.at(1, 1) = 1.0;
  t.at(2, 2) = 2.0;
  return t;
}

MomentTable moments_of_atoms(const std::vector<Atom>& atoms) {
  MomentTable t;
  for (const auto& [a, b] : MomentTable::nontrivial_orders()) {
    Complex acc(0.0, 0.0);
    for (const Atom& atom : atoms) {
      acc += atom.probability * ipow(atom.value, a) * ipow(std::conj(atom.value), b);
    }
    t.at(a, b) = acc;
  }
  return t;
}

std::string admissibility_violation(const MomentProfile& p, const Admissibility& adm) {
  if (std::abs(p.mean()) > adm.mean_tolerance) return "not centered (|E x| = " + std::to_string(std::abs(p.mean())) + ")";
  if (p.second_abs() < adm.c2 * (1.0 - adm.moment_tolerance)) {
    return "E|x|^2 = " + std::to_string(p.second_abs()) + " below c2 = " + std::to_string(adm.c2);
  }
  if (p.fourth_abs() > adm.C4 * (1.0 + adm.moment_tolerance)) {
    return "E|x|^4 = " + std::to_string(p.fourth_abs()) + " above C4 = " + std::to_string(adm.C4);
  }
  return {};
}

// ---------------------------------------------------------------------------
// EntryDistribution

EntryDistribution::EntryDistribution(std::string name, MomentProfile profile, Sampler sampler)
    : name_(std::move(name)), profile_(profile), sampler_(std::move(sampler)) {
  if (!sampler_) throw std::invalid_argument("EntryDistribution: sampler required");
}

EntryDistribution EntryDistribution::from_atoms(std::string name, std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("EntryDistribution: empty atom list");
  double total = 0.0;
  for (const Atom& a : atoms) {
    if (!(a.probability >= 0.0)) throw std::invalid_argument("EntryDistribution: negative atom probability");
    total += a.probability;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("EntryDistribution: atom probabilities sum to " + std::to_string(total));
  }
  std::vector<double> cumulative;
  cumulative.reserve(atoms.size());
  double run = 0.0;
  for (const Atom& a : atoms) cumulative.push_back(run += a.probability);
  cumulative.back() = 1.0;

  std::vector<Complex> values;
  for (const Atom& a : atoms) values.push_back(a.value);

  auto sampler = [cumulative, values](SeedStream& s) {
    const double u = s.uniform01();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const auto k = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                                     static_cast<std::ptrdiff_t>(values.size()) - 1));
    return values[k];
  };
  EntryDistribution d(std::move(name), MomentProfile{moments_of_atoms(atoms)}, sampler);
  d.atoms_ = std::move(atoms);
  return d;
}

EntryDistribution EntryDistribution::with_profile(MomentProfile profile) const {
  EntryDistribution d = *this;
  d.profile_ = profile;
  return d;
}

EntryDistribution ginibre() {
  return EntryDistribution("ginibre", MomentProfile{complex_gaussian_moments()},
                           [](SeedStream& s) { return s.complex_normal(); });
}

EntryDistribution rademacher() {
  return EntryDistribution::from_atoms("rademacher", {{1.0, 0.5}, {-1.0, 0.5}});
}

EntryDistribution rademacher_complex() {
  const double h = 1.0 / std::numbers::sqrt2;
  return EntryDistribution::from_atoms(
      "rademacher-complex", {{{h, h}, 0.25}, {{-h, h}, 0.25}, {{-h, -h}, 0.25}, {{h, -h}, 0.25}});
}

EntryDistribution uniform_disc() {
  // Radius R = sqrt(2): E|x|^{2a} = R^{2a} / (a + 1) = 2^a / (a + 1).
  MomentTable t;
  t.at(1, 1) = 1.0;
  t.at(2, 2) = 4.0 / 3.0;
  return EntryDistribution("uniform-disc", MomentProfile{t}, [](SeedStream& s) {
    const double r = std::numbers::sqrt2 * std::sqrt(s.uniform01());
    const double theta = 2.0 * std::numbers::pi * s.uniform01();
    return Complex(r * std::cos(theta), r * std::sin(theta));
  });
}

EntryDistribution gaussian_matching_discrete() {
  std::vector<Atom> atoms;
  atoms.push_back({0.0, 0.5});
  for (int k = 0; k < 8; ++k) {
    atoms.push_back({std::polar(std::numbers::sqrt2, k * std::numbers::pi / 4.0), 1.0 / 16.0});
  }
  return EntryDistribution::from_atoms("gauss-match-discrete", std::move(atoms));
}

EntryDistribution point_mass(Complex value) {
  return EntryDistribution::from_atoms("point-mass", {{value, 1.0}});
}

EntryDistribution symmetrize(const EntryDistribution& d) {
  const std::string name = "sym(" + d.name() + ")";
  if (d.atoms()) {
    std::vector<Atom> out;
    for (const Atom& x : *d.atoms()) {
      for (const Atom& y : *d.atoms()) {
        const Complex v = x.value - y.value;
        const double p = x.probability * y.probability;
        auto it = std::find_if(out.begin(), out.end(), [&](const Atom& a) { return std::abs(a.value - v) <= 1e-14; });
        if (it == out.end()) {
          out.push_back({v, p});
        } else {
          it->probability += p;
        }
      }
    }
    std::sort(out.begin(), out.end(), [](const Atom& l, const Atom& r) {
      return l.value.real() != r.value.real() ? l.value.real() < r.value.real() : l.value.imag() < r.value.imag();
    });
    return EntryDistribution::from_atoms(name, std::move(out));
  }

  // E[(x - x')^a conj(x - x')^b] by binomial expansion over independent copies.
  const MomentTable& m = d.profile().mixed;
  MomentTable t;
  for (const auto& [a, b] : MomentTable::nontrivial_orders()) {
    Complex acc(0.0, 0.0);
    for (int p = 0; p <= a; ++p) {
      for (int q = 0; q <= b; ++q) {
        const double sign = ((a - p + b - q) % 2 == 0) ? 1.0 : -1.0;
        acc += binomial(a, p) * binomial(b, q) * sign * m(p, q) * m(a - p, b - q);
      }
    }
    t.at(a, b) = acc;
  }
  return EntryDistribution(name, MomentProfile{t}, [d](SeedStream& s) {
    const Complex x = d.sample(s);
    const Complex y = d.sample(s);
    return x - y;
  });
}

std::vector<std::string> distribution_names() {
  return {"ginibre", "rademacher", "rademacher-complex", "gauss-match-discrete", "uniform-disc"};
}

EntryDistribution distribution_by_name(std::string_view name) {
  if (name == "ginibre") return ginibre();
  if (name == "rademacher") return rademacher();
  if (name == "rademacher-complex") return rademacher_complex();
  if (name == "gauss-match-discrete") return gaussian_matching_discrete();
  if (name == "uniform-disc") return uniform_disc();
  std::string valid;
  for (const auto& n : distribution_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown distribution '" + std::string(name) + "' (valid: " + valid + ")");
}

// ---------------------------------------------------------------------------
// Moment verification

const MomentCheck& MomentReport::check(int a, int b) const {
  for (const auto& c : checks) {
    if (c.a == a && c.b == b) return c;
  }
  throw std::out_of_range("MomentReport: no check for requested order");
}

MomentReport verify_moments(const EntryDistribution& d, std::size_t samples, double tolerance_sigmas,
                            SeedStream stream) {
  if (samples < 2) throw std::invalid_argument("verify_moments: need at least 2 samples");
  const auto orders = MomentTable::nontrivial_orders();
  std::vector<Complex> sum(orders.size(), 0.0);
  std::vector<double> sum_abs2(orders.size(), 0.0);

  for (std::size_t s = 0; s < samples; ++s) {
    const Complex x = d.sample(stream);
    const Complex xc = std::conj(x);
    for (std::size_t k = 0; k < orders.size(); ++k) {
      const Complex v = ipow(x, orders[k].first) * ipow(xc, orders[k].second);
      sum[k] += v;
      sum_abs2[k] += std::norm(v);
    }
  }

  MomentReport report;
  report.distribution = d.name();
  report.samples = samples;
  report.tolerance_sigmas = tolerance_sigmas;
  report.all_pass = true;
  const double count = static_cast<double>(samples);
  for (std::size_t k = 0; k < orders.size(); ++k) {
    MomentCheck c;
    c.a = orders[k].first;
    c.b = orders[k].second;
    c.declared = d.profile().mixed(c.a, c.b);
    c.empirical = sum[k] / count;
    const double var = std::max(0.0, (sum_abs2[k] - count * std::norm(c.empirical)) / (count - 1.0));
    c.standard_error = std::sqrt(var / count);
    const double dev = std::abs(c.empirical - c.declared);
    if (c.standard_error > 1e-12) {
      c.deviation_sigmas = dev / c.standard_error;
      c.pass = c.deviation_sigmas <= tolerance_sigmas;
    } else {
      c.deviation_sigmas = dev <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
      c.pass = dev <= 1e-12;
    }
    report.all_pass = report.all_pass && c.pass;
    report.checks.push_back(c);
  }
  return report;
}

// ---------------------------------------------------------------------------
// EnsembleSpec / sampling

const EntryDistribution& EnsembleSpec::distribution_for(std::size_t k, std::size_t i, std::size_t j) const {
  if (entry_assignment) {
    if (const EntryDistribution* d = entry_assignment(k, i, j)) return *d;
  }
  if (auto it = factor_overrides.find(k); it != factor_overrides.end()) return it->second;
  return distribution;
}

void EnsembleSpec::validate(const Admissibility& adm) const {
  if (n < 1) throw std::invalid_argument("EnsembleSpec: n must be >= 1");
  if (factors < 1) throw std::invalid_argument("EnsembleSpec: M must be >= 1");
  auto check = [&](const EntryDistribution& d, const std::string& where) {
    const std::string why = admissibility_violation(d.profile(), adm);
    if (!why.empty()) {
      throw std::invalid_argument("EnsembleSpec: distribution '" + d.name() + "' " + where +
                                  " is not admissible: " + why);
    }
  };
  check(distribution, "(default)");
  for (const auto& [k, d] : factor_overrides) {
    if (k >= factors) throw std::invalid_argument("EnsembleSpec: override for factor " + std::to_string(k + 1) + " > M");
    check(d, "for factor " + std::to_string(k + 1));
  }
  if (entry_assignment) {
    for (std::size_t k = 0; k < factors; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (const EntryDistribution* d = entry_assignment(k, i, j)) {
            check(*d, "at (" + std::to_string(k + 1) + ", " + std::to_string(i + 1) + ", " + std::to_string(j + 1) + ")");
          }
        }
      }
    }
  }
}

ComplexMatrix sample_factor(const EnsembleSpec& spec, std::size_t k, const SeedStream& stream) {
  if (k >= spec.factors) {
    throw std::out_of_range("sample_factor: factor index " + std::to_string(k + 1) + " outside [1, " +
                            std::to_string(spec.factors) + "]");
  }
  const auto n = static_cast<Eigen::Index>(spec.n);
  const SeedStream factor_stream = stream.substream(k);
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    for (std::size_t j = 0; j < spec.n; ++j) {
      SeedStream entry = factor_stream.substream(i * spec.n + j);
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = spec.distribution_for(k, i, j).sample(entry);
    }
  }
  return m;
}

FactorChain sample_chain(const EnsembleSpec& spec, const SeedStream& stream) {
  std::vector<ComplexMatrix> factors;
  factors.reserve(spec.factors);
  for (std::size_t k = 0; k < spec.factors; ++k) factors.push_back(sample_factor(spec, k, stream));
  return FactorChain(std::move(factors));
}

}  // namespace prodsv
