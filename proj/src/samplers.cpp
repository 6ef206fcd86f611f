#include "latmin/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace latmin {

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL,
                          19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  auto mulmod = [](std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return (std::uint64_t)((__uint128_t)a * b % m);
  };
  auto powmod = [&](std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1;
    a %= m;
    while (e) {
      if (e & 1) r = mulmod(r, a, m);
      a = mulmod(a, a, m);
      e >>= 1;
    }
    return r;
  };
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // Deterministic witness set for 64-bit inputs.
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL,
                          19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

NuSample sample_nu(int d1, int d2, SplitMix64& rng) {
  if (d1 < 1 || d2 < 1) throw std::invalid_argument("sample_nu needs d1, d2 >= 1");
  Eigen::MatrixXd alpha(d1, d2);
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d2; ++j) alpha(i, j) = rng.uniform01();
  return {alpha, unitriangular_lattice(alpha)};
}

Lattice hecke_lattice(int d, std::uint64_t p,
                      const std::vector<std::uint64_t>& a) {
  if (d < 2) throw std::invalid_argument("hecke_lattice needs d >= 2");
  if (!is_prime_u64(p)) throw std::domain_error("hecke_lattice needs prime p");
  if (int(a.size()) != d - 1)
    throw std::invalid_argument("hecke_lattice needs d-1 residues");
  double scale = std::pow(double(p), -1.0 / d);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(d, d);
  basis(0, 0) = double(p) * scale;
  for (int i = 1; i < d; ++i) {
    basis(0, i) = double(a[i - 1]) * scale;
    basis(i, i) = scale;
  }
  return Lattice(std::move(basis));
}

Lattice sample_mu(int d, std::uint64_t p, SplitMix64& rng) {
  ExactMu s = sample_exact_mu(d, p, rng);
  return hecke_lattice(d, p, s.a);
}

ExactMu sample_exact_mu(int d, std::uint64_t p, SplitMix64& rng) {
  if (d < 2) throw std::invalid_argument("sample_mu needs d >= 2");
  if (!is_prime_u64(p)) throw std::domain_error("sample_mu needs prime p");
  ExactMu s;
  s.d = d;
  s.p = p;
  s.a.resize(d - 1);
  for (int i = 0; i < d - 1; ++i) s.a[i] = rng.below(p);
  return s;
}

Eigen::MatrixXd ExactNu::alpha_double() const {
  Eigen::MatrixXd m(d1, d2);
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d2; ++j) {
      // top 53 bits are enough for the double image
      exact::BigInt v = alpha[std::size_t(i) * d2 + j];
      m(i, j) = std::ldexp(v.convert_to<double>(), int(-bits));
    }
  return m;
}

ExactNu sample_exact_nu(int d1, int d2, long bits, SplitMix64& rng) {
  if (d1 < 1 || d2 < 1) throw std::invalid_argument("sample_nu needs d1, d2 >= 1");
  if (bits < 1 || bits % 64 != 0)
    throw std::invalid_argument("alpha precision must be a positive multiple of 64");
  ExactNu s;
  s.d1 = d1;
  s.d2 = d2;
  s.bits = bits;
  s.alpha.resize(std::size_t(d1) * d2);
  for (auto& v : s.alpha) {
    v = 0;
    for (long limb = 0; limb < bits / 64; ++limb)
      v |= exact::BigInt(rng.next()) << (64 * limb);
  }
  return s;
}

double spread(const std::vector<ScalingVector>& members) {
  if (members.size() < 2)
    throw std::domain_error("spread needs at least two members");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      double dist = (members[i].log() - members[j].log()).cwiseAbs().maxCoeff();
      best = std::min(best, dist);
    }
  return best;
}

double floor_T(const ScalingVector& t, int d1) {
  if (d1 < 1 || d1 >= t.dim())
    throw std::invalid_argument("floor_T needs 1 <= d1 < d");
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < t.dim(); ++i)
    m = std::min(m, i < d1 ? t.log()[i] : -t.log()[i]);
  return m;
}

double positive_spread(const std::vector<ScalingVector>& members, int d1) {
  double v = spread(members);
  for (const auto& t : members) v = std::min(v, floor_T(t, d1));
  return v;
}

ScalingFamily family_from_members(std::vector<ScalingVector> members,
                                  std::optional<std::pair<int, int>> split) {
  if (members.empty()) throw std::invalid_argument("family must be nonempty");
  ScalingFamily f;
  f.split = split;
  f.members = std::move(members);
  if (f.members.size() >= 2) {
    f.spread = spread(f.members);
    if (f.spread <= 1e-12)
      throw std::invalid_argument("family members must be pairwise distinct");
  }
  if (split) {
    f.min_floor = std::numeric_limits<double>::infinity();
    for (const auto& t : f.members) {
      if (!in_positive_chamber(t, split->first))
        throw std::invalid_argument("family member outside the positive chamber");
      f.min_floor = std::min(f.min_floor, floor_T(t, split->first));
    }
  }
  return f;
}

ScalingFamily build_grid_family(int d, int ell, double omega) {
  if (d < 2) throw std::invalid_argument("grid family needs d >= 2");
  if (ell < 2) throw std::invalid_argument("grid family needs ell >= 2");
  if (!(omega > 0)) throw std::invalid_argument("grid family needs omega > 0");
  const double log_theta = omega * std::log(double(ell));
  // worst coordinate is theta^{-(d-1) ell}
  const double worst = log_theta * double(d - 1) * ell;
  if (worst > 709.0)
    throw std::domain_error("grid family exponent " + std::to_string(worst) +
                            " exceeds the double range");

  std::vector<ScalingVector> members;
  std::vector<int> s(d - 1, 1);
  while (true) {
    Eigen::VectorXd logt(d);
    double sum = 0;
    for (int i = 0; i < d - 1; ++i) {
      logt[i] = log_theta * s[i];
      sum += s[i];
    }
    logt[d - 1] = -log_theta * sum;
    members.push_back(ScalingVector::from_log(std::move(logt)));
    int k = 0;
    while (k < d - 1 && s[k] == ell) s[k++] = 1;
    if (k == d - 1) break;
    ++s[k];
  }
  return family_from_members(std::move(members), std::nullopt);
}

ScalingFamily build_cone_family(int d1, int d2,
                                const std::vector<ScalingVector>& generators,
                                int ell, double theta) {
  if (d1 < 1 || d2 < 1) throw std::invalid_argument("cone family needs d1, d2 >= 1");
  if (ell < 2) throw std::invalid_argument("cone family needs ell >= 2");
  if (!(theta > 1)) throw std::invalid_argument("cone family needs theta > 1");
  if (generators.empty()) throw std::invalid_argument("cone family needs generators");
  const int d = d1 + d2;
  const int d0 = int(generators.size());
  for (const auto& g : generators) {
    if (g.dim() != d) throw std::invalid_argument("generator dimension mismatch");
    if (!in_positive_chamber(g, d1))
      throw std::invalid_argument("generators must lie in the positive chamber");
  }
  Eigen::MatrixXd w(d, d0);
  for (int k = 0; k < d0; ++k) w.col(k) = generators[k].log();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(w);
  if (svd.singularValues().minCoeff() <=
      1e-9 * svd.singularValues().maxCoeff())
    throw std::domain_error("cone generators are multiplicatively dependent");

  const double log_theta = std::log(theta);
  std::vector<ScalingVector> members;
  std::vector<int> s(d0, 1);
  while (true) {
    Eigen::VectorXd logt = Eigen::VectorXd::Zero(d);
    for (int k = 0; k < d0; ++k) logt += log_theta * s[k] * w.col(k);
    // guard against drift in the determinant-one constraint
    logt.array() -= logt.sum() / d;
    if (logt.cwiseAbs().maxCoeff() > 709.0)
      throw std::domain_error("cone family exponent " +
                              std::to_string(logt.cwiseAbs().maxCoeff()) +
                              " exceeds the double range");
    members.push_back(ScalingVector::from_log(std::move(logt)));
    int k = 0;
    while (k < d0 && s[k] == ell) s[k++] = 1;
    if (k == d0) break;
    ++s[k];
  }
  return family_from_members(std::move(members), std::make_pair(d1, d2));
}

SparsenessDiagnostics check_sparseness(const std::vector<ScalingFamily>& seq) {
  if (seq.size() < 2)
    throw std::invalid_argument("check_sparseness needs at least two families");
  SparsenessDiagnostics diag;
  diag.spread_ratio_increasing = true;
  diag.floor_ratio_increasing = true;
  for (const auto& f : seq) {
    SparsenessRow row;
    row.size = f.members.size();
    double logn = std::log(double(f.members.size()));
    row.spread_ratio = f.spread / logn;
    row.floor_ratio = f.split ? f.min_floor / logn
                              : std::numeric_limits<double>::quiet_NaN();
    diag.rows.push_back(row);
  }
  for (std::size_t i = 1; i < diag.rows.size(); ++i) {
    if (!(diag.rows[i].spread_ratio > diag.rows[i - 1].spread_ratio))
      diag.spread_ratio_increasing = false;
    if (seq[i].split && seq[i - 1].split &&
        !(diag.rows[i].floor_ratio > diag.rows[i - 1].floor_ratio))
      diag.floor_ratio_increasing = false;
  }
  return diag;
}

}  // namespace latmin
