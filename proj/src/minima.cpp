#include "latmin/minima.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace latmin {

namespace {

constexpr double kLog2 = 0.6931471805599453;
constexpr long double kLog2e = 1.4426950408889634074L;

double min_eta_over(const RegularPair& pair,
                    const std::vector<LatticePoint>& points) {
  double best = kNoPoint;
  for (const auto& p : points) best = std::min(best, eta(pair, p.coords));
  return best;
}

}  // namespace

double eta_tilde(const RegularPair& pair, const Lattice& lattice,
                 std::uint64_t node_budget) {
  if (pair.dim() != lattice.dim())
    throw std::invalid_argument("pair/lattice dimension mismatch");
  const int d = lattice.dim();
  if (pair.kind() != PairKind::NormedStrip) {
    // C = [-1,1]^d for every box-shaped pair.
    auto points = enumerate_in_box_log_weights(
        lattice, Eigen::VectorXd::Zero(d), node_budget);
    return min_eta_over(pair, points);
  }
  // Strip: C is unbounded along the first block; search the slab with the
  // eta bound doubled until a point shows up.  Any point with a smaller eta
  // would lie inside the searched box, so the first nonempty pass is exact.
  const int d1 = pair.d1();
  for (double log_u = 0; log_u <= 42 * kLog2; log_u += kLog2) {
    Eigen::VectorXd logw = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < d1; ++i) logw[i] = log_u;
    auto points = enumerate_in_box_log_weights(lattice, logw, node_budget);
    if (!points.empty()) return min_eta_over(pair, points);
  }
  return kNoPoint;
}

double minkowski_c(const Lattice& lattice, const ScalingVector& t,
                   std::uint64_t node_budget) {
  auto points = enumerate_in_weighted_box(lattice, t, 1.0, node_budget);
  if (points.empty())
    throw std::runtime_error("empty unit box on a unimodular lattice");
  Eigen::VectorXd tv = t.values();
  double best = kNoPoint;
  for (const auto& p : points)
    best = std::min(best, (p.coords.cwiseAbs().cwiseQuotient(tv)).maxCoeff());
  return best;
}

double product_min(const Lattice& lattice, const ScalingVector& t,
                   std::uint64_t node_budget) {
  auto points = enumerate_in_weighted_box(lattice, t, 1.0, node_budget);
  if (points.empty())
    throw std::runtime_error("empty unit box on a unimodular lattice");
  double best = kNoPoint;
  for (const auto& p : points)
    best = std::min(best, p.coords.cwiseAbs().prod());
  return best;
}

double poly_min(const Polynomial& f, const Lattice& lattice,
                const ScalingVector& t, std::uint64_t node_budget) {
  if (f.dim() != lattice.dim())
    throw std::invalid_argument("polynomial/lattice dimension mismatch");
  Lattice scaled = apply_scaling(t, lattice);
  auto points = enumerate_in_box_log_weights(
      scaled, Eigen::VectorXd::Zero(lattice.dim()), node_budget);
  double best = kNoPoint;
  for (const auto& p : points) best = std::min(best, std::abs(f(p.coords)));
  return best;
}

namespace {

struct QBox {
  std::vector<long long> limits;  // |q_j| <= limits[j]
  std::uint64_t total;            // number of q vectors including 0
};

QBox q_box(const Eigen::VectorXd& tv, int d1, int d2,
           std::uint64_t node_budget) {
  QBox box;
  box.total = 1;
  for (int j = 0; j < d2; ++j) {
    double lim = (1.0 + kMembershipTol) / tv[d1 + j];
    if (lim >= 9e18)
      throw resource_limit_error("q range too large for direct search",
                                 node_budget);
    long long q = (long long)std::floor(lim);
    box.limits.push_back(q);
    box.total *= (std::uint64_t)(2 * q + 1);
    if (box.total > node_budget)
      throw resource_limit_error("q enumeration budget exceeded", node_budget);
  }
  return box;
}

// Iterate q over the box in odometer order, invoking fn(q).
template <typename Fn>
void for_each_q(const QBox& box, Fn&& fn) {
  const int d2 = int(box.limits.size());
  std::vector<long long> q(d2);
  for (int j = 0; j < d2; ++j) q[j] = -box.limits[j];
  while (true) {
    fn(q);
    int j = 0;
    while (j < d2 && q[j] == box.limits[j]) q[j++] = -box.limits[j];
    if (j == d2) break;
    ++q[j];
  }
}

void check_positive_chamber(const ScalingVector& t, int d1) {
  if (!in_positive_chamber(t, d1))
    throw std::invalid_argument("scaling vector must lie in the positive chamber");
}

}  // namespace

double dirichlet_k(const Eigen::MatrixXd& alpha, const ScalingVector& t,
                   std::uint64_t node_budget) {
  const int d1 = int(alpha.rows()), d2 = int(alpha.cols());
  if (t.dim() != d1 + d2) throw std::invalid_argument("alpha/T dimension mismatch");
  check_positive_chamber(t, d1);
  Eigen::VectorXd tv = t.values();
  QBox box = q_box(tv, d1, d2, node_budget);

  double best = kNoPoint;
  Eigen::VectorXd qv(d2);
  for_each_q(box, [&](const std::vector<long long>& q) {
    bool zero = true;
    for (long long x : q) zero &= (x == 0);
    double value;
    if (zero) {
      // p must be nonzero; best choice is a unit vector on the smallest T_l
      value = tv.head(d1).minCoeff();
    } else {
      for (int j = 0; j < d2; ++j) qv[j] = double(q[j]);
      Eigen::VectorXd y = alpha * qv;
      value = 0;
      for (int l = 0; l < d1; ++l)
        value = std::max(value, tv[l] * std::abs(y[l] - std::round(y[l])));
    }
    best = std::min(best, value);
  });
  return best;
}

double gallagher_g(const Eigen::MatrixXd& alpha, const ScalingVector& t,
                   std::uint64_t node_budget) {
  const int d1 = int(alpha.rows()), d2 = int(alpha.cols());
  if (t.dim() != d1 + d2) throw std::invalid_argument("alpha/T dimension mismatch");
  check_positive_chamber(t, d1);
  Eigen::VectorXd tv = t.values();
  QBox box = q_box(tv, d1, d2, node_budget);

  double best = kNoPoint;
  Eigen::VectorXd qv(d2);
  for_each_q(box, [&](const std::vector<long long>& q) {
    bool zero = true;
    for (long long x : q) zero &= (x == 0);
    if (zero) {
      // admissible nonzero p needs |p_l| <= 1/T_l for some coordinate
      int room = 0;
      for (int l = 0; l < d1; ++l)
        if ((1.0 + kMembershipTol) / tv[l] >= 1.0) ++room;
      if (room >= 1)
        best = std::min(best, d1 >= 2 ? 0.0 : tv[0]);
      return;
    }
    for (int j = 0; j < d2; ++j) qv[j] = double(q[j]);
    Eigen::VectorXd y = alpha * qv;
    double value = 1;
    for (int l = 0; l < d1; ++l) {
      double dist = std::abs(y[l] - std::round(y[l]));
      if (dist > (1.0 + kMembershipTol) / tv[l]) return;  // no admissible p_l
      value *= tv[l] * dist;
    }
    best = std::min(best, value);
  });
  return best;
}

double per_scaling_min(const RegularPair& pair, const ScalingVector& t,
                       const Lattice& lattice, std::uint64_t node_budget) {
  if (pair.kind() == PairKind::NormBallSup)
    return minkowski_c(lattice, t, node_budget);
  if (pair.kind() == PairKind::Polynomial)
    return poly_min(pair.poly(), lattice, t, node_budget);
  return eta_tilde(pair, apply_scaling(t, lattice), node_budget);
}

double family_min(const RegularPair& pair,
                  const std::vector<ScalingVector>& family,
                  const Lattice& lattice, std::uint64_t node_budget) {
  if (family.empty()) throw std::domain_error("family must be nonempty");
  double best = kNoPoint;
  for (const auto& t : family)
    best = std::min(best, per_scaling_min(pair, t, lattice, node_budget));
  return best;
}

double family_min(const RegularPair& pair,
                  const std::vector<ScalingVector>& family,
                  const Eigen::MatrixXd& alpha, std::uint64_t node_budget) {
  return family_min(pair, family, unitriangular_lattice(alpha), node_budget);
}

long count_hits(const RegularPair& pair, const std::vector<ScalingVector>& family,
                const Lattice& lattice, double t, std::uint64_t node_budget) {
  if (t < 0) throw std::domain_error("count_hits needs t >= 0");
  if (family.empty()) throw std::domain_error("family must be nonempty");
  long n = 0;
  for (const auto& s : family)
    n += per_scaling_min(pair, s, lattice, node_budget) < t ? 1 : 0;
  return n;
}

long count_hits(const RegularPair& pair, const std::vector<ScalingVector>& family,
                const Eigen::MatrixXd& alpha, double t,
                std::uint64_t node_budget) {
  return count_hits(pair, family, unitriangular_lattice(alpha), t, node_budget);
}

// ---- Exact lane -----------------------------------------------------------

namespace {

// real basis = m * 2^{-shift} * exp(log_scale)
struct ExactBasis {
  exact::IntMat m;
  long shift = 0;
  double log_scale = 0;
  int d = 0;
};

ExactBasis to_basis(const ExactMu& mu) {
  ExactBasis b;
  b.d = mu.d;
  b.shift = 0;
  b.log_scale = -std::log(double(mu.p)) / mu.d;
  b.m = exact::IntMat(mu.d, mu.d);
  b.m(0, 0) = mu.p;
  for (int i = 1; i < mu.d; ++i) {
    b.m(0, i) = mu.a[i - 1];
    b.m(i, i) = 1;
  }
  return b;
}

ExactBasis to_basis(const ExactNu& nu) {
  ExactBasis b;
  b.d = nu.d1 + nu.d2;
  b.shift = nu.bits;
  b.log_scale = 0;
  b.m = exact::IntMat(b.d, b.d);
  exact::BigInt unit = exact::BigInt(1) << nu.bits;
  for (int l = 0; l < nu.d1; ++l) b.m(l, l) = unit;
  for (int j = 0; j < nu.d2; ++j) {
    for (int l = 0; l < nu.d1; ++l)
      b.m(l, nu.d1 + j) = nu.alpha[std::size_t(l) * nu.d2 + j];
    b.m(nu.d1 + j, nu.d1 + j) = unit;
  }
  return b;
}

// |coordinate_p| <= exp(log_w[p])  ->  |(m x)_p| <= bound_p
std::vector<exact::BigInt> make_bounds(const ExactBasis& b,
                                       const Eigen::VectorXd& log_w) {
  std::vector<exact::BigInt> bounds(b.d);
  for (int p = 0; p < b.d; ++p) {
    long double log2_bound = ((long double)log_w[p] - (long double)b.log_scale +
                              (long double)std::log1p(kMembershipTol)) *
                                 kLog2e +
                             (long double)b.shift;
    bounds[p] = exact::exp2_floor(log2_bound);
  }
  return bounds;
}

// Natural log of |coordinate_p| of the point with integer image w.
long double coord_log(const ExactBasis& b, const exact::BigInt& w) {
  return exact::log2_abs(w) / kLog2e - (long double)b.shift / kLog2e +
         (long double)b.log_scale;
}

std::vector<exact::BigInt> coords_int(const ExactBasis& b,
                                      const std::vector<exact::BigInt>& x) {
  std::vector<exact::BigInt> w(b.d);
  for (int p = 0; p < b.d; ++p) {
    exact::BigInt s = 0;
    for (int j = 0; j < b.d; ++j) s += b.m(p, j) * x[j];
    w[p] = s;
  }
  return w;
}

double exact_min_impl(const RegularPair& pair, const ScalingVector& t,
                      const ExactBasis& basis, std::uint64_t node_budget) {
  const int d = basis.d;
  if (pair.dim() != d || t.dim() != d)
    throw std::invalid_argument("pair/scaling/lattice dimension mismatch");
  const Eigen::VectorXd& logt = t.log();
  const int d1 = pair.d1() > 0 ? pair.d1() : d;

  auto enumerate = [&](const Eigen::VectorXd& log_w) {
    exact::EnumBudget budget{node_budget, 0};
    return exact::enumerate_box(basis.m, make_bounds(basis, log_w), budget,
                                false);
  };

  auto value_of = [&](const std::vector<exact::BigInt>& x) -> long double {
    auto w = coords_int(basis, x);
    switch (pair.kind()) {
      case PairKind::NormBallSup: {
        // max_p |v_p| / T_p over the untransformed point
        long double m = -std::numeric_limits<long double>::infinity();
        for (int p = 0; p < d; ++p)
          m = std::max(m, coord_log(basis, w[p]) - (long double)logt[p]);
        return std::exp((double)m);
      }
      case PairKind::ProductForm:
      case PairKind::ProductStrip: {
        // prod_{l<d1} T_l |v_l| on the diag(T)-image
        long double s = 0;
        for (int l = 0; l < d1; ++l) {
          if (w[l] == 0) return 0.0L;
          s += (long double)logt[l] + coord_log(basis, w[l]);
        }
        return std::exp((double)s);
      }
      case PairKind::NormedStrip: {
        long double m = -std::numeric_limits<long double>::infinity();
        for (int l = 0; l < d1; ++l)
          m = std::max(m, (long double)logt[l] + coord_log(basis, w[l]));
        return std::exp((double)m);
      }
      case PairKind::Polynomial: {
        Eigen::VectorXd y(d);
        for (int p = 0; p < d; ++p) {
          long double lv = (long double)logt[p] + coord_log(basis, w[p]);
          double mag = std::exp((double)lv);
          y[p] = w[p] < 0 ? -mag : (w[p] > 0 ? mag : 0.0);
        }
        return std::abs(pair.poly()(y));
      }
    }
    return 0.0L;
  };

  // Box weights for the constraint body of the transformed lattice.
  Eigen::VectorXd log_w(d);
  if (pair.kind() == PairKind::NormBallSup) {
    // The unit box B_T can hold astronomically many points when a degenerate
    // sublattice aligns with a squeezed coordinate.  Shrink first: the best
    // column of the box-reduced basis bounds the minimum within the LLL
    // factor, and the shrunken box then holds O(1) candidates.
    auto bounds = make_bounds(basis, logt);
    exact::IntMat red = exact::reduce_columns_for_box(basis.m, bounds);
    long double best_ratio = std::numeric_limits<long double>::infinity();
    for (int j = 0; j < d; ++j) {
      long double r = -std::numeric_limits<long double>::infinity();
      for (int p = 0; p < d; ++p) {
        if (bounds[p] == 0) {
          if (red(p, j) != 0) r = std::numeric_limits<long double>::infinity();
          continue;
        }
        if (red(p, j) == 0) continue;
        r = std::max(r, exact::log2_abs(red(p, j)) - exact::log2_abs(bounds[p]));
      }
      best_ratio = std::min(best_ratio, r);
    }
    Eigen::VectorXd shrunk =
        std::isfinite((double)best_ratio)
            ? Eigen::VectorXd(logt.array() + double(best_ratio) * kLog2 + 1e-12)
            : logt;
    auto pts = enumerate(shrunk);
    if (pts.empty()) return kNoPoint;  // unreachable for unimodular input
    long double best = std::numeric_limits<long double>::infinity();
    for (const auto& x : pts) best = std::min(best, value_of(x));
    return (double)best;
  } else if (pair.kind() == PairKind::NormedStrip) {
    // slab with a growing eta bound; the first nonempty pass is exact
    for (double log_u = 0; log_u <= 42 * kLog2; log_u += kLog2) {
      for (int i = 0; i < d; ++i)
        log_w[i] = (i < d1 ? log_u : 0.0) - logt[i];
      auto pts = enumerate(log_w);
      if (!pts.empty()) {
        long double best = std::numeric_limits<long double>::infinity();
        for (const auto& x : pts) best = std::min(best, value_of(x));
        return (double)best;
      }
    }
    return kNoPoint;
  } else {
    log_w = -logt;  // diag(T).point inside [-1,1]^d
  }

  auto pts = enumerate(log_w);
  if (pts.empty()) return kNoPoint;
  long double best = std::numeric_limits<long double>::infinity();
  for (const auto& x : pts) best = std::min(best, value_of(x));
  return (double)best;
}

}  // namespace

double exact_scaling_min(const RegularPair& pair, const ScalingVector& t,
                         const ExactMu& lattice, std::uint64_t node_budget) {
  return exact_min_impl(pair, t, to_basis(lattice), node_budget);
}

double exact_scaling_min(const RegularPair& pair, const ScalingVector& t,
                         const ExactNu& lattice, std::uint64_t node_budget) {
  return exact_min_impl(pair, t, to_basis(lattice), node_budget);
}

std::vector<double> exact_member_minima(const RegularPair& pair,
                                        const std::vector<ScalingVector>& family,
                                        const ExactMu& lattice,
                                        std::uint64_t node_budget) {
  ExactBasis b = to_basis(lattice);
  std::vector<double> out;
  out.reserve(family.size());
  for (const auto& t : family)
    out.push_back(exact_min_impl(pair, t, b, node_budget));
  return out;
}

std::vector<double> exact_member_minima(const RegularPair& pair,
                                        const std::vector<ScalingVector>& family,
                                        const ExactNu& lattice,
                                        std::uint64_t node_budget) {
  ExactBasis b = to_basis(lattice);
  std::vector<double> out;
  out.reserve(family.size());
  for (const auto& t : family)
    out.push_back(exact_min_impl(pair, t, b, node_budget));
  return out;
}

long exact_siegel_transform(const ExactMu& lattice, double radius,
                            std::uint64_t node_budget) {
  if (!(radius > 0)) throw std::invalid_argument("radius must be positive");
  ExactBasis b = to_basis(lattice);
  Eigen::VectorXd log_w =
      Eigen::VectorXd::Constant(b.d, std::log(radius));
  exact::EnumBudget budget{node_budget, 0};
  auto pts = exact::enumerate_box(b.m, make_bounds(b, log_w), budget, false);
  long count = 0;
  for (const auto& x : pts) {
    exact::BigInt g = 0;
    for (const auto& c : x) g = boost::multiprecision::gcd(g, abs(c));
    if (g == 1) ++count;
  }
  return count;
}

bool exact_hits(const ExactMu& lattice, double radius,
                std::uint64_t node_budget) {
  if (!(radius > 0)) throw std::invalid_argument("radius must be positive");
  ExactBasis b = to_basis(lattice);
  Eigen::VectorXd log_w =
      Eigen::VectorXd::Constant(b.d, std::log(radius));
  exact::EnumBudget budget{node_budget, 0};
  return !exact::enumerate_box(b.m, make_bounds(b, log_w), budget, true).empty();
}

}  // namespace latmin
