#include "latmin/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace latmin {

namespace detail {

LiftedBasis lift_dyadic(const Eigen::MatrixXd& basis) {
  const int rows = int(basis.rows()), cols = int(basis.cols());
  long shift = 0;
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      double x = basis(i, j);
      if (x == 0.0) continue;
      if (!std::isfinite(x))
        throw std::invalid_argument("basis entries must be finite");
      int e;
      std::frexp(x, &e);                    // x = f * 2^e, |f| in [0.5, 1)
      shift = std::max(shift, long(53 - e));  // LSB is at 2^(e-53)
    }
  LiftedBasis out;
  out.shift = shift;
  out.m = exact::IntMat(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      double x = basis(i, j);
      if (x == 0.0) continue;
      int e;
      double f = std::frexp(x, &e);
      auto mant = (long long)std::ldexp(f, 53);  // exact integer
      out.m(i, j) = exact::BigInt(mant) << (shift - (53 - e));
    }
  return out;
}

}  // namespace detail

Lattice::Lattice(Eigen::MatrixXd basis) : basis_(std::move(basis)) {
  if (basis_.rows() != basis_.cols() || basis_.rows() < 2)
    throw std::invalid_argument("lattice basis must be square with d >= 2");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(basis_);
  double det = std::abs(lu.determinant());
  if (!(std::abs(det - 1.0) <= kUnimodularTol))
    throw std::invalid_argument("lattice basis is not unimodular (|det| = " +
                                std::to_string(det) + ")");
  if (lu.rank() < basis_.rows())
    throw degenerate_lattice_error("lattice basis is rank deficient");
}

ScalingVector ScalingVector::from_log(Eigen::VectorXd log_t) {
  if (log_t.size() < 1) throw std::invalid_argument("empty scaling vector");
  if (std::abs(log_t.sum()) > 1e-9)
    throw std::invalid_argument("scaling vector log coordinates must sum to 0");
  return ScalingVector(std::move(log_t));
}

ScalingVector ScalingVector::from_values(const Eigen::VectorXd& t) {
  if ((t.array() <= 0).any())
    throw std::invalid_argument("scaling vector entries must be positive");
  return from_log(t.array().log());
}

ScalingVector ScalingVector::ones(int d) {
  return ScalingVector(Eigen::VectorXd::Zero(d));
}

ScalingVector ScalingVector::inverse() const { return ScalingVector(-log_t_); }

ScalingVector ScalingVector::times(const ScalingVector& other) const {
  return from_log(log_t_ + other.log());
}

bool in_positive_chamber(const ScalingVector& t, int d1) {
  const auto& l = t.log();
  if (d1 < 1 || d1 >= t.dim()) return false;
  for (int i = 0; i < t.dim(); ++i) {
    if (i < d1 && l[i] < -1e-12) return false;
    if (i >= d1 && l[i] > 1e-12) return false;
  }
  return true;
}

bool LatticePoint::is_primitive() const {
  long long g = 0;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i)
    g = std::gcd(g, std::abs(coeffs[i]));
  return g == 1;
}

Lattice lll_reduce(const Lattice& lattice) {
  auto lifted = detail::lift_dyadic(lattice.basis());
  exact::IntMat u;
  exact::lll_reduce_columns(lifted.m, &u);
  const int d = lattice.dim();
  Eigen::MatrixXd ud(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) ud(i, j) = u(i, j).convert_to<double>();
  return Lattice(lattice.basis() * ud);
}

Lattice apply_scaling(const ScalingVector& t, const Lattice& lattice) {
  if (t.dim() != lattice.dim())
    throw std::invalid_argument("scaling dimension mismatch");
  return Lattice(t.values().asDiagonal() * lattice.basis());
}

namespace {

std::vector<LatticePoint> enumerate_impl(const Lattice& lattice,
                                         const Eigen::VectorXd& log_weights,
                                         std::uint64_t node_budget,
                                         bool first_only) {
  const int d = lattice.dim();
  if (log_weights.size() != d)
    throw std::invalid_argument("weight dimension mismatch");
  auto lifted = detail::lift_dyadic(lattice.basis());

  constexpr long double log2e = 1.4426950408889634074L;
  std::vector<exact::BigInt> bounds(d);
  for (int p = 0; p < d; ++p) {
    long double log2_bound =
        (long double)log_weights[p] * log2e + (long double)lifted.shift +
        (long double)std::log1p(kMembershipTol) * log2e;
    bounds[p] = exact::exp2_floor(log2_bound);
  }

  exact::EnumBudget budget{node_budget, 0};
  auto raw = exact::enumerate_box(lifted.m, bounds, budget, first_only);

  std::vector<LatticePoint> points;
  points.reserve(raw.size());
  for (auto& x : raw) {
    LatticePoint pt;
    pt.coeffs.resize(d);
    for (int i = 0; i < d; ++i) {
      if (x[i] > std::numeric_limits<long long>::max() ||
          x[i] < std::numeric_limits<long long>::min())
        throw std::overflow_error("lattice point coefficient exceeds 64 bits");
      pt.coeffs[i] = x[i].convert_to<long long>();
    }
    pt.coords = lattice.basis() * pt.coeffs.cast<double>();
    points.push_back(std::move(pt));
  }
  std::sort(points.begin(), points.end(),
            [](const LatticePoint& a, const LatticePoint& b) {
              return std::lexicographical_compare(
                  a.coeffs.data(), a.coeffs.data() + a.coeffs.size(),
                  b.coeffs.data(), b.coeffs.data() + b.coeffs.size());
            });
  return points;
}

}  // namespace

std::vector<LatticePoint> enumerate_in_weighted_box(const Lattice& lattice,
                                                    const ScalingVector& t,
                                                    double radius,
                                                    std::uint64_t node_budget) {
  if (!(radius > 0)) throw std::invalid_argument("radius must be positive");
  if (t.dim() != lattice.dim())
    throw std::invalid_argument("scaling dimension mismatch");
  Eigen::VectorXd logw = t.log().array() + std::log(radius);
  return enumerate_impl(lattice, logw, node_budget, false);
}

std::vector<LatticePoint> enumerate_in_box_log_weights(
    const Lattice& lattice, const Eigen::VectorXd& log_weights,
    std::uint64_t node_budget, bool first_only) {
  return enumerate_impl(lattice, log_weights, node_budget, first_only);
}

long siegel_transform(const Lattice& lattice, const ScalingVector& t,
                      double radius, std::uint64_t node_budget) {
  auto points = enumerate_in_weighted_box(lattice, t, radius, node_budget);
  long count = 0;
  for (const auto& p : points) count += p.is_primitive() ? 1 : 0;
  return count;
}

bool hits(const Lattice& lattice, const ScalingVector& t, double radius,
          std::uint64_t node_budget) {
  if (!(radius > 0)) throw std::invalid_argument("radius must be positive");
  Eigen::VectorXd logw = t.log().array() + std::log(radius);
  return !enumerate_impl(lattice, logw, node_budget, true).empty();
}

Lattice unitriangular_lattice(const Eigen::MatrixXd& alpha) {
  const int d1 = int(alpha.rows()), d2 = int(alpha.cols());
  const int d = d1 + d2;
  Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(d, d);
  basis.block(0, d1, d1, d2) = alpha;
  return Lattice(std::move(basis));
}

}  // namespace latmin
