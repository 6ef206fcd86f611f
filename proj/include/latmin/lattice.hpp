#pragma once

// Lattices with real bases, diagonal scalings of the torus of determinant-one
// weights, and exact enumeration of lattice points in weighted boxes.  The
// basis matrix holds the basis vectors in its columns.  Enumeration lifts the
// (dyadic) double entries exactly into the integer kernel, so results are
// reproducible and correct up to the documented 1e-9 membership tolerance.

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "latmin/errors.hpp"
#include "latmin/exact_core.hpp"

namespace latmin {

inline constexpr double kUnimodularTol = 1e-9;
inline constexpr double kMembershipTol = 1e-9;
inline constexpr std::uint64_t kDefaultNodeBudget = 100'000'000;

class Lattice {
 public:
  // Validates: square, d >= 2, |det| = 1 within 1e-9, full rank.
  explicit Lattice(Eigen::MatrixXd basis);

  int dim() const { return int(basis_.cols()); }
  const Eigen::MatrixXd& basis() const { return basis_; }

 private:
  Eigen::MatrixXd basis_;
};

// A point of the torus T_d: positive weights T_1..T_d with product one,
// stored in natural-log coordinates.
class ScalingVector {
 public:
  static ScalingVector from_log(Eigen::VectorXd log_t);  // sum must be ~0
  static ScalingVector from_values(const Eigen::VectorXd& t);
  static ScalingVector ones(int d);

  int dim() const { return int(log_t_.size()); }
  const Eigen::VectorXd& log() const { return log_t_; }
  Eigen::VectorXd values() const { return log_t_.array().exp(); }
  ScalingVector inverse() const;
  ScalingVector times(const ScalingVector& other) const;  // componentwise T*T'

  bool operator==(const ScalingVector& o) const { return log_t_ == o.log_t_; }

 private:
  explicit ScalingVector(Eigen::VectorXd log_t) : log_t_(std::move(log_t)) {}
  Eigen::VectorXd log_t_;
};

// Membership in the chamber T_1..T_d1 >= 1 >= T_{d1+1}..T_d (up to tolerance).
bool in_positive_chamber(const ScalingVector& t, int d1);

struct LatticePoint {
  Eigen::Matrix<long long, Eigen::Dynamic, 1> coeffs;  // basis coordinates
  Eigen::VectorXd coords;                              // basis * coeffs

  bool is_primitive() const;  // gcd of |coeffs| == 1
};

// LLL reduction of the basis (Lovász parameter 0.99); same point lattice,
// basis related by a unimodular integer transform.
Lattice lll_reduce(const Lattice& lattice);

// diag(T) * basis; determinant preserved since sum(log T) = 0.
Lattice apply_scaling(const ScalingVector& t, const Lattice& lattice);

// All nonzero v in the lattice with max_p |v_p| / (radius * T_p) <= 1 (within
// tolerance), both v and -v, sorted lexicographically by coefficient vector.
std::vector<LatticePoint> enumerate_in_weighted_box(
    const Lattice& lattice, const ScalingVector& t, double radius,
    std::uint64_t node_budget = kDefaultNodeBudget);

// Internal generality: arbitrary positive per-coordinate natural-log bounds
// (no determinant-one constraint); used by the slab searches.
std::vector<LatticePoint> enumerate_in_box_log_weights(
    const Lattice& lattice, const Eigen::VectorXd& log_weights,
    std::uint64_t node_budget = kDefaultNodeBudget, bool first_only = false);

// Count of primitive nonzero points in radius * B_T; always even.
long siegel_transform(const Lattice& lattice, const ScalingVector& t,
                      double radius,
                      std::uint64_t node_budget = kDefaultNodeBudget);

// True iff some nonzero lattice point lies in radius * B_T.
bool hits(const Lattice& lattice, const ScalingVector& t, double radius,
          std::uint64_t node_budget = kDefaultNodeBudget);

// Lattice spanned by the columns of [[I_{d1}, alpha], [0, I_{d2}]] for a
// d1 x d2 coefficient matrix alpha.
Lattice unitriangular_lattice(const Eigen::MatrixXd& alpha);

namespace detail {

// Exact dyadic lift: basis == (double)(m * 2^-shift), entrywise exact.
struct LiftedBasis {
  exact::IntMat m;
  long shift = 0;
};
LiftedBasis lift_dyadic(const Eigen::MatrixXd& basis);

}  // namespace detail

}  // namespace latmin
