#pragma once

// The extremal quantities: eta-tilde over a pair's constraint body, the
// Minkowski / product / polynomial minima over weighted boxes, the Dirichlet
// and Gallagher approximation minima, and their family versions.  Each has a
// direct definition here; the generic lattice route (apply_scaling followed
// by eta_tilde) is an independent path the tests compare against.

#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "latmin/lattice.hpp"
#include "latmin/regular_pair.hpp"
#include "latmin/samplers.hpp"

namespace latmin {

// Sentinel for "no nonzero lattice point in the constraint body".
inline constexpr double kNoPoint = std::numeric_limits<double>::infinity();

// inf { eta(v) : v in lattice, v != 0, tau(v) <= 1 }; attained, or kNoPoint.
double eta_tilde(const RegularPair& pair, const Lattice& lattice,
                 std::uint64_t node_budget = kDefaultNodeBudget);

// min over nonzero v of max_p |v_p| / T_p; at most 1 + 1e-9 for unimodular
// lattices.
double minkowski_c(const Lattice& lattice, const ScalingVector& t,
                   std::uint64_t node_budget = kDefaultNodeBudget);

// min |v_1 ... v_d| over nonzero v in B_T.
double product_min(const Lattice& lattice, const ScalingVector& t,
                   std::uint64_t node_budget = kDefaultNodeBudget);

// min |F(v)| over nonzero v of diag(T).lattice inside [-1,1]^d; kNoPoint when
// that set is empty.
double poly_min(const Polynomial& f, const Lattice& lattice,
                const ScalingVector& t,
                std::uint64_t node_budget = kDefaultNodeBudget);

// min over integer (p, q) != 0 with |q_j| <= 1/T_{d1+j} of
// max_l T_l |p_l + (alpha q)_l|; alpha is d1 x d2, T in the positive chamber.
double dirichlet_k(const Eigen::MatrixXd& alpha, const ScalingVector& t,
                   std::uint64_t node_budget = kDefaultNodeBudget);

// min of prod_l T_l |p_l + (alpha q)_l| over the same q range, subject to
// |p_l + (alpha q)_l| <= 1/T_l for every l.
double gallagher_g(const Eigen::MatrixXd& alpha, const ScalingVector& t,
                   std::uint64_t node_budget = kDefaultNodeBudget);

// The per-member quantity the family minima are built from.  Orientation:
// the sup-norm ball pair evaluates at diag(T)^{-1}.lattice (the Minkowski
// constant of B_T); every other pair evaluates at diag(T).lattice.
double per_scaling_min(const RegularPair& pair, const ScalingVector& t,
                       const Lattice& lattice,
                       std::uint64_t node_budget = kDefaultNodeBudget);

double family_min(const RegularPair& pair,
                  const std::vector<ScalingVector>& family,
                  const Lattice& lattice,
                  std::uint64_t node_budget = kDefaultNodeBudget);
double family_min(const RegularPair& pair,
                  const std::vector<ScalingVector>& family,
                  const Eigen::MatrixXd& alpha,
                  std::uint64_t node_budget = kDefaultNodeBudget);

// #(members whose transformed lattice meets C(t) in a nonzero point); a
// member counts iff its per_scaling_min is strictly below t.
long count_hits(const RegularPair& pair, const std::vector<ScalingVector>& family,
                const Lattice& lattice, double t,
                std::uint64_t node_budget = kDefaultNodeBudget);
long count_hits(const RegularPair& pair, const std::vector<ScalingVector>& family,
                const Eigen::MatrixXd& alpha, double t,
                std::uint64_t node_budget = kDefaultNodeBudget);

// ---- Exact lane ----------------------------------------------------------
// Per-member minima evaluated on the integer forms of the sampled measures.
// Same orientation conventions as per_scaling_min; correct at any diagonal
// skew because all lattice arithmetic is exact.

double exact_scaling_min(const RegularPair& pair, const ScalingVector& t,
                         const ExactMu& lattice,
                         std::uint64_t node_budget = kDefaultNodeBudget);
double exact_scaling_min(const RegularPair& pair, const ScalingVector& t,
                         const ExactNu& lattice,
                         std::uint64_t node_budget = kDefaultNodeBudget);

std::vector<double> exact_member_minima(
    const RegularPair& pair, const std::vector<ScalingVector>& family,
    const ExactMu& lattice, std::uint64_t node_budget = kDefaultNodeBudget);
std::vector<double> exact_member_minima(
    const RegularPair& pair, const std::vector<ScalingVector>& family,
    const ExactNu& lattice, std::uint64_t node_budget = kDefaultNodeBudget);

// Primitive-point count of the cube of the given radius, and its hit test.
long exact_siegel_transform(const ExactMu& lattice, double radius,
                            std::uint64_t node_budget = kDefaultNodeBudget);
bool exact_hits(const ExactMu& lattice, double radius,
                std::uint64_t node_budget = kDefaultNodeBudget);

}  // namespace latmin
