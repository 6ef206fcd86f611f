#pragma once

// Random lattices for the two measures (Haar via Hecke points, horospherical
// via unitriangular alpha-lattices), the sparse scaling-family constructors,
// and the spread / floor diagnostics they are graded by.

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "latmin/exact_core.hpp"
#include "latmin/lattice.hpp"
#include "latmin/rng.hpp"

namespace latmin {

struct NuSample {
  Eigen::MatrixXd alpha;  // d1 x d2, entries uniform on [0,1)
  Lattice lattice;        // unitriangular_lattice(alpha), det exactly 1
};
NuSample sample_nu(int d1, int d2, SplitMix64& rng);

// Index-p sublattice of Z^d rescaled by p^{-1/d}: basis p e_1 and
// e_i + a_i e_1.  Equidistributes toward the Haar measure as p grows.
Lattice hecke_lattice(int d, std::uint64_t p, const std::vector<std::uint64_t>& a);
Lattice sample_mu(int d, std::uint64_t p, SplitMix64& rng);

// Exact-arithmetic forms of the samples; experiments use these so extreme
// diagonal scalings stay computable.
struct ExactMu {
  int d;
  std::uint64_t p;
  std::vector<std::uint64_t> a;  // d-1 residues
};
ExactMu sample_exact_mu(int d, std::uint64_t p, SplitMix64& rng);

struct ExactNu {
  int d1, d2;
  long bits;                          // alpha_ij = num / 2^bits
  std::vector<exact::BigInt> alpha;   // row-major d1 x d2 numerators
  Eigen::MatrixXd alpha_double() const;
};
ExactNu sample_exact_nu(int d1, int d2, long bits, SplitMix64& rng);

// v_d: minimal pairwise distance max_p |log T_p - log T'_p|.
double spread(const std::vector<ScalingVector>& members);

// min(log T_1, ..., log T_d1, -log T_{d1+1}, ..., -log T_d).
double floor_T(const ScalingVector& t, int d1);

// v+ = min over members and pairs of min(floor, pairwise distance).
double positive_spread(const std::vector<ScalingVector>& members, int d1);

struct ScalingFamily {
  std::optional<std::pair<int, int>> split;  // (d1, d2) for T+ families
  std::vector<ScalingVector> members;
  double spread = std::numeric_limits<double>::quiet_NaN();
  double min_floor = std::numeric_limits<double>::quiet_NaN();  // split only
};

ScalingFamily family_from_members(std::vector<ScalingVector> members,
                                  std::optional<std::pair<int, int>> split);

// The ell^{d-1}-member grid {(theta^{s_1}, ..., theta^{s_{d-1}},
// theta^{-sum s})} with theta = ell^omega.
ScalingFamily build_grid_family(int d, int ell, double omega);

// All products of generator powers A_1^{s_1} ... A_{d0}^{s_{d0}} with
// s in {1..ell}^{d0}, where log A_k = log(theta) * (generator_k log vector).
ScalingFamily build_cone_family(int d1, int d2,
                                const std::vector<ScalingVector>& generators,
                                int ell, double theta);

struct SparsenessRow {
  std::size_t size;
  double spread_ratio;  // spread / log |F|
  double floor_ratio;   // min_floor / log |F| (NaN without a split)
};
struct SparsenessDiagnostics {
  std::vector<SparsenessRow> rows;
  bool spread_ratio_increasing;
  bool floor_ratio_increasing;  // true when no splits present
};
SparsenessDiagnostics check_sparseness(const std::vector<ScalingFamily>& seq);

struct MeasureSpec {
  enum class Kind { Mu, Nu };
  Kind kind = Kind::Mu;
  int d = 3;            // mu
  int d1 = 2, d2 = 1;   // nu
  std::uint64_t p = 2147483647;

  int dim() const { return kind == Kind::Mu ? d : d1 + d2; }
};

}  // namespace latmin
