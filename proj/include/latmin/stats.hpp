#pragma once

// Distributional references and tests: zeta values, Weibull CDF, KS distance,
// factorial moments, and the Monte Carlo checks of the first and second
// moment identities for primitive-point counts.

#include <cstdint>
#include <functional>
#include <vector>

#include "latmin/lattice.hpp"
#include "latmin/regular_pair.hpp"
#include "latmin/samplers.hpp"

namespace latmin {

// Riemann zeta at integer d >= 2, truncated series plus integral tail
// correction; absolute error below 1e-14.
double zeta(int d);

// 1 - exp(-(scale * t)^shape) for t > 0, 0 otherwise.
double weibull_cdf(double scale, double shape, double t);

// Reference law descriptor for empirical minima.  `scale` follows the usual
// Weibull convention F(t) = 1 - exp(-(t/scale)^shape), which is what the
// limit constants (2 zeta(d))^{1/a} / (c a^b)^{1/a} refer to.
struct WeibullRef {
  double scale;
  double shape;
  double cdf(double t) const { return weibull_cdf(1.0 / scale, shape, t); }
};

struct FiniteSamples {
  std::vector<double> values;
  long excluded_inf = 0;
};
FiniteSamples filter_finite(const std::vector<double>& samples);

// Two-sided one-sample Kolmogorov-Smirnov statistic.
double ks_distance(std::vector<double> samples,
                   const std::function<double(double)>& cdf);

struct FactorialMoment {
  int r;
  double estimate;        // sample mean of binom(N, r)
  double reference;       // m^r / r!
  double standard_error;  // normal-approximation SE of the estimate
};
std::vector<FactorialMoment> factorial_moments(const std::vector<long>& counts,
                                               int r_max, double m);

struct MomentCheck {
  double estimate;
  double standard_error;
  double reference;
  double z() const {
    return standard_error > 0 ? (estimate - reference) / standard_error : 0.0;
  }
};

// Mean of the primitive-point count over the stream against
// Vol(radius * B_T) / zeta(d).
MomentCheck verify_siegel(const std::vector<Lattice>& stream,
                          const ScalingVector& t, double radius,
                          std::uint64_t node_budget = kDefaultNodeBudget);

// Second moment against 2 V / zeta(d) + (V / zeta(d))^2; d >= 3 only.
MomentCheck verify_rogers(const std::vector<Lattice>& stream,
                          const ScalingVector& t, double radius,
                          std::uint64_t node_budget = kDefaultNodeBudget);

struct HitBounds {
  double lower, center, upper;  // [m - m^2, m], m = V / (2 zeta(d))
};
HitBounds hitting_prob_bounds(double volume, int d);

// One stage of a log-law schedule: a grid family (theta = ell^omega) or a
// cone family from explicit generators.
struct StageSpec {
  bool is_cone = false;
  int ell = 2;
  double omega = 1.0;
  std::vector<ScalingVector> generators;
  double theta = 2.718281828459045;
};

struct LoglawRow {
  int stage;
  int ell;
  double spread_ratio;  // spread / log |family|
  double median;        // median over samples of min_T (log ||T||)^{a dlt} f_T
};

// Medians of the weighted family minima across a schedule of growing
// families.  delta must satisfy delta < d-1 (grid stages) or delta < dim of
// the cone (cone stages).
std::vector<LoglawRow> loglaw_trend(const RegularPair& pair,
                                    const MeasureSpec& measure, double delta,
                                    const std::vector<StageSpec>& stages,
                                    long n_samples, std::uint64_t seed,
                                    int threads = 1);

}  // namespace latmin
