// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Every tolerance is pinned here; the summary restates the measured value so
// failures are diagnosable from the log alone.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "latmin/experiment.hpp"
#include "latmin/minima.hpp"
#include "latmin/stats.hpp"

using namespace latmin;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return buf;
}

constexpr std::uint64_t kPinnedPrime = 2147483647ULL;        // criteria 1-3
constexpr std::uint64_t kBigPrime = 2305843009213693951ULL;  // 2^61 - 1

ScalingVector sv_log3(double a, double b, double c) {
  Eigen::VectorXd l(3);
  l << a, b, c;
  return ScalingVector::from_log(l);
}

// Centered exponent grid {-9,0,9}^2 minus the (9,9) corner, whose third
// coordinate would fall below the index-p sampler's resolution p^{-1/3};
// 8 members with spread 9 = 4.33 log|F|.
std::vector<ScalingVector> centered_grid8() {
  std::vector<ScalingVector> members;
  const double s = 9.0;
  for (int u1 = -1; u1 <= 1; ++u1)
    for (int u2 = -1; u2 <= 1; ++u2) {
      if (u1 == 1 && u2 == 1) continue;
      members.push_back(sv_log3(u1 * s, u2 * s, -(u1 + u2) * s));
    }
  return members;
}

// Cone family for the positive-chamber criteria: generators (1,0,-1) and
// (0,1,-1), theta = 2^32 so that both the spread and the floor are exactly
// 8 log 16.
ScalingFamily criterion_cone() {
  Eigen::VectorXd w1(3), w2(3);
  w1 << 1, 0, -1;
  w2 << 0, 1, -1;
  return build_cone_family(
      2, 1, {ScalingVector::from_log(w1), ScalingVector::from_log(w2)}, 4,
      4294967296.0);
}

struct NuWeibull {
  std::vector<double> samples;
  double ks_vs(double scale, double shape) const {
    return ks_distance(samples, [&](double t) {
      return WeibullRef{scale, shape}.cdf(t);
    });
  }
};

NuWeibull run_nu_weibull(const RegularPair& pair, const ScalingFamily& family,
                         long n, std::uint64_t seed) {
  NuWeibull out;
  const double dn = delta_n(pair, double(family.members.size()));
  const long bits = 448;  // max q-range is 2^256; generous guard
  out.samples.resize(n);
  for (long i = 0; i < n; ++i) {
    SplitMix64 rng(derive_seed(seed, i));
    ExactNu lat = sample_exact_nu(2, 1, bits, rng);
    auto m = exact_member_minima(pair, family.members, lat);
    out.samples[i] = *std::min_element(m.begin(), m.end()) / dn;
  }
  return out;
}

void criterion_1_and_2() {
  const long n = 20000;
  auto t0 = Clock::now();
  std::vector<double> counts(n);
  for (long i = 0; i < n; ++i) {
    SplitMix64 rng(derive_seed(101, i));
    ExactMu lat = sample_exact_mu(3, kPinnedPrime, rng);
    counts[i] = double(exact_siegel_transform(lat, 0.8));
  }
  double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();

  double sum = 0, sumsq = 0;
  for (double v : counts) {
    sum += v;
    sumsq += v * v;
  }
  double mean = sum / n, var = std::max(0.0, sumsq / n - mean * mean);
  double se = std::sqrt(var / n);
  double ref = 4.096 / zeta(3);
  double z = (mean - ref) / se;
  report(1, std::abs(z) <= 4.0 && elapsed <= 120.0,
         fmt("first-moment identity: mean %.4f vs %.5f (z = %+.2f), %.0f s",
             mean, ref, z, elapsed));

  // second moment at Vol = 0.5 on fresh draws
  const double r_half = 0.5 * std::cbrt(0.5);
  sum = sumsq = 0;
  for (long i = 0; i < n; ++i) {
    SplitMix64 rng(derive_seed(102, i));
    ExactMu lat = sample_exact_mu(3, kPinnedPrime, rng);
    double chi = double(exact_siegel_transform(lat, r_half));
    double sq = chi * chi;
    sum += sq;
    sumsq += sq * sq;
  }
  mean = sum / n;
  var = std::max(0.0, sumsq / n - mean * mean);
  se = std::sqrt(var / n);
  double ratio = 0.5 / zeta(3);
  ref = 2 * ratio + ratio * ratio;
  z = (mean - ref) / se;
  report(2, std::abs(z) <= 4.0,
         fmt("second-moment identity: mean %.4f vs %.5f (z = %+.2f)", mean,
             ref, z));
}

void criterion_3() {
  const long n = 50000;
  bool all = true;
  std::string detail = "hitting bands:";
  for (double volume : {0.05, 0.1, 0.2}) {
    double radius = 0.5 * std::cbrt(volume);
    long k = 0;
    for (long i = 0; i < n; ++i) {
      SplitMix64 rng(derive_seed(103, i));
      ExactMu lat = sample_exact_mu(3, kPinnedPrime, rng);
      k += exact_hits(lat, radius) ? 1 : 0;
    }
    double phat = double(k) / n;
    double se = std::sqrt(phat * (1 - phat) / n);
    HitBounds b = hitting_prob_bounds(volume, 3);
    bool pass = phat >= b.lower - 4 * se && phat <= b.upper + 4 * se;
    all = all && pass;
    detail += fmt(" V=%.2f: %.5f in [%.5f, %.5f]+-4se", volume, phat, b.lower,
                  b.upper);
  }
  report(3, all, detail);
}

void criterion_4(const ScalingFamily& cone) {
  auto pair = RegularPair::normed_strip(2, 1);
  auto tc = theorem_constants(pair, 3);
  NuWeibull run = run_nu_weibull(pair, cone, 4000, 104);
  double ks = run.ks_vs(tc.weibull_scale, tc.weibull_shape);
  bool family_ok = cone.spread >= 8 * std::log(16.0) - 1e-9 &&
                   cone.min_floor >= 8 * std::log(16.0) - 1e-9;
  report(4, ks <= 0.10 && family_ok,
         fmt("Dirichlet law: KS %.4f vs Wei(%.5f, 2) <= 0.10 "
             "(spread %.2f, floor %.2f)",
             ks, tc.weibull_scale, cone.spread, cone.min_floor));
}

void criterion_5(const ScalingFamily& cone) {
  auto pair = RegularPair::product_strip(2, 1);
  NuWeibull run = run_nu_weibull(pair, cone, 4000, 105);
  const double stated_scale = 0.5 * zeta(3);  // 2^{-1} zeta(3) / c_2
  double ks = run.ks_vs(stated_scale, 1.0);

  // diagnostics: the constant the general machinery derives, and the
  // finite-size reference built from the exact sublevel volume
  auto tc = theorem_constants(pair, 3);
  double ks_derived = run.ks_vs(tc.weibull_scale, tc.weibull_shape);
  const double dn = delta_n(pair, 16.0);
  double z3 = zeta(3);
  double ks_exact_vol = ks_distance(run.samples, [&](double t) {
    if (t <= 0) return 0.0;
    double s = dn * t;
    if (s >= 1) return 1.0;
    double vol = 8 * s * (1 - std::log(s));
    double per = std::min(1.0, vol / (2 * z3));
    return 1.0 - std::pow(1.0 - per, 16.0);
  });
  report(5, ks <= 0.12,
         fmt("Gallagher law: KS %.4f vs Wei(%.5f, 1) <= 0.12 "
             "[diagnostics: KS %.4f vs derived scale %.5f; KS %.4f vs the "
             "exact-volume finite-size law]",
             ks, stated_scale, ks_derived, tc.weibull_scale, ks_exact_vol));
}

std::vector<std::vector<double>> mu_member_minima(
    const RegularPair& pair, const std::vector<ScalingVector>& members, long n,
    std::uint64_t seed) {
  std::vector<std::vector<double>> minima(n);
  for (long i = 0; i < n; ++i) {
    SplitMix64 rng(derive_seed(seed, i));
    ExactMu lat = sample_exact_mu(3, kBigPrime, rng);
    minima[i] = exact_member_minima(pair, members, lat);
  }
  return minima;
}

void criterion_6() {
  auto ball = RegularPair::norm_ball_sup(3);
  auto tc = theorem_constants(ball, 3);
  auto members = centered_grid8();
  const double dn = delta_n(ball, double(members.size()));
  const long n = 4000;
  auto minima = mu_member_minima(ball, members, n, 106);
  std::vector<double> samples(n);
  for (long i = 0; i < n; ++i)
    samples[i] = *std::min_element(minima[i].begin(), minima[i].end()) / dn;
  double ks = ks_distance(samples, [&](double t) {
    return WeibullRef{tc.weibull_scale, tc.weibull_shape}.cdf(t);
  });
  report(6, ks <= 0.12,
         fmt("Minkowski law (index-p sampler, |F|=8, spread 9): KS %.4f vs "
             "Wei(%.5f, 3) <= 0.12",
             ks, tc.weibull_scale));
}

void criterion_7() {
  // Counts need per-member hitting probabilities small enough for the
  // Poisson reference at u = 1, so this uses a denser 33-member grid
  // ({-3..2}^2 exponent grid minus three corners, step 3.2).
  auto ball = RegularPair::norm_ball_sup(3);
  auto tc = theorem_constants(ball, 3);
  std::vector<ScalingVector> members;
  for (int u1 = -3; u1 <= 2; ++u1)
    for (int u2 = -3; u2 <= 2; ++u2) {
      if (std::abs(u1) + std::abs(u2) >= 5 && u1 * u2 > 0) continue;
      members.push_back(sv_log3(3.2 * u1, 3.2 * u2, -3.2 * (u1 + u2)));
    }
  const double dn = delta_n(ball, double(members.size()));
  const long n = 4000;
  auto minima = mu_member_minima(ball, members, n, 107);

  bool all = true;
  std::string detail = fmt("Poisson counts (|F|=%zu):", members.size());
  for (double u : {0.7, 1.0}) {
    std::vector<long> counts(n);
    for (long i = 0; i < n; ++i)
      counts[i] = std::count_if(minima[i].begin(), minima[i].end(),
                                [&](double v) { return v < dn * u; });
    double m = tc.m_o_coefficient * std::pow(u, 3.0);
    auto moments = factorial_moments(counts, 2, m);
    for (const auto& fm : moments) {
      double tol = std::max(0.15 * fm.reference, 4 * fm.standard_error);
      bool pass = std::abs(fm.estimate - fm.reference) <= tol;
      all = all && pass;
      detail += fmt(" u=%.1f r=%d: %.4f vs %.4f", u, fm.r, fm.estimate,
                    fm.reference);
    }
  }
  report(7, all, detail);
}

void criterion_8() {
  SplitMix64 rng(108);
  bool all = true;
  std::string worst;
  double worst_gap = 0;

  auto note = [&](const char* name, double gap, double tol) {
    if (gap > tol) all = false;
    if (gap > worst_gap) {
      worst_gap = gap;
      worst = name;
    }
  };

  // dirichlet_k / gallagher_g vs eta_tilde over apply_scaling over Lambda_alpha
  for (int trial = 0; trial < 100; ++trial) {
    int d1 = 1 + int(rng.below(2)), d2 = 3 - d1;
    Eigen::MatrixXd alpha(d1, d2);
    for (int i = 0; i < d1; ++i)
      for (int j = 0; j < d2; ++j) alpha(i, j) = rng.uniform01();
    Eigen::VectorXd l(3);
    double a = 0.2 + 2.0 * rng.uniform01(), b = 0.2 + 2.0 * rng.uniform01();
    if (d1 == 2)
      l << a, b, -(a + b);
    else
      l << a + b, -a, -b;
    ScalingVector t = ScalingVector::from_log(l);
    Lattice transformed = apply_scaling(t, unitriangular_lattice(alpha));
    note("dirichlet",
         std::abs(dirichlet_k(alpha, t) -
                  eta_tilde(RegularPair::normed_strip(d1, d2), transformed)),
         1e-9);
    note("gallagher",
         std::abs(gallagher_g(alpha, t) -
                  eta_tilde(RegularPair::product_strip(d1, d2), transformed)),
         1e-9);
  }

  // minkowski_c vs the inverse-scaling formulation, on random unimodular
  // lattices built from rotations and shears
  for (int trial = 0; trial < 100; ++trial) {
    int d = 2 + int(rng.below(2));
    Eigen::MatrixXd bmat = Eigen::MatrixXd::Identity(d, d);
    for (int k = 0; k < 3 * d; ++k) {
      int i = int(rng.below(d)), j = int(rng.below(d));
      if (i == j) continue;
      double angle = 2 * M_PI * rng.uniform01();
      Eigen::MatrixXd g = Eigen::MatrixXd::Identity(d, d);
      g(i, i) = g(j, j) = std::cos(angle);
      g(i, j) = -std::sin(angle);
      g(j, i) = std::sin(angle);
      Eigen::MatrixXd s = Eigen::MatrixXd::Identity(d, d);
      s(i, j) = 2 * rng.uniform01() - 1;
      bmat = g * bmat * s;
    }
    bmat /= std::pow(std::abs(bmat.determinant()), 1.0 / d);
    Lattice lat(bmat);
    Eigen::VectorXd l(d);
    double sum = 0;
    for (int i = 0; i < d - 1; ++i) {
      l[i] = (2 * rng.uniform01() - 1) * 1.5;
      sum += l[i];
    }
    l[d - 1] = -sum;
    ScalingVector t = ScalingVector::from_log(l);
    note("minkowski-dual",
         std::abs(minkowski_c(lat, t) -
                  eta_tilde(RegularPair::norm_ball_sup(d),
                            apply_scaling(t.inverse(), lat))),
         1e-9);

    // brute-force oracle for the same instance
    Eigen::VectorXd tv = t.values();
    double brute = kNoPoint;
    std::vector<long long> x(d, -14);
    while (true) {
      bool zero = true;
      for (int i = 0; i < d; ++i) zero &= (x[i] == 0);
      if (!zero) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(d);
        for (int i = 0; i < d; ++i) c += double(x[i]) * lat.basis().col(i);
        bool inside = true;
        for (int p = 0; p < d; ++p)
          inside &= std::abs(c[p]) <= tv[p] * (1 + 1e-9);
        if (inside)
          brute =
              std::min(brute, (c.cwiseAbs().cwiseQuotient(tv)).maxCoeff());
      }
      int k = 0;
      while (k < d && x[k] == 14) x[k++] = -14;
      if (k == d) break;
      ++x[k];
    }
    note("minkowski-brute", std::abs(minkowski_c(lat, t) - brute), 1e-9);
  }

  // enumeration coefficients agree exactly with a naive loop on fixtures
  Eigen::MatrixXd fb(2, 2);
  fb << 5, 2, 0, 1;
  fb /= std::sqrt(5.0);
  auto pts = enumerate_in_weighted_box(Lattice(fb), ScalingVector::ones(2), 1.0);
  long exact_matches = 0;
  for (const auto& p : pts) {
    Eigen::Vector2d c = fb * p.coeffs.cast<double>();
    if (std::abs(c.cwiseAbs().maxCoeff()) <= 1 + 1e-9) ++exact_matches;
  }
  if (exact_matches != long(pts.size())) all = false;

  report(8, all,
         fmt("two-path equalities and oracles: worst gap %.2e (%s)", worst_gap,
             worst.c_str()));
}

void criterion_9() {
  bool all = true;
  std::string detail = "volumes:";
  int stream = 0;
  for (double t : {0.5, 0.1, 0.01}) {
    for (const auto& pair :
         {RegularPair::norm_ball_sup(3), RegularPair::product_form(2),
          RegularPair::product_form(3), RegularPair::normed_strip(2, 1),
          RegularPair::product_strip(2, 1)}) {
      McVolume mc = mc_volume(pair, t, 200000, derive_seed(109, stream++));
      double ref = volume_C(pair, t);
      if (!(std::abs(mc.estimate - ref) <= 4 * mc.standard_error + 1e-12))
        all = false;
    }
  }

  std::vector<double> grid, vols;
  for (int k = 20; k <= 90; k += 10) {
    grid.push_back(std::pow(10.0, -k));
    vols.push_back(volume_C(RegularPair::product_form(3), grid.back()));
  }
  AbcFit fit = fit_abc(grid, vols);
  bool fit_ok = std::abs(fit.a - 1.0) <= 0.05 && fit.b == 2.0 &&
                std::abs(fit.c - 4.0) / 4.0 <= 0.10;
  all = all && fit_ok;
  detail += fmt(" all closed-form kinds within 4 SE; fit (a,b,c) = "
                "(%.4f, %.0f, %.4f) vs (1, 2, 4)",
                fit.a, fit.b, fit.c);
  report(9, all, detail);
}

void criterion_10() {
  auto ball = RegularPair::norm_ball_sup(3);
  MeasureSpec mu;
  mu.kind = MeasureSpec::Kind::Mu;
  mu.d = 3;
  mu.p = kBigPrime;
  std::vector<StageSpec> stages;
  for (int ell : {2, 3, 4, 5}) {
    StageSpec s;
    s.ell = ell;
    s.omega = std::log(double(ell));
    stages.push_back(s);
  }
  auto rows = loglaw_trend(ball, mu, 1.0, stages, 500, 110);
  bool decreasing = true;
  for (std::size_t i = 1; i < rows.size(); ++i)
    decreasing = decreasing && rows[i].median < rows[i - 1].median;
  bool final_drop = rows.back().median <= 0.6 * rows.front().median;
  std::string detail = "log-law medians:";
  for (const auto& r : rows) detail += fmt(" %.4f", r.median);
  detail += fmt(" (final/initial %.2f <= 0.6)",
                rows.back().median / rows.front().median);
  report(10, decreasing && final_drop, detail);
}

void criterion_11() {
  nlohmann::json config = {
      {"mode", "weibull"},
      {"pair", {{"kind", "strip"}, {"d1", 2}, {"d2", 1}}},
      {"measure", {{"kind", "nu"}, {"d1", 2}, {"d2", 1}}},
      {"family",
       {{"type", "cone"},
        {"d1", 2},
        {"d2", 1},
        {"generators", {{1.0, 0.0, -1.0}, {0.0, 1.0, -1.0}}},
        {"ell", 4},
        {"theta", 4294967296.0}}},
      {"n_samples", 200},
      {"seed", 111}};
  auto one = run_experiment(config, 1);
  auto eight = run_experiment(config, 8);
  auto rerun = run_experiment(config, 1);
  bool pass = one.files == eight.files && one.files == rerun.files;
  report(11, pass,
         fmt("determinism: %zu output files byte-identical across thread "
             "counts 1 and 8 and across re-runs",
             one.files.size()));
}

}  // namespace

int main() {
  auto t0 = Clock::now();
  criterion_1_and_2();
  criterion_3();
  ScalingFamily cone = criterion_cone();
  criterion_4(cone);
  criterion_5(cone);
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  std::printf("%d of 11 criteria passed (%.0f s total)\n", 11 - failures,
              std::chrono::duration<double>(Clock::now() - t0).count());
  return failures == 0 ? 0 : 1;
}
