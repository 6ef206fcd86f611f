#include "latmin/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "latmin/minima.hpp"

namespace latmin {

double zeta(int d) {
  if (d < 2) throw std::domain_error("zeta needs d >= 2");
  // Partial sum to N plus the Euler-Maclaurin tail N^{1-d}/(d-1) + N^{-d}/2;
  // the remainder is below d * N^{-d-1} / 12 < 1e-14 for these N.
  const long n = d == 2 ? 200000 : 20000;
  double sum = 0;
  for (long k = n; k >= 1; --k) sum += std::pow(double(k), -d);
  double nn = double(n);
  sum += std::pow(nn, 1.0 - d) / (d - 1) - 0.5 * std::pow(nn, -d);
  return sum;
}

double weibull_cdf(double scale, double shape, double t) {
  if (!(scale > 0) || !(shape > 0))
    throw std::domain_error("weibull_cdf needs positive scale and shape");
  if (t <= 0) return 0.0;
  return 1.0 - std::exp(-std::pow(scale * t, shape));
}

FiniteSamples filter_finite(const std::vector<double>& samples) {
  FiniteSamples out;
  out.values.reserve(samples.size());
  for (double v : samples) {
    if (std::isinf(v))
      ++out.excluded_inf;
    else
      out.values.push_back(v);
  }
  return out;
}

double ks_distance(std::vector<double> samples,
                   const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::domain_error("ks_distance needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = double(samples.size());
  double d = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double f = cdf(samples[i]);
    d = std::max(d, double(i + 1) / n - f);
    d = std::max(d, f - double(i) / n);
  }
  return d;
}

std::vector<FactorialMoment> factorial_moments(const std::vector<long>& counts,
                                               int r_max, double m) {
  if (r_max < 1) throw std::domain_error("factorial_moments needs r_max >= 1");
  for (long c : counts)
    if (c < 0) throw std::domain_error("counts must be non-negative");
  std::vector<FactorialMoment> out;
  double ref_fact = 1;
  for (int r = 1; r <= r_max; ++r) {
    ref_fact *= r;
    double sum = 0, sumsq = 0;
    for (long c : counts) {
      // binom(c, r)
      double b = 1;
      for (int k = 0; k < r; ++k) b *= double(c - k) / double(r - k);
      if (c < r) b = 0;
      sum += b;
      sumsq += b * b;
    }
    const double n = double(counts.size());
    double mean = counts.empty() ? 0 : sum / n;
    double var = counts.empty() ? 0 : std::max(0.0, sumsq / n - mean * mean);
    double se = counts.empty() ? 0 : std::sqrt(var / n);
    out.push_back({r, mean, std::pow(m, r) / ref_fact, se});
  }
  return out;
}

namespace {

MomentCheck moment_check(const std::vector<double>& values, double reference) {
  if (values.empty()) throw std::domain_error("empty lattice stream");
  double sum = 0, sumsq = 0;
  for (double v : values) {
    sum += v;
    sumsq += v * v;
  }
  const double n = double(values.size());
  double mean = sum / n;
  double var = std::max(0.0, sumsq / n - mean * mean);
  return {mean, std::sqrt(var / n), reference};
}

}  // namespace

MomentCheck verify_siegel(const std::vector<Lattice>& stream,
                          const ScalingVector& t, double radius,
                          std::uint64_t node_budget) {
  if (stream.empty()) throw std::domain_error("empty lattice stream");
  const int d = stream.front().dim();
  if (d < 2) throw std::domain_error("verify_siegel needs d >= 2");
  std::vector<double> values;
  values.reserve(stream.size());
  for (const auto& lat : stream)
    values.push_back(double(siegel_transform(lat, t, radius, node_budget)));
  double volume = std::pow(2 * radius, d);  // Vol(radius * B_T), prod T = 1
  return moment_check(values, volume / zeta(d));
}

MomentCheck verify_rogers(const std::vector<Lattice>& stream,
                          const ScalingVector& t, double radius,
                          std::uint64_t node_budget) {
  if (stream.empty()) throw std::domain_error("empty lattice stream");
  const int d = stream.front().dim();
  if (d < 3)
    throw std::domain_error(
        "the second-moment identity needs d >= 3; it is unavailable in "
        "dimension 2");
  std::vector<double> values;
  values.reserve(stream.size());
  for (const auto& lat : stream) {
    double chi = double(siegel_transform(lat, t, radius, node_budget));
    values.push_back(chi * chi);
  }
  double ratio = std::pow(2 * radius, d) / zeta(d);
  return moment_check(values, 2 * ratio + ratio * ratio);
}

HitBounds hitting_prob_bounds(double volume, int d) {
  if (volume < 0) throw std::domain_error("volume must be non-negative");
  if (d < 3)
    throw std::domain_error("hitting probability bounds need d >= 3");
  double m = volume / (2 * zeta(d));
  return {m - m * m, m, m};
}

std::vector<LoglawRow> loglaw_trend(const RegularPair& pair,
                                    const MeasureSpec& measure, double delta,
                                    const std::vector<StageSpec>& stages,
                                    long n_samples, std::uint64_t seed,
                                    int threads) {
  if (stages.empty()) throw std::invalid_argument("loglaw needs stages");
  if (n_samples < 1) throw std::invalid_argument("loglaw needs samples");
  const int d = measure.dim();
  if (pair.dim() != d) throw std::invalid_argument("pair/measure dimension mismatch");

  // Validity window of the limit statement: delta < d-1 for grid stages,
  // delta < dim(cone) for cone stages.
  for (const auto& st : stages) {
    double cap = st.is_cone ? double(st.generators.size()) : double(d - 1);
    if (!(delta < cap))
      throw std::domain_error("delta must be below " + std::to_string(cap) +
                              " for this schedule");
  }
  if (delta < 0) throw std::domain_error("delta must be non-negative");

  const double weight_exp = delta / pair.a();

  std::vector<LoglawRow> rows;
  for (std::size_t si = 0; si < stages.size(); ++si) {
    const auto& st = stages[si];
    ScalingFamily family =
        st.is_cone
            ? build_cone_family(measure.d1, measure.d2, st.generators, st.ell,
                                st.theta)
            : build_grid_family(d, st.ell, st.omega);

    // per-member weight (log ||T||_inf)^{delta / a}
    std::vector<double> weights;
    weights.reserve(family.members.size());
    for (const auto& t : family.members)
      weights.push_back(std::pow(t.log().maxCoeff(), weight_exp));

    // For the Haar measure the joint law of the per-member values is
    // invariant under a common diagonal translation, so evaluate on the
    // mean-centered family: this keeps every coordinate well inside the
    // resolution of the index-p sampler.  Weights stay with the original
    // members.
    std::vector<ScalingVector> eval_members = family.members;
    if (measure.kind == MeasureSpec::Kind::Mu) {
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
      for (const auto& t : eval_members) mean += t.log();
      mean /= double(eval_members.size());
      for (auto& t : eval_members)
        t = ScalingVector::from_log(t.log() - mean);
    }

    std::vector<double> stat(n_samples);
    auto worker = [&](long begin, long end) {
      for (long i = begin; i < end; ++i) {
        SplitMix64 rng(derive_seed(seed, std::uint64_t(si) << 32 | std::uint64_t(i)));
        std::vector<double> minima;
        if (measure.kind == MeasureSpec::Kind::Mu) {
          ExactMu lat = sample_exact_mu(d, measure.p, rng);
          minima = exact_member_minima(pair, eval_members, lat);
        } else {
          long bits = 64;  // moderate exponents in log-law schedules
          for (const auto& t : eval_members)
            bits = std::max(bits, long(-t.log().minCoeff() * 1.4427) + 128);
          bits = (bits + 63) / 64 * 64;
          ExactNu lat = sample_exact_nu(measure.d1, measure.d2, bits, rng);
          minima = exact_member_minima(pair, eval_members, lat);
        }
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < minima.size(); ++k)
          best = std::min(best, weights[k] * minima[k]);
        stat[i] = best;
      }
    };
    if (threads <= 1) {
      worker(0, n_samples);
    } else {
      std::vector<std::thread> pool;
      long chunk = (n_samples + threads - 1) / threads;
      for (int w = 0; w < threads; ++w) {
        long b = w * chunk, e = std::min<long>(n_samples, b + chunk);
        if (b < e) pool.emplace_back(worker, b, e);
      }
      for (auto& th : pool) th.join();
    }

    std::sort(stat.begin(), stat.end());
    double median = n_samples % 2 == 1
                        ? stat[n_samples / 2]
                        : 0.5 * (stat[n_samples / 2 - 1] + stat[n_samples / 2]);
    double logn = std::log(double(family.members.size()));
    rows.push_back({int(si), st.ell, family.spread / logn, median});
  }
  return rows;
}

}  // namespace latmin
