#include "latmin/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "latmin/minima.hpp"
#include "latmin/stats.hpp"

namespace latmin {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string config_hash(const json& config) {
  std::string s = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
  return buf;
}

void reject_unknown_keys(const json& config,
                         std::initializer_list<const char*> allowed) {
  if (!config.is_object())
    throw std::invalid_argument("config must be a JSON object");
  for (auto it = config.begin(); it != config.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) known |= (it.key() == k);
    if (!known)
      throw std::invalid_argument("unknown config key \"" + it.key() + "\"");
  }
}

namespace {

template <typename T>
T require(const json& config, const char* key) {
  if (!config.contains(key))
    throw std::invalid_argument(std::string("missing config key \"") + key +
                                "\"");
  try {
    return config.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("config key \"") + key +
                                "\" has the wrong type");
  }
}

template <typename T>
T get_or(const json& config, const char* key, T fallback) {
  if (!config.contains(key)) return fallback;
  try {
    return config.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("config key \"") + key +
                                "\" has the wrong type");
  }
}

ScalingVector scaling_from_json(const json& arr) {
  auto v = arr.get<std::vector<double>>();
  Eigen::VectorXd log_t(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) log_t[i] = v[i];
  return ScalingVector::from_log(std::move(log_t));
}

json scaling_to_json(const ScalingVector& t) {
  json arr = json::array();
  for (int i = 0; i < t.dim(); ++i) arr.push_back(t.log()[i]);
  return arr;
}

// Runs fn(i) for i in [0, n) over the requested number of threads; results
// must be written into per-index slots so the merge is order independent.
template <typename Fn>
void parallel_for(long n, int threads, Fn&& fn) {
  if (threads <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  long chunk = (n + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    long b = w * chunk, e = std::min(n, b + chunk);
    if (b < e)
      pool.emplace_back([&fn, b, e] {
        for (long i = b; i < e; ++i) fn(i);
      });
  }
  for (auto& th : pool) th.join();
}

json lattice_to_json(const Lattice& lat) {
  json rows = json::array();
  for (int i = 0; i < lat.dim(); ++i) {
    json row = json::array();
    for (int j = 0; j < lat.dim(); ++j) row.push_back(lat.basis()(i, j));
    rows.push_back(row);
  }
  return json{{"dim", lat.dim()}, {"basis", rows}};
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

std::string csv_header(const json& embedded_config) {
  std::string out;
  out += "# config: " + embedded_config.dump() + "\n";
  out += "# config_hash: " + config_hash(embedded_config) + "\n";
  return out;
}

}  // namespace

RegularPair parse_pair(const json& spec) {
  reject_unknown_keys(spec, {"kind", "d", "d1", "d2", "terms", "abc"});
  auto kind = require<std::string>(spec, "kind");
  if (kind == "ball") return RegularPair::norm_ball_sup(require<int>(spec, "d"));
  if (kind == "product") return RegularPair::product_form(require<int>(spec, "d"));
  if (kind == "strip")
    return RegularPair::normed_strip(require<int>(spec, "d1"),
                                     require<int>(spec, "d2"));
  if (kind == "product_strip")
    return RegularPair::product_strip(require<int>(spec, "d1"),
                                      require<int>(spec, "d2"));
  if (kind == "polynomial") {
    int d = require<int>(spec, "d");
    std::vector<Polynomial::Term> terms;
    for (const auto& t : spec.at("terms")) {
      reject_unknown_keys(t, {"coef", "powers"});
      terms.push_back({require<double>(t, "coef"),
                       require<std::vector<int>>(t, "powers")});
    }
    Polynomial f(d, std::move(terms));
    if (spec.contains("abc")) {
      auto abc = require<std::vector<double>>(spec, "abc");
      if (abc.size() != 3)
        throw std::invalid_argument("pair abc must be [a, b, c]");
      return RegularPair::polynomial(std::move(f), abc[0], abc[1], abc[2]);
    }
    return RegularPair::polynomial(std::move(f));
  }
  throw std::invalid_argument("unknown pair kind \"" + kind + "\"");
}

MeasureSpec parse_measure(const json& spec) {
  reject_unknown_keys(spec, {"kind", "d", "d1", "d2", "p"});
  MeasureSpec m;
  auto kind = require<std::string>(spec, "kind");
  if (kind == "mu") {
    m.kind = MeasureSpec::Kind::Mu;
    m.d = require<int>(spec, "d");
    m.p = get_or<std::uint64_t>(spec, "p", 2147483647ULL);
    if (!is_prime_u64(m.p))
      throw std::domain_error("measure parameter p must be prime");
  } else if (kind == "nu") {
    m.kind = MeasureSpec::Kind::Nu;
    m.d1 = require<int>(spec, "d1");
    m.d2 = require<int>(spec, "d2");
  } else {
    throw std::invalid_argument("unknown measure kind \"" + kind + "\"");
  }
  return m;
}

std::vector<ScalingVector> parse_family(const json& spec, int dim,
                                        ScalingFamily* family_out) {
  reject_unknown_keys(spec, {"type", "ell", "omega", "theta", "generators",
                             "members", "split", "d1", "d2"});
  auto type = require<std::string>(spec, "type");
  ScalingFamily fam;
  if (type == "grid") {
    fam = build_grid_family(dim, require<int>(spec, "ell"),
                            require<double>(spec, "omega"));
  } else if (type == "cone") {
    std::vector<ScalingVector> gens;
    for (const auto& g : spec.at("generators")) gens.push_back(scaling_from_json(g));
    fam = build_cone_family(require<int>(spec, "d1"), require<int>(spec, "d2"),
                            gens, require<int>(spec, "ell"),
                            require<double>(spec, "theta"));
  } else if (type == "members") {
    std::vector<ScalingVector> members;
    for (const auto& t : spec.at("members")) members.push_back(scaling_from_json(t));
    std::optional<std::pair<int, int>> split;
    if (spec.contains("split")) {
      auto s = require<std::vector<int>>(spec, "split");
      if (s.size() != 2) throw std::invalid_argument("split must be [d1, d2]");
      split = std::make_pair(s[0], s[1]);
    }
    fam = family_from_members(std::move(members), split);
  } else {
    throw std::invalid_argument("unknown family type \"" + type + "\"");
  }
  for (const auto& t : fam.members)
    if (t.dim() != dim)
      throw std::invalid_argument("family member dimension mismatch");
  if (family_out) *family_out = fam;
  return fam.members;
}

RunOutput run_sample(const json& config) {
  reject_unknown_keys(config, {"measure", "d", "d1", "d2", "n", "seed", "p"});
  auto measure = require<std::string>(config, "measure");
  long n = require<long>(config, "n");
  auto seed = require<std::uint64_t>(config, "seed");
  if (n < 1) throw std::invalid_argument("n must be >= 1");

  std::string jsonl;
  if (measure == "mu") {
    int d = require<int>(config, "d");
    auto p = require<std::uint64_t>(config, "p");
    if (!is_prime_u64(p)) throw std::domain_error("p must be prime");
    for (long i = 0; i < n; ++i) {
      SplitMix64 rng(derive_seed(seed, i));
      jsonl += lattice_to_json(sample_mu(d, p, rng)).dump() + "\n";
    }
  } else if (measure == "nu") {
    int d1 = require<int>(config, "d1"), d2 = require<int>(config, "d2");
    for (long i = 0; i < n; ++i) {
      SplitMix64 rng(derive_seed(seed, i));
      NuSample s = sample_nu(d1, d2, rng);
      json line = lattice_to_json(s.lattice);
      line["alpha"] = matrix_to_json(s.alpha);
      jsonl += line.dump() + "\n";
    }
  } else {
    throw std::invalid_argument("measure must be \"mu\" or \"nu\"");
  }

  json resolved = config;
  RunOutput out;
  out.summary = {{"command", "sample"},
                 {"config", resolved},
                 {"config_hash", config_hash(resolved)},
                 {"n", n},
                 {"seed", seed}};
  out.files["samples.jsonl"] = jsonl;
  return out;
}

namespace {

// Automatic alpha precision: enough bits that the deepest contraction in the
// family still leaves 128 guard bits.
long auto_alpha_bits(const std::vector<ScalingVector>& family) {
  double worst = 0;
  for (const auto& t : family)
    worst = std::max(worst, -t.log().minCoeff());
  long bits = long(worst * 1.4426950408889634) + 128;
  return (bits + 63) / 64 * 64;
}

struct MemberMinima {
  std::vector<std::vector<double>> per_sample;  // [sample][member]
};

MemberMinima compute_member_minima(const RegularPair& pair,
                                   const MeasureSpec& measure,
                                   const std::vector<ScalingVector>& family,
                                   long n_samples, std::uint64_t seed,
                                   long alpha_bits, int threads) {
  MemberMinima mm;
  mm.per_sample.assign(n_samples, {});
  parallel_for(n_samples, threads, [&](long i) {
    SplitMix64 rng(derive_seed(seed, i));
    if (measure.kind == MeasureSpec::Kind::Mu) {
      ExactMu lat = sample_exact_mu(measure.d, measure.p, rng);
      mm.per_sample[i] = exact_member_minima(pair, family, lat);
    } else {
      ExactNu lat = sample_exact_nu(measure.d1, measure.d2, alpha_bits, rng);
      mm.per_sample[i] = exact_member_minima(pair, family, lat);
    }
  });
  return mm;
}

}  // namespace

RunOutput run_experiment(const json& config, int threads) {
  reject_unknown_keys(config, {"mode", "pair", "measure", "family", "n_samples",
                               "u_grid", "r_max", "alpha_bits", "seed",
                               "threads"});
  auto mode = require<std::string>(config, "mode");
  if (mode != "weibull" && mode != "poisson")
    throw std::invalid_argument("mode must be \"weibull\" or \"poisson\"");
  RegularPair pair = parse_pair(config.at("pair"));
  MeasureSpec measure = parse_measure(config.at("measure"));
  const int d = measure.dim();
  if (pair.dim() != d)
    throw std::invalid_argument("pair and measure dimensions differ");
  if (measure.kind == MeasureSpec::Kind::Mu && d == 2)
    throw std::domain_error(
        "d = 2 with the mu measure has no limit-law reference: the "
        "second-moment bound behind it needs d >= 3");

  ScalingFamily family;
  parse_family(config.at("family"), d, &family);
  long n_samples = require<long>(config, "n_samples");
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  auto seed = require<std::uint64_t>(config, "seed");

  long alpha_bits = get_or<long>(config, "alpha_bits", 0);
  if (alpha_bits == 0) alpha_bits = auto_alpha_bits(family.members);

  const double dn = delta_n(pair, double(family.members.size()));
  TheoremConstants tc = theorem_constants(pair, d);

  json resolved = config;
  resolved.erase("threads");  // execution metadata, not provenance
  resolved["alpha_bits"] = alpha_bits;

  json summary;
  summary["command"] = "experiment";
  summary["mode"] = mode;
  summary["config"] = resolved;
  summary["config_hash"] = config_hash(resolved);
  summary["seed"] = seed;
  summary["n_samples"] = n_samples;
  summary["family_size"] = family.members.size();
  summary["family_spread"] = family.spread;
  if (family.split) summary["family_min_floor"] = family.min_floor;
  summary["delta_n"] = dn;
  summary["reference"] = {{"m_o_coefficient", tc.m_o_coefficient},
                          {"weibull_scale", tc.weibull_scale},
                          {"weibull_shape", tc.weibull_shape}};

  MemberMinima mm = compute_member_minima(pair, measure, family.members,
                                          n_samples, seed, alpha_bits, threads);

  RunOutput out;
  if (mode == "weibull") {
    std::vector<double> samples(n_samples);
    for (long i = 0; i < n_samples; ++i) {
      double best = kNoPoint;
      for (double v : mm.per_sample[i]) best = std::min(best, v);
      samples[i] = best / dn;
    }
    std::string csv = csv_header(resolved);
    csv += "sample_index,value\n";
    for (long i = 0; i < n_samples; ++i)
      csv += std::to_string(i) + "," + format_double(samples[i]) + "\n";
    out.files["samples.csv"] = csv;

    FiniteSamples finite = filter_finite(samples);
    WeibullRef ref{tc.weibull_scale, tc.weibull_shape};
    double ks = ks_distance(finite.values,
                            [&](double t) { return ref.cdf(t); });
    summary["ks_distance"] = ks;
    summary["excluded_inf"] = finite.excluded_inf;
  } else {
    auto u_grid = require<std::vector<double>>(config, "u_grid");
    if (u_grid.empty()) throw std::invalid_argument("u_grid must be nonempty");
    int r_max = get_or<int>(config, "r_max", 2);
    json tables = json::array();
    for (std::size_t k = 0; k < u_grid.size(); ++k) {
      double u = u_grid[k];
      if (!(u >= 0)) throw std::invalid_argument("u_grid entries must be >= 0");
      double threshold = dn * u;
      std::vector<long> counts(n_samples);
      for (long i = 0; i < n_samples; ++i) {
        long c = 0;
        for (double v : mm.per_sample[i]) c += v < threshold ? 1 : 0;
        counts[i] = c;
      }
      double m = tc.m_o_coefficient * std::pow(u, tc.weibull_shape);
      auto moments = factorial_moments(counts, r_max, m);
      json rows = json::array();
      for (const auto& fm : moments)
        rows.push_back({{"r", fm.r},
                        {"estimate", fm.estimate},
                        {"reference", fm.reference},
                        {"standard_error", fm.standard_error}});
      tables.push_back({{"u", u}, {"poisson_mean", m}, {"moments", rows}});

      std::string csv = csv_header(resolved);
      csv += "sample_index,value\n";
      for (long i = 0; i < n_samples; ++i)
        csv += std::to_string(i) + "," + std::to_string(counts[i]) + "\n";
      out.files["counts_u" + std::to_string(k) + ".csv"] = csv;
    }
    summary["factorial_moments"] = tables;
  }

  out.summary = std::move(summary);
  out.files["summary.json"] = out.summary.dump(2) + "\n";
  return out;
}

RunOutput run_verify(const json& config, int threads) {
  reject_unknown_keys(config,
                      {"identity", "d", "volume", "volumes", "n", "p", "seed",
                       "threads"});
  auto identity = require<std::string>(config, "identity");
  int d = require<int>(config, "d");
  long n = require<long>(config, "n");
  auto seed = require<std::uint64_t>(config, "seed");
  auto p = get_or<std::uint64_t>(config, "p", 2147483647ULL);
  if (!is_prime_u64(p)) throw std::domain_error("p must be prime");
  if (n < 2) throw std::invalid_argument("n must be >= 2");
  if (d < 2) throw std::invalid_argument("d must be >= 2");

  json resolved = config;
  resolved.erase("threads");
  resolved["p"] = p;

  RunOutput out;
  json rows = json::array();
  bool ok = true;

  auto run_counts = [&](double volume, bool squared) {
    double radius = 0.5 * std::pow(volume, 1.0 / d);
    std::vector<double> values(n);
    parallel_for(n, threads, [&](long i) {
      SplitMix64 rng(derive_seed(seed, i));
      ExactMu lat = sample_exact_mu(d, p, rng);
      double chi = double(exact_siegel_transform(lat, radius));
      values[i] = squared ? chi * chi : chi;
    });
    double sum = 0, sumsq = 0;
    for (double v : values) {
      sum += v;
      sumsq += v * v;
    }
    double mean = sum / double(n);
    double var = std::max(0.0, sumsq / double(n) - mean * mean);
    return MomentCheck{mean, std::sqrt(var / double(n)), 0.0};
  };

  if (identity == "siegel" || identity == "rogers") {
    double volume = require<double>(config, "volume");
    if (!(volume > 0)) throw std::invalid_argument("volume must be positive");
    if (identity == "rogers" && d < 3)
      throw std::domain_error(
          "the second-moment identity needs d >= 3; it is unavailable in "
          "dimension 2");
    MomentCheck check = run_counts(volume, identity == "rogers");
    double ratio = volume / zeta(d);
    check.reference = identity == "rogers" ? 2 * ratio + ratio * ratio : ratio;
    ok = std::abs(check.z()) <= 4.0;
    rows.push_back({{"identity", identity},
                    {"volume", volume},
                    {"reference", check.reference},
                    {"estimate", check.estimate},
                    {"standard_error", check.standard_error},
                    {"z", check.z()},
                    {"pass", ok}});
  } else if (identity == "lemmab") {
    if (d < 3) throw std::domain_error("hitting probability bounds need d >= 3");
    auto volumes = require<std::vector<double>>(config, "volumes");
    if (volumes.empty()) throw std::invalid_argument("volumes must be nonempty");
    for (double volume : volumes) {
      if (!(volume > 0)) throw std::invalid_argument("volumes must be positive");
      double radius = 0.5 * std::pow(volume, 1.0 / d);
      std::vector<char> hit(n);
      parallel_for(n, threads, [&](long i) {
        SplitMix64 rng(derive_seed(seed, i));
        ExactMu lat = sample_exact_mu(d, p, rng);
        hit[i] = exact_hits(lat, radius) ? 1 : 0;
      });
      long k = 0;
      for (char h : hit) k += h;
      double phat = double(k) / double(n);
      double se = std::sqrt(std::max(phat * (1 - phat), 1e-12) / double(n));
      HitBounds bounds = hitting_prob_bounds(volume, d);
      bool pass = phat >= bounds.lower - 4 * se && phat <= bounds.upper + 4 * se;
      ok = ok && pass;
      rows.push_back({{"identity", "lemmab"},
                      {"volume", volume},
                      {"interval", {bounds.lower, bounds.upper}},
                      {"estimate", phat},
                      {"standard_error", se},
                      {"pass", pass}});
    }
  } else {
    throw std::invalid_argument("identity must be siegel, rogers, or lemmab");
  }

  out.summary = {{"command", "verify"},
                 {"config", resolved},
                 {"config_hash", config_hash(resolved)},
                 {"rows", rows},
                 {"pass", ok}};
  out.files["verify.json"] = out.summary.dump(2) + "\n";
  out.verified = ok;
  return out;
}

RunOutput run_loglaw(const json& config, int threads) {
  reject_unknown_keys(config, {"pair", "measure", "delta", "stages",
                               "n_samples", "seed", "threads"});
  RegularPair pair = parse_pair(config.at("pair"));
  MeasureSpec measure = parse_measure(config.at("measure"));
  double delta = require<double>(config, "delta");
  long n_samples = require<long>(config, "n_samples");
  auto seed = require<std::uint64_t>(config, "seed");

  std::vector<StageSpec> stages;
  for (const auto& s : config.at("stages")) {
    reject_unknown_keys(s, {"ell", "omega", "generators", "theta"});
    StageSpec stage;
    stage.ell = require<int>(s, "ell");
    if (s.contains("generators")) {
      stage.is_cone = true;
      for (const auto& g : s.at("generators"))
        stage.generators.push_back(scaling_from_json(g));
      stage.theta = require<double>(s, "theta");
    } else if (s.contains("omega") && s.at("omega").is_string()) {
      if (s.at("omega").get<std::string>() != "log_ell")
        throw std::invalid_argument("omega must be a number or \"log_ell\"");
      stage.omega = std::log(double(stage.ell));
    } else {
      stage.omega = require<double>(s, "omega");
    }
    stages.push_back(std::move(stage));
  }

  auto rows = loglaw_trend(pair, measure, delta, stages, n_samples, seed, threads);

  json resolved = config;
  resolved.erase("threads");

  std::string csv = csv_header(resolved);
  csv += "stage,ell,spread_ratio,median\n";
  json jrows = json::array();
  for (const auto& r : rows) {
    csv += std::to_string(r.stage) + "," + std::to_string(r.ell) + "," +
           format_double(r.spread_ratio) + "," + format_double(r.median) + "\n";
    jrows.push_back({{"stage", r.stage},
                     {"ell", r.ell},
                     {"spread_ratio", r.spread_ratio},
                     {"median", r.median}});
  }

  RunOutput out;
  out.summary = {{"command", "loglaw"},
                 {"config", resolved},
                 {"config_hash", config_hash(resolved)},
                 {"rows", jrows}};
  out.files["loglaw.csv"] = csv;
  out.files["loglaw.json"] = out.summary.dump(2) + "\n";
  return out;
}

RunOutput run_volume(const json& config) {
  reject_unknown_keys(config, {"pair", "t_grid", "mc_samples", "seed", "fit"});
  RegularPair pair = parse_pair(config.at("pair"));
  auto t_grid = require<std::vector<double>>(config, "t_grid");
  long mc_samples = get_or<long>(config, "mc_samples", 100000);
  auto seed = require<std::uint64_t>(config, "seed");
  bool fit = get_or<bool>(config, "fit", false);
  if (t_grid.empty()) throw std::invalid_argument("t_grid must be nonempty");

  json resolved = config;
  std::string csv = csv_header(resolved);
  csv += "t,closed_form,mc_estimate,mc_standard_error\n";
  std::vector<double> closed(t_grid.size(),
                             std::numeric_limits<double>::quiet_NaN());
  json jrows = json::array();
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    double t = t_grid[i];
    if (pair.kind() != PairKind::Polynomial) closed[i] = volume_C(pair, t);
    McVolume mc = mc_volume(pair, t, mc_samples, derive_seed(seed, i));
    csv += format_double(t) + "," +
           (std::isnan(closed[i]) ? "" : format_double(closed[i])) + "," +
           format_double(mc.estimate) + "," + format_double(mc.standard_error) +
           "\n";
    jrows.push_back({{"t", t},
                     {"closed_form", closed[i]},
                     {"mc_estimate", mc.estimate},
                     {"mc_standard_error", mc.standard_error}});
  }

  RunOutput out;
  out.summary = {{"command", "volume"},
                 {"config", resolved},
                 {"config_hash", config_hash(resolved)},
                 {"rows", jrows}};
  if (fit) {
    std::vector<double> vols(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
      vols[i] = std::isnan(closed[i])
                    ? mc_volume(pair, t_grid[i], mc_samples,
                                derive_seed(seed, 1000 + i))
                          .estimate
                    : closed[i];
    }
    AbcFit f = fit_abc(t_grid, vols);
    out.summary["fit"] = {{"a", f.a}, {"b", f.b}, {"c", f.c}};
    if (pair.has_abc())
      out.summary["fit_reference"] = {
          {"a", pair.a()}, {"b", pair.b()}, {"c", pair.c()}};
  }
  out.files["volume.csv"] = csv;
  out.files["volume.json"] = out.summary.dump(2) + "\n";
  return out;
}

}  // namespace latmin
