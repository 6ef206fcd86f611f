#include "latmin/regular_pair.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "latmin/rng.hpp"
#include "latmin/stats.hpp"

namespace latmin {

Polynomial::Polynomial(int dim, std::vector<Term> terms)
    : dim_(dim), degree_(-1), terms_(std::move(terms)) {
  if (dim < 1) throw std::invalid_argument("polynomial dimension must be >= 1");
  bool nontrivial = false;
  for (const auto& t : terms_) {
    if (int(t.powers.size()) != dim)
      throw std::invalid_argument("polynomial term arity mismatch");
    int deg = 0;
    for (int p : t.powers) {
      if (p < 0) throw std::invalid_argument("polynomial exponents must be >= 0");
      deg += p;
    }
    if (t.coef != 0.0) {
      if (degree_ >= 0 && deg != degree_)
        throw std::invalid_argument("polynomial is not homogeneous");
      degree_ = deg;
      nontrivial = true;
    }
  }
  if (!nontrivial) throw std::invalid_argument("polynomial is trivial");
}

double Polynomial::operator()(const Eigen::VectorXd& x) const {
  double value = 0;
  for (const auto& t : terms_) {
    double m = t.coef;
    for (int i = 0; i < dim_; ++i)
      for (int k = 0; k < t.powers[i]; ++k) m *= x[i];
    value += m;
  }
  return value;
}

RegularPair RegularPair::norm_ball_sup(int d) {
  if (d < 2) throw std::invalid_argument("norm ball pair needs d >= 2");
  RegularPair p;
  p.kind_ = PairKind::NormBallSup;
  p.dim_ = d;
  p.a_ = d;
  p.b_ = 0;
  p.c_ = std::exp2(d);
  p.gamma_ = 1;
  p.abc_exact_ = p.has_abc_ = true;
  return p;
}

RegularPair RegularPair::product_form(int d) {
  if (d < 2) throw std::invalid_argument("product form pair needs d >= 2");
  RegularPair p;
  p.kind_ = PairKind::ProductForm;
  p.dim_ = d;
  p.a_ = 1;
  p.b_ = d - 1;
  p.c_ = std::exp2(d) * simplex_volume_coefficient(d);
  p.gamma_ = d;
  p.abc_exact_ = p.has_abc_ = true;
  return p;
}

RegularPair RegularPair::normed_strip(int d1, int d2) {
  if (d1 < 1 || d2 < 1) throw std::invalid_argument("strip pair needs d1, d2 >= 1");
  RegularPair p;
  p.kind_ = PairKind::NormedStrip;
  p.dim_ = d1 + d2;
  p.d1_ = d1;
  p.d2_ = d2;
  p.a_ = d1;
  p.b_ = 0;
  p.c_ = std::exp2(d1 + d2);
  p.gamma_ = 1;
  p.abc_exact_ = p.has_abc_ = true;
  return p;
}

RegularPair RegularPair::product_strip(int d1, int d2) {
  if (d1 < 1 || d2 < 1)
    throw std::invalid_argument("product strip pair needs d1, d2 >= 1");
  RegularPair p;
  p.kind_ = PairKind::ProductStrip;
  p.dim_ = d1 + d2;
  p.d1_ = d1;
  p.d2_ = d2;
  p.a_ = 1;
  p.b_ = d1 - 1;
  p.c_ = std::exp2(d1 + d2) * simplex_volume_coefficient(d1);
  p.gamma_ = d1;
  p.abc_exact_ = p.has_abc_ = true;
  return p;
}

RegularPair RegularPair::polynomial(Polynomial f) {
  RegularPair p;
  p.kind_ = PairKind::Polynomial;
  p.dim_ = f.dim();
  p.gamma_ = f.degree();
  p.abc_exact_ = p.has_abc_ = false;
  p.poly_.push_back(std::move(f));
  return p;
}

RegularPair RegularPair::polynomial(Polynomial f, double a, double b, double c) {
  RegularPair p = polynomial(std::move(f));
  if (!(a > 0) || b < 0 || !(c > 0))
    throw std::invalid_argument("fitted (a, b, c) must have a, c > 0 and b >= 0");
  p.a_ = a;
  p.b_ = b;
  p.c_ = c;
  p.has_abc_ = true;
  p.abc_exact_ = false;
  return p;
}

double RegularPair::a() const {
  if (!has_abc_) throw std::logic_error("pair has no (a, b, c) data; fit first");
  return a_;
}
double RegularPair::b() const {
  if (!has_abc_) throw std::logic_error("pair has no (a, b, c) data; fit first");
  return b_;
}
double RegularPair::c() const {
  if (!has_abc_) throw std::logic_error("pair has no (a, b, c) data; fit first");
  return c_;
}

const Polynomial& RegularPair::poly() const {
  if (poly_.empty()) throw std::logic_error("pair has no polynomial");
  return poly_.front();
}

std::string RegularPair::name() const {
  switch (kind_) {
    case PairKind::NormBallSup: return "ball";
    case PairKind::ProductForm: return "product";
    case PairKind::Polynomial: return "polynomial";
    case PairKind::NormedStrip: return "strip";
    case PairKind::ProductStrip: return "product_strip";
  }
  return "?";
}

double simplex_volume_coefficient(int d) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  double f = 1;
  for (int k = 2; k <= d - 1; ++k) f *= k;
  return 1.0 / f;  // 1 / (d-1)!
}

double eta(const RegularPair& pair, const Eigen::VectorXd& x) {
  if (x.size() != pair.dim()) throw std::invalid_argument("eta arity mismatch");
  switch (pair.kind()) {
    case PairKind::NormBallSup:
      return x.cwiseAbs().maxCoeff();
    case PairKind::ProductForm:
      return x.cwiseAbs().prod();
    case PairKind::Polynomial:
      return std::abs(pair.poly()(x));
    case PairKind::NormedStrip:
      return x.head(pair.d1()).cwiseAbs().maxCoeff();
    case PairKind::ProductStrip:
      return x.head(pair.d1()).cwiseAbs().prod();
  }
  return 0;
}

double tau(const RegularPair& pair, const Eigen::VectorXd& x) {
  if (x.size() != pair.dim()) throw std::invalid_argument("tau arity mismatch");
  if (pair.kind() == PairKind::NormedStrip)
    return x.tail(pair.d2()).cwiseAbs().maxCoeff();
  return x.cwiseAbs().maxCoeff();
}

namespace {

// t * sum_{k<n} (-log t)^k / k!
double truncated_exp_tail(double t, int n) {
  double l = -std::log(t);
  double term = 1, sum = 1;
  for (int k = 1; k < n; ++k) {
    term *= l / k;
    sum += term;
  }
  return t * sum;
}

}  // namespace

double volume_C(const RegularPair& pair, double t) {
  if (!(t > 0) || t > 1)
    throw std::domain_error("volume_C requires t in (0, 1]");
  const int d = pair.dim();
  switch (pair.kind()) {
    case PairKind::NormBallSup:
      return std::pow(2 * t, d);
    case PairKind::ProductForm:
      return std::exp2(d) * truncated_exp_tail(t, d);
    case PairKind::NormedStrip:
      return std::pow(2 * t, pair.d1()) * std::exp2(pair.d2());
    case PairKind::ProductStrip:
      return std::exp2(d) * truncated_exp_tail(t, pair.d1());
    case PairKind::Polynomial:
      throw std::invalid_argument(
          "volume_C is unsupported for polynomial pairs; use mc_volume");
  }
  return 0;
}

McVolume mc_volume(const RegularPair& pair, double t, long samples,
                   std::uint64_t seed) {
  if (samples <= 0) throw std::domain_error("mc_volume needs samples > 0");
  if (!(t > 0)) throw std::domain_error("mc_volume needs t > 0");
  const int d = pair.dim();

  // Sampling region: the bounding box of C(t).  Where eta itself is a sup
  // norm over a block, that block shrinks with t, which keeps the hit rate
  // bounded away from zero at small t.
  Eigen::VectorXd half = Eigen::VectorXd::Ones(d);
  if (pair.kind() == PairKind::NormedStrip || pair.kind() == PairKind::NormBallSup) {
    int block = pair.kind() == PairKind::NormBallSup ? d : pair.d1();
    for (int i = 0; i < block; ++i) half[i] = std::min(t, 1.0);
  }
  double region = 1;
  for (int i = 0; i < d; ++i) region *= 2 * half[i];

  SplitMix64 rng(seed);
  long hits = 0;
  Eigen::VectorXd x(d);
  for (long s = 0; s < samples; ++s) {
    for (int i = 0; i < d; ++i) x[i] = (2 * rng.uniform01() - 1) * half[i];
    if (eta(pair, x) < t && tau(pair, x) <= 1.0) ++hits;
  }
  double p = double(hits) / double(samples);
  return {region * p, region * std::sqrt(p * (1 - p) / double(samples))};
}

AbcFit fit_abc(const std::vector<double>& t_grid,
               const std::vector<double>& volumes) {
  const int n = int(t_grid.size());
  if (n < 6 || volumes.size() != t_grid.size())
    throw std::invalid_argument("fit_abc needs >= 6 matched grid points");
  for (int i = 0; i < n; ++i) {
    if (!(t_grid[i] > 0) || t_grid[i] > 0.5)
      throw std::invalid_argument("fit_abc grid must lie in (0, 0.5]");
    if (i > 0 && !(t_grid[i] < t_grid[i - 1]))
      throw std::invalid_argument("fit_abc grid must be strictly decreasing");
    if (!(volumes[i] > 0))
      throw std::invalid_argument("fit_abc volumes must be positive");
  }

  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    design(i, 0) = 1;
    design(i, 1) = std::log(t_grid[i]);
    design(i, 2) = std::log(-std::log(t_grid[i]));
    rhs[i] = std::log(volumes[i]);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3) throw std::runtime_error("fit_abc design matrix is singular");
  Eigen::Vector3d coef = qr.solve(rhs);

  double b = std::max(0.0, std::round(coef[2]));
  // Re-fit log c and a with b frozen to its integer value.
  Eigen::MatrixXd design2(n, 2);
  Eigen::VectorXd rhs2(n);
  for (int i = 0; i < n; ++i) {
    design2(i, 0) = 1;
    design2(i, 1) = std::log(t_grid[i]);
    rhs2[i] = std::log(volumes[i]) - b * std::log(-std::log(t_grid[i]));
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr2(design2);
  if (qr2.rank() < 2) throw std::runtime_error("fit_abc design matrix is singular");
  Eigen::Vector2d coef2 = qr2.solve(rhs2);
  return {coef2[1], b, std::exp(coef2[0])};
}

double delta_n(const RegularPair& pair, double family_size) {
  if (!(family_size >= 2))
    throw std::domain_error("delta_n needs family size >= 2");
  double a = pair.a(), b = pair.b();
  return std::pow(family_size, -1.0 / a) *
         std::pow(std::log(family_size), -b / a);
}

TheoremConstants theorem_constants(const RegularPair& pair, int d) {
  if (d < 3)
    throw std::domain_error(
        "limit-law constants need d >= 3; the second-moment bound behind the "
        "law is unavailable in dimension 2");
  if (d != pair.dim()) throw std::invalid_argument("dimension mismatch");
  double a = pair.a(), b = pair.b(), c = pair.c();
  double z = zeta(d);
  double m_o = c * std::pow(a, b) / (2 * z);
  return {m_o, std::pow(1.0 / m_o, 1.0 / a), a};
}

}  // namespace latmin
