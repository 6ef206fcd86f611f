#pragma once

// The (eta, C) pairs whose sublevel volumes grow like c * t^a * (-log t)^b,
// with evaluators, closed-form and Monte Carlo volumes, the per-family
// normalization delta_n, and the limit-law constants they induce.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace latmin {

// Homogeneous polynomial as a dense term list over multi-indices.
class Polynomial {
 public:
  struct Term {
    double coef;
    std::vector<int> powers;  // one exponent per coordinate
  };

  Polynomial(int dim, std::vector<Term> terms);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  const std::vector<Term>& terms() const { return terms_; }
  double operator()(const Eigen::VectorXd& x) const;

 private:
  int dim_;
  int degree_;
  std::vector<Term> terms_;
};

enum class PairKind { NormBallSup, ProductForm, Polynomial, NormedStrip, ProductStrip };

class RegularPair {
 public:
  // eta = tau = sup norm, C = [-1,1]^d; (a, b, c) = (d, 0, 2^d).
  static RegularPair norm_ball_sup(int d);
  // eta = |x_1 ... x_d|, tau = sup norm; (a, b, c) = (1, d-1, 2^d / (d-1)!).
  static RegularPair product_form(int d);
  // eta = sup norm of the first d1 coordinates, tau = sup norm of the last d2;
  // (a, b, c) = (d1, 0, 2^d).
  static RegularPair normed_strip(int d1, int d2);
  // eta = |x_1 ... x_d1|, tau = sup norm of all d coordinates;
  // (a, b, c) = (1, d1-1, 2^d / (d1-1)!).
  static RegularPair product_strip(int d1, int d2);
  // eta = |F|, tau = sup norm; (a, b, c) must be fitted, flagged approximate.
  static RegularPair polynomial(Polynomial f);
  static RegularPair polynomial(Polynomial f, double a, double b, double c);

  PairKind kind() const { return kind_; }
  int dim() const { return dim_; }
  int d1() const { return d1_; }
  int d2() const { return d2_; }
  double a() const;  // throws for polynomial pairs without a fit
  double b() const;
  double c() const;
  double gamma() const { return gamma_; }
  bool abc_exact() const { return abc_exact_; }
  bool has_abc() const { return has_abc_; }
  const Polynomial& poly() const;
  std::string name() const;

 private:
  RegularPair() = default;
  PairKind kind_ = PairKind::NormBallSup;
  int dim_ = 0, d1_ = 0, d2_ = 0;
  double a_ = 0, b_ = 0, c_ = 0, gamma_ = 0;
  bool abc_exact_ = false, has_abc_ = false;
  std::vector<Polynomial> poly_;  // empty or one element
};

double eta(const RegularPair& pair, const Eigen::VectorXd& x);
double tau(const RegularPair& pair, const Eigen::VectorXd& x);

// Closed-form Vol(C(t)) for t in (0, 1]; polynomial pairs are unsupported
// (use mc_volume).
double volume_C(const RegularPair& pair, double t);

struct McVolume {
  double estimate;
  double standard_error;
};

// Hit-or-miss estimate of Vol(C(t)) over the bounding region of the pair.
McVolume mc_volume(const RegularPair& pair, double t, long samples,
                   std::uint64_t seed);

struct AbcFit {
  double a;
  double b;  // snapped to a non-negative integer, then the fit is re-run
  double c;
};

// Least squares for log V = log c + a log t + b log(-log t) on a strictly
// decreasing grid in (0, 0.5] with at least 6 points.
AbcFit fit_abc(const std::vector<double>& t_grid,
               const std::vector<double>& volumes);

// |F|^{-1/a} (log |F|)^{-b/a}; family_size may be any real >= 2.
double delta_n(const RegularPair& pair, double family_size);

struct TheoremConstants {
  double m_o_coefficient;  // c a^b / (2 zeta(d)); Poisson mean is m_o * u^a
  double weibull_scale;    // (2 zeta(d) / (c a^b))^{1/a}
  double weibull_shape;    // a
};

TheoremConstants theorem_constants(const RegularPair& pair, int d);

// Volume of the simplex {u in [0,1]^{d-1} : u_1 + ... + u_{d-1} <= 1}.
double simplex_volume_coefficient(int d);

}  // namespace latmin
