#include "latmin/exact_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace latmin::exact {

BigInt floor_div(const BigInt& num, const BigInt& den) {
  BigInt q = num / den;
  if ((num % den) != 0 && ((num < 0) != (den < 0))) --q;
  return q;
}

BigInt round_div(const BigInt& num, const BigInt& den) {
  // round half away from the floor side; any consistent tie rule works for
  // size reduction
  return floor_div(2 * num + den, 2 * den);
}

namespace {

// Integral LLL state: d[i] = Gram determinant of the first i columns,
// lam(i,j) = d[j+1] * mu_{ij} for i > j, all exact integers.
struct LllState {
  int n;
  std::vector<BigInt> d;    // size n+1, d[0] = 1
  IntMat lam;               // lower triangular, lam(i,j) valid for i > j

  explicit LllState(int n_) : n(n_), d(n_ + 1), lam(n_, n_) { d[0] = 1; }
};

BigInt col_dot(const IntMat& b, int i, int j) {
  BigInt s = 0;
  for (int r = 0; r < b.rows; ++r) s += b(r, i) * b(r, j);
  return s;
}

void init_state(const IntMat& b, LllState& st) {
  for (int i = 0; i < st.n; ++i) {
    for (int j = 0; j <= i; ++j) {
      BigInt u = col_dot(b, i, j);
      for (int r = 0; r < j; ++r)
        u = (st.d[r + 1] * u - st.lam(i, r) * st.lam(j, r)) / st.d[r];
      if (j < i)
        st.lam(i, j) = u;
      else {
        if (u == 0)
          throw degenerate_lattice_error("lattice basis is rank deficient");
        st.d[i + 1] = u;
      }
    }
  }
}

void size_reduce(IntMat& b, IntMat* u, LllState& st, int k, int l) {
  if (2 * abs(st.lam(k, l)) <= st.d[l + 1]) return;
  BigInt q = round_div(st.lam(k, l), st.d[l + 1]);
  for (int r = 0; r < b.rows; ++r) b(r, k) -= q * b(r, l);
  if (u)
    for (int r = 0; r < u->rows; ++r) (*u)(r, k) -= q * (*u)(r, l);
  st.lam(k, l) -= q * st.d[l + 1];
  for (int i = 0; i < l; ++i) st.lam(k, i) -= q * st.lam(l, i);
}

void swap_columns(IntMat& b, IntMat* u, LllState& st, int k) {
  for (int r = 0; r < b.rows; ++r) std::swap(b(r, k), b(r, k - 1));
  if (u)
    for (int r = 0; r < u->rows; ++r) std::swap((*u)(r, k), (*u)(r, k - 1));
  for (int j = 0; j < k - 1; ++j) std::swap(st.lam(k, j), st.lam(k - 1, j));
  const BigInt lam = st.lam(k, k - 1);
  const BigInt bnew = (st.d[k - 1] * st.d[k + 1] + lam * lam) / st.d[k];
  for (int i = k + 1; i < st.n; ++i) {
    BigInt t = st.lam(i, k);
    st.lam(i, k) = (st.d[k + 1] * st.lam(i, k - 1) - lam * t) / st.d[k];
    st.lam(i, k - 1) = (bnew * t + lam * st.lam(i, k)) / st.d[k + 1];
  }
  st.d[k] = bnew;
}

}  // namespace

void lll_reduce_columns(IntMat& basis, IntMat* transform) {
  const int n = basis.cols;
  if (transform) *transform = IntMat::identity(n);
  if (n <= 1) {
    if (n == 1 && col_dot(basis, 0, 0) == 0)
      throw degenerate_lattice_error("lattice basis is rank deficient");
    return;
  }
  LllState st(n);
  init_state(basis, st);

  int k = 1;
  while (k < n) {
    size_reduce(basis, transform, st, k, k - 1);
    // Lovász with delta = 99/100:
    //   100 d[k+1] d[k-1] >= 99 d[k]^2 - 100 lam(k,k-1)^2
    const BigInt lam = st.lam(k, k - 1);
    if (100 * st.d[k + 1] * st.d[k - 1] < 99 * st.d[k] * st.d[k] - 100 * lam * lam) {
      swap_columns(basis, transform, st, k);
      k = std::max(1, k - 1);
    } else {
      for (int l = k - 2; l >= 0; --l) size_reduce(basis, transform, st, k, l);
      ++k;
    }
  }
}

BigInt determinant(IntMat m) {
  const int n = m.rows;
  if (n == 0) return 1;
  BigInt prev = 1;
  int sign = 1;
  for (int k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      int piv = -1;
      for (int i = k + 1; i < n; ++i)
        if (m(i, k) != 0) {
          piv = i;
          break;
        }
      if (piv < 0) return 0;
      for (int j = k; j < n; ++j) std::swap(m(k, j), m(piv, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j)
        m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
    prev = m(k, k);
  }
  return sign > 0 ? m(n - 1, n - 1) : -m(n - 1, n - 1);
}

IntMat adjugate(const IntMat& m) {
  const int n = m.rows;
  IntMat adj(n, n);
  if (n == 1) {
    adj(0, 0) = 1;
    return adj;
  }
  IntMat minor(n - 1, n - 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int r = 0, mr = 0; r < n; ++r) {
        if (r == j) continue;  // adj(i,j) = cofactor(j,i)
        for (int c = 0, mc = 0; c < n; ++c) {
          if (c == i) continue;
          minor(mr, mc) = m(r, c);
          ++mc;
        }
        ++mr;
      }
      BigInt cof = determinant(minor);
      adj(i, j) = ((i + j) % 2 == 0) ? cof : -cof;
    }
  }
  return adj;
}

namespace {

void charge(EnumBudget& budget, std::uint64_t nodes = 1) {
  budget.used += nodes;
  if (budget.used > budget.limit)
    throw resource_limit_error("enumeration node budget exceeded", budget.limit);
}

}  // namespace

namespace {

// Row-rescale so every bound becomes comparable, reduce, and return both the
// reduced basis in original coordinates and the coefficient transform.
void reduce_in_box_metric(const IntMat& basis, const std::vector<BigInt>& bounds,
                          IntMat& red, IntMat& u) {
  const int d = basis.cols;
  long double max_log = 0;
  std::vector<long double> logb(d);
  for (int p = 0; p < d; ++p) {
    logb[p] = bounds[p] > 0 ? log2_abs(bounds[p]) : -64.0L;
    max_log = std::max(max_log, logb[p]);
  }
  IntMat scaled(d, d);
  for (int p = 0; p < d; ++p) {
    long shift = std::lround((double)(max_log - logb[p]));
    for (int j = 0; j < d; ++j) scaled(p, j) = basis(p, j) << shift;
  }
  lll_reduce_columns(scaled, &u);
  red = IntMat(d, d);
  for (int p = 0; p < d; ++p)
    for (int j = 0; j < d; ++j) {
      BigInt s = 0;
      for (int r = 0; r < d; ++r) s += basis(p, r) * u(r, j);
      red(p, j) = s;
    }
}

}  // namespace

IntMat reduce_columns_for_box(const IntMat& basis,
                              const std::vector<BigInt>& bounds) {
  IntMat red, u;
  reduce_in_box_metric(basis, bounds, red, u);
  return red;
}

std::vector<std::vector<BigInt>> enumerate_box(const IntMat& basis,
                                               const std::vector<BigInt>& bounds,
                                               EnumBudget& budget,
                                               bool first_only) {
  const int d = basis.cols;

  IntMat red, u;
  reduce_in_box_metric(basis, bounds, red, u);

  BigInt det = determinant(red);
  if (det == 0) throw degenerate_lattice_error("lattice basis is rank deficient");
  IntMat adj = adjugate(red);
  BigInt abs_det = abs(det);

  // |x_j| <= sum_p |adj(j,p)| * bounds[p] / |det|
  std::vector<BigInt> coeff_bound(d);
  for (int j = 0; j < d; ++j) {
    BigInt s = 0;
    for (int p = 0; p < d; ++p) s += abs(adj(j, p)) * bounds[p];
    coeff_bound[j] = s / abs_det;
  }

  std::vector<std::vector<BigInt>> out;
  std::vector<BigInt> x(d);
  // partial[p] = sum_{j >= level+1} red(p,j) * x_j
  std::vector<std::vector<BigInt>> partial(d + 1, std::vector<BigInt>(d));

  // DFS over x_{d-1}, ..., x_1 within the adjugate bounds; x_0 ranges over the
  // exact interval where all d coordinate constraints hold simultaneously.
  auto emit = [&](const std::vector<BigInt>& xv) {
    std::vector<BigInt> c(d);
    for (int r = 0; r < d; ++r) {
      BigInt s = 0;
      for (int j = 0; j < d; ++j) s += u(r, j) * xv[j];
      c[r] = s;
    }
    out.push_back(std::move(c));
  };

  struct Frame {
    BigInt value, hi;
  };

  // Recursive lambda via explicit stack-free recursion over levels.
  bool done = false;
  auto rec = [&](auto&& self, int level) -> void {
    if (done) return;
    charge(budget);
    if (level == 0) {
      auto ceil_div = [](const BigInt& num, const BigInt& den) {
        return -floor_div(-num, den);
      };
      BigInt lo, hi;
      bool empty = false, first = true;
      for (int p = 0; p < d && !empty; ++p) {
        const BigInt& a = red(p, 0);
        const BigInt& c = partial[1][p];
        if (a == 0) {
          if (abs(c) > bounds[p]) empty = true;
          continue;
        }
        // -bound_p <= a x + c <= bound_p
        BigInt cl, fh;
        if (a > 0) {
          cl = ceil_div(-bounds[p] - c, a);
          fh = floor_div(bounds[p] - c, a);
        } else {
          cl = ceil_div(bounds[p] - c, a);
          fh = floor_div(-bounds[p] - c, a);
        }
        if (first) {
          lo = cl;
          hi = fh;
          first = false;
        } else {
          if (cl > lo) lo = cl;
          if (fh < hi) hi = fh;
        }
        if (lo > hi) empty = true;
      }
      if (empty || first) return;
      bool higher_zero = true;
      for (int j = 1; j < d; ++j)
        if (x[j] != 0) {
          higher_zero = false;
          break;
        }
      for (BigInt v = lo; v <= hi; ++v) {
        charge(budget);
        if (higher_zero && v == 0) continue;  // exclude the zero vector
        x[0] = v;
        emit(x);
        if (first_only) {
          done = true;
          return;
        }
      }
      return;
    }
    for (BigInt v = -coeff_bound[level]; v <= coeff_bound[level]; ++v) {
      x[level] = v;
      for (int p = 0; p < d; ++p)
        partial[level][p] = partial[level + 1][p] + red(p, level) * v;
      self(self, level - 1);
      if (done) return;
    }
    x[level] = 0;
  };

  if (d == 1) {
    // Degenerate recursion base: handle directly.
    const BigInt& a = red(0, 0);
    BigInt hi = floor_div(bounds[0], abs(a));
    for (BigInt v = -hi; v <= hi; ++v) {
      charge(budget);
      if (v == 0) continue;
      x[0] = v;
      emit(x);
      if (first_only) break;
    }
    return out;
  }

  rec(rec, d - 1);
  return out;
}

BigInt exp2_floor(long double log2_value) {
  if (log2_value < 0) return 0;
  if (log2_value < 62) {
    return BigInt((long long)std::floor(std::exp2((double)log2_value)));
  }
  long n = (long)std::floor((double)log2_value);
  long double frac = log2_value - (long double)n;
  // 61-bit mantissa; the deliberate slack here is far below the 1e-9
  // membership tolerance callers already folded into log2_value
  auto mant = (long long)std::floor(std::exp2((double)frac) * 0x1p61);
  return BigInt(mant) << (n - 61);
}

long double log2_abs(const BigInt& v) {
  if (v == 0) return -std::numeric_limits<long double>::infinity();
  BigInt a = abs(v);
  auto bits = boost::multiprecision::msb(a) + 1;  // a < 2^bits
  if (bits <= 63) return std::log2((long double)(std::uint64_t)a);
  BigInt top = a >> (bits - 63);
  return std::log2((long double)(std::uint64_t)top) + (long double)(bits - 63);
}

}  // namespace latmin::exact
