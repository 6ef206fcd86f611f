#pragma once

// Exact integer lattice kernel.  Bases live in column-major BigInt matrices;
// reduction and enumeration are carried out without rounding so that results
// stay correct for the extreme diagonal scalings the experiments use (where
// double-precision Gram-Schmidt loses every significant bit).  The public
// double-precision API lifts its dyadic inputs into this kernel.

#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "latmin/errors.hpp"

namespace latmin::exact {

using BigInt = boost::multiprecision::cpp_int;

struct IntMat {
  int rows = 0, cols = 0;
  std::vector<BigInt> a;  // column-major

  IntMat() = default;
  IntMat(int r, int c) : rows(r), cols(c), a(std::size_t(r) * c) {}

  BigInt& operator()(int r, int c) { return a[std::size_t(c) * rows + r]; }
  const BigInt& operator()(int r, int c) const {
    return a[std::size_t(c) * rows + r];
  }

  static IntMat identity(int n) {
    IntMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
};

// Floor and round-to-nearest quotients for signed BigInt, exact.
BigInt floor_div(const BigInt& num, const BigInt& den);
BigInt round_div(const BigInt& num, const BigInt& den);

// Exact LLL reduction (integer Gram-Schmidt bookkeeping, Lovász parameter
// 99/100) of the columns of `basis`, in place.  If `transform` is non-null it
// receives the unimodular matrix U with basis_out = basis_in * U.
// Throws degenerate_lattice_error when the columns are dependent.
void lll_reduce_columns(IntMat& basis, IntMat* transform);

// Fraction-free determinant and adjugate (adj(m) * m = det(m) * I).
BigInt determinant(IntMat m);
IntMat adjugate(const IntMat& m);

struct EnumBudget {
  std::uint64_t limit = 100'000'000;  // DFS nodes
  std::uint64_t used = 0;
};

// All nonzero integer coefficient vectors x with |(basis * x)_p| <= bounds[p]
// for every coordinate p.  Bounds are inclusive and exact; callers fold any
// membership tolerance into them beforehand.  Internally LLL-reduces a
// row-rescaled copy so the search tree stays small even for very skew boxes.
// With first_only set, returns at most one point.
std::vector<std::vector<BigInt>> enumerate_box(const IntMat& basis,
                                               const std::vector<BigInt>& bounds,
                                               EnumBudget& budget,
                                               bool first_only = false);

// The basis LLL-reduced in the metric that makes the box cubical; columns of
// the result generate the same lattice.  Its best column gives an upper bound
// on the smallest box dilation containing a nonzero point, within the LLL
// approximation factor, which keeps shrink-and-enumerate searches small.
IntMat reduce_columns_for_box(const IntMat& basis,
                              const std::vector<BigInt>& bounds);

// Largest BigInt <= 2^log2_value (0 when log2_value < 0).  Used to turn real
// box bounds, already widened by the membership tolerance, into exact ones.
BigInt exp2_floor(long double log2_value);

// log2 |v| as long double; -infinity for v == 0.
long double log2_abs(const BigInt& v);

}  // namespace latmin::exact
