// Exact ensemble averages for U(1)-symmetric Haar random states: the purity
// ratio R, the combinatorial kernel chi with its terminating hypergeometric
// factor, sector trace formulas, the average purity, the plain-Haar
// asymmetry baseline and the energy <-> charge-sector correspondence.
//
// Binomial-heavy sums mix huge integers with alternating signs, so all inner
// sums run in exact rational arithmetic and convert to double at the end.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "entasym/common.hpp"

namespace entasym {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

// exact C(n, k); zero outside 0 <= k <= n
inline BigInt binom_big(long long n, long long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt c = 1;
  for (long long i = 1; i <= k; ++i) {
    c *= n - k + i;
    c /= i;  // exact at every step
  }
  return c;
}

// C(n, k) in 64-bit integers; valid for n <= 64
inline long long binom_ll(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (n > 64) throw std::invalid_argument("binom_ll supports n <= 64");
  return static_cast<long long>(binom_big(n, k));
}

// --- terminating hypergeometric -----------------------------------------

// 2F1(-2m, -M, 1-2m+L-M; -1) evaluated as the terminating Pochhammer series
// in exact rationals. The lower parameter must not hit a pole before the
// series truncates, i.e. 1-2m+L-M must avoid {0, -1, ..., -2m+1}.
inline double hyp2f1_terminating(int m, int charge, int sites) {
  if (m < 0 || charge < 0)
    throw std::invalid_argument("hyp2f1_terminating requires m, M >= 0");
  const long long c0 = 1LL - 2 * m + sites - charge;
  if (m > 0 && c0 <= 0 && c0 >= 1 - 2 * m)
    throw std::invalid_argument("hypergeometric pole: 1-2m+L-M in {0,-1,...}");
  const long long a0 = -2 * m, b0 = -static_cast<long long>(charge);
  BigRat sum = 1, term = 1;
  for (long long n = 0; n < 2 * m; ++n) {
    if (a0 + n == 0 || b0 + n == 0) break;  // series already terminated
    term *= BigRat((a0 + n) * (b0 + n), c0 + n);
    term *= BigRat(-1, n + 1);
    sum += term;
  }
  return static_cast<double>(sum);
}

namespace detail {

// S(m, L, M) = sum_n (-1)^n C(2m, n) C(L-2m, M-n); equals
// C(L-2m, M) * 2F1(-2m, -M, 1-2m+L-M; -1) wherever the 2F1 factor is
// defined, and stays finite at the parameter poles.
inline BigInt alternating_sector_sum(int m, int sites, int charge) {
  BigInt s = 0;
  for (int n = 0; n <= 2 * m; ++n) {
    BigInt t = binom_big(2 * m, n) * binom_big(sites - 2 * m, charge - n);
    s += (n % 2 == 0) ? t : -t;
  }
  return s;
}

}  // namespace detail

// chi(L, lA, M) = 2^-lA sum_m 2^-2m (2m)!/(m!)^2 C(lA, 2m) S(m,L,M)^2,
// with S the alternating sector sum above.
inline BigRat chi_exact(int sites, int block, int charge) {
  BigRat total = 0;
  for (int m = 0; 2 * m <= block; ++m) {
    BigInt cl = binom_big(block, 2 * m);
    if (cl == 0) continue;
    BigInt s = detail::alternating_sector_sum(m, sites, charge);
    BigRat term = BigRat(binom_big(2 * m, m) * cl * s * s,
                         BigInt(1) << (2 * m));
    total += term;
  }
  return total / BigRat(BigInt(1) << block);
}

inline double chi(int sites, int block, int charge) {
  if (block < 0 || block > sites || charge < 0 || charge > sites)
    throw std::invalid_argument("chi: arguments out of range");
  return static_cast<double>(chi_exact(sites, block, charge));
}

// --- sector traces of the rotated projectors ------------------------------

// Tr[A(k)_jj] = 2^-lA C(lA, j) C(lA, k)
inline BigRat trace_a_exact(int block, int j, int k) {
  return BigRat(binom_big(block, j) * binom_big(block, k),
                BigInt(1) << block);
}

inline double trace_a(int block, int j, int k) {
  return static_cast<double>(trace_a_exact(block, j, k));
}

// Tr[A(k)_jj' A(k)_j'j]: combinatorial double sum over the overlap pattern of
// the two weight-k rows; the inner alternating sums factorize per row.
inline BigRat trace_aa_exact(int block, int j, int jp, int k) {
  BigInt sum = 0;
  for (int r = 0; r <= k; ++r) {  // r columns with exactly one of the k-rows set
    BigInt weight = binom_big(k, r) * binom_big(block - k, r);
    if (weight == 0) continue;
    BigInt tj = detail::alternating_sector_sum(r, block, j);
    BigInt tjp = detail::alternating_sector_sum(r, block, jp);
    sum += weight * tj * tjp;
  }
  return BigRat(binom_big(block, k) * sum, BigInt(1) << (2 * block));
}

inline double trace_aa(int block, int j, int jp, int k) {
  return static_cast<double>(trace_aa_exact(block, j, jp, k));
}

// --- ensemble averages -----------------------------------------------------

namespace detail {

inline void check_sector_args(int sites, int block, int charge) {
  if (sites < 1 || block < 0 || block > sites || charge < 0 || charge > sites)
    throw std::invalid_argument("sector arguments out of range");
}

}  // namespace detail

// R = E[Tr rho_{A,Qperp}^2] / E[Tr rho_A^2] for the U(1) ensemble in sector
// M, with the symmetrization charge orthogonal to the conserved one.
inline BigRat ratio_r_exact(int sites, int block, int charge) {
  const int lb = sites - block;
  BigInt sum_baa = 0, sum_bba = 0;
  for (int q = 0; q <= block; ++q) {
    BigInt da = binom_big(block, q);
    BigInt db = binom_big(lb, charge - q);
    sum_baa += db * da * da;
    sum_bba += db * db * da;
  }
  BigRat numerator = BigRat(binom_big(2 * block, block) * sum_baa,
                            BigInt(1) << (2 * block)) +
                     chi_exact(sites, block, charge);
  BigRat denominator = BigRat(sum_baa + sum_bba);
  return numerator / denominator;
}

inline double ratio_r(int sites, int block, int charge) {
  detail::check_sector_args(sites, block, charge);
  return static_cast<double>(ratio_r_exact(sites, block, charge));
}

// Self-averaged ensemble mean of the Renyi-2 asymmetry, -log R.
inline double predicted_asymmetry_u1(int sites, int block, int charge) {
  detail::check_sector_args(sites, block, charge);
  double r = ratio_r(sites, block, charge);
  return std::max(0.0, -std::log(r));
}

// Standard (symmetry-free) Haar baseline,
// -log[ (1 + 2^-L (2 lA)!/(lA!)^2) / (2^(2 lA - L) + 1) ],
// evaluated in log space so it stays finite for blocks up to 32 sites.
inline double predicted_asymmetry_haar(int sites, int block) {
  if (block < 0 || block > sites)
    throw std::invalid_argument("predicted_asymmetry_haar: 0 <= lA <= L");
  const double log_central =  // log C(2 lA, lA)
      std::lgamma(2.0 * block + 1.0) - 2.0 * std::lgamma(block + 1.0);
  const double ln2 = std::log(2.0);
  double a = std::log1p(std::exp2(2.0 * block - sites));
  double b = std::log1p(std::exp(log_central - sites * ln2));
  return std::max(0.0, a - b);
}

// E[Tr rho_A^2] = sum_q d_{A,q} d_{B,q} (d_{A,q} + d_{B,q}) / (d_M (d_M+1))
inline double avg_purity_u1(int sites, int block, int charge) {
  detail::check_sector_args(sites, block, charge);
  const int lb = sites - block;
  BigInt sum = 0;
  for (int q = 0; q <= block; ++q) {
    BigInt da = binom_big(block, q);
    BigInt db = binom_big(lb, charge - q);
    sum += da * db * (da + db);
  }
  BigInt dm = binom_big(sites, charge);
  return static_cast<double>(BigRat(sum, dm * (dm + 1)));
}

// --- energy <-> charge correspondence --------------------------------------

// eps/eps* = 2 s - 1 with s = M/L; the forward map rounds to the nearest
// sector (ties up) and clamps |eps/eps*| to 1 with a warning.
inline int energy_to_sector(double eps_ratio, int sites) {
  if (sites < 1) throw std::invalid_argument("energy_to_sector: L >= 1");
  if (eps_ratio < -1.0 || eps_ratio > 1.0) {
    std::cerr << "warning: rescaled energy " << eps_ratio
              << " outside [-1,1], clamping\n";
    eps_ratio = std::clamp(eps_ratio, -1.0, 1.0);
  }
  double m = sites * (eps_ratio + 1.0) / 2.0;
  return static_cast<int>(std::floor(m + 0.5));  // round half up
}

inline double sector_to_energy(int charge, int sites) {
  if (sites < 1) throw std::invalid_argument("sector_to_energy: L >= 1");
  return 2.0 * charge / sites - 1.0;
}

}  // namespace entasym
