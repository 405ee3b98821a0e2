// Sampling from the U(1)-symmetric Haar random-state ensemble and the plain
// Haar ensemble, with Monte Carlo estimators of asymmetry statistics.
//
// All randomness flows through RandomSource: a seeded mt19937_64 with
// hand-rolled normal/gamma transforms, so identical (seed, stream) pairs
// reproduce identical samples on any platform.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "entasym/analytics.hpp"
#include "entasym/common.hpp"
#include "entasym/entanglement.hpp"
#include "entasym/spins.hpp"

namespace entasym {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace detail

// Deterministic pseudo-random source; derive per-task streams with stream().
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed) {
    std::uint64_t x = seed ^ (0xa0761d6478bd642full * (stream + 1));
    std::seed_seq seq{detail::splitmix64(x), detail::splitmix64(x),
                      detail::splitmix64(x), detail::splitmix64(x)};
    engine_.seed(seq);
  }

  RandomSource stream(std::uint64_t index) const {
    return RandomSource(seed_, index);
  }

  std::uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1) with 53 random bits
  double uniform() { return (engine_() >> 11) * 0x1.0p-53; }

  // standard normal via the Marsaglia polar method (pair-cached)
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  cplx complex_gaussian() {
    const double re = normal();
    return cplx(re, normal());
  }

  // Gamma(shape, 1) for shape >= 1, Marsaglia-Tsang squeeze/accept-reject
  double gamma(double shape) {
    if (shape < 1.0)
      throw std::invalid_argument("gamma sampler requires shape >= 1");
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
        return d * v;
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Dimensions of the charge-sector decomposition
// H(M) = sum_q H_A(q) x H_B(M-q) for a block of lA sites out of L.
struct SectorDims {
  int sites = 0;
  int block = 0;
  int charge = 0;                // total sector label M (Hamming weight)
  std::vector<long long> dim_a;  // C(lA, q), q = 0..lA
  std::vector<long long> dim_b;  // C(L-lA, M-q), zero out of range
  std::vector<long long> dim;    // elementwise product d_q
  long long dim_m = 0;           // C(L, M) = sum_q d_q
  int q_min = 0, q_max = 0;      // range with d_q > 0
};

inline SectorDims sector_dims(int sites, int block, int charge) {
  hilbert_dim(sites);
  if (block < 0 || block > sites)
    throw std::invalid_argument("sector_dims: 0 <= lA <= L required");
  if (charge < 0 || charge > sites)
    throw std::invalid_argument("sector_dims: 0 <= M <= L required");
  SectorDims d;
  d.sites = sites;
  d.block = block;
  d.charge = charge;
  d.dim_a.resize(block + 1);
  d.dim_b.resize(block + 1);
  d.dim.resize(block + 1);
  long long total = 0;
  for (int q = 0; q <= block; ++q) {
    d.dim_a[q] = binom_ll(block, q);
    d.dim_b[q] = binom_ll(sites - block, charge - q);
    d.dim[q] = d.dim_a[q] * d.dim_b[q];
    total += d.dim[q];
  }
  d.dim_m = binom_ll(sites, charge);
  if (total != d.dim_m)
    throw numerical_error("sector dimensions violate the Vandermonde identity");
  d.q_min = std::max(0, charge - (sites - block));
  d.q_max = std::min(block, charge);
  return d;
}

// Dirichlet(alpha_q = d_q) over the nonempty sectors; zero elsewhere.
inline std::vector<double> sample_dirichlet(const SectorDims& dims,
                                            RandomSource& rng) {
  std::vector<double> p(dims.dim.size(), 0.0);
  double total = 0.0;
  for (std::size_t q = 0; q < dims.dim.size(); ++q) {
    if (dims.dim[q] == 0) continue;
    p[q] = rng.gamma(static_cast<double>(dims.dim[q]));
    total += p[q];
  }
  if (total <= 0.0) throw std::invalid_argument("all sector dimensions vanish");
  for (double& x : p) x /= total;
  return p;
}

// Haar-uniform unit vector on the complex sphere of the given dimension.
inline Eigen::VectorXcd sample_sector_haar(long long dim, RandomSource& rng) {
  if (dim < 1) throw std::invalid_argument("sector dimension must be >= 1");
  Eigen::VectorXcd v(dim);
  for (long long i = 0; i < dim; ++i) v(i) = rng.complex_gaussian();
  v /= v.norm();
  return v;
}

namespace detail {

// bit patterns of the given length and Hamming weight, in ascending value
inline std::vector<std::uint64_t> weight_strings(int length, int weight) {
  std::vector<std::uint64_t> out;
  if (weight < 0 || weight > length) return out;
  if (weight == 0) {
    out.push_back(0);
    return out;
  }
  std::uint64_t v = (std::uint64_t{1} << weight) - 1;
  const std::uint64_t limit = std::uint64_t{1} << length;
  while (v < limit) {
    out.push_back(v);
    std::uint64_t t = v | (v - 1);  // Gosper's hack
    v = (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
  }
  return out;
}

}  // namespace detail

// |Psi(M)> = sum_q sqrt(p_q) |psi_q>: Dirichlet sector weights times an
// independent Haar vector in each A(q) x B(M-q) block, embedded at the basis
// indices a + (b << lA). Support outside Hamming weight M is identically zero.
inline PureState sample_u1_state(const SectorDims& dims, RandomSource& rng) {
  const std::vector<double> p = sample_dirichlet(dims, rng);
  Eigen::VectorXcd amps =
      Eigen::VectorXcd::Zero(hilbert_dim(dims.sites));
  for (int q = dims.q_min; q <= dims.q_max; ++q) {
    if (dims.dim[q] == 0) continue;
    const Eigen::VectorXcd v = sample_sector_haar(dims.dim[q], rng);
    const auto a_strings = detail::weight_strings(dims.block, q);
    const auto b_strings =
        detail::weight_strings(dims.sites - dims.block, dims.charge - q);
    const double w = std::sqrt(p[q]);
    long long idx = 0;
    for (std::uint64_t a : a_strings)
      for (std::uint64_t b : b_strings)
        amps(static_cast<Eigen::Index>(a | (b << dims.block))) = w * v(idx++);
  }
  return PureState{std::move(amps), dims.sites};
}

// Haar-uniform state on the full 2^L sphere.
inline PureState sample_plain_haar(int sites, RandomSource& rng) {
  Eigen::VectorXcd v(hilbert_dim(sites));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.complex_gaussian();
  v /= v.norm();
  return PureState{std::move(v), sites};
}

struct McStats {
  double mean = 0.0;
  double variance = 0.0;   // unbiased sample variance
  double std_error = 0.0;  // of the mean
  int samples = 0;
};

inline McStats welford(const std::vector<double>& xs) {
  McStats s;
  double mean = 0.0, m2 = 0.0;
  for (double x : xs) {
    ++s.samples;
    const double d = x - mean;
    mean += d / s.samples;
    m2 += d * (x - mean);
  }
  s.mean = mean;
  s.variance = s.samples > 1 ? m2 / (s.samples - 1) : 0.0;
  s.std_error = s.samples > 0 ? std::sqrt(s.variance / s.samples) : 0.0;
  return s;
}

// Sample mean/variance of the Renyi-2 asymmetry over independent U(1)-Haar
// states; deterministic given (rng seed, dims, spec, n).
inline McStats mc_asymmetry_stats(const SectorDims& dims,
                                  const ChargeSpec& spec, int n_samples,
                                  RandomSource& rng) {
  if (n_samples < 2)
    throw std::invalid_argument("mc_asymmetry_stats requires n >= 2");
  const Bipartition part(dims.sites, dims.block);
  std::vector<double> xs(n_samples);
  for (int i = 0; i < n_samples; ++i)
    xs[i] = asymmetry(sample_u1_state(dims, rng), part, spec);
  return welford(xs);
}

}  // namespace entasym
