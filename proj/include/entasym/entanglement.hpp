// Reduced density matrices, Renyi entropies, charge-sector symmetrization and
// the Renyi-n entanglement asymmetry.
//
// Subsystem A is always the leading contiguous block, i.e. the low bits of
// the basis index, so the amplitude vector reshapes column-major into a
// 2^lA x 2^(L-lA) matrix with the A configuration as row index.
#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "entasym/common.hpp"
#include "entasym/spins.hpp"

namespace entasym {

struct Bipartition {
  int sites = 0;
  int block = 0;  // lA, sites 1..lA

  Bipartition(int L, int lA) : sites(L), block(lA) {
    hilbert_dim(L);
    if (lA < 0 || lA > L)
      throw std::invalid_argument("block length must satisfy 0 <= lA <= L");
  }
};

using ReducedDensityMatrix = Eigen::MatrixXcd;

namespace detail {

inline int block_sites_of(Eigen::Index dim) {
  auto u = static_cast<std::uint64_t>(dim);
  if (dim < 1 || !std::has_single_bit(u))
    throw std::invalid_argument("density matrix dimension must be a power of 2");
  return std::countr_zero(u);
}

// basis indices of an n-qubit block grouped by Hamming weight
inline std::vector<std::vector<int>> weight_classes(int n) {
  std::vector<std::vector<int>> cls(n + 1);
  for (int b = 0; b < (1 << n); ++b) cls[popcount64(b)].push_back(b);
  return cls;
}

inline bool is_identity(const Eigen::Matrix2cd& u) {
  return (u - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-15;
}

// rho <- (u on site s) rho (u on site s)^dag
inline void conjugate_site(Eigen::MatrixXcd& rho, const Eigen::Matrix2cd& u,
                           int s) {
  const Eigen::Index n = rho.rows();
  const Eigen::Index mask = Eigen::Index{1} << s;
  for (Eigen::Index c = 0; c < n; ++c) {  // rows
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r & mask) continue;
      const cplx a0 = rho(r, c), a1 = rho(r | mask, c);
      rho(r, c) = u(0, 0) * a0 + u(0, 1) * a1;
      rho(r | mask, c) = u(1, 0) * a0 + u(1, 1) * a1;
    }
  }
  for (Eigen::Index r = 0; r < n; ++r) {  // columns, times u^dag
    for (Eigen::Index c = 0; c < n; ++c) {
      if (c & mask) continue;
      const cplx a0 = rho(r, c), a1 = rho(r, c | mask);
      rho(r, c) = a0 * std::conj(u(0, 0)) + a1 * std::conj(u(0, 1));
      rho(r, c | mask) = a0 * std::conj(u(1, 0)) + a1 * std::conj(u(1, 1));
    }
  }
}

inline std::atomic<std::uint64_t> asymmetry_clamp_count{0};

}  // namespace detail

// Number of times a tiny negative asymmetry was clamped to zero.
inline std::uint64_t asymmetry_clamps() {
  return detail::asymmetry_clamp_count.load();
}

// rho_A = M M^dag with M the 2^lA x 2^(L-lA) reshape of the amplitudes.
inline ReducedDensityMatrix reduce(const PureState& state,
                                   const Bipartition& part) {
  const Eigen::Index dim = hilbert_dim(part.sites);
  if (state.amps.size() != dim)
    throw std::invalid_argument("state dimension does not match bipartition");
  if (state.norm_error() > 1e-8)
    throw std::invalid_argument("state is not normalized");
  const Eigen::Index da = Eigen::Index{1} << part.block;
  const Eigen::Index db = dim / da;
  Eigen::Map<const Eigen::MatrixXcd> m(state.amps.data(), da, db);
  ReducedDensityMatrix rho(da, da);
  rho.noalias() = m * m.adjoint();
  return rho;
}

// Renyi-2 entropy -log Tr[rho^2]; Tr[rho^2] is the squared Frobenius norm,
// no diagonalization needed.
inline double renyi2(const ReducedDensityMatrix& rho) {
  const double purity = rho.squaredNorm();
  if (!(purity > 0.0))
    throw numerical_error("degenerate density matrix: Tr[rho^2] <= 0");
  return -std::log(purity);
}

// General Renyi-n entropy via the eigenvalues; tiny negative eigenvalues
// from round-off are dropped.
inline double renyi_n(const ReducedDensityMatrix& rho, int n) {
  if (n < 2) throw std::invalid_argument("renyi_n requires integer n >= 2");
  if (n == 2) return renyi2(rho);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho,
                                                     Eigen::EigenvaluesOnly);
  double trace_pow = 0.0;
  for (Eigen::Index i = 0; i < rho.rows(); ++i) {
    double lam = es.eigenvalues()(i);
    if (lam <= 0.0) continue;
    trace_pow += std::pow(lam, n);
  }
  if (!(trace_pow > 0.0)) throw numerical_error("degenerate density matrix");
  return std::log(trace_pow) / (1.0 - n);
}

// rho_{A,Q} = sum_q Pi_q rho Pi_q for the block charge along `spec`:
// rotate every site so the charge eigenbasis becomes Hamming-weight sectors,
// zero the off-sector elements, rotate back.
inline ReducedDensityMatrix symmetrize(const ReducedDensityMatrix& rho,
                                       const ChargeSpec& spec) {
  const int la = detail::block_sites_of(rho.rows());
  ReducedDensityMatrix out = rho;
  const Eigen::Matrix2cd u = single_site_rotation_to_z(spec);
  const bool rotate = !detail::is_identity(u);
  if (rotate)
    for (int s = 0; s < la; ++s) detail::conjugate_site(out, u, s);
  for (Eigen::Index c = 0; c < out.cols(); ++c)
    for (Eigen::Index r = 0; r < out.rows(); ++r)
      if (popcount64(r) != popcount64(c)) out(r, c) = cplx(0, 0);
  if (rotate) {
    const Eigen::Matrix2cd udag = u.adjoint();
    for (int s = 0; s < la; ++s) detail::conjugate_site(out, udag, s);
  }
  return out;
}

// p_q = Tr[Pi_q rho Pi_q] in the rotated Hamming-weight labeling, q = 0..lA.
inline std::vector<double> charge_sector_projector_weights(
    const ReducedDensityMatrix& rho, const ChargeSpec& spec) {
  const int la = detail::block_sites_of(rho.rows());
  ReducedDensityMatrix rotated = rho;
  const Eigen::Matrix2cd u = single_site_rotation_to_z(spec);
  if (!detail::is_identity(u))
    for (int s = 0; s < la; ++s) detail::conjugate_site(rotated, u, s);
  std::vector<double> p(la + 1, 0.0);
  for (Eigen::Index b = 0; b < rotated.rows(); ++b)
    p[popcount64(b)] += rotated(b, b).real();
  return p;
}

// Tr[rho_A^2] and Tr[rho_{A,Q}^2] of a pure state, without materializing the
// symmetrized matrix. After rotating the state so the charge is diagonal,
//   Tr[rho_Q^2]  = sum_k ||M_k^dag M_k||_F^2
//   Tr[rho_A^2]  = ||sum_k M_k^dag M_k||_F^2
// where M_k holds the reshaped rows whose A configuration has weight k. The
// Gram matrices live on whichever side of the bipartition is cheaper.
inline std::pair<double, double> purity_pair(const PureState& state,
                                             const Bipartition& part,
                                             const ChargeSpec& spec) {
  const Eigen::Index dim = hilbert_dim(part.sites);
  if (state.amps.size() != dim)
    throw std::invalid_argument("state dimension does not match bipartition");
  const int la = part.block, lb = part.sites - la;
  if (la == 0) {
    const double n2 = state.amps.squaredNorm();
    return {n2 * n2, n2 * n2};
  }
  Eigen::VectorXcd psi = state.amps;
  const Eigen::Matrix2cd u = single_site_rotation_to_z(spec);
  if (!detail::is_identity(u))
    for (int s = 0; s < la; ++s) apply_single_site(psi, u, s);

  if (la == part.sites) {  // pure full-system case: rho = |psi><psi|
    std::vector<double> p(la + 1, 0.0);
    for (Eigen::Index b = 0; b < dim; ++b)
      p[popcount64(b)] += std::norm(psi(b));
    double tot = 0.0, sym = 0.0;
    for (double w : p) {
      tot += w;
      sym += w * w;
    }
    return {tot * tot, sym};
  }

  const Eigen::Index da = Eigen::Index{1} << la;
  const Eigen::Index db = Eigen::Index{1} << lb;
  Eigen::Map<const Eigen::MatrixXcd> m(psi.data(), da, db);
  const auto classes = detail::weight_classes(la);

  if (la <= lb) {  // A-side reduced matrix is cheaper
    Eigen::MatrixXcd rho(da, da);
    rho.noalias() = m * m.adjoint();
    const double purity = rho.squaredNorm();
    double sym = 0.0;
    for (const auto& cls : classes)
      for (int a : cls)
        for (int b : cls) sym += std::norm(rho(a, b));
    return {purity, sym};
  }

  Eigen::MatrixXcd gram_total = Eigen::MatrixXcd::Zero(db, db);
  Eigen::MatrixXcd rows, gram;
  double sym = 0.0;
  for (const auto& cls : classes) {
    if (cls.empty()) continue;
    rows.resize(static_cast<Eigen::Index>(cls.size()), db);
    for (std::size_t i = 0; i < cls.size(); ++i) rows.row(i) = m.row(cls[i]);
    gram.noalias() = rows.adjoint() * rows;
    sym += gram.squaredNorm();
    gram_total += gram;
  }
  return {gram_total.squaredNorm(), sym};
}

// Renyi-n entanglement asymmetry of Eq-style S_n(rho_{A,Q}) - S_n(rho_A).
// Non-negative; zero exactly when the reduced state commutes with the block
// charge. Round-off down to -1e-10 is clamped to zero and counted.
inline double asymmetry(const PureState& state, const Bipartition& part,
                        const ChargeSpec& spec, int n = 2) {
  if (state.norm_error() > 1e-8)
    throw std::invalid_argument("state is not normalized");
  double ds;
  if (n == 2) {
    auto [purity, sym] = purity_pair(state, part, spec);
    if (!(purity > 0.0) || !(sym > 0.0))
      throw numerical_error("degenerate density matrix: Tr[rho^2] <= 0");
    ds = std::log(purity) - std::log(sym);
  } else {
    ReducedDensityMatrix rho = reduce(state, part);
    ds = renyi_n(symmetrize(rho, spec), n) - renyi_n(rho, n);
  }
  if (ds < 0.0) {
    if (ds < -1e-10)
      throw numerical_error("asymmetry below the -1e-10 round-off floor");
    detail::asymmetry_clamp_count.fetch_add(1);
    ds = 0.0;
  }
  return ds;
}

}  // namespace entasym
