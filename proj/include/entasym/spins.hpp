// Basis conventions, U(1) charge axes and dense operator builders for
// open-boundary spin-1/2 chains.
//
// Basis convention: basis index b encodes the configuration of L spins with
// site j (1-indexed) stored in bit j-1. Bit value 1 means sigma^z = -1 at
// that site ("charge-occupied"), so the Hamming weight of b counts the
// occupied sites and labels the charge sector.
#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <variant>

#include <Eigen/Dense>

#include "entasym/common.hpp"

namespace entasym {

using cplx = std::complex<double>;

inline constexpr int kMaxSites = 24;  // soft cap, 2^L amplitudes

inline std::int64_t hilbert_dim(int sites) {
  if (sites < 1 || sites > kMaxSites)
    throw std::invalid_argument("site count out of range [1," +
                                std::to_string(kMaxSites) + "]");
  return std::int64_t{1} << sites;
}

inline int popcount64(std::uint64_t b) { return std::popcount(b); }

// sigma^z of site s (0-indexed) in configuration b
inline double zval(std::uint64_t b, int s) {
  return 1.0 - 2.0 * static_cast<double>((b >> s) & 1u);
}

// Unit vector defining the charge Q_n = n_x Q_x + n_y Q_y + n_z Q_z.
struct ChargeSpec {
  Eigen::Vector3d axis;

  static ChargeSpec from_axis(double nx, double ny, double nz) {
    Eigen::Vector3d v(nx, ny, nz);
    double norm = v.norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
      throw std::invalid_argument("charge axis must be a nonzero vector");
    return ChargeSpec{v / norm};
  }

  // Q_theta = cos(theta) Q_z + sin(theta) Q_x, the arc of Fig-2-left sweeps
  static ChargeSpec from_theta(double theta) {
    return ChargeSpec{{std::sin(theta), 0.0, std::cos(theta)}};
  }

  // Rotation of Q_{theta*} toward Q_y by an angle phi
  static ChargeSpec from_phi(double phi, double theta_star) {
    Eigen::Vector3d base(std::sin(theta_star), 0.0, std::cos(theta_star));
    Eigen::Vector3d v = std::cos(phi) * base +
                        std::sin(phi) * Eigen::Vector3d(0.0, 1.0, 0.0);
    return ChargeSpec{v.normalized()};
  }

  bool orthogonal_to(const ChargeSpec& other) const {
    return std::abs(axis.dot(other.axis)) < 1e-12;
  }
};

// Normalized amplitude vector over the 2^L computational basis.
struct PureState {
  Eigen::VectorXcd amps;
  int sites = 0;

  double norm_error() const { return std::abs(amps.squaredNorm() - 1.0); }
  bool is_normalized(double tol = 1e-10) const { return norm_error() <= tol; }
};

// Dense Hermitian operator. The chain Hamiltonians are real symmetric in the
// computational basis and are kept in real storage; a complex view is
// materialized on demand.
class HermitianOp {
 public:
  explicit HermitianOp(Eigen::MatrixXd m) : store_(std::move(m)) {}
  explicit HermitianOp(Eigen::MatrixXcd m) : store_(std::move(m)) {}

  bool is_real() const { return std::holds_alternative<Eigen::MatrixXd>(store_); }
  Eigen::Index dim() const {
    return is_real() ? std::get<Eigen::MatrixXd>(store_).rows()
                     : std::get<Eigen::MatrixXcd>(store_).rows();
  }
  const Eigen::MatrixXd& real() const { return std::get<Eigen::MatrixXd>(store_); }
  const Eigen::MatrixXcd& cplx_matrix() const {
    return std::get<Eigen::MatrixXcd>(store_);
  }
  Eigen::MatrixXcd to_complex() const {
    return is_real() ? real().cast<cplx>() : cplx_matrix();
  }

  double hermiticity_error() const {
    if (is_real()) return (real() - real().transpose()).cwiseAbs().maxCoeff();
    return (cplx_matrix() - cplx_matrix().adjoint()).cwiseAbs().maxCoeff();
  }

 private:
  std::variant<Eigen::MatrixXd, Eigen::MatrixXcd> store_;
};

namespace detail {

// diag(b) for the classical part shared by the Ising-type chains
inline double ising_diag(std::uint64_t b, int L, double zz_nn, double zz_nnn,
                         double zz_xxz, double h, double h1, double hL) {
  double d = 0.0;
  for (int s = 0; s + 1 < L; ++s) d += (zz_nn + zz_xxz) * zval(b, s) * zval(b, s + 1);
  for (int s = 0; s + 2 < L; ++s) d += zz_nnn * zval(b, s) * zval(b, s + 2);
  for (int s = 0; s < L; ++s) d += h * zval(b, s);
  d += h1 * zval(b, 0) + hL * zval(b, L - 1);
  return d;
}

}  // namespace detail

// Mixed-field Ising chain: sum_j (sz_j sz_{j+1} + g sx_j + h sz_j) plus the
// boundary fields h1 sz_1 and hL sz_L that break reflection symmetry.
inline HermitianOp build_mfim(int L, double g, double h, double h1, double hL) {
  if (L < 2) throw std::invalid_argument("build_mfim requires L >= 2");
  const std::int64_t dim = hilbert_dim(L);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (std::int64_t b = 0; b < dim; ++b) {
    m(b, b) = detail::ising_diag(b, L, 1.0, 0.0, 0.0, h, h1, hL);
    for (int s = 0; s < L; ++s) m(b ^ (std::int64_t{1} << s), b) += g;
  }
  return HermitianOp(std::move(m));
}

// Ising chain with an extra next-to-nearest-neighbor coupling,
// sum_j (sz_j sz_{j+1} + sz_j sz_{j+2})/2 + on-site and boundary fields.
// The j+2 sum truncates at the open end.
inline HermitianOp build_nnn_ising(int L, double g, double h, double h1,
                                   double hL) {
  if (L < 3) throw std::invalid_argument("build_nnn_ising requires L >= 3");
  const std::int64_t dim = hilbert_dim(L);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (std::int64_t b = 0; b < dim; ++b) {
    m(b, b) = detail::ising_diag(b, L, 0.5, 0.5, 0.0, h, h1, hL);
    for (int s = 0; s < L; ++s) m(b ^ (std::int64_t{1} << s), b) += g;
  }
  return HermitianOp(std::move(m));
}

// XXZ chain with symmetry-breaking fields,
// (1/4) sum_j (sx sx + sy sy + Delta sz sz) + g sx_j + h sz_j + boundary.
// The sy sy product is real in the computational basis, so the matrix stays
// real symmetric.
inline HermitianOp build_xxz_fields(int L, double delta, double g, double h,
                                    double h1, double hL) {
  if (L < 2) throw std::invalid_argument("build_xxz_fields requires L >= 2");
  const std::int64_t dim = hilbert_dim(L);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (std::int64_t b = 0; b < dim; ++b) {
    m(b, b) = detail::ising_diag(b, L, 0.0, 0.0, 0.25 * delta, h, h1, hL);
    for (int s = 0; s < L; ++s) m(b ^ (std::int64_t{1} << s), b) += g;
    // (sx sx + sy sy)/4 flips antiparallel neighbor pairs with amplitude 1/2
    for (int s = 0; s + 1 < L; ++s) {
      std::uint64_t pair = std::uint64_t{3} << s;
      std::uint64_t bits = (b >> s) & 3u;
      if (bits == 1u || bits == 2u) m(b ^ pair, b) += 0.5;
    }
  }
  return HermitianOp(std::move(m));
}

// Q_n = sum_j (n_x sx_j + n_y sy_j + n_z sz_j); eigenvalues -L, -L+2, ..., L.
inline HermitianOp build_charge(int L, const ChargeSpec& spec) {
  const std::int64_t dim = hilbert_dim(L);
  const double nx = spec.axis.x(), ny = spec.axis.y(), nz = spec.axis.z();
  if (ny == 0.0) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (std::int64_t b = 0; b < dim; ++b) {
      double d = 0.0;
      for (int s = 0; s < L; ++s) d += nz * zval(b, s);
      m(b, b) = d;
      if (nx != 0.0)
        for (int s = 0; s < L; ++s) m(b ^ (std::int64_t{1} << s), b) += nx;
    }
    return HermitianOp(std::move(m));
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::int64_t b = 0; b < dim; ++b) {
    double d = 0.0;
    for (int s = 0; s < L; ++s) d += nz * zval(b, s);
    m(b, b) = d;
    for (int s = 0; s < L; ++s) {
      // sy|0> = i|1>, sy|1> = -i|0>
      cplx amp(nx, ny * zval(b, s));
      m(b ^ (std::int64_t{1} << s), b) += amp;
    }
  }
  return HermitianOp(std::move(m));
}

// Single-qubit unitary u with u (n.sigma) u^dag = sigma^z. Applying it on
// every site of a block maps the Q_{n,A} eigenbasis onto Hamming-weight
// sectors, which turns charge projections into popcount masks.
inline Eigen::Matrix2cd single_site_rotation_to_z(const ChargeSpec& spec) {
  // direct half-angle form, well conditioned for nz >= 0
  const auto upper = [](double nx, double ny, double nz) {
    const double c = std::sqrt((1.0 + nz) / 2.0);  // cos(theta/2) >= 1/sqrt2
    Eigen::Matrix2cd u;
    u << cplx(c, 0), cplx(nx, -ny) / (2.0 * c), -cplx(nx, ny) / (2.0 * c),
        cplx(c, 0);
    return u;
  };
  const double nx = spec.axis.x(), ny = spec.axis.y(), nz = spec.axis.z();
  if (nz >= 0.0) return upper(nx, ny, nz);
  // southern hemisphere: first rotate by pi about x, which maps the axis to
  // (nx, -ny, -nz), then use the well-conditioned branch
  Eigen::Matrix2cd flip;
  flip << cplx(0, 0), cplx(0, -1), cplx(0, -1), cplx(0, 0);  // -i sigma_x
  return upper(nx, -ny, -nz) * flip;
}

// In-place action of a single-qubit gate on site s of an amplitude vector.
inline void apply_single_site(Eigen::VectorXcd& psi, const Eigen::Matrix2cd& u,
                              int s) {
  const std::int64_t n = psi.size();
  const std::int64_t mask = std::int64_t{1} << s;
  for (std::int64_t b = 0; b < n; ++b) {
    if (b & mask) continue;
    const cplx a0 = psi(b), a1 = psi(b | mask);
    psi(b) = u(0, 0) * a0 + u(0, 1) * a1;
    psi(b | mask) = u(1, 0) * a0 + u(1, 1) * a1;
  }
}

}  // namespace entasym
