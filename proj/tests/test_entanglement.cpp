#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "entasym/ensemble.hpp"
#include "entasym/entanglement.hpp"
#include "oracles.hpp"

using namespace entasym;

namespace {

PureState random_state(int sites, std::uint64_t seed) {
  RandomSource rng(seed);
  return sample_plain_haar(sites, rng);
}

PureState basis_state(int sites, int index) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(hilbert_dim(sites));
  v(index) = 1.0;
  return PureState{std::move(v), sites};
}

}  // namespace

TEST_CASE("Bell state reduces to the maximally mixed qubit", "[entangle]") {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  const auto rho = reduce(PureState{v, 2}, Bipartition(2, 1));
  REQUIRE((rho - 0.5 * Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() <
          1e-14);
  REQUIRE(rho.squaredNorm() == Catch::Approx(0.5));
  REQUIRE(renyi2(rho) == Catch::Approx(std::log(2.0)));
}

TEST_CASE("product states reduce to rank-1 projectors", "[entangle]") {
  for (int la : {0, 1, 3, 5}) {
    const auto rho = reduce(basis_state(5, 0), Bipartition(5, la));
    REQUIRE(rho.squaredNorm() == Catch::Approx(1.0));  // purity 1
    REQUIRE(std::abs(rho.trace() - cplx(1, 0)) < 1e-12);
  }
}

TEST_CASE("purity equals the fourth power of the singular values",
          "[entangle]") {
  const PureState psi = random_state(6, 11);
  for (int la : {1, 2, 3}) {
    const auto rho = reduce(psi, Bipartition(6, la));
    REQUIRE(rho.squaredNorm() ==
            Catch::Approx(oracles::purity_from_singular_values(psi.amps, la))
                .epsilon(1e-12));
  }
}

TEST_CASE("reduce validates dimensions and normalization", "[entangle]") {
  Eigen::VectorXcd bad = Eigen::VectorXcd::Zero(4);
  bad(0) = 2.0;
  REQUIRE_THROWS_AS(reduce(PureState{bad, 2}, Bipartition(2, 1)),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(reduce(basis_state(3, 0), Bipartition(4, 1)),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(Bipartition(3, 4), std::invalid_argument);
}

TEST_CASE("full-block reduction is the pure projector", "[entangle]") {
  const PureState psi = random_state(4, 3);
  const auto rho = reduce(psi, Bipartition(4, 4));
  REQUIRE((rho - psi.amps * psi.amps.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("renyi entropies on a known diagonal", "[entangle]") {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(2, 2);
  rho(0, 0) = 0.9;
  rho(1, 1) = 0.1;
  REQUIRE(renyi2(rho) == Catch::Approx(-std::log(0.82)));
  REQUIRE(renyi_n(rho, 3) ==
          Catch::Approx(std::log(0.9 * 0.9 * 0.9 + 0.1 * 0.1 * 0.1) / (1 - 3)));
  REQUIRE(renyi_n(rho, 2) == Catch::Approx(renyi2(rho)));
  const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(2, 2);
  REQUIRE_THROWS_AS(renyi2(zero), numerical_error);
}

TEST_CASE("symmetrize leaves z-diagonal matrices unchanged", "[entangle]") {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(4, 4);
  rho.diagonal() << 0.4, 0.3, 0.2, 0.1;
  const auto sym = symmetrize(rho, ChargeSpec::from_axis(0, 0, 1));
  REQUIRE((sym - rho).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("symmetrizing |+><+| along z gives the maximally mixed qubit",
          "[entangle]") {
  Eigen::MatrixXcd rho(2, 2);
  rho << 0.5, 0.5, 0.5, 0.5;
  const auto sym = symmetrize(rho, ChargeSpec::from_axis(0, 0, 1));
  REQUIRE((sym - 0.5 * Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() <
          1e-14);
}

TEST_CASE("symmetrize agrees with explicit charge projectors", "[entangle]") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (const auto& axis :
       {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0),
        Eigen::Vector3d(0.6, -0.3, 0.5).normalized()}) {
    const ChargeSpec spec{axis.normalized()};
    for (int la : {1, 2, 3}) {
      // random density matrix from a random pure state on a doubled block
      const PureState psi = random_state(2 * la, gen());
      auto rho = reduce(psi, Bipartition(2 * la, la));
      const auto projectors = oracles::eigenprojectors(
          oracles::charge_kron(la, spec.axis));
      const auto brute = oracles::symmetrize_with_projectors(rho, projectors);
      const auto fast = symmetrize(rho, spec);
      REQUIRE((brute - fast).cwiseAbs().maxCoeff() < 1e-12);

      // output commutes with the block charge
      const auto q = oracles::charge_kron(la, spec.axis);
      REQUIRE((fast * q - q * fast).cwiseAbs().maxCoeff() < 1e-10);

      // idempotence and purity monotonicity
      REQUIRE((symmetrize(fast, spec) - fast).cwiseAbs().maxCoeff() < 1e-12);
      REQUIRE(fast.squaredNorm() <= rho.squaredNorm() + 1e-12);
    }
  }
}

TEST_CASE("shifting and rescaling the charge leaves projections unchanged",
          "[entangle]") {
  // projectors of a Q and of 2Q + 3 are the same family
  const ChargeSpec spec = ChargeSpec::from_axis(1, 0, 0);
  const PureState psi = random_state(4, 99);
  const auto rho = reduce(psi, Bipartition(4, 2));
  const Eigen::MatrixXcd q = oracles::charge_kron(2, spec.axis);
  const Eigen::MatrixXcd shifted =
      2.0 * q + 3.0 * Eigen::MatrixXcd::Identity(4, 4);
  const auto p1 = oracles::eigenprojectors(q);
  const auto p2 = oracles::eigenprojectors(shifted);
  REQUIRE((oracles::symmetrize_with_projectors(rho, p1) -
           oracles::symmetrize_with_projectors(rho, p2))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("asymmetry of charge eigenstates vanishes", "[entangle]") {
  for (int la : {0, 2, 4}) {
    REQUIRE(asymmetry(basis_state(4, 0), Bipartition(4, la),
                      ChargeSpec::from_axis(0, 0, 1)) == 0.0);
  }
}

TEST_CASE("asymmetry of |+> along z is log 2", "[entangle]") {
  Eigen::VectorXcd v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  REQUIRE(asymmetry(PureState{v, 1}, Bipartition(1, 1),
                    ChargeSpec::from_axis(0, 0, 1)) ==
          Catch::Approx(std::log(2.0)));
}

TEST_CASE("fast path equals the generic symmetrize route", "[entangle]") {
  std::mt19937_64 gen(17);
  for (const auto& axis :
       {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0),
        Eigen::Vector3d(0, 0, 1), Eigen::Vector3d(0.2, 0.9, -0.4).normalized(),
        ChargeSpec::from_theta(1.1).axis}) {
    const ChargeSpec spec{axis};
    const PureState psi = random_state(6, gen());
    for (int la = 0; la <= 6; ++la) {
      const Bipartition part(6, la);
      const auto rho = reduce(psi, part);
      const double generic = renyi2(symmetrize(rho, spec)) - renyi2(rho);
      const double fast = asymmetry(psi, part, spec);
      REQUIRE(fast == Catch::Approx(std::max(0.0, generic)).margin(1e-12));
    }
  }
}

TEST_CASE("asymmetry matches the n=2 renyi_n route", "[entangle]") {
  const PureState psi = random_state(5, 23);
  const ChargeSpec spec = ChargeSpec::from_axis(0, 1, 0);
  const Bipartition part(5, 2);
  REQUIRE(asymmetry(psi, part, spec, 3) >= 0.0);
  const auto rho = reduce(psi, part);
  const double n3 = renyi_n(symmetrize(rho, spec), 3) - renyi_n(rho, 3);
  REQUIRE(asymmetry(psi, part, spec, 3) == Catch::Approx(n3).margin(1e-10));
}

TEST_CASE("asymmetry is even under axis reversal and phase gauge",
          "[entangle]") {
  const PureState psi = random_state(6, 31);
  const ChargeSpec spec = ChargeSpec::from_axis(0.3, 0.4, -0.5);
  const ChargeSpec minus = ChargeSpec::from_axis(-0.3, -0.4, 0.5);
  for (int la : {1, 3, 6}) {
    const Bipartition part(6, la);
    const double a = asymmetry(psi, part, spec);
    REQUIRE(asymmetry(psi, part, minus) == Catch::Approx(a).margin(1e-12));
    PureState rotated{psi.amps * std::polar(1.0, 0.73), 6};
    REQUIRE(asymmetry(rotated, part, spec) == Catch::Approx(a).margin(1e-12));
  }
}

TEST_CASE("sampled U(1) states are exactly symmetric along z", "[entangle]") {
  RandomSource rng(2024);
  const SectorDims dims = sector_dims(8, 4, 4);
  for (int i = 0; i < 5; ++i) {
    const PureState psi = sample_u1_state(dims, rng);
    for (int la : {2, 4, 7})
      REQUIRE(asymmetry(psi, Bipartition(8, la),
                        ChargeSpec::from_axis(0, 0, 1)) <= 1e-10);
  }
}

TEST_CASE("sector weights of simple states", "[entangle]") {
  const ChargeSpec z = ChargeSpec::from_axis(0, 0, 1);
  SECTION("all spins up") {
    const auto rho = reduce(basis_state(4, 0), Bipartition(4, 3));
    const auto p = charge_sector_projector_weights(rho, z);
    REQUIRE(p.size() == 4);
    REQUIRE(p[0] == Catch::Approx(1.0));
    for (std::size_t q = 1; q < p.size(); ++q)
      REQUIRE(p[q] == Catch::Approx(0.0).margin(1e-14));
  }
  SECTION("maximally mixed block is binomial") {
    const int la = 3;
    Eigen::MatrixXcd rho =
        Eigen::MatrixXcd::Identity(1 << la, 1 << la) / (1 << la);
    for (const auto& axis :
         {Eigen::Vector3d(0, 0, 1), Eigen::Vector3d(1, 0, 0)}) {
      const auto p = charge_sector_projector_weights(rho, ChargeSpec{axis});
      for (int q = 0; q <= la; ++q)
        REQUIRE(p[q] == Catch::Approx(binom_ll(la, q) / 8.0));
    }
  }
  SECTION("weights sum to one on random states") {
    const auto rho = reduce(random_state(6, 77), Bipartition(6, 3));
    const auto p =
        charge_sector_projector_weights(rho, ChargeSpec::from_theta(0.8));
    double total = 0.0;
    for (double w : p) {
      REQUIRE(w >= -1e-12);
      total += w;
    }
    REQUIRE(total == Catch::Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("sector weights of U(1) samples have the Dirichlet mean",
          "[entangle][slow]") {
  const SectorDims dims = sector_dims(8, 4, 4);
  RandomSource rng(5150);
  const int n = 2000;
  std::vector<double> mean(dims.block + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto rho = reduce(sample_u1_state(dims, rng), Bipartition(8, 4));
    const auto p =
        charge_sector_projector_weights(rho, ChargeSpec::from_axis(0, 0, 1));
    for (std::size_t q = 0; q < p.size(); ++q) mean[q] += p[q] / n;
  }
  for (int q = 0; q <= dims.block; ++q) {
    const double expected =
        static_cast<double>(dims.dim[q]) / static_cast<double>(dims.dim_m);
    REQUIRE(mean[q] == Catch::Approx(expected).margin(5e-3));
  }
}
