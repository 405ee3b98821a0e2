#include <catch2/catch_amalgamated.hpp>

#include "entasym/analytics.hpp"
#include "entasym/ensemble.hpp"
#include "entasym/entanglement.hpp"
#include "oracles.hpp"

using namespace entasym;

TEST_CASE("sector dimensions satisfy the Vandermonde identity", "[ensemble]") {
  SECTION("two sites, one quantum each") {
    const SectorDims d = sector_dims(2, 1, 1);
    REQUIRE(d.dim_a == std::vector<long long>{1, 1});
    REQUIRE(d.dim_b == std::vector<long long>{1, 1});
    REQUIRE(d.dim == std::vector<long long>{1, 1});
    REQUIRE(d.dim_m == 2);
  }
  SECTION("half filling at L=16") {
    REQUIRE(sector_dims(16, 4, 8).dim_m == 12870);
  }
  SECTION("direct summation") {
    const SectorDims d = sector_dims(12, 5, 3);
    long long sum = 0;
    for (long long x : d.dim) sum += x;
    REQUIRE(sum == 220);
    REQUIRE(d.dim_m == 220);
  }
  SECTION("input validation") {
    REQUIRE_THROWS_AS(sector_dims(8, 9, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(sector_dims(8, 2, 9), std::invalid_argument);
    REQUIRE_THROWS_AS(sector_dims(8, -1, 2), std::invalid_argument);
  }
}

TEST_CASE("dirichlet sampling normalizes and is deterministic", "[ensemble]") {
  const SectorDims d = sector_dims(6, 3, 3);
  RandomSource a(99), b(99);
  const auto p1 = sample_dirichlet(d, a);
  const auto p2 = sample_dirichlet(d, b);
  REQUIRE(p1 == p2);
  double sum = 0.0;
  for (double x : p1) {
    REQUIRE(x >= 0.0);
    sum += x;
  }
  REQUIRE(sum == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("single nonempty sector always gets full weight", "[ensemble]") {
  // lA = 0: only q = 0 contributes
  const SectorDims d = sector_dims(4, 0, 2);
  RandomSource rng(1);
  const auto p = sample_dirichlet(d, rng);
  REQUIRE(p.size() == 1);
  REQUIRE(p[0] == Catch::Approx(1.0));
}

TEST_CASE("dirichlet first moment at the smallest sector split", "[ensemble]") {
  const SectorDims d = sector_dims(2, 1, 1);
  RandomSource rng(7);
  double mean0 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) mean0 += sample_dirichlet(d, rng)[0] / n;
  REQUIRE(mean0 == Catch::Approx(0.5).margin(0.01));
}

TEST_CASE("dirichlet second moments match the exact formula",
          "[ensemble][slow]") {
  // E[p_j p_j'] = (d_j d_j' + delta d_j) / (d_M (d_M + 1)), 1e5 samples
  const SectorDims d = sector_dims(6, 3, 3);
  RandomSource rng(123);
  const int n = 100000;
  const int nq = d.block + 1;
  std::vector<double> sum(nq * nq, 0.0), sumsq(nq * nq, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto p = sample_dirichlet(d, rng);
    for (int j = 0; j < nq; ++j)
      for (int k = 0; k < nq; ++k) {
        const double v = p[j] * p[k];
        sum[j * nq + k] += v;
        sumsq[j * nq + k] += v * v;
      }
  }
  const double dm = static_cast<double>(d.dim_m);
  for (int j = 0; j < nq; ++j)
    for (int k = 0; k < nq; ++k) {
      const double mean = sum[j * nq + k] / n;
      const double var = sumsq[j * nq + k] / n - mean * mean;
      const double se = std::sqrt(std::max(var, 0.0) / n);
      const double dj = static_cast<double>(d.dim[j]);
      const double dk = static_cast<double>(d.dim[k]);
      const double expected = (dj * dk + (j == k ? dj : 0.0)) / (dm * (dm + 1));
      REQUIRE(std::abs(mean - expected) <= 3.0 * se + 1e-12);
    }
}

TEST_CASE("sector Haar vectors have the documented moments",
          "[ensemble][slow]") {
  RandomSource rng(31415);
  SECTION("dim=1 is a pure phase") {
    for (int i = 0; i < 10; ++i) {
      const auto v = sample_sector_haar(1, rng);
      REQUIRE(std::abs(std::abs(v(0)) - 1.0) < 1e-12);
    }
  }
  SECTION("dim=2: E[|a|^4] = 1/3") {
    double m4 = 0.0, m4sq = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const auto v = sample_sector_haar(2, rng);
      const double x = std::norm(v(0)) * std::norm(v(0));
      m4 += x;
      m4sq += x * x;
    }
    m4 /= n;
    const double se = std::sqrt((m4sq / n - m4 * m4) / n);
    REQUIRE(std::abs(m4 - 1.0 / 3.0) <= 3.0 * se);
  }
  SECTION("dim=8: E[|a_i|^2] = 1/8 per component") {
    const int n = 100000;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(8);
    Eigen::VectorXd meansq = Eigen::VectorXd::Zero(8);
    for (int i = 0; i < n; ++i) {
      const auto v = sample_sector_haar(8, rng);
      for (int c = 0; c < 8; ++c) {
        mean(c) += std::norm(v(c));
        meansq(c) += std::norm(v(c)) * std::norm(v(c));
      }
    }
    mean /= n;
    for (int c = 0; c < 8; ++c) {
      const double se = std::sqrt((meansq(c) / n - mean(c) * mean(c)) / n);
      REQUIRE(std::abs(mean(c) - 0.125) <= 3.0 * se);
    }
  }
  SECTION("invalid dimension") {
    REQUIRE_THROWS_AS(sample_sector_haar(0, rng), std::invalid_argument);
  }
}

TEST_CASE("U(1) samples live exactly in their charge sector", "[ensemble]") {
  const SectorDims dims = sector_dims(8, 3, 5);
  RandomSource rng(808);
  const HermitianOp qz = build_charge(8, ChargeSpec::from_axis(0, 0, 1));
  for (int i = 0; i < 5; ++i) {
    const PureState psi = sample_u1_state(dims, rng);
    REQUIRE(psi.is_normalized(1e-12));
    for (Eigen::Index b = 0; b < psi.amps.size(); ++b)
      if (popcount64(static_cast<std::uint64_t>(b)) != dims.charge)
        REQUIRE(psi.amps(b) == cplx(0, 0));  // identically zero support
    // <Q'_z> = M with zero variance, where Q'_z = (L - Q_z)/2 counts
    // occupied sites under the bit convention
    const Eigen::VectorXcd qpsi =
        0.5 * (8.0 * psi.amps - qz.real() * psi.amps);
    const double expect = (psi.amps.adjoint() * qpsi).real()(0);
    const double expect2 = qpsi.squaredNorm();
    REQUIRE(expect == Catch::Approx(5.0).margin(1e-12));
    REQUIRE(expect2 - expect * expect == Catch::Approx(0.0).margin(1e-12));
  }
}

TEST_CASE("U(1) mean purity matches the closed form", "[ensemble][slow]") {
  const SectorDims dims = sector_dims(8, 3, 4);
  RandomSource rng(4242);
  const int n = 10000;
  double mean = 0.0, meansq = 0.0;
  for (int i = 0; i < n; ++i) {
    const PureState psi = sample_u1_state(dims, rng);
    const double p = reduce(psi, Bipartition(8, 3)).squaredNorm();
    mean += p;
    meansq += p * p;
  }
  mean /= n;
  const double se = std::sqrt((meansq / n - mean * mean) / n);
  REQUIRE(std::abs(mean - avg_purity_u1(8, 3, 4)) <= 3.0 * se);
}

TEST_CASE("plain Haar sampling matches known purity moments",
          "[ensemble][slow]") {
  RandomSource rng(2718);
  SECTION("single qubit asymmetry in the self-averaged form") {
    // -log E[Tr rho_Q^2] at L = lA = 1 equals log(3/2)
    const int n = 10000;
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
      const PureState psi = sample_plain_haar(1, rng);
      REQUIRE(psi.is_normalized(1e-12));
      const double p0 = std::norm(psi.amps(0));
      mean += p0 * p0 + (1 - p0) * (1 - p0);
    }
    mean /= n;
    REQUIRE(-std::log(mean) ==
            Catch::Approx(std::log(1.5)).margin(0.02));
    REQUIRE(predicted_asymmetry_haar(1, 1) == Catch::Approx(std::log(1.5)));
  }
  SECTION("half-chain purity at L=8") {
    const int n = 4000;
    double mean = 0.0, meansq = 0.0;
    for (int i = 0; i < n; ++i) {
      const PureState psi = sample_plain_haar(8, rng);
      const double p = reduce(psi, Bipartition(8, 4)).squaredNorm();
      mean += p;
      meansq += p * p;
    }
    mean /= n;
    const double se = std::sqrt((meansq / n - mean * mean) / n);
    const double expected = (16.0 + 16.0) / (256.0 + 1.0);
    REQUIRE(std::abs(mean - expected) <= 3.0 * se);
  }
}

TEST_CASE("mc_asymmetry_stats is exact for the conserved axis", "[ensemble]") {
  const SectorDims dims = sector_dims(6, 3, 3);
  RandomSource rng(55);
  const McStats st =
      mc_asymmetry_stats(dims, ChargeSpec::from_axis(0, 0, 1), 50, rng);
  REQUIRE(st.mean <= 1e-10);
  REQUIRE(st.variance <= 1e-20);
  RandomSource rng2(55);
  REQUIRE_THROWS_AS(
      mc_asymmetry_stats(dims, ChargeSpec::from_axis(0, 0, 1), 1, rng2),
      std::invalid_argument);
}

TEST_CASE("mc asymmetry agrees with -log R within errors", "[ensemble][slow]") {
  const SectorDims dims = sector_dims(10, 5, 5);
  RandomSource rng(777);
  const McStats st =
      mc_asymmetry_stats(dims, ChargeSpec::from_axis(1, 0, 0), 200, rng);
  const double pred = predicted_asymmetry_u1(10, 5, 5);
  REQUIRE(std::abs(st.mean - pred) <= 3.0 * st.std_error);
}

TEST_CASE("x and y charges give statistically identical asymmetries",
          "[ensemble][slow]") {
  // the ensemble is symmetric under rotations about z
  const SectorDims dims = sector_dims(8, 4, 4);
  const int n = 1000;
  std::vector<double> xs(n), ys(n);
  RandomSource rx(9001), ry(9002);
  for (int i = 0; i < n; ++i)
    xs[i] = asymmetry(sample_u1_state(dims, rx), Bipartition(8, 4),
                      ChargeSpec::from_axis(1, 0, 0));
  for (int i = 0; i < n; ++i)
    ys[i] = asymmetry(sample_u1_state(dims, ry), Bipartition(8, 4),
                      ChargeSpec::from_axis(0, 1, 0));
  REQUIRE(oracles::ks_two_sample_pvalue(xs, ys) > 0.01);
}

TEST_CASE("streams are independent of each other and reproducible",
          "[ensemble]") {
  RandomSource root(31);
  RandomSource a = root.stream(4), b = root.stream(5), a2 = root.stream(4);
  const auto va = sample_sector_haar(4, a);
  const auto vb = sample_sector_haar(4, b);
  const auto va2 = sample_sector_haar(4, a2);
  REQUIRE((va - va2).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((va - vb).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("gamma sampler rejects shapes below one", "[ensemble]") {
  RandomSource rng(1);
  REQUIRE_THROWS_AS(rng.gamma(0.5), std::invalid_argument);
  // mean of Gamma(k) is k
  double mean = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) mean += rng.gamma(3.0) / n;
  REQUIRE(mean == Catch::Approx(3.0).margin(0.05));
}

TEST_CASE("sampling distribution does not depend on the bipartition used",
          "[ensemble][slow]") {
  // the ensemble measure is Haar on the weight-M subspace, so building the
  // state from the (L, 2, M) or (L, 5, M) sector split must give the same
  // purity statistics
  const int n = 4000;
  double m1 = 0.0, m2 = 0.0, s1 = 0.0, s2 = 0.0;
  RandomSource r1(6060), r2(7070);
  for (int i = 0; i < n; ++i) {
    const double p1 = reduce(sample_u1_state(sector_dims(8, 2, 4), r1),
                             Bipartition(8, 3))
                          .squaredNorm();
    const double p2 = reduce(sample_u1_state(sector_dims(8, 5, 4), r2),
                             Bipartition(8, 3))
                          .squaredNorm();
    m1 += p1;
    m2 += p2;
    s1 += p1 * p1;
    s2 += p2 * p2;
  }
  m1 /= n;
  m2 /= n;
  const double se = std::sqrt((s1 / n - m1 * m1) / n + (s2 / n - m2 * m2) / n);
  REQUIRE(std::abs(m1 - m2) <= 3.0 * se);
}
