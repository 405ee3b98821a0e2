// Density-of-states fit: Gaussian least squares on a Freedman-Diaconis
// histogram, yielding the peak energy E_p and the fluctuation scale
// eps* = sigma / sqrt(L) used to rescale eigenstate energies.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "entasym/common.hpp"

namespace entasym {

struct DosFit {
  double peak_energy = 0.0;      // E_p, fitted Gaussian mean
  double eps_star = 0.0;         // fitted sigma / sqrt(L)
  double eps_star_moment = 0.0;  // cross-check: spectrum stddev / sqrt(L)
  double residual = 0.0;         // relative RMS of the histogram fit
  int bin_count = 0;
  std::vector<double> bin_centers;
  std::vector<double> bin_counts;

  double rescale(double energy, int sites) const {
    return (energy - peak_energy) / (sites * eps_star);
  }
};

inline DosFit dos_fit(std::vector<double> energies, int sites) {
  if (energies.size() < 64)
    throw std::invalid_argument("dos_fit needs at least 64 energies");
  if (sites < 1) throw std::invalid_argument("dos_fit: L >= 1");
  std::sort(energies.begin(), energies.end());
  const std::size_t n = energies.size();
  double mean = 0.0;
  for (double e : energies) mean += e;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double e : energies) var += (e - mean) * (e - mean);
  var /= static_cast<double>(n);
  if (!(var > 0.0)) throw numerical_error("dos_fit: degenerate spectrum");

  // Freedman-Diaconis bin width
  const double q1 = energies[n / 4], q3 = energies[(3 * n) / 4];
  const double span = energies.back() - energies.front();
  double width = 2.0 * (q3 - q1) / std::cbrt(static_cast<double>(n));
  if (!(width > 0.0)) width = span / 64.0;
  int bins = static_cast<int>(std::ceil(span / width));
  bins = std::clamp(bins, 8, 512);

  DosFit fit;
  fit.bin_count = bins;
  fit.bin_centers.resize(bins);
  fit.bin_counts.assign(bins, 0.0);
  const double step = span / bins;
  for (int i = 0; i < bins; ++i)
    fit.bin_centers[i] = energies.front() + (i + 0.5) * step;
  for (double e : energies) {
    int i = std::min(bins - 1,
                     static_cast<int>((e - energies.front()) / step));
    fit.bin_counts[i] += 1.0;
  }

  // Gauss-Newton on a exp(-(x-mu)^2 / (2 sigma^2)), moment-initialized
  double amp = *std::max_element(fit.bin_counts.begin(), fit.bin_counts.end());
  double mu = mean;
  double sigma = std::sqrt(var);
  for (int iter = 0; iter < 60; ++iter) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (int i = 0; i < bins; ++i) {
      const double x = fit.bin_centers[i];
      const double z = (x - mu) / sigma;
      const double g = std::exp(-0.5 * z * z);
      const double model = amp * g;
      const double r = fit.bin_counts[i] - model;
      Eigen::Vector3d jac(g, model * z / sigma, model * z * z / sigma);
      jtj += jac * jac.transpose();
      jtr += jac * r;
    }
    jtj.diagonal() += Eigen::Vector3d::Constant(1e-12 * jtj.trace());
    const Eigen::Vector3d delta = jtj.ldlt().solve(jtr);
    amp += delta(0);
    mu += delta(1);
    sigma += delta(2);
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      throw numerical_error("dos_fit: Gaussian fit diverged");
    if (delta.cwiseAbs().maxCoeff() <
        1e-12 * std::max(1.0, std::abs(sigma)))
      break;
  }

  double ss_res = 0.0, ss_tot = 0.0;
  for (int i = 0; i < bins; ++i) {
    const double z = (fit.bin_centers[i] - mu) / sigma;
    const double r = fit.bin_counts[i] - amp * std::exp(-0.5 * z * z);
    ss_res += r * r;
    ss_tot += fit.bin_counts[i] * fit.bin_counts[i];
  }
  fit.peak_energy = mu;
  fit.eps_star = sigma / std::sqrt(static_cast<double>(sites));
  fit.eps_star_moment = std::sqrt(var / sites);
  fit.residual = std::sqrt(ss_res / ss_tot);
  if (!(fit.eps_star > 0.0)) throw numerical_error("dos_fit: eps* <= 0");
  return fit;
}

}  // namespace entasym
