// Experiment runners behind the CLI: full-spectrum asymmetry scans, charge
// angle sweeps, microcanonical window averages, ensemble validation against
// the closed-form prediction, and density-of-states fits.
//
// Every command writes CSV (or JSON for dos-fit) with a schema_version
// comment line, 12-significant-digit floats and LF endings, assembled in a
// deterministic order so a rerun with the same seed is byte-identical.
#pragma once

#include <cmath>
#include <cstdint>
#include <iostream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "entasym/analytics.hpp"
#include "entasym/common.hpp"
#include "entasym/dos.hpp"
#include "entasym/eig.hpp"
#include "entasym/ensemble.hpp"
#include "entasym/entanglement.hpp"
#include "entasym/spins.hpp"

namespace entasym {

inline constexpr int kSchemaVersion = 1;
inline constexpr int kMaxScanSites = 14;  // full-decomposition cap

struct ModelParams {
  enum class Kind { mfim, nnn_ising, xxz_fields };
  Kind kind = Kind::mfim;
  int sites = 12;
  double g = 1.1;
  double h = 0.35;
  double delta = 2.0;   // xxz only
  double h1 = 0.25;     // boundary fields
  double hL = -0.25;

  std::string name() const {
    switch (kind) {
      case Kind::mfim: return "mfim";
      case Kind::nnn_ising: return "nnn-ising";
      case Kind::xxz_fields: return "xxz-fields";
    }
    return "?";
  }

  HermitianOp build() const {
    switch (kind) {
      case Kind::mfim: return build_mfim(sites, g, h, h1, hL);
      case Kind::nnn_ising: return build_nnn_ising(sites, g, h, h1, hL);
      case Kind::xxz_fields:
        return build_xxz_fields(sites, delta, g, h, h1, hL);
    }
    throw std::invalid_argument("unknown model");
  }

  double theta_star() const { return std::atan2(g, h); }

  std::uint64_t digest() const {
    std::ostringstream ss;
    ss << name() << '|' << sites << '|' << fmt12(g) << '|' << fmt12(h) << '|'
       << fmt12(delta) << '|' << fmt12(h1) << '|' << fmt12(hL);
    return fnv1a64(ss.str());
  }
};

inline ModelParams::Kind model_kind_from_name(const std::string& s) {
  if (s == "mfim") return ModelParams::Kind::mfim;
  if (s == "nnn-ising") return ModelParams::Kind::nnn_ising;
  if (s == "xxz-fields") return ModelParams::Kind::xxz_fields;
  throw std::invalid_argument("unknown model '" + s +
                              "' (expected mfim | nnn-ising | xxz-fields)");
}

// "x" | "y" | "z" | "theta:<rad>" | "axis:<nx>,<ny>,<nz>"
inline ChargeSpec parse_charge(const std::string& s) {
  if (s == "x") return ChargeSpec::from_axis(1, 0, 0);
  if (s == "y") return ChargeSpec::from_axis(0, 1, 0);
  if (s == "z") return ChargeSpec::from_axis(0, 0, 1);
  if (s.rfind("theta:", 0) == 0)
    return ChargeSpec::from_theta(std::stod(s.substr(6)));
  if (s.rfind("axis:", 0) == 0) {
    double v[3];
    std::istringstream in(s.substr(5));
    char comma;
    if (!(in >> v[0] >> comma >> v[1] >> comma >> v[2]))
      throw std::invalid_argument("bad axis spec '" + s + "'");
    return ChargeSpec::from_axis(v[0], v[1], v[2]);
  }
  throw std::invalid_argument("bad charge spec '" + s + "'");
}

// Fig-2 mid-spectrum window sizes; other L fall back to a density heuristic.
inline int default_window_count(int sites) {
  switch (sites) {
    case 8: return 46;
    case 10: return 68;
    case 12: return 100;
    case 14: return 200;
    default: {
      long long dim = hilbert_dim(sites);
      return static_cast<int>(std::clamp<long long>(dim / 40, 8, dim));
    }
  }
}

namespace detail {

inline void check_scan_cap(int sites) {
  if (sites > kMaxScanSites)
    throw resource_limit_error(
        "L = " + std::to_string(sites) + " exceeds the full-spectrum cap; "
        "use L <= " + std::to_string(kMaxScanSites));
}

inline EigenSpectrum model_spectrum(const ModelParams& model,
                                    const std::string& cache_dir) {
  if (cache_dir.empty()) return eigh(model.build());
  const std::string path = cache_dir + "/" + model.name() + "-L" +
                           std::to_string(model.sites) + "-" +
                           std::to_string(model.digest()) + ".spec";
  if (auto cached = load_spectrum(path, model.sites, model.digest()))
    return std::move(*cached);
  EigenSpectrum spec = eigh(model.build());
  save_spectrum(path, model.sites, model.digest(), spec);
  return spec;
}

inline std::vector<double> rescaled_energies(const EigenSpectrum& spec,
                                             const DosFit& fit, int sites) {
  std::vector<double> eps(spec.dim());
  for (Eigen::Index k = 0; k < spec.dim(); ++k)
    eps[k] = fit.rescale(spec.energies(k), sites);
  return eps;
}

inline void write_schema_line(std::ostream& out) {
  out << "# schema_version=" << kSchemaVersion << "\n";
}

struct SweepPoint {
  double angle = 0.0;
  ChargeSpec charge{{0, 0, 1}};
  double mean = 0.0;
  double stddev = 0.0;
};

// mean/stddev of the full-system asymmetry over a window of eigenstates,
// for each grid point of a one-parameter charge family
inline std::vector<SweepPoint> angle_sweep(
    const EigenSpectrum& spec, const std::vector<int>& window,
    const std::vector<double>& angles,
    const std::function<ChargeSpec(double)>& charge_at, int threads) {
  const int sites = std::countr_zero(static_cast<std::uint64_t>(spec.dim()));
  const Bipartition full(sites, sites);
  std::vector<SweepPoint> points(angles.size());
  parallel_for(angles.size(), threads, [&](std::size_t i) {
    SweepPoint pt;
    pt.angle = angles[i];
    pt.charge = charge_at(angles[i]);
    std::vector<double> vals(window.size());
    for (std::size_t w = 0; w < window.size(); ++w)
      vals[w] = asymmetry(spec.eigenstate(window[w]), full, pt.charge);
    const McStats st = welford(vals);
    pt.mean = st.mean;
    pt.stddev = std::sqrt(st.variance);
    points[i] = pt;
  });
  return points;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i)
    xs[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return xs;
}

}  // namespace detail

// ---------------------------------------------------------------- spectrum

struct SpectrumScanConfig {
  ModelParams model;
  std::vector<int> block_sizes;
  ChargeSpec charge = ChargeSpec::from_axis(0, 1, 0);
  int threads = hardware_threads();
  std::string cache_dir;
};

// One row per (eigenstate, lA): asymmetry plus the ensemble prediction at
// the sector mapped from the rescaled energy, and the plain-Haar baseline.
inline void run_spectrum_scan(const SpectrumScanConfig& cfg,
                              std::ostream& out) {
  detail::check_scan_cap(cfg.model.sites);
  if (cfg.block_sizes.empty())
    throw std::invalid_argument("spectrum-scan needs at least one lA");
  const int sites = cfg.model.sites;
  for (int la : cfg.block_sizes) Bipartition(sites, la);  // validate

  const EigenSpectrum spec = detail::model_spectrum(cfg.model, cfg.cache_dir);
  std::vector<double> energy_list(spec.energies.data(),
                                  spec.energies.data() + spec.dim());
  const DosFit fit = dos_fit(energy_list, sites);
  const auto eps = detail::rescaled_energies(spec, fit, sites);

  const std::size_t n_states = static_cast<std::size_t>(spec.dim());
  std::vector<std::string> rows(n_states);
  parallel_for(n_states, cfg.threads, [&](std::size_t k) {
    const PureState psi = spec.eigenstate(static_cast<Eigen::Index>(k));
    std::string row;
    for (int la : cfg.block_sizes) {
      const double ds = asymmetry(psi, Bipartition(sites, la), cfg.charge);
      const int sector = energy_to_sector(std::clamp(eps[k], -1.0, 1.0), sites);
      row += std::to_string(k) + ',' + fmt12(spec.energies(k)) + ',' +
             fmt12(eps[k]) + ',' + std::to_string(la) + ',' +
             fmt12(cfg.charge.axis.x()) + ',' + fmt12(cfg.charge.axis.y()) +
             ',' + fmt12(cfg.charge.axis.z()) + ',' + fmt12(ds) + ',' +
             fmt12(predicted_asymmetry_u1(sites, la, sector)) + ',' +
             fmt12(predicted_asymmetry_haar(sites, la)) + '\n';
    }
    rows[k] = std::move(row);
  });

  detail::write_schema_line(out);
  out << "# model=" << cfg.model.name() << " L=" << sites
      << " eps_star=" << fmt12(fit.eps_star)
      << " peak_energy=" << fmt12(fit.peak_energy) << "\n";
  out << "eigen_index,energy,eps_rescaled,ell_a,nx,ny,nz,asym2,pred_u1,"
         "pred_haar\n";
  for (const auto& r : rows) out << r;
}

// ------------------------------------------------------------------ sweeps

struct AngleSweepConfig {
  ModelParams model;
  int grid_points = 64;
  double angle_min = 0.0;
  double angle_max = std::numbers::pi;
  int window_count = 0;  // 0: per-L default
  int threads = hardware_threads();
  std::string cache_dir;
};

namespace detail {

inline void run_angle_sweep(const AngleSweepConfig& cfg, bool phi_mode,
                            std::ostream& out) {
  check_scan_cap(cfg.model.sites);
  if (cfg.grid_points < 1)
    throw std::invalid_argument("sweep needs a nonempty angle grid");
  const int sites = cfg.model.sites;
  const EigenSpectrum spec = model_spectrum(cfg.model, cfg.cache_dir);
  std::vector<double> energy_list(spec.energies.data(),
                                  spec.energies.data() + spec.dim());
  const DosFit fit = dos_fit(energy_list, sites);
  const auto eps = rescaled_energies(spec, fit, sites);
  const int count =
      cfg.window_count > 0 ? cfg.window_count : default_window_count(sites);
  if (count > spec.dim())
    throw std::invalid_argument("window larger than the spectrum");
  const auto window = mid_spectrum_window(eps, 0.0, count);

  const double theta_star = cfg.model.theta_star();
  const auto angles =
      linspace(cfg.angle_min, cfg.angle_max, cfg.grid_points);
  const auto points = angle_sweep(
      spec, window, angles,
      [&](double a) {
        return phi_mode ? ChargeSpec::from_phi(a, theta_star)
                        : ChargeSpec::from_theta(a);
      },
      cfg.threads);

  std::size_t imin = 0, imax = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].mean < points[imin].mean) imin = i;
    if (points[i].mean > points[imax].mean) imax = i;
  }
  const int half = energy_to_sector(0.0, sites);
  const double reference = predicted_asymmetry_u1(sites, sites, half);

  const char* name = phi_mode ? "phi" : "theta";
  write_schema_line(out);
  out << "# model=" << cfg.model.name() << " L=" << sites
      << " window_count=" << count << "\n";
  out << "# theta_star=" << fmt12(theta_star) << "\n";
  out << "# argmin_" << name << "=" << fmt12(points[imin].angle) << "\n";
  out << "# argmax_" << name << "=" << fmt12(points[imax].angle) << "\n";
  out << "# eq7_reference_half_filling=" << fmt12(reference) << "\n";
  out << name << ",nx,ny,nz,mean_asym2,stddev_asym2\n";
  for (const auto& p : points)
    out << fmt12(p.angle) << ',' << fmt12(p.charge.axis.x()) << ','
        << fmt12(p.charge.axis.y()) << ',' << fmt12(p.charge.axis.z()) << ','
        << fmt12(p.mean) << ',' << fmt12(p.stddev) << '\n';
}

}  // namespace detail

// Average full-system asymmetry of mid-spectrum eigenstates as a function of
// the angle theta defining Q_theta = cos(theta) Q_z + sin(theta) Q_x.
inline void run_theta_sweep(const AngleSweepConfig& cfg, std::ostream& out) {
  detail::run_angle_sweep(cfg, false, out);
}

// Same along the arc rotating Q_{theta*} toward Q_y by phi.
inline void run_phi_sweep(const AngleSweepConfig& cfg, std::ostream& out) {
  detail::run_angle_sweep(cfg, true, out);
}

// --------------------------------------------------------- window averages

struct WindowAverageConfig {
  ModelParams model;
  ChargeSpec charge = ChargeSpec::from_axis(0, 1, 0);
  std::vector<double> centers = {0.0, 0.2, -0.4};
  double width = 0.05;   // in eps* units; used when count == 0
  int count = 0;         // select by state count instead of width
  std::vector<int> block_sizes;  // default 0..L
  int threads = hardware_threads();
  std::string cache_dir;
};

// Microcanonical window averages versus subsystem size, with the ensemble
// prediction at the mapped sector and the plain-Haar baseline.
inline void run_window_average(const WindowAverageConfig& cfg,
                               std::ostream& out) {
  detail::check_scan_cap(cfg.model.sites);
  if (cfg.centers.empty())
    throw std::invalid_argument("window-average needs at least one center");
  const int sites = cfg.model.sites;
  std::vector<int> blocks = cfg.block_sizes;
  if (blocks.empty())
    for (int la = 0; la <= sites; ++la) blocks.push_back(la);
  for (int la : blocks) Bipartition(sites, la);

  const EigenSpectrum spec = detail::model_spectrum(cfg.model, cfg.cache_dir);
  std::vector<double> energy_list(spec.energies.data(),
                                  spec.energies.data() + spec.dim());
  const DosFit fit = dos_fit(energy_list, sites);
  const auto eps = detail::rescaled_energies(spec, fit, sites);

  struct Cell {
    double center;
    int block;
    std::vector<int> states;
  };
  std::vector<Cell> cells;
  for (double c : cfg.centers) {
    if (c < eps.front() || c > eps.back())
      throw std::invalid_argument("window center outside the spectrum range");
    std::vector<int> states;
    if (cfg.count > 0) {
      if (cfg.count > spec.dim())
        throw std::invalid_argument("window larger than the spectrum");
      states = mid_spectrum_window(eps, c, cfg.count);
    } else {
      for (std::size_t k = 0; k < eps.size(); ++k)
        if (std::abs(eps[k] - c) <= cfg.width / 2.0)
          states.push_back(static_cast<int>(k));
    }
    if (states.size() < 10)
      std::cerr << "warning: window at " << c << " holds only "
                << states.size() << " states\n";
    for (int la : blocks) cells.push_back({c, la, states});
  }

  std::vector<std::string> rows(cells.size());
  parallel_for(cells.size(), cfg.threads, [&](std::size_t i) {
    const Cell& cell = cells[i];
    std::vector<double> vals(cell.states.size());
    for (std::size_t s = 0; s < cell.states.size(); ++s)
      vals[s] = asymmetry(spec.eigenstate(cell.states[s]),
                          Bipartition(sites, cell.block), cfg.charge);
    const McStats st = welford(vals);
    const int sector = energy_to_sector(std::clamp(cell.center, -1.0, 1.0),
                                        sites);
    rows[i] = fmt12(cell.center) + ',' + std::to_string(cell.block) + ',' +
              std::to_string(cell.states.size()) + ',' +
              std::to_string(sector) + ',' + fmt12(st.mean) + ',' +
              fmt12(std::sqrt(st.variance)) + ',' +
              fmt12(predicted_asymmetry_u1(sites, cell.block, sector)) + ',' +
              fmt12(predicted_asymmetry_haar(sites, cell.block)) + '\n';
  });

  detail::write_schema_line(out);
  out << "# model=" << cfg.model.name() << " L=" << sites
      << " eps_star=" << fmt12(fit.eps_star) << "\n";
  out << "center_eps,ell_a,n_states,sector_m,mean_asym2,stddev_asym2,"
         "pred_u1,pred_haar\n";
  for (const auto& r : rows) out << r;
}

// ------------------------------------------------------ ensemble validation

struct EnsembleValidateConfig {
  int sites = 10;
  std::vector<int> charges;      // sector labels M
  std::vector<int> block_sizes;  // default 0..L
  int samples = 200;
  ChargeSpec charge = ChargeSpec::from_axis(1, 0, 0);
  std::uint64_t seed = 12345;
  int threads = hardware_threads();
};

struct EnsembleValidateCell {
  int charge_m = 0;
  int block = 0;
  McStats stats;
  double prediction = 0.0;
  bool flagged = false;
};

// Monte Carlo mean asymmetry per (M, lA) against -log R. States are drawn
// once per sector M (the ensemble measure does not depend on the bipartition)
// and reused across subsystem sizes; one derived stream per sample keeps the
// output independent of the thread count.
inline std::vector<EnsembleValidateCell> ensemble_validate_cells(
    const EnsembleValidateConfig& cfg) {
  if (cfg.samples < 50)
    throw std::invalid_argument("ensemble-validate needs >= 50 samples");
  if (cfg.charges.empty())
    throw std::invalid_argument("ensemble-validate needs at least one M");
  std::vector<int> blocks = cfg.block_sizes;
  if (blocks.empty())
    for (int la = 0; la <= cfg.sites; ++la) blocks.push_back(la);
  const RandomSource root(cfg.seed);

  std::vector<EnsembleValidateCell> cells;
  for (std::size_t mi = 0; mi < cfg.charges.size(); ++mi) {
    const int m = cfg.charges[mi];
    const SectorDims dims = sector_dims(cfg.sites, cfg.sites / 2, m);
    // values[i] holds one sample's asymmetry for every block size
    std::vector<std::vector<double>> values(
        cfg.samples, std::vector<double>(blocks.size()));
    parallel_for(cfg.samples, cfg.threads, [&](std::size_t i) {
      RandomSource rng = root.stream(mi * static_cast<std::uint64_t>(
                                              cfg.samples) + i);
      const PureState psi = sample_u1_state(dims, rng);
      for (std::size_t b = 0; b < blocks.size(); ++b)
        values[i][b] = asymmetry(psi, Bipartition(cfg.sites, blocks[b]),
                                 cfg.charge);
    });
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      std::vector<double> column(cfg.samples);
      for (int i = 0; i < cfg.samples; ++i) column[i] = values[i][b];
      EnsembleValidateCell cell;
      cell.charge_m = m;
      cell.block = blocks[b];
      cell.stats = welford(column);
      cell.prediction = predicted_asymmetry_u1(cfg.sites, blocks[b], m);
      cell.flagged = std::abs(cell.stats.mean - cell.prediction) >
                     3.0 * cell.stats.std_error;
      cells.push_back(cell);
    }
  }
  return cells;
}

inline void run_ensemble_validate(const EnsembleValidateConfig& cfg,
                                  std::ostream& out) {
  const auto cells = ensemble_validate_cells(cfg);
  detail::write_schema_line(out);
  out << "# sites=" << cfg.sites << " samples=" << cfg.samples
      << " seed=" << cfg.seed << "\n";
  out << "sites,charge_m,ell_a,samples,mc_mean,mc_variance,mc_se,pred_u1,"
         "abs_dev,flagged\n";
  for (const auto& c : cells)
    out << cfg.sites << ',' << c.charge_m << ',' << c.block << ','
        << c.stats.samples << ',' << fmt12(c.stats.mean) << ','
        << fmt12(c.stats.variance) << ',' << fmt12(c.stats.std_error) << ','
        << fmt12(c.prediction) << ','
        << fmt12(std::abs(c.stats.mean - c.prediction)) << ','
        << (c.flagged ? 1 : 0) << '\n';
}

// ------------------------------------------------------------------- DOS

struct DosFitConfig {
  ModelParams model;
  std::string cache_dir;
};

inline void run_dos_fit(const DosFitConfig& cfg, std::ostream& out) {
  detail::check_scan_cap(cfg.model.sites);
  const EigenSpectrum spec = detail::model_spectrum(cfg.model, cfg.cache_dir);
  std::vector<double> energy_list(spec.energies.data(),
                                  spec.energies.data() + spec.dim());
  const DosFit fit = dos_fit(energy_list, cfg.model.sites);

  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["model"] = cfg.model.name();
  j["sites"] = cfg.model.sites;
  j["g"] = cfg.model.g;
  j["h"] = cfg.model.h;
  j["delta"] = cfg.model.delta;
  j["h1"] = cfg.model.h1;
  j["hL"] = cfg.model.hL;
  j["peak_energy"] = fit.peak_energy;
  j["eps_star"] = fit.eps_star;
  j["eps_star_moment"] = fit.eps_star_moment;
  j["fit_residual"] = fit.residual;
  j["bin_count"] = fit.bin_count;
  j["histogram"]["centers"] = fit.bin_centers;
  j["histogram"]["counts"] = fit.bin_counts;
  out << j.dump(2) << "\n";
}

}  // namespace entasym
