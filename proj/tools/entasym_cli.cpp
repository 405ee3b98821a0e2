// Command-line experiment runner: spectrum scans, charge-angle sweeps,
// microcanonical window averages, ensemble validation and DOS fits, emitting
// CSV/JSON data files.
//
// Exit codes: 0 success, 2 invalid configuration, 3 resource cap exceeded,
// 4 numerical failure.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "entasym/entasym.hpp"

namespace {

using namespace entasym;

struct CommonOpts {
  std::uint64_t seed = 12345;
  int threads = hardware_threads();
  std::string out;
  std::string cache_dir;
  std::string config_path;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
  sub->set_help_flag("--help", "print help");  // frees -h for the field
  sub->add_option("--seed", opts.seed, "random seed")->capture_default_str();
  sub->add_option("--threads", opts.threads, "worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--out", opts.out, "output file (default: stdout)");
  sub->add_option("--cache-dir", opts.cache_dir,
                  "directory for binary spectrum caches");
  sub->add_option("--config", opts.config_path,
                  "flat key=value config file; command-line flags override");
}

void add_model(CLI::App* sub, ModelParams& model, std::string& model_name) {
  sub->add_option("--model", model_name, "mfim | nnn-ising | xxz-fields")
      ->check(CLI::IsMember({"mfim", "nnn-ising", "xxz-fields"}))
      ->capture_default_str();
  sub->add_option("-L,--sites", model.sites, "chain length")
      ->check(CLI::Range(2, kMaxSites))
      ->capture_default_str();
  sub->add_option("--g", model.g, "transverse field")->capture_default_str();
  sub->add_option("--h", model.h, "longitudinal field")->capture_default_str();
  sub->add_option("--delta", model.delta, "XXZ anisotropy")
      ->capture_default_str();
  sub->add_option("--h1", model.h1, "boundary field on site 1")
      ->capture_default_str();
  sub->add_option("--hL", model.hL, "boundary field on site L")
      ->capture_default_str();
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Flat key=value file; every key must name an option of the invoked
// subcommand and values already given on the command line win.
void apply_config_file(CLI::App* sub, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value");
    const std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (key == "config" || key == "help")
      throw std::invalid_argument("config key '" + key + "' is not allowed");
    CLI::Option* op = sub->get_option_no_throw("--" + key);
    if (op == nullptr)
      throw std::invalid_argument("unknown config key '" + key + "'");
    if (op->count() > 0) continue;  // command-line flag overrides
    op->add_result(value);
    op->run_callback();  // typed conversion and range validation
  }
}

void write_output(const CommonOpts& opts,
                  const std::function<void(std::ostream&)>& writer) {
  if (opts.out.empty()) {
    writer(std::cout);
    return;
  }
  std::ofstream f(opts.out, std::ios::binary | std::ios::trunc);
  if (!f) throw std::invalid_argument("cannot open output file " + opts.out);
  writer(f);
  if (!f) throw std::runtime_error("write failed for " + opts.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entanglement asymmetry of chaotic spin-chain eigenstates "
               "versus the U(1)-symmetric Haar ensemble"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  CommonOpts common;
  ModelParams model;
  std::string model_name = "mfim";
  std::string charge = "y";
  std::string charge_ens = "x";
  std::vector<int> blocks;
  std::vector<int> charges_m;
  std::vector<double> centers = {0.0, 0.2, -0.4};
  double width = 0.05;
  int count = 0;
  int grid = 64;
  double angle_min = 0.0;
  double angle_max = std::numbers::pi;
  int window_count = 0;
  int samples = 200;
  int ens_sites = 10;

  auto* scan = app.add_subcommand(
      "spectrum-scan", "asymmetry of every eigenstate, one row per (state, lA)");
  add_common(scan, common);
  add_model(scan, model, model_name);
  scan->add_option("--ell-a", blocks, "subsystem sizes (comma separated)")
      ->delimiter(',');
  scan->add_option("--charge", charge, "x|y|z|theta:<rad>|axis:x,y,z")
      ->capture_default_str();

  auto* theta = app.add_subcommand(
      "theta-sweep", "mid-spectrum full-system asymmetry along Q_theta");
  auto* phi = app.add_subcommand(
      "phi-sweep",
      "mid-spectrum full-system asymmetry along the Q_theta* -> Q_y arc");
  for (CLI::App* sub : {theta, phi}) {
    add_common(sub, common);
    add_model(sub, model, model_name);
    sub->add_option("--grid", grid, "number of angle grid points")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--angle-min", angle_min, "grid start (rad)")
        ->capture_default_str();
    sub->add_option("--angle-max", angle_max, "grid end (rad)")
        ->capture_default_str();
    sub->add_option("--window-count", window_count,
                    "mid-spectrum window size (0: per-L default)")
        ->capture_default_str();
  }

  auto* win = app.add_subcommand(
      "window-average", "asymmetry vs lA averaged over energy windows");
  add_common(win, common);
  add_model(win, model, model_name);
  win->add_option("--charge", charge, "x|y|z|theta:<rad>|axis:x,y,z")
      ->capture_default_str();
  win->add_option("--centers", centers,
                  "window centers in eps/eps* units (use --centers=0,-0.4)")
      ->delimiter(',')
      ->capture_default_str();
  win->add_option("--width", width, "window width in eps* units")
      ->capture_default_str();
  win->add_option("--count", count,
                  "select a fixed number of states instead of a width")
      ->capture_default_str();
  win->add_option("--ell-a", blocks, "subsystem sizes (default 0..L)")
      ->delimiter(',');

  auto* ens = app.add_subcommand(
      "ensemble-validate",
      "Monte Carlo asymmetry of U(1)-Haar states vs the -log R prediction");
  add_common(ens, common);
  ens->add_option("-L,--sites", ens_sites, "chain length")
      ->check(CLI::Range(2, kMaxSites))
      ->capture_default_str();
  ens->add_option("--m", charges_m, "charge sectors M (comma separated)")
      ->delimiter(',');
  ens->add_option("--ell-a", blocks, "subsystem sizes (default 0..L)")
      ->delimiter(',');
  ens->add_option("--samples", samples, "states per sector")
      ->capture_default_str();
  ens->add_option("--charge", charge_ens,
                  "symmetrization charge (default x, orthogonal to z)")
      ->capture_default_str();

  auto* dos = app.add_subcommand("dos-fit",
                                 "density-of-states fit (JSON report)");
  add_common(dos, common);
  add_model(dos, model, model_name);

  try {
    app.parse(argc, argv);
    CLI::App* sub = app.get_subcommands().front();
    if (!common.config_path.empty()) apply_config_file(sub, common.config_path);
    model.kind = model_kind_from_name(model_name);

    std::function<void(std::ostream&)> runner;
    if (sub == scan) {
      SpectrumScanConfig cfg;
      cfg.model = model;
      cfg.block_sizes = blocks;
      cfg.charge = parse_charge(charge);
      cfg.threads = common.threads;
      cfg.cache_dir = common.cache_dir;
      runner = [cfg](std::ostream& o) { run_spectrum_scan(cfg, o); };
    } else if (sub == theta || sub == phi) {
      AngleSweepConfig cfg;
      cfg.model = model;
      cfg.grid_points = grid;
      cfg.angle_min = angle_min;
      cfg.angle_max = angle_max;
      cfg.window_count = window_count;
      cfg.threads = common.threads;
      cfg.cache_dir = common.cache_dir;
      const bool phi_mode = sub == phi;
      runner = [cfg, phi_mode](std::ostream& o) {
        phi_mode ? run_phi_sweep(cfg, o) : run_theta_sweep(cfg, o);
      };
    } else if (sub == win) {
      WindowAverageConfig cfg;
      cfg.model = model;
      cfg.charge = parse_charge(charge);
      cfg.centers = centers;
      cfg.width = width;
      cfg.count = count;
      cfg.block_sizes = blocks;
      cfg.threads = common.threads;
      cfg.cache_dir = common.cache_dir;
      runner = [cfg](std::ostream& o) { run_window_average(cfg, o); };
    } else if (sub == ens) {
      EnsembleValidateConfig cfg;
      cfg.sites = ens_sites;
      cfg.charges = charges_m;
      cfg.block_sizes = blocks;
      cfg.samples = samples;
      cfg.charge = parse_charge(charge_ens);
      cfg.seed = common.seed;
      cfg.threads = common.threads;
      runner = [cfg](std::ostream& o) { run_ensemble_validate(cfg, o); };
    } else {
      DosFitConfig cfg;
      cfg.model = model;
      cfg.cache_dir = common.cache_dir;
      runner = [cfg](std::ostream& o) { run_dos_fit(cfg, o); };
    }
    write_output(common, runner);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const entasym::resource_limit_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
