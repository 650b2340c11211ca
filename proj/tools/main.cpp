// spincav command line: every module behind one executable with a shared
// configuration file, deterministic outputs and machine-readable emitters.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spincav/config.hpp"
#include "spincav/fit.hpp"
#include "spincav/linear_spectrum.hpp"
#include "spincav/parallel.hpp"
#include "spincav/photon_stats.hpp"
#include "spincav/retrieval.hpp"
#include "spincav/spectrum_scan.hpp"
#include "spincav/units.hpp"

namespace {

using nlohmann::json;
using namespace spincav;

constexpr const char* kVersion = "spincav 1.0.0 (config-schema 1)";

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

std::string fmt(double v, const char* format = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::filesystem::path resolve_output(const RunConfig& config,
                                     const std::string& name) {
  std::filesystem::path p(name);
  if (!p.is_absolute()) p = std::filesystem::path(config.output_dir) / p;
  if (!p.parent_path().empty()) {
    std::filesystem::create_directories(p.parent_path());
  }
  return p;
}

std::ofstream open_output(const RunConfig& config, const std::string& name) {
  const auto path = resolve_output(config, name);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file '" + path.string() + "'");
  return out;
}

void csv_header(std::ofstream& out, const RunConfig& config,
                const std::string& subcommand, const std::string& columns) {
  out << "# spincav " << subcommand << "\n";
  out << "# config: " << config.echo() << "\n";
  out << columns << "\n";
}

json json_envelope(const RunConfig& config, const std::string& subcommand) {
  json j;
  j["tool"] = "spincav";
  j["version"] = kVersion;
  j["subcommand"] = subcommand;
  j["config"] = config.echo();
  return j;
}

void write_json(const RunConfig& config, const std::string& name,
                const json& payload) {
  auto out = open_output(config, name);
  out << payload.dump(2) << "\n";
}

// Optional flag values applied onto the config after the file loads, so
// overrides win and the echoed config reflects what actually ran.
struct Override {
  std::string key;
  std::optional<double> value;
};

void apply_overrides(RunConfig& config, const std::vector<Override>& flags) {
  for (const auto& o : flags) {
    if (o.value) config.set(o.key, fmt(*o.value, "%.17g"));
  }
}

double mhz(double rad_us) { return rad_us / (2.0 * constants::pi); }

// ---------------------------------------------------------------------------

int run_derive(const RunConfig& config, const std::string& json_out) {
  const auto derived = derive_cavity(config.cavity_geometry());
  const auto g = collective_g(derived.g0, config.atom_number);
  std::printf("finesse             %10.3f\n", derived.finesse);
  std::printf("free spectral range %10.3f MHz\n",
              derived.free_spectral_range / 1e6);
  std::printf("kappa               %10.4f MHz (x 2pi)\n",
              derived.kappa.megahertz());
  std::printf("kappa0              %10.4f MHz (x 2pi)\n",
              derived.kappa0.megahertz());
  std::printf("kappa/kappa0        %10.4f\n",
              derived.kappa.rad_per_us() / derived.kappa0.rad_per_us());
  std::printf("escape efficiency   %10.4f\n", derived.escape_efficiency);
  std::printf("g0                  %10.4f kHz (x 2pi)\n",
              derived.g0.kilohertz());
  std::printf("collective g (N=%.3g) %.4f MHz (x 2pi)\n", config.atom_number,
              g.megahertz());
  if (!json_out.empty()) {
    json j = json_envelope(config, "derive");
    j["finesse"] = derived.finesse;
    j["free_spectral_range_MHz"] = derived.free_spectral_range / 1e6;
    j["kappa_MHz"] = derived.kappa.megahertz();
    j["kappa0_MHz"] = derived.kappa0.megahertz();
    j["kappa_over_kappa0"] =
        derived.kappa.rad_per_us() / derived.kappa0.rad_per_us();
    j["escape_efficiency"] = derived.escape_efficiency;
    j["g0_kHz"] = derived.g0.kilohertz();
    j["collective_g_MHz"] = g.megahertz();
    j["atom_number"] = config.atom_number;
    write_json(config, json_out, j);
  }
  return 0;
}

int run_reflectance(const RunConfig& config, const std::string& out_name) {
  const auto params = config.two_level_params();
  const double span =
      AngularFrequency::from_megahertz(config.probe_span_MHz).rad_per_us();
  const Eigen::ArrayXd grid =
      Eigen::ArrayXd::LinSpaced(config.probe_points, -span, span);
  const auto curve = reflectance_curve(grid, params);
  auto out = open_output(config, out_name);
  csv_header(out, config, "reflectance", "detuning_MHz,reflectance");
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    out << fmt(mhz(curve.probe_detunings[i])) << ","
        << fmt(curve.reflectance[i]) << "\n";
  }
  return 0;
}

int run_retrieve(const RunConfig& config, const std::string& out_name,
                 const std::string& summary_name, int points) {
  const auto params = config.three_level_params();
  const auto pulse = config.read_pulse();
  RetrievalOptions opt;
  opt.rel_tol = config.rel_tol;
  opt.horizon = config.horizon_us;
  const auto result = integrate_retrieval(params, pulse, opt);

  auto out = open_output(config, out_name);
  csv_header(out, config, "retrieve", "t_us,intensity");
  const double t_end = result.times[result.times.size() - 1];
  for (int i = 0; i < points; ++i) {
    const double t = t_end * i / (points - 1);
    out << fmt(t) << "," << fmt(result.intensity_at(t)) << "\n";
  }

  json j = json_envelope(config, "retrieve");
  j["chi"] = result.chi;
  j["budget"] = {{"through_cavity", result.budget.through_cavity},
                 {"through_atom", result.budget.through_atom},
                 {"through_spin", result.budget.through_spin},
                 {"residual_norm", result.budget.residual_norm}};
  j["horizon_us"] = t_end;
  j["tolerance"] = result.tolerance;
  write_json(config, summary_name, j);
  return 0;
}

int run_scan(const RunConfig& config, unsigned workers,
             const std::string& out_name, const std::string& sidecar_name) {
  const auto base = config.three_level_params();
  const auto pulse = config.read_pulse();
  const auto axis = [](double lo, double hi, int n) {
    return Eigen::ArrayXd(Eigen::ArrayXd::LinSpaced(
        n, AngularFrequency::from_megahertz(lo).rad_per_us(),
        AngularFrequency::from_megahertz(hi).rad_per_us()));
  };
  ScanOptions opt;
  opt.rel_tol = config.rel_tol;
  opt.workers = workers;
  opt.cache_dir = config.cache_dir;
  const auto grid = scan_efficiency(
      base, pulse, axis(config.dr_min_MHz, config.dr_max_MHz, config.dr_points),
      axis(config.dc_min_MHz, config.dc_max_MHz, config.dc_points), opt);

  auto out = open_output(config, out_name);
  csv_header(out, config, "scan", "dc_MHz,dr_MHz,chi");
  for (Eigen::Index ic = 0; ic < grid.dc_axis.size(); ++ic) {
    for (Eigen::Index ir = 0; ir < grid.dr_axis.size(); ++ir) {
      out << fmt(mhz(grid.dc_axis[ic])) << "," << fmt(mhz(grid.dr_axis[ir]))
          << "," << fmt(grid.chi(ic, ir)) << "\n";
    }
  }

  json j = json_envelope(config, "scan");
  json loci = json::array();
  for (const auto& locus : grid.peak_loci) {
    json peaks = json::array();
    for (double p : locus.peaks) peaks.push_back(mhz(p));
    loci.push_back({{"dc_MHz", mhz(locus.delta_c)}, {"peaks_MHz", peaks}});
  }
  j["peak_loci"] = loci;
  json overlay = json::array();
  for (Eigen::Index ic = 0; ic < grid.dc_axis.size(); ++ic) {
    overlay.push_back({{"dc_MHz", mhz(grid.dc_axis[ic])},
                       {"plus_MHz", mhz(grid.eigen_overlay(ic, 0))},
                       {"minus_MHz", mhz(grid.eigen_overlay(ic, 1))}});
  }
  j["eigen_overlay"] = overlay;
  write_json(config, sidecar_name, j);
  return 0;
}

int run_odsweep(const RunConfig& config, unsigned workers,
                const std::string& out_name, const std::string& summary_name) {
  const auto base = config.three_level_params();
  auto pulse = config.read_pulse();
  pulse.peak_rabi =
      AngularFrequency::from_megahertz(config.od_rabi_peak_MHz);
  Eigen::ArrayXd od(static_cast<Eigen::Index>(config.od_values.size()));
  for (Eigen::Index i = 0; i < od.size(); ++i) {
    od[i] = config.od_values[static_cast<std::size_t>(i)];
  }
  OdSweepOptions opt;
  opt.rel_tol = config.rel_tol;
  opt.workers = workers;
  opt.dr_points = config.od_dr_points;
  const auto result =
      od_sweep(base, pulse, od, config.od_ref,
               AngularFrequency::from_megahertz(config.g_ref_MHz), opt);

  auto out = open_output(config, out_name);
  csv_header(out, config, "odsweep", "od,splitting_MHz");
  for (Eigen::Index i = 0; i < od.size(); ++i) {
    out << fmt(result.od_values[i]) << ","
        << (std::isfinite(result.splittings[i])
                ? fmt(mhz(result.splittings[i]))
                : std::string("unresolved"))
        << "\n";
  }

  json j = json_envelope(config, "odsweep");
  j["amplitude_MHz"] = mhz(result.amplitude);
  j["amplitude_ci_MHz"] = mhz(result.amplitude_ci);
  j["exponent"] = result.exponent;
  j["exponent_ci"] = result.exponent_ci;
  j["failures"] = result.failures;
  write_json(config, summary_name, j);
  return 0;
}

std::vector<Observation> read_observations_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file '" + path + "'");
  std::vector<Observation> obs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 2) continue;
    try {
      Observation o;
      o.abscissa =
          AngularFrequency::from_megahertz(std::stod(cells[0])).rad_per_us();
      o.value = std::stod(cells[1]);
      o.weight = cells.size() > 2 ? std::stod(cells[2]) : 1.0;
      obs.push_back(o);
    } catch (const std::exception&) {
      if (line_no == 1) continue;  // column header
      throw IoError(path + ":" + std::to_string(line_no) +
                    ": cannot parse observation row");
    }
  }
  if (obs.empty()) throw IoError(path + ": no observations found");
  return obs;
}

int run_fit(const RunConfig& config, unsigned workers,
            const std::string& data_path, const std::string& out_name) {
  FitProblem problem;
  problem.observations = read_observations_csv(data_path);

  const auto mhz_param = [](const std::string& name, double init, double lo,
                            double hi) {
    return FreeParameter{name,
                         AngularFrequency::from_megahertz(init).rad_per_us(),
                         AngularFrequency::from_megahertz(lo).rad_per_us(),
                         AngularFrequency::from_megahertz(hi).rad_per_us()};
  };

  json j = json_envelope(config, "fit");
  j["model"] = config.fit_model;
  j["observations"] = problem.observations.size();

  FitReport report;
  if (config.fit_model == "efficiency") {
    EfficiencySpectrumModel model;
    model.base = config.three_level_params();
    model.pulse = config.read_pulse();
    model.rel_tol = config.fit_rel_tol;
    model.workers = workers;
    problem.model = model;
    problem.free_params = {
        mhz_param("omega0", config.omega0_init_MHz, config.omega0_min_MHz,
                  config.omega0_max_MHz),
        mhz_param("g", config.g_init_MHz, config.g_min_MHz, config.g_max_MHz),
        mhz_param("delta_c", config.delta_c_init_MHz, config.delta_c_min_MHz,
                  config.delta_c_max_MHz)};
    report = fit_efficiency_spectrum(problem);
    json est, ci;
    for (const char* name : {"omega0", "g", "delta_c"}) {
      est[std::string(name) + "_MHz"] = mhz(report.estimates.at(name));
      ci[std::string(name) + "_MHz"] =
          mhz(report.confidence_intervals.at(name));
    }
    j["estimates"] = est;
    j["confidence_intervals_95"] = ci;
  } else if (config.fit_model == "reflectance") {
    ReflectanceSpectrumModel model;
    model.base = config.two_level_params();
    model.g0 = coupling_g0(config.cavity_geometry());
    problem.model = model;
    problem.free_params = {{"N", config.n_init, config.n_min, config.n_max}};
    report = fit_reflectance_N(problem);
    j["estimates"] = {{"N", report.estimates.at("N")}};
    j["confidence_intervals_95"] = {{"N", report.confidence_intervals.at("N")}};
    j["g_fit_MHz"] =
        mhz(model.g0.rad_per_us() * std::sqrt(report.estimates.at("N")));
  } else {
    throw ConfigError("config: fit.model must be 'efficiency' or 'reflectance'");
  }

  j["residual_rms"] = report.residual_rms;
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  write_json(config, out_name, j);
  return 0;
}

int run_simulate_events(const RunConfig& config, unsigned workers,
                        const std::string& out_name) {
  const auto model = config.detection_model();
  const auto trials = static_cast<std::uint64_t>(config.trials);
  const auto seed = static_cast<std::uint64_t>(config.seed);

  std::vector<std::pair<std::uint16_t, std::uint16_t>> events;
  std::vector<std::uint16_t> background;
  SimulateOptions opt;
  opt.workers = workers;
  opt.events = &events;
  opt.background_events = &background;
  simulate_detection_events(model, trials, seed, opt);

  auto out = open_output(config, out_name);
  out << "# spincav simulate-events\n";
  out << "# config: " << config.echo() << "\n";
  out << "# seed: " << seed << "\n";
  out << "# trials: " << trials << "\n";
  out << "# columns: write_clicks read_clicks\n";
  for (const auto& [w, r] : events) {
    out << w << ' ' << r << '\n';
  }
  out << "# background (write pulse off; columns: write_clicks)\n";
  for (const auto b : background) {
    out << b << '\n';
  }
  return 0;
}

DetectionRecord read_events_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open event file '" + path + "'");
  DetectionRecord record;
  std::string line;
  bool in_background = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# background", 0) == 0) in_background = true;
      continue;
    }
    std::stringstream ss(line);
    if (!in_background) {
      std::uint64_t w = 0, r = 0;
      if (!(ss >> w >> r)) {
        throw IoError(path + ": malformed event line '" + line + "'");
      }
      ++record.trials;
      record.write_clicks_sum += w;
      if (w > 1) record.write_pairs_sum += w * (w - 1);
      record.read_clicks_sum += r;
      if (r > 1) record.read_pairs_sum += r * (r - 1);
      if (w > 0) ++record.write_click_trials;
      if (r > 0) ++record.read_click_trials;
      if (w > 0 && r > 0) ++record.coincidence_trials;
    } else {
      std::uint64_t w = 0;
      if (!(ss >> w)) {
        throw IoError(path + ": malformed background line '" + line + "'");
      }
      ++record.background_trials;
      if (w > 0) ++record.background_write_clicks;
    }
  }
  if (record.trials == 0) throw IoError(path + ": no trials found");
  return record;
}

DetectionRecord read_summary_counts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open summary file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw IoError(path + ": " + std::string(e.what()));
  }
  DetectionRecord r;
  r.trials = j.at("trials").get<std::uint64_t>();
  r.write_click_trials = j.at("write_click_trials").get<std::uint64_t>();
  r.read_click_trials = j.at("read_click_trials").get<std::uint64_t>();
  r.coincidence_trials = j.at("coincidence_trials").get<std::uint64_t>();
  r.write_clicks_sum = j.at("write_clicks_sum").get<std::uint64_t>();
  r.write_pairs_sum = j.at("write_pairs_sum").get<std::uint64_t>();
  r.read_clicks_sum = j.at("read_clicks_sum").get<std::uint64_t>();
  r.read_pairs_sum = j.at("read_pairs_sum").get<std::uint64_t>();
  r.background_trials = j.at("background_trials").get<std::uint64_t>();
  r.background_write_clicks =
      j.at("background_write_clicks").get<std::uint64_t>();
  return r;
}

int run_stats(const RunConfig& config, const std::string& events_path,
              const std::string& summary_path, const std::string& out_name) {
  DetectionRecord record;
  if (!events_path.empty()) {
    record = read_events_file(events_path);
  } else if (!summary_path.empty()) {
    record = read_summary_counts(summary_path);
  } else {
    throw ConfigError("stats: provide --events or --summary-counts");
  }
  EfficiencyChain chain{config.eta_esc, config.eta_t, config.eta_d};
  const auto summary = summarize(record, chain);

  json j = json_envelope(config, "stats");
  j["record"] = {{"trials", record.trials},
                 {"write_click_trials", record.write_click_trials},
                 {"read_click_trials", record.read_click_trials},
                 {"coincidence_trials", record.coincidence_trials},
                 {"write_clicks_sum", record.write_clicks_sum},
                 {"write_pairs_sum", record.write_pairs_sum},
                 {"read_clicks_sum", record.read_clicks_sum},
                 {"read_pairs_sum", record.read_pairs_sum},
                 {"background_trials", record.background_trials},
                 {"background_write_clicks", record.background_write_clicks}};
  j["p_w"] = record.p_w();
  j["p_r"] = record.p_r();
  j["p_wr"] = record.p_wr();
  j["p_r_given_w"] = record.p_r_given_w();
  j["p_b"] = record.p_b();
  const auto measured = [](const Measured& m) {
    return json{{"value", m.value}, {"error", m.error}};
  };
  j["g2_wr"] = measured(summary.g2_wr);
  j["g2_ww"] = measured(summary.g2_ww);
  j["g2_rr"] = measured(summary.g2_rr);
  j["p_rw_corrected"] = measured(summary.p_rw_corrected);
  j["chi"] = measured(summary.chi_estimate);
  j["chi_out_of_model"] = summary.chi_out_of_model;
  j["cs_ratio"] = summary.cs_ratio;
  j["classical_bound"] = summary.classical_bound;
  j["nonclassical"] = summary.nonclassical;
  j["significance_sigma"] = summary.significance;
  j["seed"] = static_cast<std::uint64_t>(config.seed);
  write_json(config, out_name, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spincav: cavity-coupled spin-wave simulation and statistics"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path;
  unsigned workers = default_workers();
  app.add_option("--config", config_path, "configuration file (ini)");
  app.add_option("--workers", workers, "worker threads for sweeps");

  // derive
  auto* derive = app.add_subcommand("derive", "derived resonator constants");
  std::string derive_json;
  derive->add_option("--json", derive_json, "also write a JSON report");

  // reflectance
  auto* refl = app.add_subcommand("reflectance", "probe reflectance spectrum");
  std::string refl_out = "reflectance.csv";
  refl->add_option("--out", refl_out, "output CSV");
  std::vector<Override> refl_flags(4);
  const std::pair<const char*, const char*> refl_spec[] = {
      {"--g-MHz", "system.g_MHz"},
      {"--kappa-MHz", "system.kappa_MHz"},
      {"--kappa0-MHz", "system.kappa0_MHz"},
      {"--gamma-MHz", "system.gamma_MHz"}};
  for (std::size_t i = 0; i < refl_flags.size(); ++i) {
    refl_flags[i].key = refl_spec[i].second;
    refl->add_option(refl_spec[i].first, refl_flags[i].value,
                     refl_spec[i].second);
  }

  // retrieve
  auto* retr = app.add_subcommand("retrieve", "single retrieval waveform");
  std::string retr_out = "retrieve.csv";
  std::string retr_summary = "retrieve.json";
  int retr_points = 1001;
  retr->add_option("--out", retr_out, "waveform CSV");
  retr->add_option("--summary-out", retr_summary, "summary JSON");
  retr->add_option("--points", retr_points, "waveform samples")
      ->check(CLI::Range(2, 1000000));
  std::vector<Override> retr_flags(11);
  const std::pair<const char*, const char*> retr_spec[] = {
      {"--g-MHz", "system.g_MHz"},
      {"--kappa-MHz", "system.kappa_MHz"},
      {"--gamma-MHz", "system.gamma_MHz"},
      {"--gamma-s-kHz", "system.gamma_s_kHz"},
      {"--delta-c-MHz", "detunings.delta_c_MHz"},
      {"--delta-r-MHz", "detunings.delta_r_MHz"},
      {"--rabi-peak-MHz", "pulse.rabi_peak_MHz"},
      {"--center-us", "pulse.center_us"},
      {"--fwhm-ns", "pulse.fwhm_ns"},
      {"--horizon-us", "integration.horizon_us"},
      {"--rel-tol", "integration.rel_tol"}};
  for (std::size_t i = 0; i < retr_flags.size(); ++i) {
    retr_flags[i].key = retr_spec[i].second;
    retr->add_option(retr_spec[i].first, retr_flags[i].value,
                     retr_spec[i].second);
  }

  // scan
  auto* scan = app.add_subcommand("scan", "chi over a (Dc, Dr) grid");
  std::string scan_out = "scan.csv";
  std::string scan_sidecar = "scan.json";
  scan->add_option("--out", scan_out, "grid CSV (long format)");
  scan->add_option("--sidecar-out", scan_sidecar, "peak loci + overlay JSON");
  std::vector<Override> scan_flags(6);
  const std::pair<const char*, const char*> scan_spec[] = {
      {"--dr-min-MHz", "scan.dr_min_MHz"}, {"--dr-max-MHz", "scan.dr_max_MHz"},
      {"--dr-points", "scan.dr_points"},   {"--dc-min-MHz", "scan.dc_min_MHz"},
      {"--dc-max-MHz", "scan.dc_max_MHz"}, {"--dc-points", "scan.dc_points"}};
  for (std::size_t i = 0; i < scan_flags.size(); ++i) {
    scan_flags[i].key = scan_spec[i].second;
    scan->add_option(scan_spec[i].first, scan_flags[i].value,
                     scan_spec[i].second);
  }

  // odsweep
  auto* ods = app.add_subcommand("odsweep", "splitting vs optical depth");
  std::string ods_out = "odsweep.csv";
  std::string ods_summary = "odsweep.json";
  ods->add_option("--out", ods_out, "sweep CSV");
  ods->add_option("--summary-out", ods_summary, "power-law fit JSON");

  // fit
  auto* fit = app.add_subcommand("fit", "nonlinear least squares");
  std::string fit_data;
  std::string fit_out = "fit.json";
  fit->add_option("--data", fit_data, "observations CSV: x_MHz,y[,weight]")
      ->required();
  fit->add_option("--out", fit_out, "fit report JSON");
  std::optional<std::string> fit_model_flag;
  fit->add_option("--model", fit_model_flag, "efficiency | reflectance");

  // simulate-events
  auto* sim = app.add_subcommand("simulate-events", "Monte Carlo click record");
  std::string sim_out = "events.txt";
  sim->add_option("--out", sim_out, "event file");
  std::vector<Override> sim_flags(2);
  sim_flags[0].key = "stats.trials";
  sim->add_option("--trials", sim_flags[0].value, "number of trials");
  sim_flags[1].key = "stats.seed";
  sim->add_option("--seed", sim_flags[1].value, "generator seed");

  // stats
  auto* stats = app.add_subcommand("stats", "estimator chain over a record");
  std::string stats_events;
  std::string stats_summary_counts;
  std::string stats_out = "stats.json";
  stats->add_option("--events", stats_events, "event file from simulate-events");
  stats->add_option("--summary-counts", stats_summary_counts,
                    "JSON with aggregate counts");
  stats->add_option("--out", stats_out, "summary JSON");
  std::vector<Override> stats_flags(1);
  stats_flags[0].key = "stats.seed";
  stats->add_option("--seed", stats_flags[0].value, "seed echoed in output");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig config;
    if (!config_path.empty()) config = load_config(config_path);

    if (app.got_subcommand(derive)) {
      return run_derive(config, derive_json);
    }
    if (app.got_subcommand(refl)) {
      apply_overrides(config, refl_flags);
      return run_reflectance(config, refl_out);
    }
    if (app.got_subcommand(retr)) {
      apply_overrides(config, retr_flags);
      return run_retrieve(config, retr_out, retr_summary, retr_points);
    }
    if (app.got_subcommand(scan)) {
      apply_overrides(config, scan_flags);
      return run_scan(config, workers, scan_out, scan_sidecar);
    }
    if (app.got_subcommand(ods)) {
      return run_odsweep(config, workers, ods_out, ods_summary);
    }
    if (app.got_subcommand(fit)) {
      if (fit_model_flag) config.set("fit.model", *fit_model_flag);
      return run_fit(config, workers, fit_data, fit_out);
    }
    if (app.got_subcommand(sim)) {
      apply_overrides(config, sim_flags);
      return run_simulate_events(config, workers, sim_out);
    }
    if (app.got_subcommand(stats)) {
      apply_overrides(config, stats_flags);
      return run_stats(config, stats_events, stats_summary_counts, stats_out);
    }
    std::cerr << "spincav: no subcommand dispatched\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  }
}
