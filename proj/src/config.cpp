#include "spincav/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace spincav {

namespace {

struct Entry {
  enum Kind { kDouble, kInt, kString, kDoubleList } kind;
  void* target;
};

using Schema = std::vector<std::pair<std::string, Entry>>;

Schema make_schema(RunConfig& c) {
  return {
      {"cavity.mirror_reflectivity", {Entry::kDouble, &c.mirror_reflectivity}},
      {"cavity.round_trip_loss", {Entry::kDouble, &c.round_trip_loss}},
      {"cavity.length_m", {Entry::kDouble, &c.length_m}},
      {"cavity.waist_um", {Entry::kDouble, &c.waist_um}},
      {"cavity.wavelength_nm", {Entry::kDouble, &c.wavelength_nm}},
      {"cavity.dipole_Cm", {Entry::kDouble, &c.dipole_Cm}},
      {"system.g_MHz", {Entry::kDouble, &c.g_MHz}},
      {"system.kappa_MHz", {Entry::kDouble, &c.kappa_MHz}},
      {"system.kappa0_MHz", {Entry::kDouble, &c.kappa0_MHz}},
      {"system.gamma_MHz", {Entry::kDouble, &c.gamma_MHz}},
      {"system.gamma_s_kHz", {Entry::kDouble, &c.gamma_s_kHz}},
      {"system.spin_halftime_us", {Entry::kDouble, &c.spin_halftime_us}},
      {"system.atom_number", {Entry::kDouble, &c.atom_number}},
      {"detunings.delta_c_MHz", {Entry::kDouble, &c.delta_c_MHz}},
      {"detunings.delta_r_MHz", {Entry::kDouble, &c.delta_r_MHz}},
      {"pulse.rabi_peak_MHz", {Entry::kDouble, &c.rabi_peak_MHz}},
      {"pulse.center_us", {Entry::kDouble, &c.center_us}},
      {"pulse.fwhm_ns", {Entry::kDouble, &c.fwhm_ns}},
      {"pulse.shape", {Entry::kString, &c.pulse_shape}},
      {"integration.rel_tol", {Entry::kDouble, &c.rel_tol}},
      {"integration.horizon_us", {Entry::kDouble, &c.horizon_us}},
      {"reflectance.probe_span_MHz", {Entry::kDouble, &c.probe_span_MHz}},
      {"reflectance.probe_points", {Entry::kInt, &c.probe_points}},
      {"scan.dr_min_MHz", {Entry::kDouble, &c.dr_min_MHz}},
      {"scan.dr_max_MHz", {Entry::kDouble, &c.dr_max_MHz}},
      {"scan.dr_points", {Entry::kInt, &c.dr_points}},
      {"scan.dc_min_MHz", {Entry::kDouble, &c.dc_min_MHz}},
      {"scan.dc_max_MHz", {Entry::kDouble, &c.dc_max_MHz}},
      {"scan.dc_points", {Entry::kInt, &c.dc_points}},
      {"odsweep.od_values", {Entry::kDoubleList, &c.od_values}},
      {"odsweep.od_ref", {Entry::kDouble, &c.od_ref}},
      {"odsweep.g_ref_MHz", {Entry::kDouble, &c.g_ref_MHz}},
      {"odsweep.dr_points", {Entry::kInt, &c.od_dr_points}},
      {"odsweep.rabi_peak_MHz", {Entry::kDouble, &c.od_rabi_peak_MHz}},
      {"fit.model", {Entry::kString, &c.fit_model}},
      {"fit.rel_tol", {Entry::kDouble, &c.fit_rel_tol}},
      {"fit.omega0_init_MHz", {Entry::kDouble, &c.omega0_init_MHz}},
      {"fit.omega0_min_MHz", {Entry::kDouble, &c.omega0_min_MHz}},
      {"fit.omega0_max_MHz", {Entry::kDouble, &c.omega0_max_MHz}},
      {"fit.g_init_MHz", {Entry::kDouble, &c.g_init_MHz}},
      {"fit.g_min_MHz", {Entry::kDouble, &c.g_min_MHz}},
      {"fit.g_max_MHz", {Entry::kDouble, &c.g_max_MHz}},
      {"fit.delta_c_init_MHz", {Entry::kDouble, &c.delta_c_init_MHz}},
      {"fit.delta_c_min_MHz", {Entry::kDouble, &c.delta_c_min_MHz}},
      {"fit.delta_c_max_MHz", {Entry::kDouble, &c.delta_c_max_MHz}},
      {"fit.N_init", {Entry::kDouble, &c.n_init}},
      {"fit.N_min", {Entry::kDouble, &c.n_min}},
      {"fit.N_max", {Entry::kDouble, &c.n_max}},
      {"stats.mu", {Entry::kDouble, &c.mu}},
      {"stats.chi_true", {Entry::kDouble, &c.chi_true}},
      {"stats.eta_esc", {Entry::kDouble, &c.eta_esc}},
      {"stats.eta_t", {Entry::kDouble, &c.eta_t}},
      {"stats.eta_d", {Entry::kDouble, &c.eta_d}},
      {"stats.dark_count", {Entry::kDouble, &c.dark_count}},
      {"stats.trials", {Entry::kDouble, &c.trials}},
      {"stats.seed", {Entry::kDouble, &c.seed}},
      {"output.dir", {Entry::kString, &c.output_dir}},
      {"output.cache_dir", {Entry::kString, &c.cache_dir}},
  };
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

void assign(const Entry& entry, const std::string& raw,
            const std::string& where) {
  const std::string value = trim(raw);
  const auto parse_double = [&](const std::string& v) {
    std::size_t used = 0;
    double d = 0.0;
    try {
      d = std::stod(v, &used);
    } catch (const std::exception&) {
      throw ConfigError(where + ": expected a number, got '" + v + "'");
    }
    if (used != v.size()) {
      throw ConfigError(where + ": trailing characters in number '" + v + "'");
    }
    return d;
  };
  switch (entry.kind) {
    case Entry::kDouble:
      *static_cast<double*>(entry.target) = parse_double(value);
      break;
    case Entry::kInt: {
      const double d = parse_double(value);
      if (d != std::floor(d)) {
        throw ConfigError(where + ": expected an integer, got '" + value + "'");
      }
      *static_cast<int*>(entry.target) = static_cast<int>(d);
      break;
    }
    case Entry::kString:
      *static_cast<std::string*>(entry.target) = value;
      break;
    case Entry::kDoubleList: {
      auto& list = *static_cast<std::vector<double>*>(entry.target);
      list.clear();
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        list.push_back(parse_double(trim(item)));
      }
      if (list.empty()) {
        throw ConfigError(where + ": expected a comma-separated list");
      }
      break;
    }
  }
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config: cannot open '" + path + "'");
  }
  RunConfig config;
  auto schema = make_schema(config);

  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where =
        path + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(where + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(where + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string dotted = section.empty() ? key : section + "." + key;
    const auto it = std::find_if(
        schema.begin(), schema.end(),
        [&](const auto& e) { return e.first == dotted; });
    if (it == schema.end()) {
      throw ConfigError(where + ": unknown key '" + dotted + "'");
    }
    assign(it->second, line.substr(eq + 1), where + " ('" + dotted + "')");
  }
  return config;
}

void RunConfig::set(const std::string& dotted_key, const std::string& value) {
  auto schema = make_schema(*this);
  const auto it = std::find_if(
      schema.begin(), schema.end(),
      [&](const auto& e) { return e.first == dotted_key; });
  if (it == schema.end()) {
    throw ConfigError("config: unknown key '" + dotted_key + "'");
  }
  assign(it->second, value, "override '" + dotted_key + "'");
}

std::string RunConfig::echo() const {
  auto schema = make_schema(const_cast<RunConfig&>(*this));
  std::ostringstream os;
  bool first = true;
  char buf[64];
  for (const auto& [key, entry] : schema) {
    if (!first) os << "; ";
    first = false;
    os << key << '=';
    switch (entry.kind) {
      case Entry::kDouble:
        std::snprintf(buf, sizeof buf, "%.10g",
                      *static_cast<const double*>(entry.target));
        os << buf;
        break;
      case Entry::kInt:
        os << *static_cast<const int*>(entry.target);
        break;
      case Entry::kString:
        os << *static_cast<const std::string*>(entry.target);
        break;
      case Entry::kDoubleList: {
        const auto& list =
            *static_cast<const std::vector<double>*>(entry.target);
        for (std::size_t i = 0; i < list.size(); ++i) {
          std::snprintf(buf, sizeof buf, "%.10g", list[i]);
          os << (i ? "," : "") << buf;
        }
        break;
      }
    }
  }
  return os.str();
}

CavityGeometry RunConfig::cavity_geometry() const {
  CavityGeometry geom;
  geom.mirror_reflectivity = mirror_reflectivity;
  geom.round_trip_loss = round_trip_loss;
  geom.length = length_m;
  geom.waist = waist_um * 1e-6;
  geom.wavelength = wavelength_nm * 1e-9;
  geom.dipole_moment = dipole_Cm;
  return geom;
}

AngularFrequency RunConfig::gamma_s() const {
  if (spin_halftime_us > 0.0) {
    return AngularFrequency::from_rad_per_us(std::log(2.0) /
                                             spin_halftime_us);
  }
  return AngularFrequency::from_kilohertz(gamma_s_kHz);
}

TwoLevelSystemParams RunConfig::two_level_params() const {
  TwoLevelSystemParams p;
  p.g = AngularFrequency::from_megahertz(g_MHz);
  p.kappa = AngularFrequency::from_megahertz(kappa_MHz);
  p.kappa0 = AngularFrequency::from_megahertz(kappa0_MHz);
  p.gamma = AngularFrequency::from_megahertz(gamma_MHz);
  p.omega_a = AngularFrequency::from_rad_per_us(0.0);
  p.delta_c = AngularFrequency::from_megahertz(delta_c_MHz);
  return p;
}

ThreeLevelParams RunConfig::three_level_params() const {
  return ThreeLevelParams(AngularFrequency::from_megahertz(g_MHz),
                          AngularFrequency::from_megahertz(kappa_MHz),
                          AngularFrequency::from_megahertz(gamma_MHz),
                          gamma_s(),
                          AngularFrequency::from_megahertz(delta_c_MHz),
                          AngularFrequency::from_megahertz(delta_r_MHz));
}

ReadPulse RunConfig::read_pulse() const {
  if (pulse_shape != "gaussian") {
    throw ConfigError("config: pulse.shape must be 'gaussian'");
  }
  ReadPulse pulse;
  pulse.peak_rabi = AngularFrequency::from_megahertz(rabi_peak_MHz);
  pulse.center = center_us;
  pulse.fwhm = fwhm_ns * 1e-3;
  return pulse;
}

DetectionModel RunConfig::detection_model() const {
  DetectionModel model;
  model.excitation_mean = mu;
  model.chi_true = chi_true;
  model.chain = EfficiencyChain{eta_esc, eta_t, eta_d};
  model.dark_count = dark_count;
  return model;
}

}  // namespace spincav
