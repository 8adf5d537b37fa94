#include "config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nvkin::cli {

RunConfig::RunConfig() : theta_grid_deg(parse_grid("0:90:1")) {}

void RunConfig::validate() const {
  try {
    spin.validate();
    rates.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(mw_frequency_hz > 0.0)) throw ConfigError("mw frequency must be positive");
  if (!(field_window.lo_t >= 0.0 && field_window.lo_t < field_window.hi_t &&
        field_window.hi_t <= 1.0)) {
    throw ConfigError("field window must be ordered and inside [0, 1] T");
  }
  if (theta_grid_deg.empty()) throw ConfigError("theta grid is empty");
  if (intensity_grid_w_per_m2.empty()) throw ConfigError("intensity grid is empty");
  for (double t : theta_grid_deg) {
    if (!(t >= 0.0 && t <= 90.0)) throw ConfigError("theta values must lie in [0, 90] deg");
  }
  for (double i : intensity_grid_w_per_m2) {
    if (!(i >= 0.0) || !std::isfinite(i)) throw ConfigError("intensities must be >= 0");
  }
  if (!(theta_deg >= 0.0 && theta_deg <= 90.0)) throw ConfigError("theta must lie in [0, 90] deg");
  if (!(intensity_w_per_m2 >= 0.0)) throw ConfigError("intensity must be >= 0");
  if (!(linewidth_fwhm_t > 0.0)) throw ConfigError("linewidth must be positive");
  if (!(spectrum_step_t >= 0.0)) throw ConfigError("spectrum step must be >= 0");
  if (jobs < 0) throw ConfigError("jobs must be >= 0");
}

namespace {

double to_double(const std::string& token) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(token.c_str(), &end);
  if (token.empty() || errno != 0 || end != token.c_str() + token.size()) {
    throw ConfigError("not a number: '" + token + "'");
  }
  return v;
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  const std::string t = strip(text);
  if (t.empty()) throw ConfigError("empty grid");
  std::vector<double> out;
  if (t.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(to_double(strip(item)));
    if (parts.size() != 3) throw ConfigError("range grid must be start:stop:step");
    const double start = parts[0], stop = parts[1], step = parts[2];
    if (!(step > 0.0) || stop < start) throw ConfigError("range grid needs step > 0 and stop >= start");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long k = 0; k <= count; ++k) out.push_back(start + step * static_cast<double>(k));
    return out;
  }
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(strip(item)));
  return out;
}

namespace {

using nlohmann::json;

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return v.get<double>();
}

std::vector<double> grid(const json& v, const std::string& key) {
  if (v.is_string()) return parse_grid(v.get<std::string>());
  if (!v.is_array()) throw ConfigError("config key '" + key + "' must be an array or range string");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(number(x, key));
  return out;
}

template <class Setter>
void apply_section(const json& section, const std::string& name, const Setter& set) {
  if (!section.is_object()) throw ConfigError("config section '" + name + "' must be an object");
  for (const auto& [key, value] : section.items()) {
    if (!set(key, value)) throw ConfigError("unknown config key '" + name + "." + key + "'");
  }
}

}  // namespace

void apply_json(RunConfig& cfg, const json& doc) {
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "spin") {
      apply_section(value, key, [&](const std::string& k, const json& v) {
        auto& s = cfg.spin;
        if (k == "d_gs_Hz") s.d_gs_hz = number(v, k);
        else if (k == "d_es_Hz") s.d_es_hz = number(v, k);
        else if (k == "g_factor") s.g_factor = number(v, k);
        else if (k == "hyperfine_par_Hz") s.hyperfine_par_hz = number(v, k);
        else if (k == "hyperfine_perp_Hz") s.hyperfine_perp_hz = number(v, k);
        else if (k == "temperature_K") s.temperature_k = number(v, k);
        else return false;
        return true;
      });
    } else if (key == "rates") {
      apply_section(value, key, [&](const std::string& k, const json& v) {
        auto& r = cfg.rates;
        if (k == "k_radiative_Hz") r.k_radiative_hz = number(v, k);
        else if (k == "k_isc_pm_Hz") r.k_isc_pm_hz = number(v, k);
        else if (k == "k_isc_0_Hz") r.k_isc_0_hz = number(v, k);
        else if (k == "k_singlet_pm_Hz") r.k_singlet_pm_hz = number(v, k);
        else if (k == "k_singlet_0_Hz") r.k_singlet_0_hz = number(v, k);
        else if (k == "t1_s") r.t1_s = number(v, k);
        else if (k == "sigma_cm2") r.sigma_cm2 = number(v, k);
        else if (k == "wavelength_m") r.wavelength_m = number(v, k);
        else if (k == "t1_dq_s") {
          if (v.is_null()) r.t1_dq_s.reset();
          else r.t1_dq_s = number(v, k);
        } else return false;
        return true;
      });
    } else if (key == "mw_frequency_Hz") {
      cfg.mw_frequency_hz = number(value, key);
    } else if (key == "field_window_T") {
      const auto w = grid(value, key);
      if (w.size() != 2) throw ConfigError("field_window_T must hold two values");
      cfg.field_window = {w[0], w[1]};
    } else if (key == "theta_grid_deg") {
      cfg.theta_grid_deg = grid(value, key);
    } else if (key == "intensity_grid_W_per_m2") {
      cfg.intensity_grid_w_per_m2 = grid(value, key);
    } else if (key == "theta_deg") {
      cfg.theta_deg = number(value, key);
    } else if (key == "intensity_W_per_m2") {
      cfg.intensity_w_per_m2 = number(value, key);
    } else if (key == "linewidth_fwhm_T") {
      cfg.linewidth_fwhm_t = number(value, key);
    } else if (key == "spectrum_step_T") {
      cfg.spectrum_step_t = number(value, key);
    } else if (key == "jobs") {
      cfg.jobs = static_cast<int>(number(value, key));
    } else if (key == "output") {
      if (!value.is_string()) throw ConfigError("config key 'output' must be a string");
      cfg.output_path = value.get<std::string>();
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  RunConfig cfg;
  apply_json(cfg, doc);
  return cfg;
}

}  // namespace nvkin::cli
