#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nvkin/kinetics.hpp"
#include "nvkin/resonance.hpp"
#include "nvkin/spin_model.hpp"

namespace nvkin::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  SpinSystemParams spin;
  ZeroFieldRates rates;
  double mw_frequency_hz = 9.43e9;
  FieldWindow field_window{0.05, 0.70};
  std::vector<double> theta_grid_deg;
  std::vector<double> intensity_grid_w_per_m2{0.0, 1e3, 1e4, 2e4, 4e4, 6e4, 8.3e4};
  // Fixed theta for power sweeps and spectra; fixed intensity for theta
  // sweeps and spectra.
  double theta_deg = 0.0;
  double intensity_w_per_m2 = 8.3e4;
  // T2* = 5.6 us.
  double linewidth_fwhm_t = 2.03e-6;
  // 0 selects dense windows around each feature; > 0 a uniform grid over the
  // field window.
  double spectrum_step_t = 0.0;
  std::string output_path;
  int jobs = 0;

  RunConfig();
  void validate() const;
};

/// Parses "start:stop:step" (inclusive) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text);

/// Applies the keys in `doc` on top of `cfg`. Unknown keys are rejected.
void apply_json(RunConfig& cfg, const nlohmann::json& doc);
RunConfig load_config_file(const std::string& path);

}  // namespace nvkin::cli
