#pragma once

// Job configuration read from an INI file. Sections: [filter], [sweep],
// [qubit], [io], [fit], [device]. Frequencies are in Hz and converted to
// rad/s at this boundary. Unknown sections and keys are errors.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mechpf/device.hpp"
#include "mechpf/fitting.hpp"
#include "mechpf/network.hpp"
#include "mechpf/purcell.hpp"

namespace mechpf::cli {

/// Schema or usage problem; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepConfig {
  double start_hz = 0.0;
  double stop_hz = 0.0;
  int points = 2001;

  std::vector<double> grid() const;
};

struct QubitConfig {
  double omega_r_hz = 0.0;
  double g_hz = 0.0;
  double kappa_hz = 0.0;

  /// Angular quantities; the qubit frequency is set to omega_r and is
  /// replaced by the sweep grid downstream.
  ReadoutSystem system(double z0) const;
};

struct IoConfig {
  std::optional<std::string> input;
  std::optional<std::string> output;
  std::optional<std::string> touchstone;
};

enum class FitModel { resonator, ladder };

struct FitConfig {
  FitModel model = FitModel::ladder;
  ObservableKind kind = ObservableKind::s21;
  int max_iterations = 200;
  bool magnitude_only = false;
  double mismatch_threshold = 0.05;
  double add_noise = 0.0;  ///< complex Gaussian noise, relative to the RMS target magnitude
  std::vector<ParameterBound> bounds;
};

struct JobConfig {
  std::optional<LadderFilterSpec> filter;
  std::vector<Quality> q_list;               ///< empty: the filter's own Q
  std::vector<double> series_detuning_hz;    ///< empty: no detuning family
  std::optional<SweepConfig> sweep;
  std::optional<QubitConfig> qubit;
  IoConfig io;
  FitConfig fit;
  std::optional<DeviceRecord> device;
};

/// Throws ConfigError naming the offending section.key.
JobConfig parse_job_config(std::string_view text);
JobConfig load_job_config(const std::string& path);

}  // namespace mechpf::cli
