#include "mechpf/device.hpp"

#include <cmath>

#include "mechpf/errors.hpp"

namespace mechpf {

void validate(const DeviceRecord& d) {
  const auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (!positive(d.pitch_series_um) || !positive(d.pitch_shunt_um) ||
      !positive(d.width_series_um) || !positive(d.width_shunt_um)) {
    throw DomainError("device " + d.name + ": pitches and widths must be positive");
  }
  if (d.idt_pairs_series < 1 || d.idt_pairs_shunt < 1) {
    throw DomainError("device " + d.name + ": IDT pair counts must be positive");
  }
  if (!std::isfinite(d.rotation_deg) || d.rotation_deg < 0.0) {
    throw DomainError("device " + d.name + ": rotation must be finite and non-negative");
  }
  if (d.order < 1) throw DomainError("device " + d.name + ": order must be at least 1");
}

const std::vector<DeviceRecord>& reference_devices() {
  static const std::vector<DeviceRecord> devices = {
      {"rot0", 1.489, 4, 15.0, 1.500, 4, 50.0, 0.0, 6},
      {"rot10", 1.487, 4, 25.0, 1.500, 4, 50.0, 10.0, 6},
      {"rot30", 1.466, 4, 25.0, 1.500, 4, 50.0, 30.0, 6},
      {"rot60", 1.365, 4, 25.0, 1.500, 6, 50.0, 60.0, 6},
  };
  return devices;
}

}  // namespace mechpf
