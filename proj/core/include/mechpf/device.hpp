#pragma once

// Fabricated-device geometry, carried as metadata only.

#include <string>
#include <vector>

namespace mechpf {

struct DeviceRecord {
  std::string name;
  double pitch_series_um = 0.0;
  int idt_pairs_series = 0;
  double width_series_um = 0.0;
  double pitch_shunt_um = 0.0;
  int idt_pairs_shunt = 0;
  double width_shunt_um = 0.0;
  double rotation_deg = 0.0;  ///< propagation direction relative to the extraordinary axis
  int order = 1;
};

/// Throws DomainError unless lengths and pair counts are positive, the
/// rotation is finite and non-negative, and order >= 1.
void validate(const DeviceRecord& device);

/// The four measured lithium niobate ladder filters (rotations 0, 10, 30, 60 degrees).
const std::vector<DeviceRecord>& reference_devices();

}  // namespace mechpf
