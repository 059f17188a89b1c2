#pragma once

// Touchstone v1 two-port (.s2p) reading and writing.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mechpf/network.hpp"

namespace mechpf {

enum class TouchstoneFormat { ri, ma, db };

struct TouchstoneRecord {
  std::vector<double> freqs_hz;
  std::vector<SMatrix> s;
  double z0 = 50.0;
  TouchstoneFormat format = TouchstoneFormat::ri;  ///< format of the parsed source
  /// Comment lines including the leading '!', without line terminators.
  /// Trailing comments on data lines are kept from their '!' onward.
  std::vector<std::string> comments;
};

/// Throws DomainError unless frequencies are non-negative and strictly
/// increasing, sizes agree, z0 > 0 and every S entry is finite.
void validate(const TouchstoneRecord& rec);

/// Parses v1 two-port text. Missing option line means "# GHz S MA R 50".
/// Throws ParseError with a 1-based line number on malformed option lines,
/// non-S parameters, v2 keywords, wrong column counts, non-numeric or
/// non-finite values, non-increasing frequencies, or a file without data.
TouchstoneRecord parse_touchstone(std::string_view text);

/// Writes comments, "# Hz S RI R <z0>" and one line per frequency with LF
/// endings. `significant_digits` == 0 writes the shortest representation
/// that reads back to the identical double; otherwise a fixed count.
std::string write_touchstone(const TouchstoneRecord& rec, int significant_digits = 0);

/// S of a network per frequency. Throws NumericalError where the conversion
/// is not representable.
TouchstoneRecord touchstone_from_network(const TwoPortNetwork& net,
                                         std::vector<std::string> comments = {});

/// Linear interpolation of the real and imaginary parts. Nullopt outside the
/// sampled span.
std::optional<SMatrix> interpolate_s(const TouchstoneRecord& rec, double freq_hz);

std::string to_string(TouchstoneFormat format);

}  // namespace mechpf
