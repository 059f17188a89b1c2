#pragma once

// Two-port network algebra on ABCD (chain) matrices.
//
// Ideal lossless elements can present an exactly infinite series impedance or
// shunt admittance at isolated frequencies. Such a matrix has no finite
// representation, so a ChainMatrix carries a `pole_order`: the physical matrix
// is the limit of t^pole_order * m as t -> infinity. Cascades multiply the
// leading terms and add the orders. Any pole_order > 0 means transmission is
// exactly zero at that frequency.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mechpf/bvd.hpp"

namespace mechpf {

struct ChainMatrix {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
  int pole_order = 0;

  bool is_finite() const noexcept { return pole_order == 0; }
};

ChainMatrix operator*(const ChainMatrix& lhs, const ChainMatrix& rhs);

/// [[1, z], [0, 1]]; an infinite z yields the leading term [[0, 1], [0, 0]] with pole_order 1.
ChainMatrix abcd_series(Complex z);
/// [[1, 0], [y, 1]]; an infinite y yields the leading term [[0, 0], [1, 0]] with pole_order 1.
ChainMatrix abcd_shunt(Complex y);

struct LadderFilterSpec {
  int order = 3;  ///< number of series elements; there are order - 1 shunt nodes
  ResonatorSpec series;
  ResonatorSpec shunt;
  int shunt_multiplicity = 2;  ///< identical resonators in parallel at each shunt node
  double z0 = 50.0;            ///< reference impedance of both ports, ohm
};

/// Throws DomainError on order < 1, z0 <= 0, multiplicity < 1, or invalid resonators.
void validate(const LadderFilterSpec& spec);

/// Non-fatal design-rule findings, e.g. shunt antiresonance more than 1%
/// away from the series resonance. Empty when the design is consistent.
std::vector<std::string> design_rule_warnings(const LadderFilterSpec& spec);

/// Element sequence series, (shunt, series) x (order - 1) at one angular frequency.
std::vector<ChainMatrix> ladder_elements(const LadderFilterSpec& spec, double omega);

class TwoPortNetwork {
 public:
  /// Throws DomainError on an empty, non-increasing or non-positive grid,
  /// a size mismatch, or z0 <= 0.
  TwoPortNetwork(std::vector<double> freqs_hz, std::vector<ChainMatrix> chain, double z0);

  std::span<const double> freqs_hz() const noexcept { return freqs_; }
  std::span<const ChainMatrix> chain() const noexcept { return chain_; }
  double z0() const noexcept { return z0_; }
  std::size_t size() const noexcept { return freqs_.size(); }

  /// Network `this` followed by `next`. Grids and z0 must match exactly.
  TwoPortNetwork cascade(const TwoPortNetwork& next) const;

 private:
  std::vector<double> freqs_;
  std::vector<ChainMatrix> chain_;
  double z0_;
};

/// Throws DomainError on an empty grid or invalid spec.
TwoPortNetwork build_ladder(const LadderFilterSpec& spec, std::span<const double> freqs_hz);

/// S(0,0)=S11, S(0,1)=S12, S(1,0)=S21, S(1,1)=S22.
using SMatrix = Eigen::Matrix2cd;

/// Conversion with equal real port impedances z0. Returns nullopt when the
/// conversion is singular or the matrix is a degenerate pole limit. A
/// determinant equal to 1 within the rounding of its products gives S12 = S21.
std::optional<SMatrix> abcd_to_s(const ChainMatrix& abcd, double z0);
std::vector<std::optional<SMatrix>> abcd_to_s(const TwoPortNetwork& net);

/// Input impedance at port 1 with port 2 terminated in z0. Nullopt when singular.
std::optional<Complex> input_impedance(const ChainMatrix& abcd, double z0);

/// Tolerance on |S11| beyond passivity accepted as measurement noise.
inline constexpr double kReflectionNoiseTolerance = 1e-6;

enum class ResistanceStatus {
  ok,
  unbounded,   ///< S11 == 1: open circuit, value is +inf
  non_passive  ///< |S11| > 1 + kReflectionNoiseTolerance, value is NaN
};

struct ExtractedResistance {
  double ohms = 0.0;
  ResistanceStatus status = ResistanceStatus::ok;

  bool ok() const noexcept { return status == ResistanceStatus::ok; }
};

/// Real part of the environmental impedance seen through port 1:
/// Z0 (1 - |S11|^2) / |1 - S11|^2. Small negative results from in-tolerance
/// noise are clamped to zero.
ExtractedResistance re_zext_from_s11(Complex s11, double z0);

/// -20 log10 |S21| per frequency; nullopt where S is not representable.
/// Exact transmission zeros give +inf.
std::vector<std::optional<double>> insertion_loss_db(const TwoPortNetwork& net);

struct Bandwidth {
  double width_hz = 0.0;
  double lower_hz = 0.0;
  double upper_hz = 0.0;
  double peak_hz = 0.0;
  double peak_insertion_loss_db = 0.0;
  double resolution_hz = 0.0;  ///< largest grid step inside the band
};

/// Width of the contiguous band around the global |S21| maximum where the
/// insertion loss stays within `level_db` of the peak. Edges are linearly
/// interpolated in dB between grid points and clipped to the grid span.
/// Nullopt when no finite, non-zero transmission exists.
std::optional<Bandwidth> bandwidth(const TwoPortNetwork& net, double level_db);
std::optional<Bandwidth> bandwidth(std::span<const double> freqs_hz,
                                   std::span<const std::optional<double>> insertion_loss_db,
                                   double level_db);

}  // namespace mechpf
