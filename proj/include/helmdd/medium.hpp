#pragma once

#include <string>

#include "helmdd/types.hpp"

namespace helmdd {

enum class MediumKind { Homogeneous, AlternatingLayers, DiagonalLayers };

/// Wave-number field k(x) on the unit square. Either a constant k, or
/// k = omega/c with a piecewise-constant wave speed c arranged in layers
/// with contrast parameter rho > 1:
///   - AlternatingLayers: four horizontal bands of height 1/4 with speeds
///     (1, rho, 1, rho) from top to bottom;
///   - DiagonalLayers: four bands delimited by x+y in {1/2, 1, 3/2} with
///     speeds (1, rho/4, rho/2, rho) from the lower-left corner up.
/// Band boundaries follow the half-open convention: a point exactly on a
/// boundary belongs to the upper band.
struct MediumSpec {
  MediumKind kind = MediumKind::Homogeneous;
  double k = 0.0;
  double omega = 0.0;
  double rho = 0.0;

  static MediumSpec homogeneous(double k);
  static MediumSpec alternating_layers(double omega, double rho);
  static MediumSpec diagonal_layers(double omega, double rho);

  /// Constant k for the homogeneous variant, omega otherwise.
  double frequency() const { return kind == MediumKind::Homogeneous ? k : omega; }
};

double wave_speed_at(const MediumSpec& medium, const Point& p);
double wavenumber_at(const MediumSpec& medium, const Point& p);

std::string medium_name(const MediumSpec& medium);
MediumKind medium_kind_from_name(const std::string& name);

} // namespace helmdd
