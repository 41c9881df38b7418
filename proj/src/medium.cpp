#include "helmdd/medium.hpp"

#include <cmath>
#include <stdexcept>

namespace helmdd {

MediumSpec MediumSpec::homogeneous(double k) {
  if (!(k > 0.0)) throw std::invalid_argument("MediumSpec: wave number k must be positive");
  MediumSpec m;
  m.kind = MediumKind::Homogeneous;
  m.k = k;
  return m;
}

MediumSpec MediumSpec::alternating_layers(double omega, double rho) {
  if (!(omega > 0.0)) throw std::invalid_argument("MediumSpec: omega must be positive");
  if (!(rho > 1.0)) throw std::invalid_argument("MediumSpec: contrast rho must exceed 1");
  MediumSpec m;
  m.kind = MediumKind::AlternatingLayers;
  m.omega = omega;
  m.rho = rho;
  return m;
}

MediumSpec MediumSpec::diagonal_layers(double omega, double rho) {
  if (!(omega > 0.0)) throw std::invalid_argument("MediumSpec: omega must be positive");
  if (!(rho > 1.0)) throw std::invalid_argument("MediumSpec: contrast rho must exceed 1");
  MediumSpec m;
  m.kind = MediumKind::DiagonalLayers;
  m.omega = omega;
  m.rho = rho;
  return m;
}

double wave_speed_at(const MediumSpec& medium, const Point& p) {
  if (p.x() < 0.0 || p.x() > 1.0 || p.y() < 0.0 || p.y() > 1.0)
    throw std::invalid_argument("wave_speed_at: point outside the unit square");
  switch (medium.kind) {
    case MediumKind::Homogeneous:
      return 1.0;
    case MediumKind::AlternatingLayers: {
      // bands bottom-to-top: rho, 1, rho, 1 (top band carries speed 1)
      const int band = std::min(3, static_cast<int>(std::floor(p.y() * 4.0)));
      return band % 2 == 0 ? medium.rho : 1.0;
    }
    case MediumKind::DiagonalLayers: {
      const double s = p.x() + p.y();
      const int band = std::min(3, static_cast<int>(std::floor(s * 2.0)));
      const double values[4] = {1.0, medium.rho / 4.0, medium.rho / 2.0, medium.rho};
      return values[band];
    }
  }
  throw std::logic_error("wave_speed_at: unknown medium kind");
}

double wavenumber_at(const MediumSpec& medium, const Point& p) {
  if (medium.kind == MediumKind::Homogeneous) {
    if (p.x() < 0.0 || p.x() > 1.0 || p.y() < 0.0 || p.y() > 1.0)
      throw std::invalid_argument("wavenumber_at: point outside the unit square");
    return medium.k;
  }
  return medium.omega / wave_speed_at(medium, p);
}

std::string medium_name(const MediumSpec& medium) {
  switch (medium.kind) {
    case MediumKind::Homogeneous: return "homogeneous";
    case MediumKind::AlternatingLayers: return "alternating";
    case MediumKind::DiagonalLayers: return "diagonal";
  }
  return "unknown";
}

MediumKind medium_kind_from_name(const std::string& name) {
  if (name == "homogeneous") return MediumKind::Homogeneous;
  if (name == "alternating") return MediumKind::AlternatingLayers;
  if (name == "diagonal") return MediumKind::DiagonalLayers;
  throw std::invalid_argument("unknown medium name: " + name);
}

} // namespace helmdd
