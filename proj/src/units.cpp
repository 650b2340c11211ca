#include "spincav/units.hpp"

#include <cmath>

namespace spincav {

void validate(const CavityGeometry& geom) {
  if (!(geom.mirror_reflectivity > 0.0 && geom.mirror_reflectivity < 1.0)) {
    throw DomainError("cavity: mirror_reflectivity must lie in (0,1)");
  }
  if (!(geom.round_trip_loss >= 0.0 && geom.round_trip_loss < 1.0)) {
    throw DomainError("cavity: round_trip_loss must lie in [0,1)");
  }
  const double rt = geom.mirror_reflectivity * (1.0 - geom.round_trip_loss);
  if (!(rt > 0.0 && rt < 1.0)) {
    throw DomainError("cavity: R(1-L) must lie in (0,1)");
  }
  if (!(geom.length > 0.0 && geom.waist > 0.0 && geom.wavelength > 0.0)) {
    throw DomainError("cavity: length, waist and wavelength must be positive");
  }
}

CavityDerived derive_cavity(const CavityGeometry& geom) {
  validate(geom);
  const double rt = geom.mirror_reflectivity * (1.0 - geom.round_trip_loss);

  CavityDerived out;
  out.finesse = constants::pi * std::pow(rt, 0.25) / (1.0 - std::sqrt(rt));
  out.free_spectral_range = constants::speed_of_light / geom.length;  // Hz
  // pi dnu / F is already an angular (e-folding) rate.
  out.kappa = AngularFrequency::from_rad_per_s(
      constants::pi * out.free_spectral_range / out.finesse);
  out.kappa0 = AngularFrequency::from_rad_per_s(
      (1.0 - geom.mirror_reflectivity) * out.free_spectral_range / 2.0);
  out.escape_efficiency =
      (1.0 - geom.mirror_reflectivity) /
      (1.0 - geom.mirror_reflectivity + geom.round_trip_loss);
  out.g0 = coupling_g0(geom);
  return out;
}

AngularFrequency coupling_g0(const CavityGeometry& geom) {
  validate(geom);
  if (!(geom.dipole_moment > 0.0)) {
    throw DomainError("cavity: dipole_moment must be positive");
  }
  const double rad_per_s =
      geom.dipole_moment *
      std::sqrt(2.0 * constants::speed_of_light /
                (constants::hbar * constants::vacuum_permittivity *
                 geom.wavelength * geom.length * geom.waist * geom.waist));
  return AngularFrequency::from_rad_per_s(rad_per_s);
}

AngularFrequency collective_g(AngularFrequency g0, double n_atoms) {
  if (n_atoms < 0.0) {
    throw DomainError("collective_g: atom number must be non-negative");
  }
  return g0 * std::sqrt(n_atoms);
}

}  // namespace spincav
