#ifndef SPINCAV_UNITS_HPP
#define SPINCAV_UNITS_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace spincav {

// Canonical internal units: angular rates in rad/us, times in us.
// Published rates mix "2pi x MHz" and bare kHz notation; every rate entering
// the library goes through AngularFrequency so the 2pi bookkeeping happens
// exactly once, at construction.

namespace constants {
inline constexpr double speed_of_light = 299792458.0;        // m/s
inline constexpr double hbar = 1.054571817e-34;              // J s
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double pi = 3.14159265358979323846;

// 87Rb D2 reduced dipole element <J=1/2||er||J'=3/2> (Steck line data).
inline constexpr double rb87_d2_reduced_dipole = 3.584e-29;  // C m
// Dipole element of the pumped |F=2,mF=+2> -> |F'=2,mF'=+1> sigma- line:
// reduced element times the transition coefficient sqrt(1/12).
inline const double rb87_sigma_minus_dipole =
    rb87_d2_reduced_dipole / std::sqrt(12.0);                // C m
}  // namespace constants

class AngularFrequency {
 public:
  constexpr AngularFrequency() = default;

  static constexpr AngularFrequency from_rad_per_us(double w) {
    return AngularFrequency(w);
  }
  static constexpr AngularFrequency from_rad_per_s(double w) {
    return AngularFrequency(w * 1e-6);
  }
  // Ordinary (cycles) frequencies: multiplied by 2pi on entry.
  static constexpr AngularFrequency from_megahertz(double nu) {
    return AngularFrequency(2.0 * constants::pi * nu);
  }
  static constexpr AngularFrequency from_kilohertz(double nu) {
    return AngularFrequency(2.0 * constants::pi * nu * 1e-3);
  }

  constexpr double rad_per_us() const { return value_; }
  constexpr double rad_per_s() const { return value_ * 1e6; }
  constexpr double megahertz() const {
    return value_ / (2.0 * constants::pi);
  }
  constexpr double kilohertz() const { return megahertz() * 1e3; }

  friend constexpr AngularFrequency operator*(double s, AngularFrequency w) {
    return AngularFrequency(s * w.value_);
  }
  friend constexpr AngularFrequency operator*(AngularFrequency w, double s) {
    return AngularFrequency(s * w.value_);
  }
  friend constexpr AngularFrequency operator+(AngularFrequency a,
                                              AngularFrequency b) {
    return AngularFrequency(a.value_ + b.value_);
  }
  friend constexpr AngularFrequency operator-(AngularFrequency a,
                                              AngularFrequency b) {
    return AngularFrequency(a.value_ - b.value_);
  }

 private:
  explicit constexpr AngularFrequency(double rad_per_us) : value_(rad_per_us) {}
  double value_ = 0.0;  // rad/us
};

// Raw resonator inputs. The dipole moment is a configuration input (it is an
// atomic, not a cavity, property; it rides along so coupling_g0 needs nothing
// else).
struct CavityGeometry {
  double mirror_reflectivity = 0.86;   // R, power fraction of the coupler
  double round_trip_loss = 0.11;       // L, power fraction
  double length = 0.88;                // l, m
  double waist = 69e-6;                // w0, m
  double wavelength = 780.241e-9;      // lambda, m
  double dipole_moment = constants::rb87_sigma_minus_dipole;  // C m
};

struct CavityDerived {
  double finesse = 0.0;            // F
  double free_spectral_range = 0.0;  // Hz, ordinary
  AngularFrequency kappa;          // total field decay
  AngularFrequency kappa0;         // field decay through the coupler
  double escape_efficiency = 0.0;  // (1-R)/(1-R+L)
  AngularFrequency g0;             // single-emitter coupling
};

class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

void validate(const CavityGeometry& geom);

// All resonator constants from geometry:
//   F    = pi [R(1-L)]^{1/4} / (1 - [R(1-L)]^{1/2})
//   dnu  = c / l
//   kappa  = pi dnu / F
//   kappa0 = (1-R) dnu / 2   (coupler round-trip amplitude loss per round-trip time)
//   eta_esc = (1-R)/(1-R+L)
CavityDerived derive_cavity(const CavityGeometry& geom);

// g0 = |d| sqrt(2c / (hbar eps0 lambda l w0^2))
AngularFrequency coupling_g0(const CavityGeometry& geom);

// Collective coupling for n_atoms emitters in the mode.
AngularFrequency collective_g(AngularFrequency g0, double n_atoms);

}  // namespace spincav

#endif  // SPINCAV_UNITS_HPP
