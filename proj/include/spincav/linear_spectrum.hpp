#ifndef SPINCAV_LINEAR_SPECTRUM_HPP
#define SPINCAV_LINEAR_SPECTRUM_HPP

#include <Eigen/Dense>
#include <utility>

#include "spincav/units.hpp"

namespace spincav {

// Steady-state linear response of the coupled ensemble/cavity system.
struct TwoLevelSystemParams {
  AngularFrequency g;       // collective coupling g0 sqrt(N)
  AngularFrequency kappa;   // total cavity field decay
  AngularFrequency kappa0;  // coupler field decay
  AngularFrequency gamma;   // atomic coherence decay, Gamma/2
  AngularFrequency omega_a; // absolute atomic resonance (offsets only below)
  AngularFrequency delta_c; // omega_a - omega_c
};

void validate(const TwoLevelSystemParams& p);

struct ReflectanceCurve {
  Eigen::ArrayXd probe_detunings;  // rad/us, relative to omega_a
  Eigen::ArrayXd reflectance;      // dimensionless, in [0,1]
};

// Dressed single-excitation eigenfrequencies relative to the atom:
//   w+- - w_a = Dc/2 +- sqrt(g^2 + (Dc/2)^2)
// Returned with first >= second.
std::pair<double, double> eigenfrequencies_two_level(double g_rad_us,
                                                     double delta_c_rad_us);

// Probe reflectance at offset x = w - w_a:
//   R = |1 - 2i k0 / ((x + Dc) + i kappa - g^2/(x + i gamma))|^2
// For Dc = 0 this is the input-output expression of the resonant cavity; a
// nonzero Dc moves the cavity pole to x = -Dc while the atomic pole stays put.
double reflectance(double probe_offset_rad_us, const TwoLevelSystemParams& p);

ReflectanceCurve reflectance_curve(const Eigen::ArrayXd& probe_offsets,
                                   const TwoLevelSystemParams& p);

// Default probe grid: +-2pi*60 MHz in 601 points.
Eigen::ArrayXd default_probe_grid();

}  // namespace spincav

#endif  // SPINCAV_LINEAR_SPECTRUM_HPP
