#ifndef SPINCAV_RETRIEVAL_HPP
#define SPINCAV_RETRIEVAL_HPP

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

#include "spincav/units.hpp"

namespace spincav {

// Parameters of the three-level retrieval dynamics. The two-photon detuning
// delta = delta_c - delta_r is always derived, never set independently.
class ThreeLevelParams {
 public:
  ThreeLevelParams() = default;
  ThreeLevelParams(AngularFrequency g, AngularFrequency kappa,
                   AngularFrequency gamma, AngularFrequency gamma_s,
                   AngularFrequency delta_c, AngularFrequency delta_r);

  AngularFrequency g() const { return g_; }
  AngularFrequency kappa() const { return kappa_; }
  AngularFrequency gamma() const { return gamma_; }
  AngularFrequency gamma_s() const { return gamma_s_; }
  AngularFrequency delta_c() const { return delta_c_; }
  AngularFrequency delta_r() const { return delta_r_; }
  AngularFrequency delta() const {
    return delta_c_ - delta_r_;  // two-photon detuning
  }

  ThreeLevelParams with_delta_r(AngularFrequency dr) const;
  ThreeLevelParams with_delta_c(AngularFrequency dc) const;
  ThreeLevelParams with_g(AngularFrequency g) const;

 private:
  AngularFrequency g_, kappa_, gamma_, gamma_s_, delta_c_, delta_r_;
};

struct ReadPulse {
  AngularFrequency peak_rabi;  // Omega0
  double center = 0.75;        // t0, us
  double fwhm = 0.25;          // us, FWHM of the Rabi envelope

  // Omega(t) = Omega0 exp(-(t-t0)^2 / (2 sigma^2)), sigma = fwhm/(2 sqrt(2 ln 2))
  double sigma() const;
  double rabi_at(double t_us) const;
};

void validate(const ThreeLevelParams& p);
void validate(const ReadPulse& p);

struct SystemState {
  std::complex<double> cavity;        // a
  std::complex<double> polarization;  // P = sigma_ge / sqrt(N)
  std::complex<double> spin;          // S = sigma_gs / sqrt(N)
  double t = 0.0;                     // us

  double norm_squared() const {
    return std::norm(cavity) + std::norm(polarization) + std::norm(spin);
  }
};

// Where the initial excitation went. Entries are the time-integrated loss
// channels 2k|a|^2, 2g|P|^2, 2gs|S|^2 plus whatever is still stored at the
// horizon; they sum to the initial norm (=1) up to integrator error.
struct DecayBudget {
  double through_cavity = 0.0;  // = chi
  double through_atom = 0.0;
  double through_spin = 0.0;
  double residual_norm = 0.0;

  double sum() const {
    return through_cavity + through_atom + through_spin + residual_norm;
  }
};

struct RetrievalResult {
  Eigen::ArrayXd times;             // us, accepted integrator steps
  Eigen::ArrayXd cavity_intensity;  // |a(t)|^2
  std::vector<SystemState> states;  // full state at the same instants
  double chi = 0.0;                 // 2 kappa int |a|^2 dt
  DecayBudget budget;
  double tolerance = 0.0;           // the tolerance the run was asked for

  // Hermite-interpolated |a(t)|^2 on an arbitrary instant.
  double intensity_at(double t_us) const;
};

struct RetrievalOptions {
  double rel_tol = 1e-9;
  double horizon = 0.0;       // us; 0 = t0 + 6 fwhm + 10/kappa
  bool keep_states = true;    // waveform storage (chi never needs it)
};

// Integrates
//   a' = -k a + i g P
//   P' = -(gamma + i Dc) P + i Omega(t) S + i g a
//   S' = -(gamma_s + i delta) S + i Omega(t) P
// from S(0)=1, a(0)=P(0)=0, accumulating the three loss quadratures as extra
// state components so chi inherits the integrator tolerance.
RetrievalResult integrate_retrieval(const ThreeLevelParams& params,
                                    const ReadPulse& pulse,
                                    const RetrievalOptions& opt = {});

// chi = 2 kappa int |a|^2; identical to the cavity budget entry.
double conversion_efficiency(const RetrievalResult& result);

// Eq-of-motion dressed frequencies D+- = d/2 +- sqrt(g^2 + W^2 + d^2)/2,
// returned with first >= second.
std::pair<double, double> dressed_eigenfrequencies(double g_rad_us,
                                                   double omega_rad_us,
                                                   double delta_rad_us);

double default_horizon(const ThreeLevelParams& params, const ReadPulse& pulse);

}  // namespace spincav

#endif  // SPINCAV_RETRIEVAL_HPP
