#include "spincav/linear_spectrum.hpp"

#include <cmath>
#include <complex>

namespace spincav {

void validate(const TwoLevelSystemParams& p) {
  if (!(p.kappa0.rad_per_us() > 0.0) ||
      p.kappa.rad_per_us() < p.kappa0.rad_per_us()) {
    throw DomainError("two-level params: require kappa >= kappa0 > 0");
  }
  if (!(p.gamma.rad_per_us() > 0.0)) {
    throw DomainError("two-level params: require gamma > 0");
  }
  if (p.g.rad_per_us() < 0.0) {
    throw DomainError("two-level params: require g >= 0");
  }
}

std::pair<double, double> eigenfrequencies_two_level(double g_rad_us,
                                                     double delta_c_rad_us) {
  if (g_rad_us < 0.0) {
    throw DomainError("eigenfrequencies: require g >= 0");
  }
  const double half = 0.5 * delta_c_rad_us;
  const double root = std::sqrt(g_rad_us * g_rad_us + half * half);
  return {half + root, half - root};
}

double reflectance(double probe_offset_rad_us, const TwoLevelSystemParams& p) {
  using namespace std::complex_literals;
  const double x = probe_offset_rad_us;
  const double g = p.g.rad_per_us();
  const std::complex<double> atomic = x + 1i * p.gamma.rad_per_us();
  const std::complex<double> denom =
      (x + p.delta_c.rad_per_us()) + 1i * p.kappa.rad_per_us() -
      g * g / atomic;
  const std::complex<double> r = 1.0 - 2i * p.kappa0.rad_per_us() / denom;
  return std::norm(r);
}

ReflectanceCurve reflectance_curve(const Eigen::ArrayXd& probe_offsets,
                                   const TwoLevelSystemParams& p) {
  validate(p);
  ReflectanceCurve curve;
  curve.probe_detunings = probe_offsets;
  curve.reflectance.resize(probe_offsets.size());
  for (Eigen::Index i = 0; i < probe_offsets.size(); ++i) {
    curve.reflectance[i] = reflectance(probe_offsets[i], p);
  }
  return curve;
}

Eigen::ArrayXd default_probe_grid() {
  const double span = AngularFrequency::from_megahertz(60.0).rad_per_us();
  return Eigen::ArrayXd::LinSpaced(601, -span, span);
}

}  // namespace spincav
