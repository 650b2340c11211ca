#ifndef SPINCAV_FIT_HPP
#define SPINCAV_FIT_HPP

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "spincav/linear_spectrum.hpp"
#include "spincav/retrieval.hpp"

namespace spincav {

class RankDeficientFit : public DomainError {
 public:
  explicit RankDeficientFit(const std::string& what) : DomainError(what) {}
};

struct Observation {
  double abscissa = 0.0;  // rad/us
  double value = 0.0;
  double weight = 1.0;
};

struct FreeParameter {
  std::string name;
  double initial = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// Fixed constants behind the efficiency-spectrum model; the abscissa is Dr
// and the free parameters are a subset of {omega0, g, delta_c}.
struct EfficiencySpectrumModel {
  ThreeLevelParams base;
  ReadPulse pulse;
  double rel_tol = 1e-8;
  unsigned workers = 1;
};

// Fixed constants behind the reflectance model; the abscissa is the probe
// offset and the single free parameter is the atom number N in g = g0 sqrt(N).
struct ReflectanceSpectrumModel {
  TwoLevelSystemParams base;
  AngularFrequency g0;
};

struct FitProblem {
  std::vector<Observation> observations;
  std::variant<EfficiencySpectrumModel, ReflectanceSpectrumModel> model;
  std::vector<FreeParameter> free_params;
};

struct FitReport {
  std::map<std::string, double> estimates;
  std::map<std::string, double> confidence_intervals;  // 95% half-widths
  double residual_rms = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct LmOptions {
  int max_iterations = 200;
  double ftol = 1e-12;   // relative cost decrease
  double xtol = 1e-10;   // relative step size
  double gtol = 1e-10;   // gradient infinity norm
};

// Levenberg-Marquardt with forward-difference Jacobians (relative step
// sqrt(machine epsilon)), box bounds by projection, and monotone acceptance:
// the weighted cost never increases across accepted steps.
FitReport levenberg_marquardt(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals,
    const std::vector<FreeParameter>& params, const LmOptions& opt = {});

void validate(const FitProblem& problem);

FitReport fit_efficiency_spectrum(const FitProblem& problem,
                                  const LmOptions& opt = {});

FitReport fit_reflectance_N(const FitProblem& problem,
                            const LmOptions& opt = {});

// Model evaluation helpers shared by the fitters and the CLI.
Eigen::ArrayXd efficiency_spectrum(const EfficiencySpectrumModel& model,
                                   const Eigen::ArrayXd& dr_values,
                                   double omega0, double g, double delta_c);

}  // namespace spincav

#endif  // SPINCAV_FIT_HPP
