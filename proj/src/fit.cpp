#include "spincav/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spincav/parallel.hpp"

namespace spincav {

namespace {

constexpr double kSqrtEps = 1.4901161193847656e-08;  // sqrt(machine epsilon)

Eigen::VectorXd clamp_to_bounds(Eigen::VectorXd x,
                                const std::vector<FreeParameter>& params) {
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const auto& p = params[static_cast<std::size_t>(j)];
    x[j] = std::clamp(x[j], p.lower, p.upper);
  }
  return x;
}

}  // namespace

void validate(const FitProblem& problem) {
  if (problem.free_params.empty()) {
    throw DomainError("fit: no free parameters");
  }
  if (problem.observations.size() < 3 * problem.free_params.size()) {
    throw DomainError("fit: need at least 3 observations per free parameter");
  }
  for (const auto& o : problem.observations) {
    if (!(o.weight > 0.0)) throw DomainError("fit: weights must be positive");
  }
  for (const auto& p : problem.free_params) {
    if (!(p.lower < p.upper)) {
      throw DomainError("fit: bounds of '" + p.name + "' are empty");
    }
    if (p.initial < p.lower || p.initial > p.upper) {
      throw DomainError("fit: initial guess of '" + p.name +
                        "' lies outside its bounds");
    }
  }
}

FitReport levenberg_marquardt(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals,
    const std::vector<FreeParameter>& params, const LmOptions& opt) {
  const auto p = static_cast<Eigen::Index>(params.size());
  Eigen::VectorXd x(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    x[j] = params[static_cast<std::size_t>(j)].initial;
  }

  Eigen::VectorXd r = residuals(x);
  const auto n = r.size();
  double cost = r.squaredNorm();

  FitReport report;
  report.iterations = 0;
  report.converged = false;

  const auto finish = [&](const Eigen::VectorXd& xf, double costf,
                          const Eigen::MatrixXd& jac) {
    for (Eigen::Index j = 0; j < p; ++j) {
      report.estimates[params[static_cast<std::size_t>(j)].name] = xf[j];
    }
    report.residual_rms = std::sqrt(costf / static_cast<double>(n));
    // Linearized covariance (J^T J)^-1 s^2 at the solution; pseudo-inverse
    // keeps boundary-degenerate Jacobians from poisoning the intervals.
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const double dof = static_cast<double>(std::max<Eigen::Index>(n - p, 1));
    const double s2 = costf / dof;
    const Eigen::MatrixXd cov =
        s2 * jtj.completeOrthogonalDecomposition().pseudoInverse();
    for (Eigen::Index j = 0; j < p; ++j) {
      double ci = 1.96 * std::sqrt(std::max(cov(j, j), 0.0));
      ci = std::max(ci, 1e-12 * (1.0 + std::abs(xf[j])));
      report.confidence_intervals[params[static_cast<std::size_t>(j)].name] =
          ci;
    }
  };

  const auto jacobian = [&](const Eigen::VectorXd& at,
                            const Eigen::VectorXd& r_at) {
    Eigen::MatrixXd J(n, p);
    for (Eigen::Index j = 0; j < p; ++j) {
      const auto& prm = params[static_cast<std::size_t>(j)];
      double h = kSqrtEps * std::max(std::abs(at[j]),
                                     1e-3 * (prm.upper - prm.lower));
      if (h == 0.0) h = kSqrtEps;
      if (at[j] + h > prm.upper) h = -h;  // stay inside the box
      Eigen::VectorXd xs = at;
      xs[j] += h;
      J.col(j) = (residuals(xs) - r_at) / h;
    }
    return J;
  };

  // A perfect starting point converges with zero iterations.
  if (cost <= 1e-20) {
    report.converged = true;
    finish(x, cost, jacobian(x, r));
    return report;
  }

  Eigen::MatrixXd J = jacobian(x, r);
  {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv[sv.size() - 1] <= 1e-12 * sv[0]) {
      throw RankDeficientFit(
          "fit: Jacobian is rank deficient (flat or degenerate data)");
    }
  }

  double lambda = 1e-3 * (J.transpose() * J).diagonal().maxCoeff();
  const double lambda_floor = 1e-14 * std::max(lambda, 1.0);

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    const Eigen::MatrixXd jtj = J.transpose() * J;
    const Eigen::VectorXd grad = J.transpose() * r;
    if (grad.lpNorm<Eigen::Infinity>() <=
        opt.gtol * std::max(1.0, std::sqrt(cost))) {
      report.converged = true;
      break;
    }

    bool accepted = false;
    for (int tries = 0; tries < 50; ++tries) {
      Eigen::MatrixXd damped = jtj;
      for (Eigen::Index j = 0; j < p; ++j) {
        damped(j, j) += lambda * std::max(jtj(j, j), 1e-12);
      }
      const Eigen::VectorXd step = damped.ldlt().solve(-grad);
      const Eigen::VectorXd trial = clamp_to_bounds(x + step, params);
      const Eigen::VectorXd r_trial = residuals(trial);
      const double cost_trial = r_trial.squaredNorm();
      if (cost_trial < cost) {
        const double drop = cost - cost_trial;
        const double step_norm = (trial - x).norm();
        x = trial;
        r = r_trial;
        cost = cost_trial;
        lambda = std::max(lambda / 3.0, lambda_floor);
        accepted = true;
        ++report.iterations;
        if (drop <= opt.ftol * std::max(cost, 1e-300) ||
            step_norm <= opt.xtol * (x.norm() + opt.xtol)) {
          report.converged = true;
        }
        break;
      }
      lambda *= 4.0;
      if (lambda > 1e16) break;
    }
    if (report.converged) break;
    if (!accepted) {
      // No damping level improves the cost: numerically at a local minimum.
      report.converged = true;
      break;
    }
    J = jacobian(x, r);
  }

  finish(x, cost, jacobian(x, r));
  return report;
}

Eigen::ArrayXd efficiency_spectrum(const EfficiencySpectrumModel& model,
                                   const Eigen::ArrayXd& dr_values,
                                   double omega0, double g, double delta_c) {
  Eigen::ArrayXd chi(dr_values.size());
  ReadPulse pulse = model.pulse;
  pulse.peak_rabi = AngularFrequency::from_rad_per_us(omega0);
  const auto base =
      model.base.with_g(AngularFrequency::from_rad_per_us(g))
          .with_delta_c(AngularFrequency::from_rad_per_us(delta_c));
  parallel_for_indexed(
      static_cast<std::size_t>(dr_values.size()), model.workers,
      [&](std::size_t i) {
        RetrievalOptions opt;
        opt.rel_tol = model.rel_tol;
        opt.keep_states = false;
        const auto p = base.with_delta_r(AngularFrequency::from_rad_per_us(
            dr_values[static_cast<Eigen::Index>(i)]));
        chi[static_cast<Eigen::Index>(i)] =
            integrate_retrieval(p, pulse, opt).chi;
      });
  return chi;
}

FitReport fit_efficiency_spectrum(const FitProblem& problem,
                                  const LmOptions& opt) {
  validate(problem);
  const auto* model = std::get_if<EfficiencySpectrumModel>(&problem.model);
  if (model == nullptr) {
    throw DomainError("fit: efficiency fit needs an efficiency-spectrum model");
  }
  for (const auto& p : problem.free_params) {
    if (p.name != "omega0" && p.name != "g" && p.name != "delta_c") {
      throw DomainError("fit: unknown efficiency parameter '" + p.name + "'");
    }
  }

  const auto n = static_cast<Eigen::Index>(problem.observations.size());
  Eigen::ArrayXd abscissas(n), values(n), sqrt_w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& o = problem.observations[static_cast<std::size_t>(i)];
    abscissas[i] = o.abscissa;
    values[i] = o.value;
    sqrt_w[i] = std::sqrt(o.weight);
  }

  const auto value_of = [&](const Eigen::VectorXd& x,
                            const std::string& name, double fallback) {
    for (std::size_t j = 0; j < problem.free_params.size(); ++j) {
      if (problem.free_params[j].name == name) {
        return x[static_cast<Eigen::Index>(j)];
      }
    }
    return fallback;
  };

  const auto residuals = [&](const Eigen::VectorXd& x) {
    const double omega0 =
        value_of(x, "omega0", model->pulse.peak_rabi.rad_per_us());
    const double g = value_of(x, "g", model->base.g().rad_per_us());
    const double dc =
        value_of(x, "delta_c", model->base.delta_c().rad_per_us());
    const Eigen::ArrayXd chi =
        efficiency_spectrum(*model, abscissas, omega0, g, dc);
    return Eigen::VectorXd((sqrt_w * (chi - values)).matrix());
  };

  return levenberg_marquardt(residuals, problem.free_params, opt);
}

FitReport fit_reflectance_N(const FitProblem& problem, const LmOptions& opt) {
  validate(problem);
  const auto* model = std::get_if<ReflectanceSpectrumModel>(&problem.model);
  if (model == nullptr) {
    throw DomainError("fit: reflectance fit needs a reflectance-spectrum model");
  }
  if (problem.free_params.size() != 1 || problem.free_params[0].name != "N") {
    throw DomainError("fit: reflectance fit has exactly one free parameter 'N'");
  }
  const auto& np = problem.free_params[0];
  if (np.lower < 0.0) {
    throw DomainError("fit: atom number bounds must be non-negative");
  }

  // Internally fit u = sqrt(N): g = g0 u is linear in u, which keeps the
  // Jacobian finite at N = 0 where dR/dN has a square-root cusp.
  std::vector<FreeParameter> internal{{"u", std::sqrt(np.initial),
                                       std::sqrt(np.lower),
                                       std::sqrt(np.upper)}};

  const auto residuals = [&](const Eigen::VectorXd& x) {
    TwoLevelSystemParams params = model->base;
    params.g = AngularFrequency::from_rad_per_us(model->g0.rad_per_us() * x[0]);
    Eigen::VectorXd r(static_cast<Eigen::Index>(problem.observations.size()));
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      const auto& o = problem.observations[static_cast<std::size_t>(i)];
      r[i] = std::sqrt(o.weight) * (reflectance(o.abscissa, params) - o.value);
    }
    return r;
  };

  FitReport internal_report = levenberg_marquardt(residuals, internal, opt);

  const double u = internal_report.estimates.at("u");
  const double ci_u = internal_report.confidence_intervals.at("u");
  const double n_lo = std::pow(std::max(u - ci_u, 0.0), 2.0);
  const double n_hi = std::pow(u + ci_u, 2.0);

  FitReport report = internal_report;
  report.estimates.clear();
  report.confidence_intervals.clear();
  report.estimates["N"] = u * u;
  report.confidence_intervals["N"] =
      std::max(0.5 * (n_hi - n_lo), 1e-12 * (1.0 + u * u));
  return report;
}

}  // namespace spincav
