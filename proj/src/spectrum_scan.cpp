#include "spincav/spectrum_scan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spincav/parallel.hpp"

namespace spincav {

namespace {

double parabola_vertex(double x0, double y0, double x1, double y1, double x2,
                       double y2) {
  const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
  const double a =
      (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
  const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) +
                    x0 * x0 * (y1 - y2)) / denom;
  if (!(a < 0.0)) return x1;  // not concave, keep the grid point
  const double v = -b / (2.0 * a);
  // A refined vertex never leaves the bracketing interval.
  return std::clamp(v, x0, x2);
}

struct Maximum {
  Eigen::Index index;
  double height;
  double position;  // refined
};

std::vector<Maximum> interior_maxima(const Eigen::ArrayXd& row,
                                     const Eigen::ArrayXd& axis) {
  std::vector<Maximum> maxima;
  for (Eigen::Index i = 1; i + 1 < row.size(); ++i) {
    if (row[i] > row[i - 1] && row[i] > row[i + 1]) {
      maxima.push_back({i, row[i],
                        parabola_vertex(axis[i - 1], row[i - 1], axis[i],
                                        row[i], axis[i + 1], row[i + 1])});
    }
  }
  return maxima;
}

void check_row(const Eigen::ArrayXd& row, const Eigen::ArrayXd& axis) {
  if (row.size() != axis.size()) {
    throw DomainError("splitting: row and axis lengths differ");
  }
  if (row.size() < 5) {
    throw DomainError("splitting: need at least 5 points");
  }
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string scan_cache_key(const ThreeLevelParams& base, const ReadPulse& pulse,
                           const Eigen::ArrayXd& dr, const Eigen::ArrayXd& dc,
                           double tol) {
  std::ostringstream os;
  os.precision(17);
  os << "scan1|" << base.g().rad_per_us() << '|' << base.kappa().rad_per_us()
     << '|' << base.gamma().rad_per_us() << '|' << base.gamma_s().rad_per_us()
     << '|' << pulse.peak_rabi.rad_per_us() << '|' << pulse.center << '|'
     << pulse.fwhm << '|' << tol << '|' << dr.size() << '|' << dc.size();
  for (Eigen::Index i = 0; i < dr.size(); ++i) os << '|' << dr[i];
  for (Eigen::Index i = 0; i < dc.size(); ++i) os << '|' << dc[i];
  return os.str();
}

bool load_cached_grid(const std::string& path, Eigen::ArrayXXd& chi) {
  std::ifstream in(path);
  if (!in) return false;
  Eigen::Index rows = 0, cols = 0;
  in >> rows >> cols;
  if (rows != chi.rows() || cols != chi.cols()) return false;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!(in >> chi(i, j))) return false;
    }
  }
  return true;
}

void store_cached_grid(const std::string& path, const Eigen::ArrayXXd& chi) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) return;  // cache is best-effort
    out.precision(17);
    out << chi.rows() << ' ' << chi.cols() << '\n';
    for (Eigen::Index i = 0; i < chi.rows(); ++i) {
      for (Eigen::Index j = 0; j < chi.cols(); ++j) {
        out << chi(i, j) << (j + 1 == chi.cols() ? '\n' : ' ');
      }
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
}

void check_monotone(const Eigen::ArrayXd& axis, const char* name) {
  if (axis.size() == 0) {
    throw DomainError(std::string("scan: empty ") + name + " grid");
  }
  for (Eigen::Index i = 1; i < axis.size(); ++i) {
    if (!(axis[i] > axis[i - 1])) {
      throw DomainError(std::string("scan: ") + name +
                        " grid must be strictly increasing");
    }
  }
}

}  // namespace

double extract_splitting(const Eigen::ArrayXd& chi_row,
                         const Eigen::ArrayXd& dr_axis) {
  const auto [lo, hi] = extract_peak_pair(chi_row, dr_axis);
  return hi - lo;
}

std::pair<double, double> extract_peak_pair(const Eigen::ArrayXd& chi_row,
                                            const Eigen::ArrayXd& dr_axis) {
  check_row(chi_row, dr_axis);
  auto maxima = interior_maxima(chi_row, dr_axis);
  if (maxima.size() < 2) {
    throw UnresolvedSplitting(
        "splitting: fewer than two interior maxima (unresolved)");
  }
  std::sort(maxima.begin(), maxima.end(),
            [](const Maximum& a, const Maximum& b) {
              return a.height > b.height;
            });
  double p0 = maxima[0].position;
  double p1 = maxima[1].position;
  if (p0 > p1) std::swap(p0, p1);
  return {p0, p1};
}

SpectrumGrid scan_efficiency(const ThreeLevelParams& base,
                             const ReadPulse& pulse,
                             const Eigen::ArrayXd& dr_grid,
                             const Eigen::ArrayXd& dc_grid,
                             const ScanOptions& opt) {
  validate(base);
  validate(pulse);
  check_monotone(dr_grid, "Dr");
  check_monotone(dc_grid, "Dc");

  SpectrumGrid grid;
  grid.dr_axis = dr_grid;
  grid.dc_axis = dc_grid;
  grid.chi.resize(dc_grid.size(), dr_grid.size());

  std::string cache_path;
  bool cached = false;
  if (!opt.cache_dir.empty()) {
    std::filesystem::create_directories(opt.cache_dir);
    char name[64];
    std::snprintf(name, sizeof name, "scan-%016llx.txt",
                  static_cast<unsigned long long>(fnv1a(scan_cache_key(
                      base, pulse, dr_grid, dc_grid, opt.rel_tol))));
    cache_path = (std::filesystem::path(opt.cache_dir) / name).string();
    cached = load_cached_grid(cache_path, grid.chi);
  }

  if (!cached) {
    const std::size_t n_dr = static_cast<std::size_t>(dr_grid.size());
    const std::size_t total = n_dr * static_cast<std::size_t>(dc_grid.size());
    parallel_for_indexed(total, opt.workers, [&](std::size_t idx) {
      const Eigen::Index ic = static_cast<Eigen::Index>(idx / n_dr);
      const Eigen::Index ir = static_cast<Eigen::Index>(idx % n_dr);
      const auto point =
          base.with_delta_c(AngularFrequency::from_rad_per_us(dc_grid[ic]))
              .with_delta_r(AngularFrequency::from_rad_per_us(dr_grid[ir]));
      RetrievalOptions ropt;
      ropt.rel_tol = opt.rel_tol;
      ropt.keep_states = false;
      try {
        grid.chi(ic, ir) = integrate_retrieval(point, pulse, ropt).chi;
      } catch (const std::exception& e) {
        std::ostringstream os;
        os << "scan point (Dc=" << dc_grid[ic] << ", Dr=" << dr_grid[ir]
           << " rad/us): " << e.what();
        throw DomainError(os.str());
      }
    });
    if (!cache_path.empty()) store_cached_grid(cache_path, grid.chi);
  }

  grid.peak_loci.reserve(static_cast<std::size_t>(dc_grid.size()));
  grid.eigen_overlay.resize(dc_grid.size(), 2);
  for (Eigen::Index ic = 0; ic < dc_grid.size(); ++ic) {
    PeakLocus locus;
    locus.delta_c = dc_grid[ic];
    for (const auto& m : interior_maxima(grid.chi.row(ic), dr_grid)) {
      locus.peaks.push_back(m.position);
    }
    grid.peak_loci.push_back(std::move(locus));
    const auto [dp, dm] = dressed_eigenfrequencies(
        base.g().rad_per_us(), pulse.peak_rabi.rad_per_us(), dc_grid[ic]);
    grid.eigen_overlay(ic, 0) = dp;
    grid.eigen_overlay(ic, 1) = dm;
  }
  return grid;
}

OdSweepResult od_sweep(const ThreeLevelParams& base, const ReadPulse& pulse,
                       const Eigen::ArrayXd& od_values, double od_ref,
                       AngularFrequency g_ref, const OdSweepOptions& opt) {
  if (od_values.size() < 2) {
    throw DomainError("od_sweep: need at least two OD values (fit refused)");
  }
  for (Eigen::Index i = 0; i < od_values.size(); ++i) {
    if (!(od_values[i] > 0.0) ||
        (i > 0 && !(od_values[i] > od_values[i - 1]))) {
      throw DomainError("od_sweep: OD values must be positive and strictly increasing");
    }
  }
  if (!(od_ref > 0.0) || !(g_ref.rad_per_us() > 0.0)) {
    throw DomainError("od_sweep: reference pair must be positive");
  }

  OdSweepResult out;
  out.od_values = od_values;
  out.splittings = Eigen::ArrayXd::Constant(od_values.size(),
                                            std::nan(""));

  const double omega0 = pulse.peak_rabi.rad_per_us();
  for (Eigen::Index k = 0; k < od_values.size(); ++k) {
    const double g =
        g_ref.rad_per_us() * std::sqrt(od_values[k] / od_ref);
    const double span = opt.dr_span_factor * g + 5.0 * omega0;
    const Eigen::ArrayXd dr =
        Eigen::ArrayXd::LinSpaced(opt.dr_points, -span, span);
    const auto point_base =
        base.with_g(AngularFrequency::from_rad_per_us(g))
            .with_delta_c(AngularFrequency::from_rad_per_us(0.0));

    Eigen::ArrayXd row(dr.size());
    parallel_for_indexed(
        static_cast<std::size_t>(dr.size()), opt.workers, [&](std::size_t i) {
          RetrievalOptions ropt;
          ropt.rel_tol = opt.rel_tol;
          ropt.keep_states = false;
          const auto p = point_base.with_delta_r(
              AngularFrequency::from_rad_per_us(dr[static_cast<Eigen::Index>(i)]));
          row[static_cast<Eigen::Index>(i)] =
              integrate_retrieval(p, pulse, ropt).chi;
        });
    try {
      out.splittings[k] = extract_splitting(row, dr);
    } catch (const UnresolvedSplitting& e) {
      std::ostringstream os;
      os << "OD=" << od_values[k] << ": " << e.what();
      out.failures.push_back(os.str());
    }
  }

  // Least squares on ln(splitting) = ln A + beta ln(OD), resolved points only.
  std::vector<double> lx, ly;
  for (Eigen::Index k = 0; k < od_values.size(); ++k) {
    if (std::isfinite(out.splittings[k]) && out.splittings[k] > 0.0) {
      lx.push_back(std::log(od_values[k]));
      ly.push_back(std::log(out.splittings[k]));
    }
  }
  const auto n = static_cast<Eigen::Index>(lx.size());
  if (n < 2) {
    throw DomainError("od_sweep: fewer than two resolved splittings, power-law fit refused");
  }
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = lx[static_cast<std::size_t>(i)];
    y[i] = ly[static_cast<std::size_t>(i)];
  }
  const Eigen::Matrix2d xtx = X.transpose() * X;
  const Eigen::Vector2d beta = xtx.ldlt().solve(X.transpose() * y);
  out.amplitude = std::exp(beta[0]);
  out.exponent = beta[1];
  if (n > 2) {
    const double ssr = (y - X * beta).squaredNorm();
    const double s2 = ssr / static_cast<double>(n - 2);
    const Eigen::Matrix2d cov = s2 * xtx.inverse();
    out.amplitude_ci = 1.96 * std::sqrt(cov(0, 0)) * out.amplitude;
    out.exponent_ci = 1.96 * std::sqrt(cov(1, 1));
  }
  return out;
}

}  // namespace spincav
