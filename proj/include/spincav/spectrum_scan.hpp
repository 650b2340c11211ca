#ifndef SPINCAV_SPECTRUM_SCAN_HPP
#define SPINCAV_SPECTRUM_SCAN_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "spincav/retrieval.hpp"

namespace spincav {

class UnresolvedSplitting : public DomainError {
 public:
  explicit UnresolvedSplitting(const std::string& what) : DomainError(what) {}
};

struct PeakLocus {
  double delta_c = 0.0;               // rad/us
  std::vector<double> peaks;          // refined Dr positions, rad/us, ascending
};

struct SpectrumGrid {
  Eigen::ArrayXd dr_axis;             // rad/us
  Eigen::ArrayXd dc_axis;             // rad/us
  Eigen::ArrayXXd chi;                // chi(i_dc, i_dr)
  std::vector<PeakLocus> peak_loci;   // one entry per Dc row
  Eigen::ArrayXXd eigen_overlay;      // rows: Dc; cols: {D+, D-} at delta=Dc
};

struct ScanOptions {
  double rel_tol = 1e-9;
  unsigned workers = 1;
  std::string cache_dir;              // empty = no caching
};

// One retrieval integration per (Dc, Dr) grid point. Peak loci are the
// parabola-refined interior maxima per row; the overlay stores the dressed
// frequencies D+-(g, Omega0, delta=Dc) on the Dc axis.
SpectrumGrid scan_efficiency(const ThreeLevelParams& base,
                             const ReadPulse& pulse,
                             const Eigen::ArrayXd& dr_grid,
                             const Eigen::ArrayXd& dc_grid,
                             const ScanOptions& opt = {});

// Separation of the two largest interior maxima of chi_row, each refined by a
// three-point parabola. Throws UnresolvedSplitting when fewer than two
// interior maxima exist.
double extract_splitting(const Eigen::ArrayXd& chi_row,
                         const Eigen::ArrayXd& dr_axis);

// Positions (not just separation) of the two dominant refined maxima,
// ascending. Same failure contract as extract_splitting.
std::pair<double, double> extract_peak_pair(const Eigen::ArrayXd& chi_row,
                                            const Eigen::ArrayXd& dr_axis);

struct OdSweepResult {
  Eigen::ArrayXd od_values;
  Eigen::ArrayXd splittings;              // rad/us; NaN where unresolved
  std::vector<std::string> failures;      // messages for unresolved ODs
  double amplitude = 0.0;                 // A in splitting = A OD^beta
  double exponent = 0.0;                  // beta
  double amplitude_ci = 0.0;              // 95% half-widths
  double exponent_ci = 0.0;
};

struct OdSweepOptions {
  double rel_tol = 1e-9;
  unsigned workers = 1;
  int dr_points = 201;       // per-OD efficiency scan resolution
  double dr_span_factor = 2.2;  // scan Dr in +-(factor*g(OD) + 5*Omega0)
};

// Maps optical depth to coupling through g(OD) = g_ref sqrt(OD/OD_ref),
// extracts the Dc=0 splitting per OD and fits splitting = A OD^beta on
// log-log values. Unresolved splittings are recorded and excluded, never
// zeroed. Requires at least two resolved points.
OdSweepResult od_sweep(const ThreeLevelParams& base, const ReadPulse& pulse,
                       const Eigen::ArrayXd& od_values, double od_ref,
                       AngularFrequency g_ref, const OdSweepOptions& opt = {});

}  // namespace spincav

#endif  // SPINCAV_SPECTRUM_SCAN_HPP
