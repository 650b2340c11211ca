#ifndef SPINCAV_PHOTON_STATS_HPP
#define SPINCAV_PHOTON_STATS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "spincav/units.hpp"

namespace spincav {

class UndefinedCorrelator : public DomainError {
 public:
  explicit UndefinedCorrelator(const std::string& what) : DomainError(what) {}
};

class NoiseDominated : public DomainError {
 public:
  explicit NoiseDominated(const std::string& what) : DomainError(what) {}
};

struct EfficiencyChain {
  double eta_esc = 0.56;  // cavity escape
  double eta_t = 0.53;    // cavity-to-detector transmission
  double eta_d = 0.45;    // detector efficiency

  double eta_tot() const { return eta_esc * eta_t * eta_d; }
};

void validate(const EfficiencyChain& chain);

// A value with a first-order propagated standard error.
struct Measured {
  double value = 0.0;
  double error = 0.0;
};

// Aggregate click bookkeeping over the trial ensemble. Per-field click
// counts are number resolved, so the same-field pair sums S2 feed the
// autocorrelation estimators directly. Background trials are recorded with
// the write pulse disabled, mirroring a dedicated background run.
struct DetectionRecord {
  std::uint64_t trials = 0;
  std::uint64_t write_click_trials = 0;   // trials with >= 1 write click
  std::uint64_t read_click_trials = 0;    // trials with >= 1 read click
  std::uint64_t coincidence_trials = 0;   // >= 1 of each
  std::uint64_t write_clicks_sum = 0;     // sum m_w
  std::uint64_t write_pairs_sum = 0;      // sum m_w (m_w - 1)
  std::uint64_t read_clicks_sum = 0;      // sum m_r
  std::uint64_t read_pairs_sum = 0;       // sum m_r (m_r - 1)
  std::uint64_t background_trials = 0;
  std::uint64_t background_write_clicks = 0;  // trials with a write click

  double p_w() const;
  double p_r() const;
  double p_wr() const;
  double p_r_given_w() const;
  double p_b() const;  // write background probability per gate
};

struct StatsSummary {
  Measured g2_wr;
  Measured g2_ww;
  Measured g2_rr;
  Measured p_rw_corrected;
  Measured chi_estimate;
  bool chi_out_of_model = false;  // accidental-dominated or > 1
  double cs_ratio = 0.0;          // (g2_wr)^2 / (g2_ww g2_rr)
  double classical_bound = 0.0;   // sqrt(g2_ww g2_rr)
  bool nonclassical = false;      // bound exceeded by >= 1 sigma
  double significance = 0.0;      // (g2_wr - bound) / sigma
};

// g2_wr = p_wr / (p_w p_r), Poissonian standard error.
Measured cross_correlation(const DetectionRecord& record);

// Number-resolved autocorrelation <m(m-1)> / <m>^2 of one field.
Measured autocorrelation(std::uint64_t trials, std::uint64_t clicks_sum,
                         std::uint64_t pairs_sum);

// p^c_r|w = p_r|w / [eta_tot (1 - p_b / p_w)]
Measured corrected_retrieval(Measured p_r_given_w, Measured p_b, Measured p_w,
                             const EfficiencyChain& chain);

// chi = p^c_r|w (1 - 1/g2_wr)
Measured intrinsic_efficiency(Measured p_corrected, Measured g2_wr);

struct CauchySchwarzTest {
  double ratio = 0.0;
  double bound = 0.0;
  bool nonclassical = false;
  double significance = 0.0;
};

CauchySchwarzTest cauchy_schwarz(Measured g2_wr, Measured g2_ww,
                                 Measured g2_rr);

// Full estimator chain over a record.
StatsSummary summarize(const DetectionRecord& record,
                       const EfficiencyChain& chain);

struct DetectionModel {
  double excitation_mean = 0.02;  // mu, thermal write-mode mean
  double chi_true = 0.75;         // per-excitation retrieval probability
  EfficiencyChain chain;
  double dark_count = 1e-4;       // per detector per gate
};

// Seeded thermal-pair Monte Carlo. Trials are drawn in fixed-size streams
// keyed by (seed, stream index); aggregation is commutative, so the record
// is identical for any worker count. Per-trial clicks can be captured for
// the event-file writer.
struct SimulateOptions {
  unsigned workers = 1;
  std::vector<std::pair<std::uint16_t, std::uint16_t>>* events = nullptr;
  std::vector<std::uint16_t>* background_events = nullptr;
};

DetectionRecord simulate_detection_events(const DetectionModel& model,
                                          std::uint64_t trials,
                                          std::uint64_t seed,
                                          const SimulateOptions& opt = {});

}  // namespace spincav

#endif  // SPINCAV_PHOTON_STATS_HPP
