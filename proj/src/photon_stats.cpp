#include "spincav/photon_stats.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "spincav/parallel.hpp"

namespace spincav {

namespace {

constexpr std::uint64_t kStreamSize = 1u << 16;

double binomial_se(std::uint64_t k, std::uint64_t n) {
  if (n == 0) return 0.0;
  const double p = static_cast<double>(k) / static_cast<double>(n);
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Uniform in (0,1]; identical on every platform for a given engine state.
double uniform_open(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

bool bernoulli(std::mt19937_64& rng, double p) {
  return uniform_open(rng) <= p;
}

// Single-mode thermal (geometric) photon number with mean mu.
std::uint32_t thermal_draw(std::mt19937_64& rng, double mu) {
  if (mu <= 0.0) return 0;
  const double theta = mu / (1.0 + mu);
  const double u = uniform_open(rng);
  if (u > theta) return 0;
  return static_cast<std::uint32_t>(std::log(u) / std::log(theta));
}

struct StreamTally {
  std::uint64_t trials = 0;
  std::uint64_t write_click_trials = 0;
  std::uint64_t read_click_trials = 0;
  std::uint64_t coincidence_trials = 0;
  std::uint64_t write_clicks_sum = 0;
  std::uint64_t write_pairs_sum = 0;
  std::uint64_t read_clicks_sum = 0;
  std::uint64_t read_pairs_sum = 0;
  std::uint64_t background_trials = 0;
  std::uint64_t background_write_clicks = 0;
};

}  // namespace

void validate(const EfficiencyChain& chain) {
  const auto ok = [](double x) { return x > 0.0 && x <= 1.0; };
  if (!ok(chain.eta_esc) || !ok(chain.eta_t) || !ok(chain.eta_d)) {
    throw DomainError("efficiency chain: every factor must lie in (0,1]");
  }
}

double DetectionRecord::p_w() const {
  return trials == 0 ? 0.0
                     : static_cast<double>(write_click_trials) /
                           static_cast<double>(trials);
}

double DetectionRecord::p_r() const {
  return trials == 0 ? 0.0
                     : static_cast<double>(read_click_trials) /
                           static_cast<double>(trials);
}

double DetectionRecord::p_wr() const {
  return trials == 0 ? 0.0
                     : static_cast<double>(coincidence_trials) /
                           static_cast<double>(trials);
}

double DetectionRecord::p_r_given_w() const {
  return write_click_trials == 0
             ? 0.0
             : static_cast<double>(coincidence_trials) /
                   static_cast<double>(write_click_trials);
}

double DetectionRecord::p_b() const {
  return background_trials == 0
             ? 0.0
             : static_cast<double>(background_write_clicks) /
                   static_cast<double>(background_trials);
}

Measured cross_correlation(const DetectionRecord& record) {
  const double pw = record.p_w();
  const double pr = record.p_r();
  if (!(pw > 0.0) || !(pr > 0.0)) {
    throw UndefinedCorrelator(
        "cross_correlation: zero write or read probability");
  }
  const double g2 = record.p_wr() / (pw * pr);
  // Poissonian counting errors on the three click counts.
  double rel = 0.0;
  if (record.coincidence_trials > 0) {
    rel += 1.0 / static_cast<double>(record.coincidence_trials);
  }
  rel += 1.0 / static_cast<double>(record.write_click_trials);
  rel += 1.0 / static_cast<double>(record.read_click_trials);
  return {g2, g2 * std::sqrt(rel)};
}

Measured autocorrelation(std::uint64_t trials, std::uint64_t clicks_sum,
                         std::uint64_t pairs_sum) {
  if (trials == 0 || clicks_sum == 0) {
    throw UndefinedCorrelator("autocorrelation: no clicks recorded");
  }
  const double n = static_cast<double>(trials);
  const double s1 = static_cast<double>(clicks_sum);
  const double s2 = static_cast<double>(pairs_sum);
  const double g2 = n * s2 / (s1 * s1);
  if (pairs_sum == 0) {
    // No pairs seen: report the one-pair upper scale as the uncertainty.
    return {0.0, 2.0 * n / (s1 * s1)};
  }
  // m(m-1) advances by 2 per two-click trial, so the pair-event count is
  // S2/2 and its Poisson variance doubles on S2.
  return {g2, g2 * std::sqrt(2.0 / s2 + 4.0 / s1)};
}

Measured corrected_retrieval(Measured p_r_given_w, Measured p_b, Measured p_w,
                             const EfficiencyChain& chain) {
  validate(chain);
  if (p_b.value < 0.0 || !(p_w.value > p_b.value)) {
    throw NoiseDominated(
        "corrected_retrieval: background reaches the write rate, correction undefined");
  }
  const double eta = chain.eta_tot();
  const double w = p_w.value, b = p_b.value, p = p_r_given_w.value;
  const double value = p * w / (eta * (w - b));
  const double dp = w / (eta * (w - b));
  const double dw = -p * b / (eta * (w - b) * (w - b));
  const double db = p * w / (eta * (w - b) * (w - b));
  const double var = dp * dp * p_r_given_w.error * p_r_given_w.error +
                     dw * dw * p_w.error * p_w.error +
                     db * db * p_b.error * p_b.error;
  return {value, std::sqrt(var)};
}

Measured intrinsic_efficiency(Measured p_corrected, Measured g2_wr) {
  if (!(g2_wr.value > 0.0)) {
    throw UndefinedCorrelator("intrinsic_efficiency: require g2_wr > 0");
  }
  const double accidental = 1.0 - 1.0 / g2_wr.value;
  const double raw = p_corrected.value * accidental;
  const double dpc = accidental;
  const double dg2 = p_corrected.value / (g2_wr.value * g2_wr.value);
  const double var = dpc * dpc * p_corrected.error * p_corrected.error +
                     dg2 * dg2 * g2_wr.error * g2_wr.error;
  // Below g2 = 1 every coincidence is accidental; the estimate is clamped
  // and callers flag the result as out of model.
  return {std::max(raw, 0.0), std::sqrt(var)};
}

CauchySchwarzTest cauchy_schwarz(Measured g2_wr, Measured g2_ww,
                                 Measured g2_rr) {
  if (!(g2_wr.value > 0.0) || !(g2_ww.value > 0.0) || !(g2_rr.value > 0.0)) {
    throw UndefinedCorrelator("cauchy_schwarz: all correlators must be > 0");
  }
  CauchySchwarzTest out;
  out.ratio = g2_wr.value * g2_wr.value / (g2_ww.value * g2_rr.value);
  out.bound = std::sqrt(g2_ww.value * g2_rr.value);
  const double rel_ww = g2_ww.error / g2_ww.value;
  const double rel_rr = g2_rr.error / g2_rr.value;
  const double bound_err =
      0.5 * out.bound * std::sqrt(rel_ww * rel_ww + rel_rr * rel_rr);
  const double sigma = std::sqrt(g2_wr.error * g2_wr.error +
                                 bound_err * bound_err);
  const double excess = g2_wr.value - out.bound;
  if (sigma > 0.0) {
    out.significance = excess / sigma;
  } else {
    out.significance = excess > 0.0
                           ? std::numeric_limits<double>::infinity()
                           : 0.0;
  }
  out.nonclassical = out.significance >= 1.0;
  return out;
}

StatsSummary summarize(const DetectionRecord& record,
                       const EfficiencyChain& chain) {
  StatsSummary out;
  out.g2_wr = cross_correlation(record);
  out.g2_ww = autocorrelation(record.trials, record.write_clicks_sum,
                              record.write_pairs_sum);
  out.g2_rr = autocorrelation(record.trials, record.read_clicks_sum,
                              record.read_pairs_sum);

  const Measured pw{record.p_w(),
                    binomial_se(record.write_click_trials, record.trials)};
  const Measured pb{record.p_b(), binomial_se(record.background_write_clicks,
                                              record.background_trials)};
  const Measured prw{record.p_r_given_w(),
                     binomial_se(record.coincidence_trials,
                                 record.write_click_trials)};
  out.p_rw_corrected = corrected_retrieval(prw, pb, pw, chain);
  out.chi_estimate = intrinsic_efficiency(out.p_rw_corrected, out.g2_wr);
  out.chi_out_of_model =
      out.g2_wr.value <= 1.0 || out.chi_estimate.value > 1.0;

  try {
    const auto cs = cauchy_schwarz(out.g2_wr, out.g2_ww, out.g2_rr);
    out.cs_ratio = cs.ratio;
    out.classical_bound = cs.bound;
    out.nonclassical = cs.nonclassical;
    out.significance = cs.significance;
  } catch (const UndefinedCorrelator&) {
    // No same-field pairs observed: the bound is not measurable, so no
    // non-classicality claim is made.
    out.cs_ratio = std::numeric_limits<double>::quiet_NaN();
    out.classical_bound = std::numeric_limits<double>::quiet_NaN();
    out.nonclassical = false;
    out.significance = 0.0;
  }
  return out;
}

DetectionRecord simulate_detection_events(const DetectionModel& model,
                                          std::uint64_t trials,
                                          std::uint64_t seed,
                                          const SimulateOptions& opt) {
  validate(model.chain);
  if (!(model.excitation_mean > 0.0) || !(model.excitation_mean < 1.0)) {
    throw DomainError("simulate: excitation mean must lie in (0,1)");
  }
  if (!(model.chi_true >= 0.0 && model.chi_true <= 1.0)) {
    throw DomainError("simulate: chi_true must lie in [0,1]");
  }
  if (model.dark_count < 0.0 || model.dark_count >= 1.0) {
    throw DomainError("simulate: dark count must lie in [0,1)");
  }
  if (trials == 0) {
    throw DomainError("simulate: need at least one trial");
  }

  // The write-out bypasses the cavity; its photons herald through the
  // detector efficiency alone. Read photons traverse the full chain.
  const double eta_w = model.chain.eta_d;
  const double q_read = model.chi_true * model.chain.eta_tot();
  const double mu = model.excitation_mean;
  const double pd = model.dark_count;

  const std::uint64_t n_streams = (trials + kStreamSize - 1) / kStreamSize;
  std::vector<StreamTally> tallies(n_streams);

  if (opt.events != nullptr) opt.events->assign(trials, {0, 0});
  if (opt.background_events != nullptr) {
    opt.background_events->assign(trials, 0);
  }

  parallel_for_indexed(n_streams, opt.workers, [&](std::size_t s) {
    const std::uint64_t first = s * kStreamSize;
    const std::uint64_t last = std::min(first + kStreamSize, trials);
    std::mt19937_64 rng(splitmix64(seed ^ (0x51f0c4e5u + 2654435769u * s)));
    StreamTally& tally = tallies[s];
    for (std::uint64_t i = first; i < last; ++i) {
      const std::uint32_t n_exc = thermal_draw(rng, mu);
      std::uint32_t m_w = 0, m_r = 0;
      for (std::uint32_t k = 0; k < n_exc; ++k) {
        if (bernoulli(rng, eta_w)) ++m_w;
        if (bernoulli(rng, q_read)) ++m_r;
      }
      if (pd > 0.0) {
        if (bernoulli(rng, pd)) ++m_w;
        if (bernoulli(rng, pd)) ++m_r;
      }
      ++tally.trials;
      tally.write_clicks_sum += m_w;
      tally.write_pairs_sum += static_cast<std::uint64_t>(m_w) * (m_w - 1);
      tally.read_clicks_sum += m_r;
      tally.read_pairs_sum += static_cast<std::uint64_t>(m_r) * (m_r - 1);
      if (m_w > 0) ++tally.write_click_trials;
      if (m_r > 0) ++tally.read_click_trials;
      if (m_w > 0 && m_r > 0) ++tally.coincidence_trials;
      if (opt.events != nullptr) {
        (*opt.events)[i] = {static_cast<std::uint16_t>(m_w),
                            static_cast<std::uint16_t>(m_r)};
      }
    }
    // Background block: write pulse off, only dark counts can herald.
    for (std::uint64_t i = first; i < last; ++i) {
      const bool click = pd > 0.0 && bernoulli(rng, pd);
      ++tally.background_trials;
      if (click) ++tally.background_write_clicks;
      if (opt.background_events != nullptr) {
        (*opt.background_events)[i] = click ? 1 : 0;
      }
    }
  });

  DetectionRecord record;
  for (const auto& t : tallies) {
    record.trials += t.trials;
    record.write_click_trials += t.write_click_trials;
    record.read_click_trials += t.read_click_trials;
    record.coincidence_trials += t.coincidence_trials;
    record.write_clicks_sum += t.write_clicks_sum;
    record.write_pairs_sum += t.write_pairs_sum;
    record.read_clicks_sum += t.read_clicks_sum;
    record.read_pairs_sum += t.read_pairs_sum;
    record.background_trials += t.background_trials;
    record.background_write_clicks += t.background_write_clicks;
  }
  return record;
}

}  // namespace spincav
