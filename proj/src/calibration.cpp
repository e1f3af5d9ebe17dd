#include "eim/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eim/rng.hpp"

namespace eim {
namespace {

constexpr std::uint64_t kPayloadStreamTag = 0xb17b17b1ull;
constexpr std::uint64_t kChannelStreamTag = 0xc4a7c4a7ull;

template <typename T>
void count_positional(std::span<const T> tx, std::span<const T> rx, std::size_t& sent,
                      std::size_t& errors, std::size_t& missing, std::size_t& extra) {
  sent = tx.size();
  const std::size_t common = std::min(tx.size(), rx.size());
  errors = 0;
  for (std::size_t i = 0; i < common; ++i) {
    if (tx[i] != rx[i]) ++errors;
  }
  missing = tx.size() > rx.size() ? tx.size() - rx.size() : 0;
  extra = rx.size() > tx.size() ? rx.size() - tx.size() : 0;
  errors += missing + extra;
}

}  // namespace

SerReport measure_ser(std::span<const std::uint16_t> tx_symbols,
                      std::span<const std::uint16_t> rx_symbols) {
  SerReport r;
  std::size_t missing = 0;
  std::size_t extra = 0;
  count_positional(tx_symbols, rx_symbols, r.symbols_sent, r.symbol_errors, missing, extra);
  r.rx_missing = missing;
  r.rx_extra = extra;
  r.ser = r.symbols_sent > 0 ? static_cast<double>(r.symbol_errors) / r.symbols_sent : 0.0;
  return r;
}

SerReport measure_ser(std::span<const std::uint16_t> tx_symbols,
                      std::span<const std::uint16_t> rx_symbols,
                      std::span<const std::uint8_t> tx_bits,
                      std::span<const std::uint8_t> rx_bits) {
  SerReport r = measure_ser(tx_symbols, rx_symbols);
  std::size_t missing = 0;
  std::size_t extra = 0;
  count_positional(tx_bits, rx_bits, r.bits_sent, r.bit_errors, missing, extra);
  r.ber = r.bits_sent > 0 ? static_cast<double>(r.bit_errors) / r.bits_sent : 0.0;
  return r;
}

ExperimentResult run_experiment(const Codebook& codebook, const ChannelConfig& channel,
                                const DemodConfig& demod, std::size_t n_symbols,
                                std::uint64_t seed) {
  if (n_symbols < 1) throw std::invalid_argument("n_symbols must be >= 1");
  const auto n = static_cast<std::size_t>(codebook.block_length());
  const auto l = static_cast<std::size_t>(codebook.payload_bits());
  if (l < 1) throw std::invalid_argument("codebook carries no payload bits");
  const std::size_t blocks = (n_symbols + n - 1) / n;

  Pcg32 payload_rng(substream_seed(seed, kPayloadStreamTag));
  std::vector<std::uint8_t> tx_bits(blocks * l);
  for (auto& b : tx_bits) b = payload_rng.next_bit() ? 1 : 0;

  const auto indices = payload_to_codeword_indices(tx_bits, codebook);
  const auto tx_symbols = codeword_symbols(indices, codebook);
  const auto intervals = symbol_intervals(tx_symbols, codebook.alphabet());
  const std::int64_t pulse_width = codebook.alphabet().min_interval_ns() / 2;
  const EdgeSchedule schedule = to_edge_schedule(intervals, pulse_width, 0);

  ChannelConfig cfg = channel;
  cfg.seed = substream_seed(seed, kChannelStreamTag);
  const EventStream stream = simulate(schedule, cfg);

  const DemodResult rx = demodulate(stream, codebook, demod);
  ExperimentResult result;
  result.report = measure_ser(tx_symbols, rx.symbols, tx_bits, rx.bits);
  result.diagnostics = rx.diagnostics;
  return result;
}

std::optional<std::int64_t> estimate_min_stable_period(const ChannelConfig& channel,
                                                       const DemodConfig& demod,
                                                       const PeriodRange& range, int trials,
                                                       double stability, double tolerance) {
  if (range.min_ns < 2 || range.max_ns < range.min_ns || range.step_ns < 1) {
    throw std::invalid_argument("invalid period range");
  }
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (stability <= 0.0 || stability > 1.0) throw std::invalid_argument("stability must be in (0,1]");
  for (std::int64_t period = range.min_ns; period <= range.max_ns; period += range.step_ns) {
    const EdgeSchedule schedule = square_wave_schedule(period, trials + 1, 0);
    const EventStream stream = simulate(schedule, channel);
    const SampledSignals signals = bin_and_smooth(stream, demod);
    const PeakTimes peaks = detect_peaks(signals, demod);
    const auto intervals = peak_intervals(peaks);
    const auto tol = static_cast<std::int64_t>(std::llround(tolerance * static_cast<double>(period)));
    std::size_t ok = 0;
    for (const std::int64_t t_d : intervals) {
      if (std::llabs(t_d - period) <= tol) ++ok;
    }
    if (static_cast<double>(ok) / trials >= stability) return period;
  }
  return std::nullopt;
}

std::optional<StepRecommendation> recommend_interval_step(const ChannelConfig& channel,
                                                          const DemodConfig& demod,
                                                          std::int64_t probe_interval_ns,
                                                          int trials, double margin) {
  if (probe_interval_ns < 2) throw std::invalid_argument("probe interval too small");
  if (trials < 2) throw std::invalid_argument("trials must be >= 2");
  if (margin < 0.0) throw std::invalid_argument("margin must be >= 0");
  const EdgeSchedule schedule = square_wave_schedule(probe_interval_ns, trials + 1, 0);
  const EventStream stream = simulate(schedule, channel);
  const SampledSignals signals = bin_and_smooth(stream, demod);
  const PeakTimes peaks = detect_peaks(signals, demod);
  StepRecommendation rec;
  rec.histogram.true_interval_ns = probe_interval_ns;
  rec.histogram.samples_ns = peak_intervals(peaks);
  if (rec.histogram.samples_ns.size() < 2) return std::nullopt;
  const auto [lo, hi] =
      std::minmax_element(rec.histogram.samples_ns.begin(), rec.histogram.samples_ns.end());
  rec.histogram.lower_ns = *lo;
  rec.histogram.upper_ns = *hi;
  const double spread = static_cast<double>(rec.histogram.upper_ns - rec.histogram.lower_ns);
  rec.recommended_step_ns = static_cast<std::int64_t>(std::ceil(spread * (1.0 + margin)));
  rec.recommended_step_ns = std::max(rec.recommended_step_ns, demod.bin_width_ns);
  return rec;
}

std::vector<SweepPoint> sweep_channel_parameter(SweepParameter parameter,
                                                std::span<const double> values,
                                                const Codebook& codebook, ChannelConfig channel,
                                                const DemodConfig& demod, std::size_t n_symbols,
                                                std::uint64_t seed) {
  std::vector<SweepPoint> out(values.size());
  const auto count = static_cast<std::int64_t>(values.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    ChannelConfig cfg = channel;
    switch (parameter) {
      case SweepParameter::jitter_sigma:
        cfg.jitter_sigma_ns = static_cast<std::int64_t>(std::llround(values[ui]));
        break;
      case SweepParameter::noise_rate:
        cfg.noise_rate_hz = values[ui];
        break;
      case SweepParameter::lowpass_tau:
        cfg.lowpass_tau_ns = static_cast<std::int64_t>(std::llround(values[ui]));
        break;
    }
    const ExperimentResult res =
        run_experiment(codebook, cfg, demod, n_symbols, substream_seed(seed, ui));
    out[ui] = {values[ui], res.report};
  }
  return out;
}

}  // namespace eim
