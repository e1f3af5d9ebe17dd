#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "eim/demodulator.hpp"

namespace eim {

/// Positional symbol/bit comparison from stream start. Length mismatches
/// count every missing or extra position as an error; the two directions are
/// also reported separately.
struct SerReport {
  std::size_t symbols_sent = 0;
  std::size_t symbol_errors = 0;
  double ser = 0.0;
  std::size_t bits_sent = 0;
  std::size_t bit_errors = 0;
  double ber = 0.0;
  std::size_t rx_missing = 0;  // deletions: tx positions with no rx counterpart
  std::size_t rx_extra = 0;    // insertions: rx positions beyond tx length
};

SerReport measure_ser(std::span<const std::uint16_t> tx_symbols,
                      std::span<const std::uint16_t> rx_symbols);
SerReport measure_ser(std::span<const std::uint16_t> tx_symbols,
                      std::span<const std::uint16_t> rx_symbols,
                      std::span<const std::uint8_t> tx_bits,
                      std::span<const std::uint8_t> rx_bits);

struct ExperimentResult {
  SerReport report;
  DemodDiagnostics diagnostics;
};

/// Random payload -> encode -> pulse train -> channel -> demodulate ->
/// positional comparison. Deterministic for a given seed: payload and channel
/// substreams both derive from it (the channel config's own seed is ignored).
/// The pulse width is half the shortest alphabet interval.
ExperimentResult run_experiment(const Codebook& codebook, const ChannelConfig& channel,
                                const DemodConfig& demod, std::size_t n_symbols,
                                std::uint64_t seed);

struct PeriodRange {
  std::int64_t min_ns = 0;
  std::int64_t max_ns = 0;
  std::int64_t step_ns = 0;
};

/// Scans square-wave on/off periods ascending and returns the smallest one
/// whose intervals are recovered within +/-tolerance*period at a rate of at
/// least `stability`. Empty optional when nothing in range qualifies.
std::optional<std::int64_t> estimate_min_stable_period(const ChannelConfig& channel,
                                                       const DemodConfig& demod,
                                                       const PeriodRange& range, int trials,
                                                       double stability,
                                                       double tolerance = 0.10);

/// Measured interval spread at a fixed probe interval.
struct IntervalHistogram {
  std::int64_t true_interval_ns = 0;
  std::vector<std::int64_t> samples_ns;
  std::int64_t upper_ns = 0;  // max sample
  std::int64_t lower_ns = 0;  // min sample
};

struct StepRecommendation {
  IntervalHistogram histogram;
  std::int64_t recommended_step_ns = 0;
};

/// Transmits `trials` fixed intervals, measures the received interval spread
/// and recommends a ladder step of ceil((max-min)*(1+margin)), clamped below
/// at one demodulator bin. Empty optional when fewer than two intervals come
/// back.
std::optional<StepRecommendation> recommend_interval_step(const ChannelConfig& channel,
                                                          const DemodConfig& demod,
                                                          std::int64_t probe_interval_ns,
                                                          int trials, double margin = 0.1);

enum class SweepParameter { jitter_sigma, noise_rate, lowpass_tau };

struct SweepPoint {
  double value = 0.0;  // ns for duration parameters, events/s for noise_rate
  SerReport report;
};

/// One run_experiment per parameter value (evaluated in parallel, emitted in
/// input order), each on its own seed substream.
std::vector<SweepPoint> sweep_channel_parameter(SweepParameter parameter,
                                                std::span<const double> values,
                                                const Codebook& codebook, ChannelConfig channel,
                                                const DemodConfig& demod, std::size_t n_symbols,
                                                std::uint64_t seed);

}  // namespace eim
