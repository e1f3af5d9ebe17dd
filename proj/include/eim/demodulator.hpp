#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "eim/channel.hpp"
#include "eim/codebook.hpp"

namespace eim {

struct DemodConfig {
  std::int64_t bin_width_ns = 0;  // must be >= 1; see make_demod_config
  int smooth_window = 3;          // odd, moving-average width in bins
  double neg_threshold = 1.0;     // smoothed counts/bin arming the negative flag
  double pos_threshold = 1.0;     // validity floor for positive local maxima
};

/// Default tuning for an alphabet: bin width max(1 us, step/8), window 3,
/// both thresholds 1.
DemodConfig make_demod_config(const SymbolAlphabet& alphabet);

/// Per-polarity event rates: binned counts after a centered moving average.
/// Bins cover [first event, last event]; edge bins average over the window
/// portion that exists.
struct SampledSignals {
  std::int64_t t_start_ns = 0;
  std::int64_t bin_width_ns = 0;
  std::vector<double> positive;  // r_p
  std::vector<double> negative;  // r_n

  std::size_t bins() const { return positive.size(); }
  std::int64_t bin_center_ns(std::size_t j) const {
    return t_start_ns + bin_width_ns * static_cast<std::int64_t>(j) + bin_width_ns / 2;
  }
};

SampledSignals bin_and_smooth(const EventStream& stream, const DemodConfig& config);

namespace serial {
/// Single-threaded reference for eim::bin_and_smooth; identical output.
SampledSignals bin_and_smooth(const EventStream& stream, const DemodConfig& config);
}  // namespace serial

/// Symbol-edge timestamps recovered from the signals; strictly increasing.
struct PeakTimes {
  std::vector<std::int64_t> t_ns;
};

struct PeakStats {
  std::size_t episodes = 0;        // flag-clear spans entered
  std::size_t empty_episodes = 0;  // spans that produced no peak (erasures)
};

/// Negative-flag state machine over the binned signals:
///   - the negative flag arms when r_n exceeds neg_threshold;
///   - it clears at the first bin where r_p > r_n;
///   - while clear, the first local maximum of r_p at or above pos_threshold
///     (plateaus resolve to their first bin) emits one peak, timestamped at
///     the bin center; at most one peak per flag-clear episode.
/// The flag starts clear so the stream's first positive burst yields the
/// first peak.
PeakTimes detect_peaks(const SampledSignals& signals, const DemodConfig& config,
                       PeakStats* stats = nullptr);

/// Consecutive differences; empty when fewer than two peaks.
std::vector<std::int64_t> peak_intervals(const PeakTimes& peaks);

/// 0-based index of the alphabet interval closest to interval_ns; exact
/// midpoints resolve to the smaller index.
std::size_t quantize_interval(std::int64_t interval_ns, const SymbolAlphabet& alphabet);

/// True when interval_ns lies beyond the alphabet's extremes by more than
/// half the adjacent spacing (the quantizer clamped it).
bool quantize_out_of_band(std::int64_t interval_ns, const SymbolAlphabet& alphabet);

struct BitDecision {
  std::vector<std::uint8_t> bits;
  std::size_t exact_matches = 0;
  std::size_t nearest_match_corrections = 0;
  std::size_t discarded_tail_symbols = 0;  // trailing partial block
};

/// Groups symbols into consecutive blocks from the start; exact codeword
/// matches emit their payload index, anything else maps to the codeword with
/// the smallest summed absolute interval difference. Bits are emitted
/// most-significant-first. A trailing partial block is discarded.
BitDecision decide_bits(std::span<const std::uint16_t> symbols, const Codebook& codebook);

struct DemodDiagnostics {
  std::size_t events_in = 0;
  std::size_t peaks_detected = 0;
  std::size_t symbols_decoded = 0;
  std::size_t erasures = 0;
  std::size_t exact_matches = 0;
  std::size_t nearest_match_corrections = 0;
  std::size_t low_confidence_intervals = 0;
  std::size_t discarded_tail_symbols = 0;
};

struct DemodResult {
  std::vector<std::uint8_t> bits;
  std::vector<std::uint16_t> symbols;
  DemodDiagnostics diagnostics;
};

/// Full pipeline: bin/smooth -> peaks -> intervals -> quantize -> bits.
/// Total: never throws on stream content; empty or unusable input yields
/// empty results with diagnostics.
DemodResult demodulate(const EventStream& stream, const Codebook& codebook,
                       const DemodConfig& config);

}  // namespace eim
