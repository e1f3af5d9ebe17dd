#include "eim/demodulator.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace eim {
namespace {

void validate_config(const DemodConfig& c) {
  if (c.bin_width_ns < 1) throw std::invalid_argument("bin width must be >= 1 ns");
  if (c.smooth_window < 1 || c.smooth_window % 2 == 0) {
    throw std::invalid_argument("smoothing window must be odd and >= 1");
  }
  if (c.neg_threshold < 0.0 || c.pos_threshold < 0.0) {
    throw std::invalid_argument("thresholds must be >= 0");
  }
}

constexpr std::size_t kMaxBins = 1ull << 31;

struct BinCounts {
  std::int64_t t_start_ns = 0;
  std::vector<std::uint32_t> positive;
  std::vector<std::uint32_t> negative;
};

BinCounts count_bins(const EventStream& stream, std::int64_t bin_ns, bool parallel) {
  BinCounts counts;
  counts.t_start_ns = stream.front().t_ns;
  const std::int64_t span = stream.back().t_ns - stream.front().t_ns;
  const auto n_bins = static_cast<std::size_t>(span / bin_ns) + 1;
  if (n_bins > kMaxBins) throw std::runtime_error("bin count too large; increase bin width");
  counts.positive.assign(n_bins, 0);
  counts.negative.assign(n_bins, 0);

  const auto bin_of = [&](std::size_t i) {
    return static_cast<std::size_t>((stream[i].t_ns - counts.t_start_ns) / bin_ns);
  };
  const auto count_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t b = bin_of(i);
      if (stream[i].polarity > 0) {
        ++counts.positive[b];
      } else {
        ++counts.negative[b];
      }
    }
  };

  if (!parallel) {
    count_range(0, stream.size());
    return counts;
  }

  // Events are time-sorted, so chunk boundaries can be snapped forward to the
  // next bin change; chunks then touch disjoint bin ranges and need no
  // atomics, and the counts are identical to the serial fill.
  int n_chunks = 1;
#ifdef _OPENMP
  n_chunks = std::max(1, omp_get_max_threads());
#endif
  std::vector<std::size_t> bounds;
  bounds.push_back(0);
  for (int c = 1; c < n_chunks; ++c) {
    std::size_t i = stream.size() * static_cast<std::size_t>(c) / n_chunks;
    i = std::max(i, bounds.back());
    while (i < stream.size() && i > 0 && bin_of(i) == bin_of(i - 1)) ++i;
    bounds.push_back(i);
  }
  bounds.push_back(stream.size());
  const auto segments = static_cast<std::int64_t>(bounds.size()) - 1;
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < segments; ++s) {
    count_range(bounds[static_cast<std::size_t>(s)], bounds[static_cast<std::size_t>(s) + 1]);
  }
  return counts;
}

SampledSignals smooth_counts(const BinCounts& counts, std::int64_t bin_ns, int window,
                             bool parallel) {
  SampledSignals out;
  out.t_start_ns = counts.t_start_ns;
  out.bin_width_ns = bin_ns;
  const std::size_t n = counts.positive.size();
  out.positive.resize(n);
  out.negative.resize(n);
  // Exact integer prefix sums make the windowed average independent of
  // evaluation order.
  std::vector<std::uint64_t> pp(n + 1, 0);
  std::vector<std::uint64_t> pn(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    pp[i + 1] = pp[i] + counts.positive[i];
    pn[i + 1] = pn[i] + counts.negative[i];
  }
  const int h = window / 2;
  const auto fill = [&](std::size_t j) {
    const std::size_t lo = j >= static_cast<std::size_t>(h) ? j - h : 0;
    const std::size_t hi = std::min(n - 1, j + static_cast<std::size_t>(h));
    const double width = static_cast<double>(hi - lo + 1);
    out.positive[j] = static_cast<double>(pp[hi + 1] - pp[lo]) / width;
    out.negative[j] = static_cast<double>(pn[hi + 1] - pn[lo]) / width;
  };
  if (parallel) {
    const auto n_i = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j < n_i; ++j) fill(static_cast<std::size_t>(j));
  } else {
    for (std::size_t j = 0; j < n; ++j) fill(j);
  }
  return out;
}

SampledSignals bin_and_smooth_impl(const EventStream& stream, const DemodConfig& config,
                                   bool parallel) {
  validate_config(config);
  SampledSignals empty;
  empty.bin_width_ns = config.bin_width_ns;
  if (stream.empty()) return empty;
  for (std::size_t i = 1; i < stream.size(); ++i) {
    if (stream[i].t_ns < stream[i - 1].t_ns) {
      throw std::invalid_argument("event stream must be time-ordered");
    }
  }
  const BinCounts counts = count_bins(stream, config.bin_width_ns, parallel);
  return smooth_counts(counts, config.bin_width_ns, config.smooth_window, parallel);
}

}  // namespace

DemodConfig make_demod_config(const SymbolAlphabet& alphabet) {
  DemodConfig c;
  c.bin_width_ns = 1000;
  if (alphabet.step_ns > 0) c.bin_width_ns = std::max<std::int64_t>(1000, alphabet.step_ns / 8);
  return c;
}

SampledSignals bin_and_smooth(const EventStream& stream, const DemodConfig& config) {
  return bin_and_smooth_impl(stream, config, true);
}

namespace serial {
SampledSignals bin_and_smooth(const EventStream& stream, const DemodConfig& config) {
  return bin_and_smooth_impl(stream, config, false);
}
}  // namespace serial

PeakTimes detect_peaks(const SampledSignals& signals, const DemodConfig& config,
                       PeakStats* stats) {
  validate_config(config);
  if (signals.positive.size() != signals.negative.size()) {
    throw std::invalid_argument("signal lengths differ");
  }
  PeakTimes peaks;
  PeakStats local;
  const auto& rp = signals.positive;
  const auto& rn = signals.negative;
  const std::size_t n = rp.size();
  bool flag = false;    // negative event flag
  bool emitted = false; // one peak per flag-clear episode
  if (n > 0) local.episodes = 1;  // the initial clear span counts
  for (std::size_t j = 0; j < n; ++j) {
    if (flag && rp[j] > rn[j]) {
      flag = false;
      emitted = false;
      ++local.episodes;
    }
    if (!flag && !emitted) {
      const double left = j > 0 ? rp[j - 1] : 0.0;
      const double right = j + 1 < n ? rp[j + 1] : 0.0;
      if (left < rp[j] && rp[j] >= right && rp[j] >= config.pos_threshold) {
        peaks.t_ns.push_back(signals.bin_center_ns(j));
        emitted = true;
      }
    }
    if (!flag && rn[j] > config.neg_threshold) {
      flag = true;
      if (!emitted) ++local.empty_episodes;
    }
  }
  if (!flag && !emitted && n > 0) ++local.empty_episodes;  // episode open at stream end
  if (stats != nullptr) *stats = local;
  return peaks;
}

std::vector<std::int64_t> peak_intervals(const PeakTimes& peaks) {
  if (peaks.t_ns.size() < 2) return {};
  std::vector<std::int64_t> intervals(peaks.t_ns.size() - 1);
  for (std::size_t i = 0; i + 1 < peaks.t_ns.size(); ++i) {
    intervals[i] = peaks.t_ns[i + 1] - peaks.t_ns[i];
  }
  return intervals;
}

std::size_t quantize_interval(std::int64_t interval_ns, const SymbolAlphabet& alphabet) {
  if (interval_ns <= 0) throw std::invalid_argument("interval must be positive");
  std::size_t best = 0;
  std::int64_t best_dist = std::numeric_limits<std::int64_t>::max();
  for (std::size_t i = 0; i < alphabet.intervals_ns.size(); ++i) {
    const std::int64_t dist = std::llabs(interval_ns - alphabet.intervals_ns[i]);
    if (dist < best_dist) {  // strict: midpoint ties keep the smaller index
      best_dist = dist;
      best = i;
    }
  }
  return best;
}

bool quantize_out_of_band(std::int64_t interval_ns, const SymbolAlphabet& alphabet) {
  const auto& iv = alphabet.intervals_ns;
  const std::int64_t low_gap = iv.size() > 1 ? iv[1] - iv[0] : 0;
  const std::int64_t high_gap = iv.size() > 1 ? iv[iv.size() - 1] - iv[iv.size() - 2] : 0;
  return interval_ns < iv.front() - low_gap / 2 || interval_ns > iv.back() + high_gap / 2;
}

BitDecision decide_bits(std::span<const std::uint16_t> symbols, const Codebook& codebook) {
  BitDecision out;
  const auto n = static_cast<std::size_t>(codebook.block_length());
  const int l = codebook.payload_bits();
  const std::size_t blocks = symbols.size() / n;
  out.discarded_tail_symbols = symbols.size() - blocks * n;
  out.bits.reserve(blocks * static_cast<std::size_t>(l));
  for (std::size_t g = 0; g < blocks; ++g) {
    const std::span<const std::uint16_t> tuple = symbols.subspan(g * n, n);
    std::uint64_t k;
    if (const auto exact = codebook.exact_index(tuple)) {
      k = *exact;
      ++out.exact_matches;
    } else {
      k = codebook.nearest_index(tuple);
      ++out.nearest_match_corrections;
    }
    for (int j = l - 1; j >= 0; --j) {
      out.bits.push_back(static_cast<std::uint8_t>((k >> j) & 1u));
    }
  }
  return out;
}

DemodResult demodulate(const EventStream& stream, const Codebook& codebook,
                       const DemodConfig& config) {
  DemodResult res;
  res.diagnostics.events_in = stream.size();
  const SampledSignals signals = bin_and_smooth(stream, config);
  PeakStats peak_stats;
  const PeakTimes peaks = detect_peaks(signals, config, &peak_stats);
  res.diagnostics.peaks_detected = peaks.t_ns.size();
  res.diagnostics.erasures = peak_stats.empty_episodes;
  const std::vector<std::int64_t> intervals = peak_intervals(peaks);
  res.symbols.reserve(intervals.size());
  for (const std::int64_t t_d : intervals) {
    res.symbols.push_back(static_cast<std::uint16_t>(quantize_interval(t_d, codebook.alphabet())));
    if (quantize_out_of_band(t_d, codebook.alphabet())) {
      ++res.diagnostics.low_confidence_intervals;
    }
  }
  res.diagnostics.symbols_decoded = res.symbols.size();
  BitDecision decision = decide_bits(res.symbols, codebook);
  res.bits = std::move(decision.bits);
  res.diagnostics.exact_matches = decision.exact_matches;
  res.diagnostics.nearest_match_corrections = decision.nearest_match_corrections;
  res.diagnostics.discarded_tail_symbols = decision.discarded_tail_symbols;
  return res;
}

}  // namespace eim
