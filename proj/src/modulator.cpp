#include "eim/modulator.hpp"

#include <algorithm>
#include <stdexcept>

namespace eim {

std::vector<std::uint64_t> payload_to_codeword_indices(std::span<const std::uint8_t> bits,
                                                       const Codebook& codebook) {
  const int l = codebook.payload_bits();
  if (l < 1) throw std::invalid_argument("codebook carries no payload bits");
  for (const std::uint8_t b : bits) {
    if (b > 1) throw std::invalid_argument("bits must be 0 or 1");
  }
  const std::size_t groups = (bits.size() + l - 1) / l;
  std::vector<std::uint64_t> indices;
  indices.reserve(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    std::uint64_t k = 0;
    for (int j = 0; j < l; ++j) {
      const std::size_t pos = g * l + j;
      const std::uint8_t bit = pos < bits.size() ? bits[pos] : 0;  // zero-pad tail
      k = (k << 1) | bit;
    }
    indices.push_back(k);
  }
  return indices;
}

std::vector<std::uint16_t> codeword_symbols(std::span<const std::uint64_t> indices,
                                            const Codebook& codebook) {
  std::vector<std::uint16_t> symbols;
  symbols.reserve(indices.size() * codebook.block_length());
  for (const std::uint64_t k : indices) {
    if (k >= codebook.size()) throw std::invalid_argument("codeword index out of range");
    const auto tuple = codebook.tuple(k);
    symbols.insert(symbols.end(), tuple.begin(), tuple.end());
  }
  return symbols;
}

std::vector<std::int64_t> symbol_intervals(std::span<const std::uint16_t> symbols,
                                           const SymbolAlphabet& alphabet) {
  std::vector<std::int64_t> intervals;
  intervals.reserve(symbols.size());
  for (const std::uint16_t s : symbols) {
    if (s >= static_cast<std::uint16_t>(alphabet.size())) {
      throw std::invalid_argument("symbol index out of alphabet range");
    }
    intervals.push_back(alphabet.intervals_ns[s]);
  }
  return intervals;
}

std::vector<std::int64_t> encode(std::span<const std::uint8_t> bits, const Codebook& codebook) {
  if (bits.empty()) return {};
  const auto indices = payload_to_codeword_indices(bits, codebook);
  const auto symbols = codeword_symbols(indices, codebook);
  return symbol_intervals(symbols, codebook.alphabet());
}

EdgeSchedule to_edge_schedule(std::span<const std::int64_t> intervals_ns,
                              std::int64_t pulse_width_ns, std::int64_t t0_ns) {
  if (pulse_width_ns <= 0) throw std::invalid_argument("pulse width must be positive");
  if (t0_ns < 0) throw std::invalid_argument("start time must be nonnegative");
  if (!intervals_ns.empty()) {
    const std::int64_t shortest = *std::min_element(intervals_ns.begin(), intervals_ns.end());
    if (pulse_width_ns >= shortest) {
      throw std::invalid_argument("pulse width must be smaller than the shortest interval");
    }
  }
  EdgeSchedule schedule;
  schedule.pulse_width_ns = pulse_width_ns;
  schedule.edges.reserve(2 * (intervals_ns.size() + 1));
  std::int64_t t = t0_ns;
  for (const std::int64_t interval : intervals_ns) {
    if (interval <= 0) throw std::invalid_argument("intervals must be positive");
    schedule.edges.push_back({t, EdgeDir::rising});
    schedule.edges.push_back({t + pulse_width_ns, EdgeDir::falling});
    t += interval;
  }
  // terminating pulse: the last interval needs a closing rising edge
  schedule.edges.push_back({t, EdgeDir::rising});
  schedule.edges.push_back({t + pulse_width_ns, EdgeDir::falling});
  return schedule;
}

EdgeSchedule square_wave_schedule(std::int64_t period_ns, int cycles, std::int64_t t0_ns) {
  if (period_ns < 2) throw std::invalid_argument("period must be at least 2 ns");
  if (cycles < 1) throw std::invalid_argument("cycles must be >= 1");
  if (t0_ns < 0) throw std::invalid_argument("start time must be nonnegative");
  EdgeSchedule schedule;
  schedule.pulse_width_ns = period_ns / 2;
  schedule.edges.reserve(2 * static_cast<std::size_t>(cycles));
  for (int i = 0; i < cycles; ++i) {
    const std::int64_t t = t0_ns + period_ns * i;
    schedule.edges.push_back({t, EdgeDir::rising});
    schedule.edges.push_back({t + period_ns / 2, EdgeDir::falling});
  }
  return schedule;
}

}  // namespace eim
