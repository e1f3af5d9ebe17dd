#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "eim/codebook.hpp"

namespace eim {

enum class EdgeDir : std::uint8_t { rising, falling };

struct Edge {
  std::int64_t t_ns = 0;
  EdgeDir dir = EdgeDir::rising;
};

/// Ideal transmitter waveform: strictly alternating rising/falling edges,
/// starting with rising. Consecutive rising edges are separated by the
/// modulated intervals; every falling edge trails its rising edge by
/// pulse_width_ns.
struct EdgeSchedule {
  std::vector<Edge> edges;
  std::int64_t pulse_width_ns = 0;

  std::int64_t begin_ns() const { return edges.empty() ? 0 : edges.front().t_ns; }
  std::int64_t end_ns() const { return edges.empty() ? 0 : edges.back().t_ns; }
};

/// Payload bits -> codeword indices. Bits are grouped most-significant-first
/// into payload_bits-sized chunks; a short tail is zero-padded.
std::vector<std::uint64_t> payload_to_codeword_indices(std::span<const std::uint8_t> bits,
                                                       const Codebook& codebook);

/// Codeword indices -> flat alphabet-index sequence.
std::vector<std::uint16_t> codeword_symbols(std::span<const std::uint64_t> indices,
                                            const Codebook& codebook);

/// Alphabet indices -> interval durations.
std::vector<std::int64_t> symbol_intervals(std::span<const std::uint16_t> symbols,
                                           const SymbolAlphabet& alphabet);

/// Payload bits -> interval sequence (composition of the three maps above).
std::vector<std::int64_t> encode(std::span<const std::uint8_t> bits, const Codebook& codebook);

/// Lays intervals out as a pulse train: rising edges at t0 and at each
/// cumulative interval boundary, falling edges pulse_width_ns later. A final
/// terminating pulse after the last interval closes the last symbol.
/// pulse_width_ns must be positive and smaller than the smallest interval.
EdgeSchedule to_edge_schedule(std::span<const std::int64_t> intervals_ns,
                              std::int64_t pulse_width_ns, std::int64_t t0_ns);

/// 50%-duty square wave: `cycles` rising edges period_ns apart, each followed
/// by a falling edge half a period later. Used by the frequency-response and
/// calibration harnesses.
EdgeSchedule square_wave_schedule(std::int64_t period_ns, int cycles, std::int64_t t0_ns);

}  // namespace eim
