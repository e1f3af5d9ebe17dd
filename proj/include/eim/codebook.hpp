#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "eim/alphabet.hpp"

namespace eim {

inline constexpr std::uint64_t kDefaultTupleCap = 100'000'000ull;

/// Block code over a symbol alphabet: the 2^L shortest-duration N-tuples of
/// intervals, sorted ascending by (total duration, lexicographic tuple
/// order). The 0-based position of a codeword is its L-bit payload value,
/// most-significant bit first.
class Codebook {
 public:
  /// Assembles a codebook from parts and validates the cheap invariants:
  /// symbol indices in range, durations equal to tuple sums, entries sorted
  /// by (duration, lex), count == 2^payload_bits.
  Codebook(SymbolAlphabet alphabet, int block_length, int payload_bits,
           std::vector<std::uint16_t> symbols, std::vector<std::int64_t> durations_ns);

  const SymbolAlphabet& alphabet() const { return alphabet_; }
  int block_length() const { return block_length_; }
  int payload_bits() const { return payload_bits_; }
  std::size_t size() const { return durations_ns_.size(); }

  /// Alphabet indices (0-based) of codeword k.
  std::span<const std::uint16_t> tuple(std::size_t k) const {
    return {symbols_.data() + k * static_cast<std::size_t>(block_length_),
            static_cast<std::size_t>(block_length_)};
  }
  std::int64_t duration_ns(std::size_t k) const { return durations_ns_[k]; }
  std::int64_t total_duration_ns() const { return total_duration_ns_; }

  /// Codeword index of an exact tuple match, if the tuple is in the book.
  std::optional<std::uint64_t> exact_index(std::span<const std::uint16_t> symbols) const;

  /// Codeword minimizing the summed absolute interval difference against the
  /// given tuple; ties resolve to the smallest codeword index. The scan is
  /// pruned with the |total duration| lower bound, so typical lookups touch
  /// only codewords near the tuple's duration.
  std::uint64_t nearest_index(std::span<const std::uint16_t> symbols) const;

 private:
  std::uint64_t tuple_rank(std::span<const std::uint16_t> symbols) const;

  SymbolAlphabet alphabet_;
  int block_length_ = 0;
  int payload_bits_ = 0;
  std::vector<std::uint16_t> symbols_;       // size() * block_length_, flattened
  std::vector<std::int64_t> durations_ns_;   // ascending
  std::int64_t total_duration_ns_ = 0;
  std::unordered_map<std::uint64_t, std::uint64_t> rank_to_index_;
};

/// Smallest N in [1, n_max) minimizing the fractional part of N*log2(m);
/// exact integer comparison, no floating point at the boundary.
int optimal_block_length(int m, int n_max);

/// floor(n_star * log2(m)), exact.
int payload_bits(int m, int n_star);

/// Enumerates all m^n_star tuples, keeps the 2^payload_bits with the smallest
/// total duration (boundary ties go to lexicographically smallest tuples).
/// Throws when m^n_star < 2^payload_bits or when the enumeration would exceed
/// tuple_cap.
Codebook select_codewords(const SymbolAlphabet& alphabet, int n_star, int payload_bits,
                          std::uint64_t tuple_cap = kDefaultTupleCap);

/// (duration_ns, lex rank) of every tuple in the n_star-fold product of the
/// alphabet, in rank order. OpenMP-parallel fill; select_codewords' kernel.
std::vector<std::pair<std::int64_t, std::uint64_t>> tuple_durations(const SymbolAlphabet& alphabet,
                                                                    int n_star,
                                                                    std::uint64_t tuple_cap);

namespace serial {
/// Single-threaded reference for eim::tuple_durations; byte-identical output.
std::vector<std::pair<std::int64_t, std::uint64_t>> tuple_durations(const SymbolAlphabet& alphabet,
                                                                    int n_star,
                                                                    std::uint64_t tuple_cap);
}  // namespace serial

/// B = 2^L * L / sum_k d_k, bits per second. Rejects payload_bits == 0.
double bitrate_bps(const Codebook& codebook);

/// Closed form for one-interval-per-codeword ladders where every symbol is
/// used: B = 2L / (2*base + step*(M-1)). Rejects m not a power of two.
double uniform_ladder_bitrate_bps(std::int64_t base_ns, std::int64_t step_ns, int m,
                                  int payload_bits);

/// Total duration of the selected codeword set of a ladder design, computed
/// by counting tuples per duration class instead of enumerating them. Exact;
/// independent of select_codewords, and usable where enumeration would blow
/// the tuple cap.
std::int64_t ladder_codebook_duration_ns(std::int64_t base_ns, std::int64_t step_ns, int m,
                                         int n_star, int payload_bits);

struct DesignPoint {
  int m = 0;
  int block_length = 0;
  int payload_bits = 0;
  double bitrate_bps = 0.0;
};

struct ModulationOrderSweep {
  std::vector<DesignPoint> points;
  int argmax_m = 0;    // M with the highest bit rate
  int selected_m = 0;  // preference rule: within epsilon of max, smallest block length, then M
};

/// Evaluates the optimal design for every M in [m_min, m_max] and applies the
/// selection rule: among M whose bit rate is within relative epsilon of the
/// maximum, prefer the smallest block length, then the smallest M.
ModulationOrderSweep sweep_modulation_order(std::int64_t base_ns, std::int64_t step_ns, int m_min,
                                            int m_max, int n_max = 10, double epsilon = 0.02);

}  // namespace eim
