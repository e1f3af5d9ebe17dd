#pragma once

#include <cstdint>
#include <vector>

namespace eim {

/// Ladder of symbol intervals tau_i = base + (i-1)*step, integer nanoseconds.
/// base is the shortest stably detectable interval, step the ladder spacing.
/// Alphabets built from a raw interval list have base_ns/step_ns == 0 unless
/// the list happens to be an arithmetic ladder.
struct SymbolAlphabet {
  std::int64_t base_ns = 0;
  std::int64_t step_ns = 0;
  std::vector<std::int64_t> intervals_ns;

  int size() const { return static_cast<int>(intervals_ns.size()); }
  bool is_ladder() const { return base_ns > 0 && step_ns > 0; }
  std::int64_t min_interval_ns() const { return intervals_ns.front(); }
  std::int64_t max_interval_ns() const { return intervals_ns.back(); }
};

/// Builds the M-symbol ladder {base, base+step, ..., base+(M-1)*step}.
/// Throws std::invalid_argument unless base > 0, step > 0 and m >= 2.
SymbolAlphabet build_alphabet(std::int64_t base_ns, std::int64_t step_ns, int m);

/// Accepts any strictly increasing list of positive intervals (m >= 2).
/// Detects arithmetic ladders and fills base_ns/step_ns when they apply.
SymbolAlphabet alphabet_from_intervals(std::vector<std::int64_t> intervals_ns);

}  // namespace eim
