#include "eim/codebook.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace eim {
namespace {

using u128 = unsigned __int128;

constexpr u128 kPowLimit = u128(1) << 62;

// m^n with an overflow guard; everything downstream relies on the result
// fitting in 62 bits so that cross-multiplied comparisons stay inside u128.
u128 checked_pow(int m, int n) {
  u128 p = 1;
  for (int i = 0; i < n; ++i) {
    p *= static_cast<unsigned>(m);
    if (p > kPowLimit) {
      throw std::invalid_argument("m^n exceeds the supported design range (2^62)");
    }
  }
  return p;
}

int floor_log2(u128 v) {
  int l = -1;
  while (v) {
    v >>= 1;
    ++l;
  }
  return l;
}

void validate_alphabet(const SymbolAlphabet& alphabet) {
  if (alphabet.size() < 2) throw std::invalid_argument("alphabet needs at least 2 intervals");
}

}  // namespace

SymbolAlphabet build_alphabet(std::int64_t base_ns, std::int64_t step_ns, int m) {
  if (base_ns <= 0) throw std::invalid_argument("base interval must be positive");
  if (step_ns <= 0) throw std::invalid_argument("interval step must be positive");
  if (m < 2) throw std::invalid_argument("need at least 2 symbols");
  const u128 top = u128(base_ns) + u128(step_ns) * (m - 1);
  if (top > u128(std::numeric_limits<std::int64_t>::max())) {
    throw std::invalid_argument("ladder overflows int64 nanoseconds");
  }
  SymbolAlphabet a;
  a.base_ns = base_ns;
  a.step_ns = step_ns;
  a.intervals_ns.resize(m);
  for (int i = 0; i < m; ++i) a.intervals_ns[i] = base_ns + step_ns * i;
  return a;
}

SymbolAlphabet alphabet_from_intervals(std::vector<std::int64_t> intervals_ns) {
  if (intervals_ns.size() < 2) throw std::invalid_argument("need at least 2 intervals");
  if (intervals_ns.front() <= 0) throw std::invalid_argument("intervals must be positive");
  for (std::size_t i = 1; i < intervals_ns.size(); ++i) {
    if (intervals_ns[i] <= intervals_ns[i - 1]) {
      throw std::invalid_argument("intervals must be strictly increasing");
    }
  }
  SymbolAlphabet a;
  const std::int64_t step = intervals_ns[1] - intervals_ns[0];
  bool ladder = true;
  for (std::size_t i = 1; i < intervals_ns.size(); ++i) {
    if (intervals_ns[i] - intervals_ns[i - 1] != step) {
      ladder = false;
      break;
    }
  }
  if (ladder) {
    a.base_ns = intervals_ns.front();
    a.step_ns = step;
  }
  a.intervals_ns = std::move(intervals_ns);
  return a;
}

int payload_bits(int m, int n_star) {
  if (m < 2) throw std::invalid_argument("m must be >= 2");
  if (n_star < 1) throw std::invalid_argument("block length must be >= 1");
  return floor_log2(checked_pow(m, n_star));
}

int optimal_block_length(int m, int n_max) {
  if (m < 2) throw std::invalid_argument("m must be >= 2");
  if (n_max < 2) throw std::invalid_argument("n_max must be >= 2 (search range is 1 <= N < n_max)");
  // frac(N log2 m) = log2(m^N / 2^L); compare two candidates exactly via
  // m^Na * 2^Lb < m^Nb * 2^La. Both factors fit in 62 bits, products in u128.
  int best_n = 1;
  u128 best_pow = static_cast<unsigned>(m);
  int best_l = floor_log2(best_pow);
  u128 p = best_pow;
  for (int n = 2; n < n_max; ++n) {
    p *= static_cast<unsigned>(m);
    if (p > kPowLimit) {
      throw std::invalid_argument("m^n exceeds the supported design range (2^62)");
    }
    const int l = floor_log2(p);
    if (p * (u128(1) << best_l) < best_pow * (u128(1) << l)) {
      best_n = n;
      best_pow = p;
      best_l = l;
    }
  }
  return best_n;
}

std::vector<std::pair<std::int64_t, std::uint64_t>> tuple_durations(const SymbolAlphabet& alphabet,
                                                                    int n_star,
                                                                    std::uint64_t tuple_cap) {
  validate_alphabet(alphabet);
  if (n_star < 1) throw std::invalid_argument("block length must be >= 1");
  const int m = alphabet.size();
  const u128 count128 = checked_pow(m, n_star);
  if (count128 > tuple_cap) {
    throw std::runtime_error("tuple enumeration cap exceeded: m^n_star > " +
                             std::to_string(tuple_cap));
  }
  const auto count = static_cast<std::int64_t>(count128);
  std::vector<std::pair<std::int64_t, std::uint64_t>> out(static_cast<std::size_t>(count));
  const std::int64_t* iv = alphabet.intervals_ns.data();
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < count; ++r) {
    std::uint64_t x = static_cast<std::uint64_t>(r);
    std::int64_t d = 0;
    for (int j = 0; j < n_star; ++j) {
      d += iv[x % m];
      x /= m;
    }
    out[static_cast<std::size_t>(r)] = {d, static_cast<std::uint64_t>(r)};
  }
  return out;
}

namespace serial {

std::vector<std::pair<std::int64_t, std::uint64_t>> tuple_durations(const SymbolAlphabet& alphabet,
                                                                    int n_star,
                                                                    std::uint64_t tuple_cap) {
  validate_alphabet(alphabet);
  if (n_star < 1) throw std::invalid_argument("block length must be >= 1");
  const int m = alphabet.size();
  const u128 count128 = checked_pow(m, n_star);
  if (count128 > tuple_cap) {
    throw std::runtime_error("tuple enumeration cap exceeded: m^n_star > " +
                             std::to_string(tuple_cap));
  }
  const auto count = static_cast<std::uint64_t>(count128);
  std::vector<std::pair<std::int64_t, std::uint64_t>> out(count);
  const std::int64_t* iv = alphabet.intervals_ns.data();
  for (std::uint64_t r = 0; r < count; ++r) {
    std::uint64_t x = r;
    std::int64_t d = 0;
    for (int j = 0; j < n_star; ++j) {
      d += iv[x % m];
      x /= m;
    }
    out[r] = {d, r};
  }
  return out;
}

}  // namespace serial

Codebook select_codewords(const SymbolAlphabet& alphabet, int n_star, int payload_bits,
                          std::uint64_t tuple_cap) {
  validate_alphabet(alphabet);
  if (n_star < 1) throw std::invalid_argument("block length must be >= 1");
  if (payload_bits < 0 || payload_bits > 62) throw std::invalid_argument("payload_bits out of range");
  const int m = alphabet.size();
  const u128 count = checked_pow(m, n_star);
  const std::uint64_t need = std::uint64_t(1) << payload_bits;
  if (count < need) {
    throw std::invalid_argument("m^n_star < 2^payload_bits: not enough tuples to select from");
  }
  auto durations = tuple_durations(alphabet, n_star, tuple_cap);
  // (duration, rank) order is exactly (duration, lexicographic tuple) order,
  // so shortest-duration selection and boundary tie-breaking fall out of one
  // sort.
  std::sort(durations.begin(), durations.end());

  std::vector<std::uint16_t> symbols(need * static_cast<std::size_t>(n_star));
  std::vector<std::int64_t> selected(need);
  const auto need_i = static_cast<std::int64_t>(need);
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < need_i; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    selected[uk] = durations[uk].first;
    std::uint64_t x = durations[uk].second;
    for (int j = n_star - 1; j >= 0; --j) {
      symbols[uk * n_star + j] = static_cast<std::uint16_t>(x % m);
      x /= m;
    }
  }
  return Codebook(alphabet, n_star, payload_bits, std::move(symbols), std::move(selected));
}

Codebook::Codebook(SymbolAlphabet alphabet, int block_length, int payload_bits,
                   std::vector<std::uint16_t> symbols, std::vector<std::int64_t> durations_ns)
    : alphabet_(std::move(alphabet)),
      block_length_(block_length),
      payload_bits_(payload_bits),
      symbols_(std::move(symbols)),
      durations_ns_(std::move(durations_ns)) {
  validate_alphabet(alphabet_);
  if (block_length_ < 1) throw std::invalid_argument("block length must be >= 1");
  if (payload_bits_ < 0 || payload_bits_ > 62) throw std::invalid_argument("payload_bits out of range");
  checked_pow(alphabet_.size(), block_length_);  // keeps tuple ranks in 62 bits
  const std::uint64_t need = std::uint64_t(1) << payload_bits_;
  if (durations_ns_.size() != need) {
    throw std::invalid_argument("codeword count must equal 2^payload_bits");
  }
  if (symbols_.size() != need * static_cast<std::size_t>(block_length_)) {
    throw std::invalid_argument("flattened symbol array has the wrong size");
  }
  const int m = alphabet_.size();
  u128 total = 0;
  std::int64_t prev_d = -1;
  std::uint64_t prev_rank = 0;
  rank_to_index_.reserve(need);
  for (std::uint64_t k = 0; k < need; ++k) {
    std::int64_t d = 0;
    std::uint64_t rank = 0;
    for (int j = 0; j < block_length_; ++j) {
      const std::uint16_t s = symbols_[k * block_length_ + j];
      if (s >= m) throw std::invalid_argument("symbol index out of alphabet range");
      d += alphabet_.intervals_ns[s];
      rank = rank * static_cast<std::uint64_t>(m) + s;
    }
    if (d != durations_ns_[k]) {
      throw std::invalid_argument("stored duration does not match tuple duration");
    }
    if (k > 0 && (d < prev_d || (d == prev_d && rank <= prev_rank))) {
      throw std::invalid_argument("codewords must be sorted by (duration, tuple order)");
    }
    if (!rank_to_index_.emplace(rank, k).second) {
      throw std::invalid_argument("duplicate codeword");
    }
    prev_d = d;
    prev_rank = rank;
    total += static_cast<std::uint64_t>(d);
  }
  if (total > u128(std::numeric_limits<std::int64_t>::max())) {
    throw std::overflow_error("total codebook duration overflows int64 nanoseconds");
  }
  total_duration_ns_ = static_cast<std::int64_t>(total);
}

std::uint64_t Codebook::tuple_rank(std::span<const std::uint16_t> symbols) const {
  std::uint64_t rank = 0;
  for (const std::uint16_t s : symbols) {
    rank = rank * static_cast<std::uint64_t>(alphabet_.size()) + s;
  }
  return rank;
}

std::optional<std::uint64_t> Codebook::exact_index(std::span<const std::uint16_t> symbols) const {
  if (symbols.size() != static_cast<std::size_t>(block_length_)) return std::nullopt;
  for (const std::uint16_t s : symbols) {
    if (s >= alphabet_.size()) return std::nullopt;
  }
  const auto it = rank_to_index_.find(tuple_rank(symbols));
  if (it == rank_to_index_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t Codebook::nearest_index(std::span<const std::uint16_t> symbols) const {
  if (symbols.size() != static_cast<std::size_t>(block_length_)) {
    throw std::invalid_argument("tuple length does not match block length");
  }
  std::int64_t d_rx = 0;
  for (const std::uint16_t s : symbols) {
    if (s >= alphabet_.size()) throw std::invalid_argument("symbol index out of alphabet range");
    d_rx += alphabet_.intervals_ns[s];
  }
  const std::size_t n = durations_ns_.size();
  std::int64_t best_dist = std::numeric_limits<std::int64_t>::max();
  std::uint64_t best_k = 0;
  const auto consider = [&](std::size_t k) {
    std::int64_t dist = 0;
    const std::uint16_t* t = symbols_.data() + k * static_cast<std::size_t>(block_length_);
    for (int j = 0; j < block_length_; ++j) {
      dist += std::abs(alphabet_.intervals_ns[t[j]] - alphabet_.intervals_ns[symbols[j]]);
    }
    if (dist < best_dist || (dist == best_dist && k < best_k)) {
      best_dist = dist;
      best_k = k;
    }
  };
  // Two-pointer walk outward from the duration bracket. |d_k - d_rx| lower
  // bounds the per-symbol metric, so sides get pruned once past the best;
  // the bound stays inclusive so equal-distance, smaller-index codewords are
  // still visited.
  auto lo = static_cast<std::size_t>(
      std::lower_bound(durations_ns_.begin(), durations_ns_.end(), d_rx) - durations_ns_.begin());
  std::size_t hi = lo;
  for (;;) {
    const bool can_lo = lo > 0 && d_rx - durations_ns_[lo - 1] <= best_dist;
    const bool can_hi = hi < n && durations_ns_[hi] - d_rx <= best_dist;
    if (!can_lo && !can_hi) break;
    if (can_lo) consider(--lo);
    if (can_hi) consider(hi++);
  }
  return best_k;
}

double bitrate_bps(const Codebook& codebook) {
  if (codebook.payload_bits() < 1) {
    throw std::invalid_argument("bit rate undefined for payload_bits == 0");
  }
  const double bits = std::ldexp(static_cast<double>(codebook.payload_bits()),
                                 codebook.payload_bits());
  return bits / (static_cast<double>(codebook.total_duration_ns()) * 1e-9);
}

double uniform_ladder_bitrate_bps(std::int64_t base_ns, std::int64_t step_ns, int m,
                                  int payload_bits) {
  if (base_ns <= 0 || step_ns <= 0) throw std::invalid_argument("durations must be positive");
  if (m < 2 || !std::has_single_bit(static_cast<unsigned>(m))) {
    throw std::invalid_argument("closed-form bit rate requires m to be a power of two");
  }
  if (payload_bits < 1) throw std::invalid_argument("payload_bits must be >= 1");
  const double denom_ns = 2.0 * static_cast<double>(base_ns) +
                          static_cast<double>(step_ns) * (m - 1);
  return 2.0 * payload_bits / (denom_ns * 1e-9);
}

std::int64_t ladder_codebook_duration_ns(std::int64_t base_ns, std::int64_t step_ns, int m,
                                         int n_star, int payload_bits) {
  if (base_ns <= 0 || step_ns <= 0) throw std::invalid_argument("durations must be positive");
  if (m < 2) throw std::invalid_argument("m must be >= 2");
  if (n_star < 1) throw std::invalid_argument("block length must be >= 1");
  if (payload_bits < 0 || payload_bits > 62) throw std::invalid_argument("payload_bits out of range");
  const u128 count = checked_pow(m, n_star);
  const std::uint64_t need = std::uint64_t(1) << payload_bits;
  if (count < need) {
    throw std::invalid_argument("m^n_star < 2^payload_bits: not enough tuples to select from");
  }
  // Tuple duration depends only on the sum of 0-based symbol indices, so the
  // shortest-duration selection can be done per index-sum class. counts[s] =
  // number of n_star-tuples with digit sum s, digits in [0, m).
  const int max_sum = n_star * (m - 1);
  std::vector<u128> counts(static_cast<std::size_t>(max_sum) + 1, 0);
  counts[0] = 1;
  for (int j = 0; j < n_star; ++j) {
    std::vector<u128> next(counts.size(), 0);
    for (int s = 0; s <= j * (m - 1); ++s) {
      if (counts[s] == 0) continue;
      for (int d = 0; d < m; ++d) next[s + d] += counts[s];
    }
    counts.swap(next);
  }
  u128 total = 0;
  u128 remaining = need;
  for (int s = 0; s <= max_sum && remaining > 0; ++s) {
    const u128 take = counts[s] < remaining ? counts[s] : remaining;
    total += take * (u128(n_star) * static_cast<std::uint64_t>(base_ns) +
                     u128(s) * static_cast<std::uint64_t>(step_ns));
    remaining -= take;
  }
  if (total > u128(std::numeric_limits<std::int64_t>::max())) {
    throw std::overflow_error("total codebook duration overflows int64 nanoseconds");
  }
  return static_cast<std::int64_t>(total);
}

ModulationOrderSweep sweep_modulation_order(std::int64_t base_ns, std::int64_t step_ns, int m_min,
                                            int m_max, int n_max, double epsilon) {
  if (m_min < 2 || m_max < m_min) throw std::invalid_argument("need 2 <= m_min <= m_max");
  if (epsilon < 0.0) throw std::invalid_argument("epsilon must be nonnegative");
  ModulationOrderSweep sweep;
  for (int m = m_min; m <= m_max; ++m) {
    DesignPoint p;
    p.m = m;
    p.block_length = optimal_block_length(m, n_max);
    p.payload_bits = payload_bits(m, p.block_length);
    const std::int64_t dur = ladder_codebook_duration_ns(base_ns, step_ns, m, p.block_length,
                                                         p.payload_bits);
    const double bits = std::ldexp(static_cast<double>(p.payload_bits), p.payload_bits);
    p.bitrate_bps = bits / (static_cast<double>(dur) * 1e-9);
    sweep.points.push_back(p);
  }
  const DesignPoint* best = &sweep.points.front();
  for (const auto& p : sweep.points) {
    if (p.bitrate_bps > best->bitrate_bps) best = &p;
  }
  sweep.argmax_m = best->m;
  const DesignPoint* selected = nullptr;
  for (const auto& p : sweep.points) {
    if (p.bitrate_bps < (1.0 - epsilon) * best->bitrate_bps) continue;
    if (selected == nullptr || p.block_length < selected->block_length ||
        (p.block_length == selected->block_length && p.m < selected->m)) {
      selected = &p;
    }
  }
  sweep.selected_m = selected->m;
  return sweep;
}

}  // namespace eim
