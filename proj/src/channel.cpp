#include "eim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "eim/rng.hpp"

namespace eim {
namespace {

// Substream coordinates: pixels use (edge index, pixel); background noise
// uses a pixel slot no real pixel can occupy.
constexpr std::uint64_t kNoisePositive = 0xffffffffffffffffull;
constexpr std::uint64_t kNoiseNegative = 0xfffffffffffffffeull;

bool event_less(const Event& a, const Event& b) {
  return a.t_ns < b.t_ns || (a.t_ns == b.t_ns && a.polarity < b.polarity);
}

void validate_schedule(const EdgeSchedule& schedule) {
  const auto& e = schedule.edges;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const EdgeDir expect = (i % 2 == 0) ? EdgeDir::rising : EdgeDir::falling;
    if (e[i].dir != expect) {
      throw std::invalid_argument("edges must strictly alternate, starting with rising");
    }
    if (i > 0 && e[i].t_ns <= e[i - 1].t_ns) {
      throw std::invalid_argument("edge times must be strictly increasing");
    }
  }
}

void validate_config(const ChannelConfig& c) {
  if (c.pixel_count < 1) throw std::invalid_argument("pixel_count must be >= 1");
  if (c.events_per_edge < 0.0) throw std::invalid_argument("events_per_edge must be >= 0");
  if (c.burst_decay_ns < 0 || c.jitter_sigma_ns < 0 || c.refractory_ns < 0 ||
      c.lowpass_tau_ns < 0) {
    throw std::invalid_argument("channel durations must be >= 0");
  }
  if (c.noise_rate_hz < 0.0) throw std::invalid_argument("noise_rate_hz must be >= 0");
}

// Amplitude scale per edge: s = 1 - exp(-dt/tau) against the previous
// (opposite-polarity) edge; the first edge fires from rest with s = 1.
std::vector<double> edge_scales(const EdgeSchedule& schedule, std::int64_t lowpass_tau_ns) {
  std::vector<double> s(schedule.edges.size(), 1.0);
  if (lowpass_tau_ns <= 0) return s;
  const double tau = static_cast<double>(lowpass_tau_ns);
  for (std::size_t i = 1; i < schedule.edges.size(); ++i) {
    const double dt = static_cast<double>(schedule.edges[i].t_ns - schedule.edges[i - 1].t_ns);
    s[i] = 1.0 - std::exp(-dt / tau);
  }
  return s;
}

// All events one pixel sees across the whole schedule, time-sorted, with the
// refractory filter applied.
std::vector<Event> pixel_events(const EdgeSchedule& schedule, const std::vector<double>& scales,
                                const ChannelConfig& cfg, int pixel) {
  std::vector<Event> events;
  const double burst = static_cast<double>(cfg.burst_decay_ns);
  const double sigma = static_cast<double>(cfg.jitter_sigma_ns);
  for (std::size_t e = 0; e < schedule.edges.size(); ++e) {
    Pcg32 rng(substream_seed(cfg.seed, e, static_cast<std::uint64_t>(pixel)));
    const double lambda = cfg.events_per_edge * scales[e];
    const std::uint64_t n = cfg.deterministic_counts
                                ? static_cast<std::uint64_t>(std::llround(lambda))
                                : rng.poisson(lambda);
    const std::int8_t pol = schedule.edges[e].dir == EdgeDir::rising ? 1 : -1;
    const std::int64_t t_edge = schedule.edges[e].t_ns;
    for (std::uint64_t i = 0; i < n; ++i) {
      const double offset = rng.exponential(burst) + rng.normal(sigma);
      std::int64_t t = t_edge + std::llround(offset);
      if (t < t_edge) t = t_edge;  // events cannot precede their edge
      events.push_back({t, pol});
    }
  }
  std::sort(events.begin(), events.end(), event_less);
  if (cfg.refractory_ns > 0 && !events.empty()) {
    std::vector<Event> kept;
    kept.reserve(events.size());
    std::int64_t last_t = std::numeric_limits<std::int64_t>::min() / 2;
    for (const Event& ev : events) {
      if (ev.t_ns - last_t >= cfg.refractory_ns) {
        kept.push_back(ev);
        last_t = ev.t_ns;
      }
    }
    events.swap(kept);
  }
  return events;
}

std::vector<Event> noise_events(const ChannelConfig& cfg, std::int64_t t_begin, std::int64_t t_end,
                                std::int8_t polarity) {
  if (cfg.noise_rate_hz <= 0.0 || t_end <= t_begin) return {};
  Pcg32 rng(substream_seed(cfg.seed, polarity > 0 ? kNoisePositive : kNoiseNegative));
  const double span_s = static_cast<double>(t_end - t_begin) * 1e-9;
  const std::uint64_t count = rng.poisson(cfg.noise_rate_hz * span_s);
  std::vector<Event> events;
  events.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const double u = rng.uniform();
    const std::int64_t t = t_begin + std::llround(u * static_cast<double>(t_end - t_begin));
    events.push_back({t, polarity});
  }
  std::sort(events.begin(), events.end(), event_less);
  return events;
}

std::vector<std::vector<Event>> generate_streams(const EdgeSchedule& schedule,
                                                 const ChannelConfig& cfg, bool parallel) {
  const auto scales = edge_scales(schedule, cfg.lowpass_tau_ns);
  std::vector<std::vector<Event>> streams(static_cast<std::size_t>(cfg.pixel_count) + 2);
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int p = 0; p < cfg.pixel_count; ++p) {
      streams[static_cast<std::size_t>(p)] = pixel_events(schedule, scales, cfg, p);
    }
  } else {
    for (int p = 0; p < cfg.pixel_count; ++p) {
      streams[static_cast<std::size_t>(p)] = pixel_events(schedule, scales, cfg, p);
    }
  }
  streams[static_cast<std::size_t>(cfg.pixel_count)] =
      noise_events(cfg, schedule.begin_ns(), schedule.end_ns(), 1);
  streams[static_cast<std::size_t>(cfg.pixel_count) + 1] =
      noise_events(cfg, schedule.begin_ns(), schedule.end_ns(), -1);
  return streams;
}

}  // namespace

EventStream simulate(const EdgeSchedule& schedule, const ChannelConfig& config) {
  validate_schedule(schedule);
  validate_config(config);
  if (schedule.edges.empty()) return {};
  auto streams = generate_streams(schedule, config, true);
  // Pairwise merge rounds. Events are plain (t, polarity) values, so equal
  // elements are interchangeable and the merged sequence is identical no
  // matter how rounds are scheduled across threads.
  while (streams.size() > 1) {
    const std::size_t half = (streams.size() + 1) / 2;
    std::vector<std::vector<Event>> next(half);
    const auto half_i = static_cast<std::int64_t>(half);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < half_i; ++i) {
      const std::size_t a = 2 * static_cast<std::size_t>(i);
      const std::size_t b = a + 1;
      if (b < streams.size()) {
        next[i].resize(streams[a].size() + streams[b].size());
        std::merge(streams[a].begin(), streams[a].end(), streams[b].begin(), streams[b].end(),
                   next[i].begin(), event_less);
      } else {
        next[i] = std::move(streams[a]);
      }
    }
    streams.swap(next);
  }
  return std::move(streams.front());
}

namespace serial {

EventStream simulate(const EdgeSchedule& schedule, const ChannelConfig& config) {
  validate_schedule(schedule);
  validate_config(config);
  if (schedule.edges.empty()) return {};
  const auto streams = generate_streams(schedule, config, false);
  EventStream all;
  std::size_t total = 0;
  for (const auto& s : streams) total += s.size();
  all.reserve(total);
  for (const auto& s : streams) all.insert(all.end(), s.begin(), s.end());
  std::sort(all.begin(), all.end(), event_less);
  return all;
}

}  // namespace serial

std::vector<FrequencyResponsePoint> frequency_response(const ChannelConfig& config,
                                                       std::span<const double> freqs_hz,
                                                       int cycles) {
  if (cycles < 1) throw std::invalid_argument("cycles must be >= 1");
  std::vector<FrequencyResponsePoint> out;
  out.reserve(freqs_hz.size());
  for (const double f : freqs_hz) {
    if (f <= 0.0) throw std::invalid_argument("frequencies must be positive");
    const auto period_ns = static_cast<std::int64_t>(std::llround(1e9 / f));
    if (period_ns < 2) throw std::invalid_argument("frequency too high to represent in ns");
    const EdgeSchedule schedule = square_wave_schedule(period_ns, cycles, 0);
    const EventStream events = simulate(schedule, config);
    std::size_t pos = 0;
    std::size_t neg = 0;
    for (const Event& ev : events) {
      if (ev.polarity > 0) {
        ++pos;
      } else {
        ++neg;
      }
    }
    out.push_back({f, static_cast<double>(pos) / cycles, static_cast<double>(neg) / cycles});
  }
  return out;
}

}  // namespace eim
