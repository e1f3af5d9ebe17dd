#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "eim/modulator.hpp"

namespace eim {

/// One sensor event: timestamp and brightness-change sign (+1 rising light,
/// -1 falling).
struct Event {
  std::int64_t t_ns = 0;
  std::int8_t polarity = 1;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Time-ordered event list; ties order negative before positive.
using EventStream = std::vector<Event>;

/// Phenomenological event-sensor model. Each transmitter edge makes every
/// pixel emit a burst of events of the edge's polarity; burst size scales
/// with 1 - exp(-dt/lowpass_tau) where dt is the time since the previous
/// opposite edge (pixel recovery), burst timing spreads by an exponential
/// decay plus Gaussian jitter, and a per-pixel refractory period drops
/// too-close events. Background noise arrives as a Poisson process per
/// polarity across the schedule's span.
struct ChannelConfig {
  int pixel_count = 32;
  double events_per_edge = 3.0;         // mean events per pixel per edge
  std::int64_t burst_decay_ns = 5'000;  // exponential intra-burst spread
  std::int64_t jitter_sigma_ns = 2'000; // per-event Gaussian jitter
  std::int64_t refractory_ns = 20'000;  // min same-pixel inter-event time
  std::int64_t lowpass_tau_ns = 8'000;  // edge amplitude recovery constant
  double noise_rate_hz = 100.0;         // background events/s per polarity
  std::uint64_t seed = 1;
  bool deterministic_counts = false;    // round(lambda*s) instead of Poisson
};

/// Runs the channel model over a schedule. Deterministic for a given
/// (schedule, config) including under any OpenMP thread count: every
/// (edge, pixel) draws from its own substream and the merge is value-ordered.
EventStream simulate(const EdgeSchedule& schedule, const ChannelConfig& config);

namespace serial {
/// Single-threaded reference for eim::simulate; byte-identical output.
EventStream simulate(const EdgeSchedule& schedule, const ChannelConfig& config);
}  // namespace serial

struct FrequencyResponsePoint {
  double freq_hz = 0.0;
  double positive_per_edge = 0.0;
  double negative_per_edge = 0.0;
};

/// Drives a 50%-duty square wave at each frequency through the channel and
/// reports mean events per edge by polarity.
std::vector<FrequencyResponsePoint> frequency_response(const ChannelConfig& config,
                                                       std::span<const double> freqs_hz,
                                                       int cycles);

}  // namespace eim
