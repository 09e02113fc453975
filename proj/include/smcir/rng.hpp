#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace smcir {

/// Deterministic split-stream random generator.
///
/// One stream per (seed, stream_id) pair; distinct stream ids give
/// statistically independent sequences.  The engine is std::mt19937_64
/// keyed through std::seed_seq, and all variates are derived from the
/// raw 64-bit output (never from std::*_distribution), so a given
/// (seed, stream_id) reproduces the exact same draw sequence on any
/// conforming standard library.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id & 0xffffffffu),
                      static_cast<std::uint32_t>(stream_id >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Next raw 64-bit word.
  std::uint64_t next_raw() { return engine_(); }

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1]; safe as a log() argument.
  double uniform_pos() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller.  Pairs are cached, so one call
  /// consumes either two raw words or none.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Sub-stream derivation for nested parallelism: child streams of a
  /// stream are keyed by (seed, stream_id * mix + index).
  RngStream substream(std::uint64_t index) const {
    return RngStream(seed_, stream_id_ * 0x9e3779b97f4a7c15ull + index + 1);
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace smcir
