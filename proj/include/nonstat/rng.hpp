#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "nonstat/error.hpp"

namespace nonstat {

// Philox4x64-10 counter-based generator. A stream is fully determined by
// (seed, stream id); draws advance a 256-bit counter, so independent
// sub-streams split from one root seed never overlap.
class Philox {
 public:
  using u64 = std::uint64_t;

  Philox() : Philox(0, 0) {}
  explicit Philox(u64 seed, u64 stream = 0) : key_{seed, stream} { counter_.fill(0); }

  static constexpr const char* algorithm() { return "philox4x64-10"; }

  u64 seed() const { return key_[0]; }
  u64 stream() const { return key_[1]; }
  u64 draws() const { return n_drawn_; }

  Philox split(u64 substream) const {
    // Sub-streams get a distinct stream id; the mix keeps ids injective for
    // substream < 2^32 even when the parent is itself a split.
    return Philox(key_[0], key_[1] * 0x100000001ULL + substream + 1);
  }

  u64 next_u64() {
    if (idx_ == 4) {
      block_ = generate(counter_, key_);
      increment();
      idx_ = 0;
    }
    ++n_drawn_;
    return block_[idx_++];
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  // Uniform on (0, 1]; safe under log().
  double uniform_pos() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform_pos();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  // Marsaglia-Tsang; shape > 0, unit rate.
  double gamma(double shape) {
    if (!(shape > 0.0)) throw ParamError("gamma shape must be positive");
    if (shape < 1.0) {
      double u = uniform_pos();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double chi2(double dof) { return 2.0 * gamma(0.5 * dof); }

  static std::array<u64, 4> generate(const std::array<u64, 4>& counter,
                                     const std::array<u64, 2>& key) {
    std::array<u64, 4> c = counter;
    std::array<u64, 2> k = key;
    for (int round = 0; round < 10; ++round) {
      c = single_round(c, k);
      k[0] += 0x9E3779B97F4A7C15ULL;
      k[1] += 0xBB67AE8584CAA73BULL;
    }
    return c;
  }

 private:
  static void mulhilo(u64 a, u64 b, u64& hi, u64& lo) {
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<u64>(p >> 64);
    lo = static_cast<u64>(p);
  }

  static std::array<u64, 4> single_round(const std::array<u64, 4>& c,
                                         const std::array<u64, 2>& k) {
    u64 hi0, lo0, hi1, lo1;
    mulhilo(0xD2E7470EE14C6C93ULL, c[0], hi0, lo0);
    mulhilo(0xCA5A826395121157ULL, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }

  void increment() {
    for (int i = 0; i < 4; ++i) {
      if (++counter_[i] != 0) break;
    }
  }

  std::array<u64, 2> key_;
  std::array<u64, 4> counter_{};
  std::array<u64, 4> block_{};
  int idx_ = 4;
  u64 n_drawn_ = 0;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace nonstat
