#pragma once

// Counter-based random streams.  Every draw is a pure function of
// (seed, domain, stream/path, step, block), so runs are reproducible
// bit for bit, Monte Carlo paths are independent by construction, and
// two solutions can share or replay noise by addressing the same
// counters instead of buffering increments.
//
// Core block cipher: philox4x32-10.  Key material is derived from the
// master seed with the splitmix64 finalizer.

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>

#include <Eigen/Core>

namespace fsl::rng {

inline constexpr uint32_t kPhiloxW32A = 0x9E3779B9u;
inline constexpr uint32_t kPhiloxW32B = 0xBB67AE85u;
inline constexpr uint32_t kPhiloxM4x32A = 0xD2511F53u;
inline constexpr uint32_t kPhiloxM4x32B = 0xCD9E8D57u;

using Block = std::array<uint32_t, 4>;
using Key = std::array<uint32_t, 2>;

inline uint64_t splitmix64_mix(uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

inline uint64_t splitmix64_next(uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  return splitmix64_mix(state);
}

inline Block philox4x32(Block ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    const uint64_t p0 = uint64_t(kPhiloxM4x32A) * ctr[0];
    const uint64_t p1 = uint64_t(kPhiloxM4x32B) * ctr[2];
    ctr = {uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], uint32_t(p1),
           uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], uint32_t(p0)};
    key[0] += kPhiloxW32A;
    key[1] += kPhiloxW32B;
  }
  return ctr;
}

// Domain separation keeps path noise, scalar streams and any future
// consumers on disjoint key schedules even for equal counters.
inline Key derive_key(uint64_t seed, uint64_t domain) {
  uint64_t state = seed + 0x9E3779B97F4A7C15ull * (domain + 1);
  const uint64_t k = splitmix64_next(state);
  return {uint32_t(k), uint32_t(k >> 32)};
}

// (0,1]: never zero, safe under log.
inline double u53_open0(uint32_t a, uint32_t b) {
  const uint64_t x = (uint64_t(a) << 32) | b;
  return double((x >> 11) + 1) * 0x1p-53;
}

// [0,1).
inline double u53_half_open(uint32_t a, uint32_t b) {
  const uint64_t x = (uint64_t(a) << 32) | b;
  return double(x >> 11) * 0x1p-53;
}

inline std::pair<double, double> box_muller(const Block& blk) {
  const double u1 = u53_open0(blk[0], blk[1]);
  const double u2 = u53_half_open(blk[2], blk[3]);
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 6.28318530717958647692528676656 * u2;
  return {rad * std::cos(ang), rad * std::sin(ang)};
}

// Per-path noise source.  Step j of path k reads blocks
// {i, lo(step), hi(step), path} under the path-domain key; a second
// solution replays the increments of the first by addressing the same
// (path, step), e.g. with a shifted step origin.
class PathNoise {
 public:
  PathNoise(uint64_t seed, uint32_t path)
      : key_(derive_key(seed, kDomain)), path_(path) {}

  uint32_t path() const { return path_; }

  // Fills `out` with standard normals for the given step index.
  void normals(uint64_t step, Eigen::VectorXd& out) const {
    const int n = int(out.size());
    for (int i = 0; 2 * i < n; ++i) {
      const Block blk = philox4x32(
          {uint32_t(i), uint32_t(step), uint32_t(step >> 32), path_}, key_);
      const auto [z0, z1] = box_muller(blk);
      out[2 * i] = z0;
      if (2 * i + 1 < n) out[2 * i + 1] = z1;
    }
  }

 private:
  static constexpr uint64_t kDomain = 0x70617468ull;  // path noise
  Key key_;
  uint32_t path_;
};

// Sequential draws for parameter sweeps, initial conditions, shuffles.
class ScalarStream {
 public:
  ScalarStream(uint64_t seed, uint64_t stream)
      : key_(derive_key(seed, kDomain)),
        s_lo_(uint32_t(stream)),
        s_hi_(uint32_t(stream >> 32)) {}

  // [0,1)
  double uniform() {
    if (u_have_) {
      u_have_ = false;
      return u_spare_;
    }
    const Block blk = next_block();
    u_spare_ = u53_half_open(blk[2], blk[3]);
    u_have_ = true;
    return u53_half_open(blk[0], blk[1]);
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double normal() {
    if (n_have_) {
      n_have_ = false;
      return n_spare_;
    }
    const auto [z0, z1] = box_muller(next_block());
    n_spare_ = z1;
    n_have_ = true;
    return z0;
  }

  uint64_t bits() {
    const Block blk = next_block();
    return (uint64_t(blk[0]) << 32) | blk[1];
  }

 private:
  static constexpr uint64_t kDomain = 0x73636C72ull;  // scalar stream

  Block next_block() {
    const Block blk = philox4x32({ctr_lo_, ctr_hi_, s_lo_, s_hi_}, key_);
    if (++ctr_lo_ == 0) ++ctr_hi_;
    return blk;
  }

  Key key_;
  uint32_t s_lo_, s_hi_;
  uint32_t ctr_lo_ = 0, ctr_hi_ = 0;
  double u_spare_ = 0, n_spare_ = 0;
  bool u_have_ = false, n_have_ = false;
};

}  // namespace fsl::rng
