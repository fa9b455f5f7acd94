#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace nestmc {

namespace detail {

inline constexpr std::uint64_t kGolden64 = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace detail

// Counter-based stream (Philox4x32-10). A stream is identified by a 64-bit
// key derived from its seed path; the 128-bit counter enumerates the output
// sequence. Distinct keys give unrelated sequences, so substreams never
// overlap regardless of how much each one is consumed. Streams are plain
// values: copy, move, and hand them to other threads freely, but do not
// share one mutable instance between concurrent callers.
class RngStream {
 public:
  RngStream() : RngStream(0, {0}) {}

  // Raw 64-bit output.
  std::uint64_t next_u64() {
    if (block_pos_ >= 4) refill();
    const std::uint32_t lo = block_[block_pos_];
    const std::uint32_t hi = block_[block_pos_ + 1];
    block_pos_ += 2;
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
  }

  // Uniform double in the open interval (0,1); 53-bit resolution centered
  // so that 0 and 1 are never produced (safe for inverse-CDF transforms).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  const std::vector<std::uint64_t>& seed_path() const { return path_; }

 private:
  RngStream(std::uint64_t key64, std::vector<std::uint64_t> path)
      : key64_(key64), path_(std::move(path)) {}

  void refill() {
    std::array<std::uint32_t, 4> ctr = counter_;
    std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(key64_),
                                        static_cast<std::uint32_t>(key64_ >> 32)};
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t m0 = 0xD2511F53ull * ctr[0];
      const std::uint64_t m1 = 0xCD9E8D57ull * ctr[2];
      ctr = {static_cast<std::uint32_t>(m1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(m1),
             static_cast<std::uint32_t>(m0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(m0)};
      key[0] += 0x9E3779B9u;
      key[1] += 0xBB67AE85u;
    }
    block_ = ctr;
    block_pos_ = 0;
    for (int i = 0; i < 4; ++i) {
      if (++counter_[i] != 0) break;
    }
  }

  std::uint64_t key64_ = 0;
  std::array<std::uint32_t, 4> counter_{};
  std::array<std::uint32_t, 4> block_{};
  int block_pos_ = 4;
  std::vector<std::uint64_t> path_;

  friend RngStream make_stream(std::uint64_t);
  friend RngStream substream(const RngStream&, std::uint64_t);
};

inline RngStream make_stream(std::uint64_t master_seed) {
  return RngStream(detail::mix64(master_seed + detail::kGolden64), {master_seed});
}

// O(1) child derivation. For a fixed parent the index -> key map is a
// composition of bijections, so siblings always get distinct keys.
inline RngStream substream(const RngStream& parent, std::uint64_t index) {
  std::vector<std::uint64_t> path = parent.path_;
  path.push_back(index);
  const std::uint64_t key =
      detail::mix64(parent.key64_ ^ detail::mix64(index + detail::kGolden64));
  return RngStream(key, std::move(path));
}

}  // namespace nestmc
