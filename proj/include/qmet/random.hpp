#pragma once

#include <cstdint>

namespace qmet {

// Counter-based stream: output k is a SplitMix64 finalization of
// key + k * golden_gamma, so a stream is fully described by (key, counter)
// and derived streams never share state.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_index = 0);

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double uniform();

  // Independent child stream; does not advance this stream.
  RandomStream substream(std::uint64_t index) const;

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  RandomStream(std::uint64_t key, std::uint64_t counter, int) : key_(key), counter_(counter) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace qmet
