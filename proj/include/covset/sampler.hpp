#pragma once

// Deterministic, stream-splittable randomness built on the Philox4x32-10
// counter-based generator. A stream is a pure value: (key, path, counter).
// Distinct paths give statistically independent streams and the output for a
// given (seed, path) does not depend on scheduling or thread count.

#include <array>
#include <cstdint>

#include "covset/geometry.hpp"

namespace covset {

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);

class RngStream {
 public:
  // Root stream of a master seed; path (0,0,0).
  static RngStream root(std::uint64_t master_seed);

  // Path-keyed child: same key, path set to (replica, generation, index),
  // draw counter reset. generation < 64, index < 2^58.
  RngStream at(std::uint32_t replica, std::uint32_t generation,
               std::uint64_t index) const;

  // Re-keyed substream for a child purpose/index; path resets to (0,0,0).
  RngStream derive(std::uint64_t child) const;

  std::uint64_t next_u64();
  double uniform01();     // [0, 1), 53-bit
  double uniform_sym();   // [-1/2, 1/2)
  double gaussian();      // standard normal (Box-Muller)

  TorusPoint uniform_point(int d);

  // Haar-distributed element of O(d), d in {2, 3}; includes reflections.
  Rotation haar_rotation(int d);

 private:
  RngStream() = default;
  void refill_();

  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 3> path_{};  // replica, generation, index words
  std::uint32_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;  // consumed words in buf_
  double spare_gauss_ = 0.0;
  bool has_spare_gauss_ = false;
};

}  // namespace covset
