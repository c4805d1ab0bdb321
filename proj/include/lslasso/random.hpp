#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace lslasso {

/// Fixed stream identifiers; one per purpose so that draws for one purpose
/// never shift the draws of another.
enum class Stream : std::uint32_t { Design = 0, Noise = 1, Search = 2, Solver = 3 };

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based generator keyed by (seed, trial, stream). The sequence is a
/// pure function of the key, so trials may run in any order on any thread.
class CounterRng {
 public:
  using result_type = std::uint32_t;

  CounterRng(std::uint64_t seed, std::uint64_t trial, Stream stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint32_t trial_;
  std::uint32_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int used_ = 4;
};

}  // namespace lslasso
