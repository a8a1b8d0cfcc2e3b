#pragma once

#include <array>
#include <cstdint>

namespace lqsd {

/// Philox4x32-10 block function (Salmon et al., SC'11): a keyed bijection on
/// 128-bit counters.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key);
};

/// Independent purposes drawing from the same user seed get disjoint keys.
enum class StreamDomain : std::uint32_t {
  kPath = 0x70617468u,       // "path"
  kQsdSample = 0x71736421u,  // "qsd!"
};

/// Substream (seed, domain, index) of the counter-based generator. Draw k of
/// a substream depends only on (seed, domain, index, k), so results do not
/// depend on which thread simulates which index.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, StreamDomain domain, std::uint64_t index);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Exp(rate).
  double exponential(double rate);
  /// Standard normal (Box-Muller, pairs cached).
  double normal();

 private:
  Philox4x32::Key key_;
  std::uint64_t index_;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buffer_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lqsd
