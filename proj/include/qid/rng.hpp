#pragma once

#include <array>
#include <cstdint>

namespace qid {

//! Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
//! as easy as 1, 2, 3", SC'11). Maps a 128-bit counter and a 64-bit key to
//! 128 random bits.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

//! SplitMix64 output finalizer. A bijection on 64-bit integers.
std::uint64_t mix64(std::uint64_t x) noexcept;

//! Seed for replication `run_id` at sample size `n` within a study.
//! Injective in (n, run_id) for n, run_id < 2^32.
std::uint64_t derive_run_seed(std::uint64_t base_seed, std::uint64_t n, std::uint64_t run_id) noexcept;

//! Sequential view of one Philox substream. The key is the seed; the counter
//! holds (block index, substream id), so streams with different seeds or
//! substream ids never overlap.
class PhiloxStream
{
public:
  explicit PhiloxStream(std::uint64_t seed, std::uint64_t substream = 0) noexcept;

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;

  //! Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform() noexcept;

  //! Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;

  //! Uniform integer in [0, bound) by rejection-free multiply-shift (bias < 2^-32).
  std::uint32_t below(std::uint32_t bound) noexcept;

private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t substream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

} // namespace qid
