#include "qid/rng.hpp"

#include <cmath>
#include <numbers>

namespace qid {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept
{
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline std::array<std::uint32_t, 4> round(const std::array<std::uint32_t, 4>& c,
                                          const std::array<std::uint32_t, 2>& k) noexcept
{
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kMul0, c[0], hi0, lo0);
  mulhilo(kMul1, c[2], hi1, lo1);
  return { hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0 };
}

} // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept
{
  counter = round(counter, key);
  for (int r = 1; r < 10; ++r) {
    key[0] += kWeyl0;
    key[1] += kWeyl1;
    counter = round(counter, key);
  }
  return counter;
}

std::uint64_t mix64(std::uint64_t x) noexcept
{
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_run_seed(std::uint64_t base_seed, std::uint64_t n, std::uint64_t run_id) noexcept
{
  return mix64(base_seed + ((n << 32) | (run_id & 0xFFFFFFFFull)));
}

PhiloxStream::PhiloxStream(std::uint64_t seed, std::uint64_t substream) noexcept
  : key_{ static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32) }
  , substream_(substream)
{}

void PhiloxStream::refill() noexcept
{
  const std::array<std::uint32_t, 4> counter{ static_cast<std::uint32_t>(block_),
                                              static_cast<std::uint32_t>(block_ >> 32),
                                              static_cast<std::uint32_t>(substream_),
                                              static_cast<std::uint32_t>(substream_ >> 32) };
  buffer_ = philox4x32_10(counter, key_);
  ++block_;
  used_ = 0;
}

std::uint32_t PhiloxStream::next_u32() noexcept
{
  if (used_ == 4)
    refill();
  return buffer_[used_++];
}

std::uint64_t PhiloxStream::next_u64() noexcept
{
  const std::uint64_t hi = next_u32();
  return (hi << 32) | next_u32();
}

double PhiloxStream::uniform() noexcept
{
  // (k + 0.5) / 2^53 for k in [0, 2^53) never hits 0 or 1.
  const std::uint64_t k = next_u64() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double PhiloxStream::normal() noexcept
{
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double theta = 2.0 * std::numbers::pi * uniform();
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::uint32_t PhiloxStream::below(std::uint32_t bound) noexcept
{
  return static_cast<std::uint32_t>((static_cast<std::uint64_t>(next_u32()) * bound) >> 32);
}

} // namespace qid
