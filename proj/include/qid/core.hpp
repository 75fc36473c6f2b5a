#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qid/error.hpp"

namespace qid {

using complex = std::complex<double>;

//! Endpoint-inclusive uniform grid: nodes start + k * spacing, k = 0..count-1.
class UniformGrid
{
public:
  UniformGrid(double start, double stop, std::size_t count);

  double start() const noexcept { return start_; }
  double stop() const noexcept { return stop_; }
  std::size_t count() const noexcept { return count_; }
  double spacing() const noexcept { return spacing_; }

  //! The last node is pinned to `stop` exactly.
  double node(std::size_t k) const noexcept
  {
    return k + 1 == count_ ? stop_ : start_ + spacing_ * static_cast<double>(k);
  }
  std::vector<double> nodes() const;

  //! Index of a node equal to 0.0 (within 1e-9 spacing), if any.
  std::optional<std::size_t> zero_index() const noexcept;

  friend bool operator==(const UniformGrid&, const UniformGrid&) = default;

private:
  double start_;
  double stop_;
  std::size_t count_;
  double spacing_;
};

struct Sample
{
  std::vector<double> values;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> model_tag;

  std::size_t size() const noexcept { return values.size(); }
  bool empty() const noexcept { return values.empty(); }

  //! Throws InvalidArgument on a non-finite value.
  void validate() const;
};

//! Real function values on a uniform x-grid.
struct DensityCurve
{
  UniformGrid grid;
  std::vector<double> values;
};

enum class KernelKind { Epanechnikov };

struct KernelSpec
{
  KernelKind kind = KernelKind::Epanechnikov;
  double support_radius = 1.0;
};

double trapezoid_integrate(std::span<const double> f, const UniformGrid& grid);
complex trapezoid_integrate(std::span<const complex> f, const UniformGrid& grid);

//! K(u) = 3/4 (1 - u^2) on |u| <= 1.
double epanechnikov(double u) noexcept;

//! h = c * n^{-1/5}.
double bandwidth_rule(long long n, double c = 1.0 / 30.0);

double normal_pdf(double x, double variance) noexcept;

} // namespace qid
