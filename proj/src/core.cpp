#include "qid/core.hpp"

#include <cmath>
#include <numbers>

namespace qid {

std::string_view to_string(ErrorCode code)
{
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::NonPositiveN: return "NonPositiveN";
    case ErrorCode::NonPositiveBandwidth: return "NonPositiveBandwidth";
    case ErrorCode::NearZeroModulus: return "NearZeroModulus";
    case ErrorCode::MissingAnchor: return "MissingAnchor";
    case ErrorCode::UnsupportedModel: return "UnsupportedModel";
    case ErrorCode::BadEpsilon: return "BadEpsilon";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::BadCutoff: return "BadCutoff";
    case ErrorCode::PTooCloseToOne: return "PTooCloseToOne";
    case ErrorCode::BadSpec: return "BadSpec";
    case ErrorCode::UnsupportedSpec: return "UnsupportedSpec";
    case ErrorCode::SeriesNotConverged: return "SeriesNotConverged";
    case ErrorCode::DegenerateComponent: return "DegenerateComponent";
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyReport: return "EmptyReport";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

UniformGrid::UniformGrid(double start, double stop, std::size_t count)
  : start_(start)
  , stop_(stop)
  , count_(count)
  , spacing_(0.0)
{
  if (count < 2)
    throw Error(ErrorCode::InvalidGrid, "grid needs at least 2 nodes");
  if (!std::isfinite(start) || !std::isfinite(stop) || !(stop > start))
    throw Error(ErrorCode::InvalidGrid, "grid requires finite start < stop");
  spacing_ = (stop - start) / static_cast<double>(count - 1);
}

std::vector<double> UniformGrid::nodes() const
{
  std::vector<double> out(count_);
  for (std::size_t k = 0; k < count_; ++k)
    out[k] = node(k);
  return out;
}

std::optional<std::size_t> UniformGrid::zero_index() const noexcept
{
  if (start_ > 0.0 || stop_ < 0.0)
    return std::nullopt;
  const auto k = static_cast<std::size_t>(std::llround(-start_ / spacing_));
  if (k < count_ && std::abs(node(k)) <= 1e-9 * spacing_)
    return k;
  return std::nullopt;
}

void Sample::validate() const
{
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]))
      throw Error(ErrorCode::InvalidArgument,
                  "sample value " + std::to_string(i) + " is not finite",
                  static_cast<long long>(i));
  }
}

namespace {

template<typename T>
T trapezoid(std::span<const T> f, const UniformGrid& grid)
{
  if (f.size() != grid.count())
    throw Error(ErrorCode::LengthMismatch,
                "trapezoid: " + std::to_string(f.size()) + " values for " +
                  std::to_string(grid.count()) + " nodes");
  T interior{};
  for (std::size_t k = 1; k + 1 < f.size(); ++k)
    interior += f[k];
  return grid.spacing() * (interior + 0.5 * (f.front() + f.back()));
}

} // namespace

double trapezoid_integrate(std::span<const double> f, const UniformGrid& grid)
{
  return trapezoid(f, grid);
}

complex trapezoid_integrate(std::span<const complex> f, const UniformGrid& grid)
{
  return trapezoid(f, grid);
}

double epanechnikov(double u) noexcept
{
  return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
}

double bandwidth_rule(long long n, double c)
{
  if (n < 1)
    throw Error(ErrorCode::NonPositiveN, "bandwidth_rule: n must be >= 1");
  if (!(c > 0.0))
    throw Error(ErrorCode::InvalidArgument, "bandwidth_rule: c must be > 0");
  return c * std::pow(static_cast<double>(n), -0.2);
}

double normal_pdf(double x, double variance) noexcept
{
  return std::exp(-0.5 * x * x / variance) /
         std::sqrt(2.0 * std::numbers::pi * variance);
}

} // namespace qid
