#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qid {

enum class ErrorCode {
  InvalidArgument,
  LengthMismatch,
  GridMismatch,
  InvalidGrid,
  EmptySample,
  NonPositiveN,
  NonPositiveBandwidth,
  NearZeroModulus,
  MissingAnchor,
  UnsupportedModel,
  BadEpsilon,
  SingularSystem,
  GridTooCoarse,
  BadCutoff,
  PTooCloseToOne,
  BadSpec,
  UnsupportedSpec,
  SeriesNotConverged,
  DegenerateComponent,
  TooFewObservations,
  ParseError,
  EmptyReport,
  IoError,
};

std::string_view to_string(ErrorCode code);

//! Single exception type for the library. The code is machine readable and
//! stable; `index` and `location` carry the offending grid node / frequency
//! or input line when one exists.
class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message)
    , code_(code)
  {}

  Error(ErrorCode code,
        const std::string& message,
        std::optional<long long> index,
        std::optional<double> location = std::nullopt)
    : std::runtime_error(message)
    , code_(code)
    , index_(index)
    , location_(location)
  {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<long long> index() const noexcept { return index_; }
  std::optional<double> location() const noexcept { return location_; }

private:
  ErrorCode code_;
  std::optional<long long> index_;
  std::optional<double> location_;
};

} // namespace qid
