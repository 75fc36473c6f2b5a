#pragma once

#include <cstdint>
#include <optional>

#include "qid/charfn.hpp"
#include "qid/core.hpp"
#include "qid/weights.hpp"

namespace qid {

struct TripletEstimate
{
  double gamma_star = 0.0;
  double sigma2 = 0.0;      // clamped at 0
  double lambda_star = 0.0; // clamped at 0
  double p_hat = 1.0;       // exp(-lambda_star)
  double raw_sigma2 = 0.0;
  double raw_lambda_star = 0.0;
  CfDiagnostics diagnostics;

  double U = 0.0;
  double V = 0.0;
  double epsilon = 0.0;
  std::optional<double> T;
  std::size_t grid_count = 0;
  std::size_t n = 0;
  std::optional<std::uint64_t> seed;
};

//! Flat-top cosine taper: 1 on |v| <= a, cosine roll-off to 0 at |v| = 1.
struct FlatTopCosine
{
  double a = 0.8;

  double operator()(double v) const noexcept;
};

struct InversionConfig
{
  double T;
  FlatTopCosine taper;
  UniformGrid x_grid;
};

struct EstimatorConfig
{
  double epsilon = 0.5;
  WeightKind weight_kind = WeightKind::Indicator;
  double U = 8.0;
  std::optional<double> V; // defaults to U
  std::optional<double> T; // defaults to U
  std::size_t grid_count = 4096;
  double taper_a = 0.8;
  double modulus_floor = kDefaultModulusFloor;
  std::optional<UniformGrid> x_grid; // for s_n; see default_jump_grid

  double v() const { return V.value_or(U); }
  double t() const { return T.value_or(U); }
  BaseWeight weight() const { return BaseWeight(epsilon, weight_kind); }

  //! Throws InvalidArgument on out-of-range knobs.
  void validate() const;
};

//! [0, max(U, V, T)] with `count` nodes; steps 2-4 all read from this grid.
UniformGrid frequency_grid(double U, double V, double T, std::size_t count);

//! Symmetric grid [-R, R], R = max(8 * sample sd, 1), 801 nodes.
UniformGrid default_jump_grid(const Sample& sample);

TripletEstimate estimate_triplet_from_log(const LogCfSeries& logcf, const BaseWeight& w, double U, double V);

TripletEstimate estimate_triplet(const Sample& sample,
                                 const BaseWeight& w,
                                 double U,
                                 double V,
                                 std::size_t grid_count = 4096);

//! s_n(x) = (1/pi) int_0^T Re[exp(-iux) (log cf(u) - i gamma u + sigma2 u^2/2 + lambda) w_s(u/T)] du.
DensityCurve jump_density_from_log(const LogCfSeries& logcf,
                                   const TripletEstimate& triplet,
                                   const InversionConfig& inv);

DensityCurve estimate_jump_density(const Sample& sample,
                                   const TripletEstimate& triplet,
                                   const InversionConfig& inv,
                                   std::size_t grid_count = 4096);

struct PipelineResult
{
  TripletEstimate triplet;
  DensityCurve s;
  ComplexSeries ecf;
  LogCfSeries logcf;
};

//! All four steps from one ECF evaluation.
PipelineResult full_pipeline(const Sample& sample, const EstimatorConfig& config);

} // namespace qid
