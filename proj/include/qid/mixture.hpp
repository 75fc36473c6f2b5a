#pragma once

#include <optional>

#include "qid/core.hpp"

namespace qid {

DensityCurve kde(const Sample& sample, const KernelSpec& kernel, double h, const UniformGrid& x_grid);

inline constexpr double kDefaultDeltaFloor = 0.01;

//! g_circ = (g_hat - p_hat * phi_{sigma2_hat}) / (1 - p_hat), node-wise.
//! Throws PTooCloseToOne when p_hat >= 1 - delta_floor.
DensityCurve decontaminate(const DensityCurve& g_hat,
                           double p_hat,
                           double sigma2_hat,
                           double delta_floor = kDefaultDeltaFloor);

DensityCurve positive_part(const DensityCurve& curve);

//! Trapezoid approximation of (int (a - b)^2 dx)^{1/2}.
double l2_distance(const DensityCurve& a, const DensityCurve& b);

struct MixtureConfig
{
  double bandwidth_c = 1.0 / 30.0;
  double delta_floor = kDefaultDeltaFloor;
  std::optional<UniformGrid> x_grid; // default_mixture_grid when unset
  //! Rescale g_circ_plus to unit mass. Off by default; never used by the studies.
  bool renormalize = false;
};

struct MixtureEstimate
{
  double p_hat = 0.0;
  double sigma2_hat = 0.0;
  double h = 0.0;
  DensityCurve g_hat;
  DensityCurve g_circ;      // signed
  DensityCurve g_circ_plus; // positive part
};

//! Sample range padded by 4 max(sqrt(sigma2_hat), h), 2001 nodes.
UniformGrid default_mixture_grid(const Sample& sample, double sigma2_hat, double h);

MixtureEstimate decompose_mixture(const Sample& sample,
                                  double p_hat,
                                  double sigma2_hat,
                                  const MixtureConfig& config = {});

} // namespace qid
