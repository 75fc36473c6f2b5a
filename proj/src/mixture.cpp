#include "qid/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qid/kernels.hpp"

namespace qid {

DensityCurve kde(const Sample& sample, const KernelSpec& kernel, double h, const UniformGrid& x_grid)
{
  if (sample.empty())
    throw Error(ErrorCode::EmptySample, "kde: empty sample");
  if (!(h > 0.0) || !std::isfinite(h))
    throw Error(ErrorCode::NonPositiveBandwidth, "kde: bandwidth must be positive");
  if (kernel.kind != KernelKind::Epanechnikov || kernel.support_radius != 1.0)
    throw Error(ErrorCode::InvalidArgument, "kde: only the unit Epanechnikov kernel is supported");
  return { x_grid, kernels::parallel::kde(sample.values, h, x_grid) };
}

DensityCurve decontaminate(const DensityCurve& g_hat, double p_hat, double sigma2_hat, double delta_floor)
{
  if (!(p_hat < 1.0 - delta_floor)) {
    std::ostringstream msg;
    msg << "p_hat = " << p_hat << " >= 1 - " << delta_floor
        << ": the normal component explains (nearly) everything";
    throw Error(ErrorCode::PTooCloseToOne, msg.str());
  }
  if (!(sigma2_hat > 0.0))
    throw Error(ErrorCode::InvalidArgument, "decontaminate: sigma2_hat must be positive");

  DensityCurve out{ g_hat.grid, std::vector<double>(g_hat.values.size()) };
  const double scale = 1.0 / (1.0 - p_hat);
  for (std::size_t k = 0; k < out.values.size(); ++k)
    out.values[k] = (g_hat.values[k] - p_hat * normal_pdf(g_hat.grid.node(k), sigma2_hat)) * scale;
  return out;
}

DensityCurve positive_part(const DensityCurve& curve)
{
  DensityCurve out = curve;
  for (auto& v : out.values)
    v = std::max(v, 0.0);
  return out;
}

double l2_distance(const DensityCurve& a, const DensityCurve& b)
{
  if (!(a.grid == b.grid) || a.values.size() != b.values.size())
    throw Error(ErrorCode::GridMismatch, "l2_distance: curves live on different grids");
  std::vector<double> sq(a.values.size());
  for (std::size_t k = 0; k < sq.size(); ++k) {
    const double d = a.values[k] - b.values[k];
    sq[k] = d * d;
  }
  return std::sqrt(trapezoid_integrate(sq, a.grid));
}

UniformGrid default_mixture_grid(const Sample& sample, double sigma2_hat, double h)
{
  const auto [lo, hi] = std::minmax_element(sample.values.begin(), sample.values.end());
  const double pad = 4.0 * std::max(std::sqrt(std::max(sigma2_hat, 0.0)), h);
  return UniformGrid(*lo - pad, *hi + pad, 2001);
}

MixtureEstimate decompose_mixture(const Sample& sample,
                                  double p_hat,
                                  double sigma2_hat,
                                  const MixtureConfig& config)
{
  if (sample.empty())
    throw Error(ErrorCode::EmptySample, "decompose_mixture: empty sample");
  const double h = bandwidth_rule(static_cast<long long>(sample.size()), config.bandwidth_c);
  const auto grid = config.x_grid.value_or(default_mixture_grid(sample, sigma2_hat, h));
  auto g_hat = kde(sample, KernelSpec{}, h, grid);
  auto g_circ = decontaminate(g_hat, p_hat, sigma2_hat, config.delta_floor);
  auto g_plus = positive_part(g_circ);
  if (config.renormalize) {
    const double mass = trapezoid_integrate(g_plus.values, grid);
    if (mass > 0.0)
      for (auto& v : g_plus.values)
        v /= mass;
  }
  MixtureEstimate out{ p_hat, sigma2_hat, h, std::move(g_hat), std::move(g_circ), std::move(g_plus) };
  return out;
}

} // namespace qid
