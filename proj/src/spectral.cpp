#include "qid/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qid/kernels.hpp"

namespace qid {

double FlatTopCosine::operator()(double v) const noexcept
{
  const double av = std::abs(v);
  if (av <= a)
    return 1.0;
  if (av >= 1.0)
    return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * (av - a) / (1.0 - a)));
}

void EstimatorConfig::validate() const
{
  auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (!positive(U) || !positive(v()) || !positive(t()))
    throw Error(ErrorCode::InvalidArgument, "U, V and T must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw Error(ErrorCode::BadEpsilon, "epsilon must lie in (0, 1)");
  if (grid_count < 2)
    throw Error(ErrorCode::InvalidArgument, "grid_count must be >= 2");
  if (!(taper_a > 0.0 && taper_a < 1.0))
    throw Error(ErrorCode::InvalidArgument, "taper flat-top fraction must lie in (0, 1)");
  if (!(modulus_floor >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "modulus floor must be >= 0");
}

UniformGrid frequency_grid(double U, double V, double T, std::size_t count)
{
  return UniformGrid(0.0, std::max({ U, V, T }), count);
}

UniformGrid default_jump_grid(const Sample& sample)
{
  double mean = 0.0;
  for (double x : sample.values)
    mean += x;
  mean /= static_cast<double>(std::max<std::size_t>(sample.size(), 1));
  double var = 0.0;
  for (double x : sample.values)
    var += (x - mean) * (x - mean);
  var /= static_cast<double>(std::max<std::size_t>(sample.size(), 1));
  const double radius = std::max(8.0 * std::sqrt(var), 1.0);
  return UniformGrid(-radius, radius, 801);
}

TripletEstimate estimate_triplet_from_log(const LogCfSeries& logcf, const BaseWeight& w, double U, double V)
{
  const auto sl = sigma_lambda_normal_equations(logcf, w, U);
  TripletEstimate out;
  out.gamma_star = gamma_normal_equation(logcf, w, V);
  out.raw_sigma2 = sl.sigma2;
  out.raw_lambda_star = sl.lambda_star;
  out.sigma2 = std::max(sl.sigma2, 0.0);
  out.lambda_star = std::max(sl.lambda_star, 0.0);
  out.p_hat = std::clamp(std::exp(-out.lambda_star), std::numeric_limits<double>::min(), 1.0);
  out.U = U;
  out.V = V;
  out.epsilon = w.epsilon();
  out.grid_count = logcf.grid.count();

  double min_modulus = std::numeric_limits<double>::infinity();
  for (double re : logcf.real_part)
    min_modulus = std::min(min_modulus, std::exp(re));
  out.diagnostics.min_modulus = min_modulus;
  out.diagnostics.u_max = std::max(std::abs(logcf.grid.start()), std::abs(logcf.grid.stop()));
  return out;
}

TripletEstimate estimate_triplet(const Sample& sample,
                                 const BaseWeight& w,
                                 double U,
                                 double V,
                                 std::size_t grid_count)
{
  if (sample.empty())
    throw Error(ErrorCode::EmptySample, "estimate_triplet: empty sample");
  const auto cf = ecf_on_grid(sample, frequency_grid(U, V, U, grid_count));
  auto out = estimate_triplet_from_log(distinguished_log(cf), w, U, V);
  out.diagnostics = event_diagnostics(cf);
  out.n = sample.size();
  out.seed = sample.seed;
  return out;
}

DensityCurve jump_density_from_log(const LogCfSeries& logcf,
                                   const TripletEstimate& triplet,
                                   const InversionConfig& inv)
{
  const auto& grid = logcf.grid;
  const auto zero = grid.zero_index();
  if (!zero)
    throw Error(ErrorCode::MissingAnchor, "jump density: frequency grid lacks u = 0");
  const double slack = 1e-9 * grid.spacing();
  if (!(inv.T > 0.0) || inv.T > grid.stop() + slack) {
    std::ostringstream msg;
    msg << "cutoff T = " << inv.T << " outside the trusted band (0, " << grid.stop() << "]";
    throw Error(ErrorCode::BadCutoff, msg.str(), std::nullopt, inv.T);
  }

  std::size_t last = *zero;
  while (last + 1 < grid.count() && grid.node(last + 1) <= inv.T + slack)
    ++last;
  if (last - *zero < 2)
    throw Error(ErrorCode::BadCutoff, "cutoff T leaves fewer than 3 frequency nodes");

  const UniformGrid half(0.0, grid.node(last), last - *zero + 1);
  std::vector<complex> psi(half.count());
  for (std::size_t j = 0; j < half.count(); ++j) {
    const std::size_t k = *zero + j;
    const double u = grid.node(k);
    const complex residual = logcf.at(k) - complex(0.0, triplet.gamma_star * u) +
                             0.5 * triplet.sigma2 * u * u + triplet.lambda_star;
    psi[j] = residual * inv.taper(u / inv.T);
  }
  return { inv.x_grid, kernels::parallel::hermitian_inverse(psi, half, inv.x_grid) };
}

DensityCurve estimate_jump_density(const Sample& sample,
                                   const TripletEstimate& triplet,
                                   const InversionConfig& inv,
                                   std::size_t grid_count)
{
  const auto grid = frequency_grid(triplet.U, triplet.V, inv.T, grid_count);
  const auto logcf = distinguished_log(ecf_on_grid(sample, grid));
  return jump_density_from_log(logcf, triplet, inv);
}

PipelineResult full_pipeline(const Sample& sample, const EstimatorConfig& config)
{
  config.validate();
  if (sample.empty())
    throw Error(ErrorCode::EmptySample, "full_pipeline: empty sample");
  sample.validate();

  const double U = config.U, V = config.v(), T = config.t();
  auto ecf = ecf_on_grid(sample, frequency_grid(U, V, T, config.grid_count));
  auto logcf = distinguished_log(ecf, config.modulus_floor);

  auto triplet = estimate_triplet_from_log(logcf, config.weight(), U, V);
  triplet.diagnostics = event_diagnostics(ecf);
  triplet.T = T;
  triplet.n = sample.size();
  triplet.seed = sample.seed;

  const InversionConfig inv{ T, FlatTopCosine{ config.taper_a }, config.x_grid.value_or(default_jump_grid(sample)) };
  auto s = jump_density_from_log(logcf, triplet, inv);
  return { std::move(triplet), std::move(s), std::move(ecf), std::move(logcf) };
}

} // namespace qid
