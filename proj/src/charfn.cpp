#include "qid/charfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qid/kernels.hpp"

namespace qid {

ComplexSeries ecf_on_grid(const Sample& sample, const UniformGrid& grid)
{
  if (sample.empty())
    throw Error(ErrorCode::EmptySample, "ecf_on_grid: empty sample");
  return { grid, kernels::parallel::ecf(sample.values, grid) };
}

LogCfSeries distinguished_log(const ComplexSeries& cf, double modulus_floor)
{
  const auto& grid = cf.grid;
  if (cf.values.size() != grid.count())
    throw Error(ErrorCode::LengthMismatch, "distinguished_log: values/grid length mismatch");
  const auto anchor = grid.zero_index();
  if (!anchor)
    throw Error(ErrorCode::MissingAnchor, "distinguished_log: u = 0 is not a grid node");

  LogCfSeries out{ grid, std::vector<double>(grid.count()), std::vector<double>(grid.count()) };
  for (std::size_t k = 0; k < grid.count(); ++k) {
    const double modulus = std::abs(cf.values[k]);
    if (!(modulus > modulus_floor)) {
      std::ostringstream msg;
      msg << "|cf(u)| = " << modulus << " <= floor " << modulus_floor << " at u = " << grid.node(k)
          << "; reduce U or increase n";
      throw Error(ErrorCode::NearZeroModulus, msg.str(), static_cast<long long>(k), grid.node(k));
    }
    out.real_part[k] = std::log(modulus);
  }

  constexpr double two_pi = 2.0 * std::numbers::pi;
  auto step = [&](std::size_t from, std::size_t to) {
    const double increment = std::arg(cf.values[to] * std::conj(cf.values[from]));
    const double target = out.imag_part[from] + increment;
    const double principal = std::arg(cf.values[to]);
    out.imag_part[to] = principal + two_pi * std::round((target - principal) / two_pi);
  };

  out.imag_part[*anchor] = 0.0;
  for (std::size_t k = *anchor + 1; k < grid.count(); ++k)
    step(k - 1, k);
  for (std::size_t k = *anchor; k-- > 0;)
    step(k + 1, k);
  return out;
}

ComplexSeries exact_cf(const ModelSpec& model, const UniformGrid& grid)
{
  validate(model);
  ComplexSeries out{ grid, std::vector<complex>(grid.count()) };
  for (std::size_t k = 0; k < grid.count(); ++k)
    out.values[k] = model_cf(model, grid.node(k));
  return out;
}

CfDiagnostics event_diagnostics(const ComplexSeries& ecf, const std::optional<ComplexSeries>& exact)
{
  CfDiagnostics out;
  out.u_max = std::max(std::abs(ecf.grid.start()), std::abs(ecf.grid.stop()));
  out.min_modulus = std::numeric_limits<double>::infinity();
  for (const auto& v : ecf.values)
    out.min_modulus = std::min(out.min_modulus, std::abs(v));

  if (exact) {
    if (!(exact->grid == ecf.grid) || exact->values.size() != ecf.values.size())
      throw Error(ErrorCode::GridMismatch, "event_diagnostics: ecf and exact cf grids differ");
    double worst = 0.0;
    for (std::size_t k = 0; k < ecf.values.size(); ++k)
      worst = std::max(worst, std::abs(ecf.values[k] - exact->values[k]) / std::abs(exact->values[k]));
    out.max_relative_deviation = worst;
  }
  return out;
}

HValidity h_validity_check(const ComplexSeries& phi_circ, double sigma2, double tol)
{
  HValidity out;
  const auto& grid = phi_circ.grid;
  std::size_t closest = 0;
  for (std::size_t k = 0; k < grid.count(); ++k) {
    const double u = grid.node(k);
    const complex h = phi_circ.values[k] * std::exp(0.5 * u * u * sigma2);
    out.max_abs_H = std::max(out.max_abs_H, std::abs(h));
    if (std::abs(u) < std::abs(grid.node(closest)))
      closest = k;
  }
  const double u0 = grid.node(closest);
  out.H_at_zero = phi_circ.values[closest] * std::exp(0.5 * u0 * u0 * sigma2);
  out.passes_necessary = out.max_abs_H <= 1.0 + tol && std::abs(out.H_at_zero - 1.0) <= tol;
  return out;
}

} // namespace qid
