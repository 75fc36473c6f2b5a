#include "qid/weights.hpp"

#include <cmath>
#include <sstream>

namespace qid {

namespace {

constexpr std::size_t kMinBandNodes = 16;

double integrate_product(const UniformGrid& band,
                         const std::vector<double>& a,
                         const std::vector<double>& b)
{
  std::vector<double> f(a.size());
  for (std::size_t k = 0; k < a.size(); ++k)
    f[k] = a[k] * b[k];
  return trapezoid_integrate(f, band);
}

} // namespace

BaseWeight::BaseWeight(double epsilon, WeightKind kind)
  : epsilon_(epsilon)
  , kind_(kind)
{
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw Error(ErrorCode::BadEpsilon, "base weight needs 0 < epsilon < 1");
}

double BaseWeight::operator()(double v) const noexcept
{
  if (v < epsilon_ || v > 1.0)
    return 0.0;
  if (kind_ == WeightKind::Indicator)
    return 1.0;
  const double t = (v - epsilon_) / (1.0 - epsilon_);
  const double q = t * (1.0 - t);
  return q > 0.0 ? std::exp(4.0 - 1.0 / q) : 0.0;
}

BaseWeight build_base_weight(double epsilon, WeightKind kind)
{
  return BaseWeight(epsilon, kind);
}

DerivedWeights derive_weights(const UniformGrid& grid, const BaseWeight& w, double U)
{
  if (!(U > 0.0) || !std::isfinite(U))
    throw Error(ErrorCode::InvalidArgument, "weight scale U must be positive");
  const double lo = w.epsilon() * U;
  const double slack = 1e-9 * grid.spacing();
  if (grid.stop() < U - slack || grid.start() > lo + slack) {
    std::ostringstream msg;
    msg << "frequency grid [" << grid.start() << ", " << grid.stop() << "] does not cover [" << lo
        << ", " << U << "]";
    throw Error(ErrorCode::GridTooCoarse, msg.str());
  }

  std::size_t first = grid.count(), last = 0;
  for (std::size_t k = 0; k < grid.count(); ++k) {
    const double u = grid.node(k);
    if (u >= lo - slack && u <= U + slack) {
      first = std::min(first, k);
      last = k;
    }
  }
  if (first == grid.count() || last + 1 - first < kMinBandNodes) {
    throw Error(ErrorCode::GridTooCoarse,
                "fewer than " + std::to_string(kMinBandNodes) + " grid nodes in [eps U, U]");
  }

  DerivedWeights out{ UniformGrid(grid.node(first), grid.node(last), last + 1 - first), first, {}, {}, {}, {}, {} };
  const std::size_t m = out.band.count();
  std::vector<double> u(m), half_sq(m);
  out.base.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    u[j] = grid.node(first + j);
    half_sq[j] = 0.5 * u[j] * u[j];
    out.base[j] = w.scaled(u[j], U);
  }

  auto& mom = out.moments;
  mom.m0 = trapezoid_integrate(out.base, out.band);
  mom.m2 = integrate_product(out.band, out.base, half_sq);
  std::vector<double> tmp(m);
  for (std::size_t j = 0; j < m; ++j)
    tmp[j] = out.base[j] * half_sq[j] * half_sq[j];
  mom.m4 = trapezoid_integrate(tmp, out.band);
  for (std::size_t j = 0; j < m; ++j)
    tmp[j] = out.base[j] * u[j] * u[j];
  mom.mg = trapezoid_integrate(tmp, out.band);

  const double det = mom.determinant();
  if (!(mom.m0 > 0.0) || !(mom.mg > 0.0) || !(det > 1e-12 * mom.m0 * mom.m4))
    throw Error(ErrorCode::SingularSystem, "weight moment system is singular");

  out.sigma2.resize(m);
  out.lambda_star.resize(m);
  out.gamma_star.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    out.sigma2[j] = -out.base[j] * (mom.m0 * half_sq[j] - mom.m2) / det;
    out.lambda_star[j] = -out.base[j] * (mom.m4 - mom.m2 * half_sq[j]) / det;
    out.gamma_star[j] = out.base[j] * u[j] / mom.mg;
  }
  return out;
}

SigmaLambda sigma_lambda_normal_equations(const LogCfSeries& logcf, const BaseWeight& w, double U)
{
  const auto dw = derive_weights(logcf.grid, w, U);
  const std::size_t m = dw.band.count();
  std::vector<double> wy(m), way(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double u = logcf.grid.node(dw.offset + j);
    const double y = logcf.real_part[dw.offset + j];
    wy[j] = dw.base[j] * y;
    way[j] = wy[j] * 0.5 * u * u;
  }
  const double b0 = trapezoid_integrate(wy, dw.band);
  const double b1 = trapezoid_integrate(way, dw.band);
  const auto& mom = dw.moments;
  const double det = mom.determinant();
  return { -(mom.m0 * b1 - mom.m2 * b0) / det, -(mom.m4 * b0 - mom.m2 * b1) / det };
}

double gamma_normal_equation(const LogCfSeries& logcf, const BaseWeight& w, double V)
{
  const auto dw = derive_weights(logcf.grid, w, V);
  const std::size_t m = dw.band.count();
  std::vector<double> wuy(m);
  for (std::size_t j = 0; j < m; ++j)
    wuy[j] = dw.base[j] * logcf.grid.node(dw.offset + j) * logcf.imag_part[dw.offset + j];
  return trapezoid_integrate(wuy, dw.band) / dw.moments.mg;
}

WeightIdentities derived_weight_identities(const BaseWeight& w, double U, std::size_t grid_count)
{
  const auto dw = derive_weights(UniformGrid(0.0, U, grid_count), w, U);
  const std::size_t m = dw.band.count();
  std::vector<double> u(m), half_sq(m);
  for (std::size_t j = 0; j < m; ++j) {
    u[j] = dw.band.node(j);
    half_sq[j] = 0.5 * u[j] * u[j];
  }
  std::vector<double> neg_lambda(m);
  for (std::size_t j = 0; j < m; ++j)
    neg_lambda[j] = -dw.lambda_star[j];

  WeightIdentities out{};
  out.check_sigma = { trapezoid_integrate(dw.sigma2, dw.band),
                      -integrate_product(dw.band, dw.sigma2, half_sq) };
  out.check_lambda = { trapezoid_integrate(neg_lambda, dw.band),
                       integrate_product(dw.band, dw.lambda_star, half_sq) };
  out.check_gamma = integrate_product(dw.band, dw.gamma_star, u);
  return out;
}

} // namespace qid
