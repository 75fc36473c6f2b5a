#include "qid/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qid::kernels::parallel {

namespace {

constexpr std::size_t kMinParallelWork = std::size_t{ 1 } << 15;

std::size_t block_count(std::size_t nodes)
{
  return (nodes + kPhasorBlock - 1) / kPhasorBlock;
}

} // namespace

std::vector<complex> ecf(std::span<const double> x, const UniformGrid& u)
{
  const std::size_t m = u.count();
  std::vector<complex> out(m);
  const double inv_n = 1.0 / static_cast<double>(x.size());
  const double du = u.spacing();
  const auto blocks = static_cast<long long>(block_count(m));
  const bool big = x.size() * m >= kMinParallelWork;

#pragma omp parallel for schedule(static) if (big)
  for (long long b = 0; b < blocks; ++b) {
    const std::size_t k0 = static_cast<std::size_t>(b) * kPhasorBlock;
    const std::size_t len = std::min(kPhasorBlock, m - k0);
    const double u0 = u.node(k0);
    double re[kPhasorBlock] = {};
    double im[kPhasorBlock] = {};
    for (double xj : x) {
      double zr = std::cos(u0 * xj);
      double zi = std::sin(u0 * xj);
      const double sr = std::cos(du * xj);
      const double si = std::sin(du * xj);
      for (std::size_t k = 0; k < len; ++k) {
        re[k] += zr;
        im[k] += zi;
        const double t = zr * sr - zi * si;
        zi = zr * si + zi * sr;
        zr = t;
      }
    }
    for (std::size_t k = 0; k < len; ++k)
      out[k0 + k] = { re[k] * inv_n, im[k] * inv_n };
  }

  if (const auto z = u.zero_index())
    out[*z] = { 1.0, 0.0 };
  return out;
}

std::vector<double> kde(std::span<const double> x, double h, const UniformGrid& t)
{
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out(t.count());
  const double scale = 1.0 / (static_cast<double>(x.size()) * h);
  const auto m = static_cast<long long>(t.count());

#pragma omp parallel for schedule(static) if (x.size() * t.count() >= kMinParallelWork)
  for (long long k = 0; k < m; ++k) {
    const double tk = t.node(static_cast<std::size_t>(k));
    auto it = std::lower_bound(sorted.begin(), sorted.end(), tk - h);
    double acc = 0.0;
    for (; it != sorted.end() && *it <= tk + h; ++it)
      acc += epanechnikov((*it - tk) / h);
    out[static_cast<std::size_t>(k)] = acc * scale;
  }
  return out;
}

std::vector<double> hermitian_inverse(std::span<const complex> psi,
                                      const UniformGrid& u,
                                      const UniformGrid& x)
{
  const std::size_t m = u.count();
  std::vector<double> out(x.count());
  const auto nx = static_cast<long long>(x.count());
  const double du = u.spacing();

#pragma omp parallel for schedule(static) if (m * x.count() >= kMinParallelWork)
  for (long long i = 0; i < nx; ++i) {
    const double xi = x.node(static_cast<std::size_t>(i));
    const double sr = std::cos(du * xi);
    const double si = -std::sin(du * xi);
    double acc = 0.0;
    for (std::size_t k0 = 0; k0 < m; k0 += kPhasorBlock) {
      const std::size_t k1 = std::min(k0 + kPhasorBlock, m);
      const double a0 = u.node(k0) * xi;
      double zr = std::cos(a0);
      double zi = -std::sin(a0);
      for (std::size_t k = k0; k < k1; ++k) {
        double term = zr * psi[k].real() - zi * psi[k].imag();
        if (k == 0 || k + 1 == m)
          term *= 0.5;
        acc += term;
        const double t = zr * sr - zi * si;
        zi = zr * si + zi * sr;
        zr = t;
      }
    }
    out[static_cast<std::size_t>(i)] = acc * du / std::numbers::pi;
  }
  return out;
}

std::vector<complex> fourier_transform(std::span<const double> f,
                                       const UniformGrid& x,
                                       const UniformGrid& u)
{
  const std::size_t m = x.count();
  std::vector<complex> out(u.count());
  const auto nu = static_cast<long long>(u.count());
  const double dx = x.spacing();

#pragma omp parallel for schedule(static) if (m * u.count() >= kMinParallelWork)
  for (long long k = 0; k < nu; ++k) {
    const double uk = u.node(static_cast<std::size_t>(k));
    const double sr = std::cos(dx * uk);
    const double si = std::sin(dx * uk);
    double re = 0.0, im = 0.0;
    for (std::size_t i0 = 0; i0 < m; i0 += kPhasorBlock) {
      const std::size_t i1 = std::min(i0 + kPhasorBlock, m);
      const double a0 = uk * x.node(i0);
      double zr = std::cos(a0);
      double zi = std::sin(a0);
      for (std::size_t i = i0; i < i1; ++i) {
        const double w = (i == 0 || i + 1 == m) ? 0.5 * f[i] : f[i];
        re += zr * w;
        im += zi * w;
        const double t = zr * sr - zi * si;
        zi = zr * si + zi * sr;
        zr = t;
      }
    }
    out[static_cast<std::size_t>(k)] = { re * dx, im * dx };
  }
  return out;
}

} // namespace qid::kernels::parallel
