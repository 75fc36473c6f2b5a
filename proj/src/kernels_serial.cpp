#include "qid/kernels.hpp"

#include <cmath>
#include <numbers>

namespace qid::kernels::serial {

std::vector<complex> ecf(std::span<const double> x, const UniformGrid& u)
{
  std::vector<complex> out(u.count());
  const double inv_n = 1.0 / static_cast<double>(x.size());
  for (std::size_t k = 0; k < u.count(); ++k) {
    const double uk = u.node(k);
    double re = 0.0, im = 0.0;
    for (double xj : x) {
      re += std::cos(uk * xj);
      im += std::sin(uk * xj);
    }
    out[k] = { re * inv_n, im * inv_n };
  }
  return out;
}

std::vector<double> kde(std::span<const double> x, double h, const UniformGrid& t)
{
  std::vector<double> out(t.count());
  const double scale = 1.0 / (static_cast<double>(x.size()) * h);
  for (std::size_t k = 0; k < t.count(); ++k) {
    const double tk = t.node(k);
    double acc = 0.0;
    for (double xj : x)
      acc += epanechnikov((xj - tk) / h);
    out[k] = acc * scale;
  }
  return out;
}

std::vector<double> hermitian_inverse(std::span<const complex> psi,
                                      const UniformGrid& u,
                                      const UniformGrid& x)
{
  std::vector<double> out(x.count());
  std::vector<double> integrand(u.count());
  for (std::size_t i = 0; i < x.count(); ++i) {
    const double xi = x.node(i);
    for (std::size_t k = 0; k < u.count(); ++k) {
      const double a = u.node(k) * xi;
      integrand[k] = std::cos(a) * psi[k].real() + std::sin(a) * psi[k].imag();
    }
    out[i] = trapezoid_integrate(integrand, u) / std::numbers::pi;
  }
  return out;
}

std::vector<complex> fourier_transform(std::span<const double> f,
                                       const UniformGrid& x,
                                       const UniformGrid& u)
{
  std::vector<complex> out(u.count());
  std::vector<complex> integrand(x.count());
  for (std::size_t k = 0; k < u.count(); ++k) {
    const double uk = u.node(k);
    for (std::size_t i = 0; i < x.count(); ++i) {
      const double a = uk * x.node(i);
      integrand[i] = { std::cos(a) * f[i], std::sin(a) * f[i] };
    }
    out[k] = trapezoid_integrate(integrand, x);
  }
  return out;
}

} // namespace qid::kernels::serial
