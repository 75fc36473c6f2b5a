#pragma once

#include <span>
#include <vector>

#include "qid/core.hpp"

//! Data-parallel inner loops of the estimators.
//!
//! `serial` holds straightforward reference implementations (one sin/cos per
//! term, original summation order). `parallel` holds the production versions:
//! OpenMP over output nodes, with complex exponentials advanced by a phasor
//! recurrence that restarts from an exact sin/cos every `kPhasorBlock` nodes.
//! Work is partitioned by node and every node is reduced by one thread in a
//! fixed order, so parallel results do not depend on the thread count.
namespace qid::kernels {

inline constexpr std::size_t kPhasorBlock = 64;

namespace serial {

//! (1/n) sum_j exp(i u_k x_j) for every node u_k.
std::vector<complex> ecf(std::span<const double> x, const UniformGrid& u);

//! (1/(n h)) sum_j K((x_j - t_k) / h) with the Epanechnikov kernel.
std::vector<double> kde(std::span<const double> x, double h, const UniformGrid& t);

//! (1/pi) * trapezoid over u of Re[exp(-i u x_k) psi(u)]: the inverse Fourier
//! transform of a Hermitian spectrum known on u >= 0.
std::vector<double> hermitian_inverse(std::span<const complex> psi,
                                      const UniformGrid& u,
                                      const UniformGrid& x);

//! Trapezoid over x of exp(i u_k x) f(x).
std::vector<complex> fourier_transform(std::span<const double> f,
                                       const UniformGrid& x,
                                       const UniformGrid& u);

} // namespace serial

namespace parallel {

std::vector<complex> ecf(std::span<const double> x, const UniformGrid& u);
std::vector<double> kde(std::span<const double> x, double h, const UniformGrid& t);
std::vector<double> hermitian_inverse(std::span<const complex> psi,
                                      const UniformGrid& u,
                                      const UniformGrid& x);
std::vector<complex> fourier_transform(std::span<const double> f,
                                       const UniformGrid& x,
                                       const UniformGrid& u);

} // namespace parallel

} // namespace qid::kernels
