#pragma once

#include <optional>
#include <vector>

#include "qid/core.hpp"
#include "qid/models.hpp"

namespace qid {

//! Complex values on a uniform frequency grid.
struct ComplexSeries
{
  UniformGrid grid;
  std::vector<complex> values;
};

//! Distinguished logarithm: ln|cf| and the continuous argument, anchored at
//! 0 on the u = 0 node.
struct LogCfSeries
{
  UniformGrid grid;
  std::vector<double> real_part;
  std::vector<double> imag_part;

  complex at(std::size_t k) const { return { real_part[k], imag_part[k] }; }
};

struct CfDiagnostics
{
  double min_modulus = 0.0;
  //! sup_k |ecf - cf| / |cf|; only available when the true cf is known.
  std::optional<double> max_relative_deviation;
  double u_max = 0.0;
};

inline constexpr double kDefaultModulusFloor = 1e-6;

ComplexSeries ecf_on_grid(const Sample& sample, const UniformGrid& grid);

//! Unwraps the argument node by node from the u = 0 anchor (outwards in both
//! directions on a two-sided grid). Each step adds the principal value of
//! arg(c_k / c_{k-1}); that only recovers the true branch while the phase
//! changes by less than pi per grid step.
LogCfSeries distinguished_log(const ComplexSeries& cf, double modulus_floor = kDefaultModulusFloor);

ComplexSeries exact_cf(const ModelSpec& model, const UniformGrid& grid);

CfDiagnostics event_diagnostics(const ComplexSeries& ecf,
                                const std::optional<ComplexSeries>& exact = std::nullopt);

struct HValidity
{
  double max_abs_H = 0.0;
  complex H_at_zero;
  bool passes_necessary = false;
};

//! H(u) = phi_circ(u) exp(u^2 sigma2 / 2). Checks the necessary conditions
//! |H| <= 1 + tol and H(0) = 1 only; H(0) is taken at the node closest to 0.
HValidity h_validity_check(const ComplexSeries& phi_circ, double sigma2, double tol = 1e-9);

} // namespace qid
