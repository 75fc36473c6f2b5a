#pragma once

#include <utility>
#include <vector>

#include "qid/charfn.hpp"
#include "qid/core.hpp"

namespace qid {

enum class WeightKind { Indicator, SmoothBump };

//! Base weight w on the reference interval: zero outside [epsilon, 1].
//! SmoothBump is exp(4 - 1/(t(1-t))) with t = (v - epsilon)/(1 - epsilon),
//! C-infinity with every derivative vanishing at both ends.
class BaseWeight
{
public:
  BaseWeight(double epsilon, WeightKind kind);

  double epsilon() const noexcept { return epsilon_; }
  WeightKind kind() const noexcept { return kind_; }

  double operator()(double v) const noexcept;

  //! w^U(u) = U^{-1} w(u / U).
  double scaled(double u, double U) const noexcept { return (*this)(u / U) / U; }

private:
  double epsilon_;
  WeightKind kind_;
};

BaseWeight build_base_weight(double epsilon, WeightKind kind);

//! Moments of w^U: m0 = int w, m2 = int w u^2/2, m4 = int w u^4/4, mg = int w u^2.
struct WeightMoments
{
  double m0 = 0.0;
  double m2 = 0.0;
  double m4 = 0.0;
  double mg = 0.0;

  double determinant() const noexcept { return m0 * m4 - m2 * m2; }
};

//! w^U and the derived families on the nodes of a frequency grid that fall in
//! [epsilon U, U]. All integrals against these use the trapezoid rule on
//! `band` (the sub-grid of in-band nodes); node j of the band is node
//! `offset + j` of the parent grid.
struct DerivedWeights
{
  UniformGrid band;
  std::size_t offset = 0;
  WeightMoments moments;
  std::vector<double> base;
  std::vector<double> sigma2;
  std::vector<double> lambda_star;
  std::vector<double> gamma_star;
};

//! Throws GridTooCoarse when the grid does not reach U or fewer than 16 nodes
//! fall in the band; SingularSystem when m0 m4 - m2^2 vanishes numerically.
DerivedWeights derive_weights(const UniformGrid& grid, const BaseWeight& w, double U);

struct SigmaLambda
{
  double sigma2;
  double lambda_star;
};

//! Weighted least squares fit of Re log cf(u) ~ -sigma2 u^2/2 - lambda_star on [eps U, U]
//! through the 2x2 normal equations.
SigmaLambda sigma_lambda_normal_equations(const LogCfSeries& logcf, const BaseWeight& w, double U);

//! Weighted least squares slope of Im log cf(u) ~ gamma u on [eps V, V].
double gamma_normal_equation(const LogCfSeries& logcf, const BaseWeight& w, double V);

struct WeightIdentities
{
  //! (int w_sigma2, int -u^2/2 w_sigma2): expected (0, 1).
  std::pair<double, double> check_sigma;
  //! (int -w_lambda, int u^2/2 w_lambda): expected (1, 0).
  std::pair<double, double> check_lambda;
  //! int u w_gamma: expected 1.
  double check_gamma;
};

WeightIdentities derived_weight_identities(const BaseWeight& w, double U, std::size_t grid_count = 4096);

} // namespace qid
