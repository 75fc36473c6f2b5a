#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "qid/core.hpp"

namespace qid {

//! p N(0, sigma1_sq) + (1 - p) N(0, sigma2_sq); 1/2 < p < 1, sigma1_sq < sigma2_sq.
struct TwoNormalMixture
{
  double p;
  double sigma1_sq;
  double sigma2_sq;
};

//! (1/2 + delta) N(0, sigma1^2) + (1/2 - delta)/5 sum_{j=0..4} N(j/2 - 1, sigma2^2).
//! Note the standard deviations (not variances) are the parameters here.
struct BartSimpsonModified
{
  double delta;
  double sigma1;
  double sigma2;
};

//! p N(0, sigma1_sq) + (1 - p) [t(dof) (+) N(0, sigma2_sq)], (+) = convolution.
struct StudentPlusNormalMixture
{
  double p;
  double dof;
  double sigma1_sq;
  double sigma2_sq;
};

struct PureNormal
{
  double sigma_sq;
};

using ModelSpec =
  std::variant<TwoNormalMixture, BartSimpsonModified, StudentPlusNormalMixture, PureNormal>;

//! Throws BadSpec when the parameter constraints of the variant do not hold.
void validate(const ModelSpec& spec);

std::string model_tag(const ModelSpec& spec);

//! Weight of the main N(0, sigma^2) component (1 for PureNormal).
double main_weight(const ModelSpec& spec);
//! Variance of the main normal component.
double main_variance(const ModelSpec& spec);

//! Characteristic function of the full law at u.
complex model_cf(const ModelSpec& spec, double u);
//! Characteristic function of the contaminant component at u.
complex contaminant_cf(const ModelSpec& spec, double u);

Sample sample_model(const ModelSpec& spec, std::size_t n, std::uint64_t seed, std::uint64_t substream = 0);

DensityCurve exact_density(const ModelSpec& spec, const UniformGrid& x_grid);
DensityCurve exact_g_circ(const ModelSpec& spec, const UniformGrid& x_grid);

struct NuTildeSeriesConfig
{
  int max_terms = 60;
  double tail_tol = 1e-12;
};

struct NuTildeResult
{
  DensityCurve density;
  int terms = 0;
};

//! Density of the signed jump measure, summed from the alternating
//! convolution-power series sum_m (-1)^{m+1}/m ((1-p)/p)^m Lambda^{*m}.
//! Supported where Lambda^{*m} is closed form: TwoNormalMixture,
//! BartSimpsonModified (Gaussian-smoothed lattice) and PureNormal (zero).
NuTildeResult nu_tilde_density(const ModelSpec& spec,
                               const UniformGrid& x_grid,
                               const NuTildeSeriesConfig& cfg = {});

struct ExactTriplet
{
  double gamma_star;
  double sigma2;
  double lambda_star;
  double p;
};

ExactTriplet exact_triplet(const ModelSpec& spec);

} // namespace qid
