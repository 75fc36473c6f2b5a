#pragma once

#include <variant>
#include <vector>

#include "qid/core.hpp"

namespace qid {

//! Split |x| at its median; component variances are the halves' second
//! moments, p0 = 1/2.
struct MomentInit
{};

struct FixedInit
{
  double p0;
  double sigma1_sq;
  double sigma2_sq;
};

struct EmConfig
{
  int max_iters = 200;
  double loglik_tol = 1e-6;
  std::variant<MomentInit, FixedInit> init = MomentInit{};
};

//! Two zero-mean normal components, canonically ordered so that
//! sigma1_sq_hat <= sigma2_sq_hat; p_hat belongs to the smaller variance.
struct EmResult
{
  double p_hat = 0.0;
  double sigma1_sq_hat = 0.0;
  double sigma2_sq_hat = 0.0;
  //! Log-likelihood at the initial point followed by one entry per iteration.
  std::vector<double> loglik_trace;
  int iterations = 0;
  bool converged = false;
  //! max over E-steps and observations of |r1 + r2 - 1|.
  double max_responsibility_error = 0.0;
};

EmResult em_fit(const Sample& sample, const EmConfig& cfg = {});

} // namespace qid
