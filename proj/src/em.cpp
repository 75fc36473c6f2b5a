#include "qid/em.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qid {

namespace {

constexpr double kMinVariance = 1e-12;

struct Params
{
  double p;
  double s1;
  double s2;
};

struct EStep
{
  double loglik = 0.0;
  double max_sum_error = 0.0;
};

// Posterior weight of component 1 per observation; returns the log-likelihood
// of the current parameters.
EStep expectation(std::span<const double> x, const Params& th, std::vector<double>& r1, std::vector<double>& r2)
{
  const double log_norm = 0.5 * std::log(2.0 * std::numbers::pi);
  const double a1 = std::log(th.p) - 0.5 * std::log(th.s1) - log_norm;
  const double a2 = std::log1p(-th.p) - 0.5 * std::log(th.s2) - log_norm;
  EStep out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x2 = x[i] * x[i];
    const double l1 = a1 - 0.5 * x2 / th.s1;
    const double l2 = a2 - 0.5 * x2 / th.s2;
    const double hi = std::max(l1, l2);
    out.loglik += hi + std::log1p(std::exp(std::min(l1, l2) - hi));
    const double d = l2 - l1;
    r1[i] = 1.0 / (1.0 + std::exp(d));
    r2[i] = 1.0 / (1.0 + std::exp(-d));
    out.max_sum_error = std::max(out.max_sum_error, std::abs(r1[i] + r2[i] - 1.0));
  }
  return out;
}

Params maximization(std::span<const double> x, const std::vector<double>& r1, const std::vector<double>& r2)
{
  double w1 = 0.0, w2 = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x2 = x[i] * x[i];
    w1 += r1[i];
    w2 += r2[i];
    m1 += r1[i] * x2;
    m2 += r2[i] * x2;
  }
  if (!(w1 > 0.0) || !(w2 > 0.0))
    throw Error(ErrorCode::DegenerateComponent, "EM: a component lost all responsibility");
  const Params th{ w1 / (w1 + w2), m1 / w1, m2 / w2 };
  if (!(th.s1 >= kMinVariance) || !(th.s2 >= kMinVariance) || !(th.p > 0.0 && th.p < 1.0))
    throw Error(ErrorCode::DegenerateComponent, "EM: component variance collapsed below 1e-12");
  return th;
}

Params moment_init(std::span<const double> x)
{
  std::vector<double> mags(x.size());
  std::transform(x.begin(), x.end(), mags.begin(), [](double v) { return std::abs(v); });
  const auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
  std::nth_element(mags.begin(), mid, mags.end());
  const double median = *mid;

  double lo_sum = 0.0, hi_sum = 0.0;
  std::size_t lo_n = 0, hi_n = 0;
  for (double v : x) {
    if (std::abs(v) <= median) {
      lo_sum += v * v;
      ++lo_n;
    } else {
      hi_sum += v * v;
      ++hi_n;
    }
  }
  const double s1 = lo_n ? lo_sum / lo_n : 0.0;
  const double s2 = hi_n ? hi_sum / hi_n : 0.0;
  if (!(s1 >= kMinVariance) || !(s2 >= kMinVariance))
    throw Error(ErrorCode::DegenerateComponent, "EM: moment initialisation gives a zero variance");
  return { 0.5, s1, s2 };
}

} // namespace

EmResult em_fit(const Sample& sample, const EmConfig& cfg)
{
  if (sample.size() < 10)
    throw Error(ErrorCode::TooFewObservations, "em_fit needs at least 10 observations");
  if (cfg.max_iters < 1 || !(cfg.loglik_tol > 0.0))
    throw Error(ErrorCode::InvalidArgument, "em_fit: max_iters >= 1 and loglik_tol > 0 required");

  const std::span<const double> x(sample.values);
  Params th;
  if (const auto* fixed = std::get_if<FixedInit>(&cfg.init)) {
    th = { fixed->p0, fixed->sigma1_sq, fixed->sigma2_sq };
    if (!(th.p > 0.0 && th.p < 1.0) || !(th.s1 > 0.0) || !(th.s2 > 0.0))
      throw Error(ErrorCode::InvalidArgument, "em_fit: fixed initialisation out of range");
  } else {
    th = moment_init(x);
  }

  EmResult out;
  std::vector<double> r1(x.size()), r2(x.size());
  auto e = expectation(x, th, r1, r2);
  out.loglik_trace.push_back(e.loglik);
  out.max_responsibility_error = e.max_sum_error;

  for (int it = 1; it <= cfg.max_iters; ++it) {
    th = maximization(x, r1, r2);
    e = expectation(x, th, r1, r2);
    out.max_responsibility_error = std::max(out.max_responsibility_error, e.max_sum_error);
    const double gain = e.loglik - out.loglik_trace.back();
    out.loglik_trace.push_back(e.loglik);
    out.iterations = it;
    if (gain < cfg.loglik_tol) {
      out.converged = true;
      break;
    }
  }

  if (th.s1 > th.s2)
    th = { 1.0 - th.p, th.s2, th.s1 };
  out.p_hat = th.p;
  out.sigma1_sq_hat = th.s1;
  out.sigma2_sq_hat = th.s2;
  return out;
}

} // namespace qid
