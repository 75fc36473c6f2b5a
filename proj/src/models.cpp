#include "qid/models.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qid/rng.hpp"

namespace qid {

namespace {

template<class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};

[[noreturn]] void bad_spec(const std::string& what)
{
  throw Error(ErrorCode::BadSpec, "invalid model spec: " + what);
}

bool positive_finite(double v)
{
  return std::isfinite(v) && v > 0.0;
}

double bart_p(const BartSimpsonModified& m)
{
  return 0.5 + m.delta;
}

// (1 + 2 cos(u/2) + 2 cos(u)) / 5: cf of the uniform lattice {-1, -1/2, 0, 1/2, 1}.
double bart_lattice_cf(double u)
{
  return (1.0 + 2.0 * std::cos(0.5 * u) + 2.0 * std::cos(u)) / 5.0;
}

double student_cf(double dof, double u)
{
  const double a = std::sqrt(dof) * std::abs(u);
  if (a == 0.0)
    return 1.0;
  if (dof == 3.0)
    return (1.0 + a) * std::exp(-a);
  const double half = 0.5 * dof;
  return std::pow(a, half) * std::cyl_bessel_k(half, a) /
         (std::tgamma(half) * std::pow(2.0, half - 1.0));
}

double student_pdf(double dof, double x)
{
  const double c = std::exp(std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof)) /
                   std::sqrt(dof * std::numbers::pi);
  return c * std::pow(1.0 + x * x / dof, -0.5 * (dof + 1.0));
}

// Density of t(dof) (+) N(0, var) by trapezoid over the Gaussian factor on
// +-14 sd with 2801 nodes; the integrand is smooth, so the rule converges
// geometrically and the result is oracle grade.
double student_normal_convolution(double dof, double var, double x)
{
  constexpr int kNodes = 2801;
  const double sd = std::sqrt(var);
  const double half_width = 14.0 * sd;
  const double dz = 2.0 * half_width / (kNodes - 1);
  double acc = 0.0;
  for (int i = 0; i < kNodes; ++i) {
    const double z = -half_width + dz * i;
    const double w = (i == 0 || i == kNodes - 1) ? 0.5 : 1.0;
    acc += w * normal_pdf(z, var) * student_pdf(dof, x - z);
  }
  return acc * dz;
}

double draw_student(PhiloxStream& rng, int dof)
{
  const double z = rng.normal();
  double chi2 = 0.0;
  for (int i = 0; i < dof; ++i) {
    const double g = rng.normal();
    chi2 += g * g;
  }
  return z / std::sqrt(chi2 / dof);
}

// Smallest m with r^m / m < tol, or throws when max_terms is not enough.
int series_terms(double r, const NuTildeSeriesConfig& cfg)
{
  if (cfg.max_terms < 1 || !(cfg.tail_tol > 0.0))
    throw Error(ErrorCode::InvalidArgument, "nu_tilde: max_terms >= 1 and tail_tol > 0 required");
  double rm = 1.0;
  for (int m = 1; m <= cfg.max_terms; ++m) {
    rm *= r;
    if (rm / m < cfg.tail_tol)
      return m;
  }
  std::ostringstream msg;
  msg << "nu_tilde series not converged: ratio (1-p)/p = " << r << " needs more than "
      << cfg.max_terms << " terms for tail_tol " << cfg.tail_tol;
  throw Error(ErrorCode::SeriesNotConverged, msg.str(), cfg.max_terms);
}

} // namespace

void validate(const ModelSpec& spec)
{
  std::visit(overloaded{
               [](const TwoNormalMixture& m) {
                 if (!(m.p > 0.5 && m.p < 1.0))
                   bad_spec("TwoNormalMixture needs 1/2 < p < 1");
                 if (!positive_finite(m.sigma1_sq) || !positive_finite(m.sigma2_sq) ||
                     !(m.sigma1_sq < m.sigma2_sq))
                   bad_spec("TwoNormalMixture needs 0 < sigma1_sq < sigma2_sq");
               },
               [](const BartSimpsonModified& m) {
                 if (!(m.delta > 0.0 && m.delta < 0.5))
                   bad_spec("BartSimpsonModified needs 0 < delta < 1/2");
                 if (!positive_finite(m.sigma1) || !positive_finite(m.sigma2) ||
                     !(m.sigma1 < m.sigma2))
                   bad_spec("BartSimpsonModified needs 0 < sigma1 < sigma2");
               },
               [](const StudentPlusNormalMixture& m) {
                 if (!(m.p > 0.5 && m.p < 1.0))
                   bad_spec("StudentPlusNormalMixture needs 1/2 < p < 1");
                 if (!(m.dof >= 3.0) || m.dof != std::floor(m.dof) || m.dof > 1000.0)
                   bad_spec("StudentPlusNormalMixture needs an integer dof >= 3");
                 if (!positive_finite(m.sigma1_sq) || !positive_finite(m.sigma2_sq) ||
                     !(m.sigma1_sq < m.sigma2_sq))
                   bad_spec("StudentPlusNormalMixture needs 0 < sigma1_sq < sigma2_sq");
               },
               [](const PureNormal& m) {
                 if (!positive_finite(m.sigma_sq))
                   bad_spec("PureNormal needs sigma_sq > 0");
               },
             },
             spec);
}

std::string model_tag(const ModelSpec& spec)
{
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
               [&](const TwoNormalMixture& m) {
                 os << "two_normal_mixture(" << m.p << "," << m.sigma1_sq << "," << m.sigma2_sq << ")";
               },
               [&](const BartSimpsonModified& m) {
                 os << "bart_simpson_modified(" << m.delta << "," << m.sigma1 << "," << m.sigma2 << ")";
               },
               [&](const StudentPlusNormalMixture& m) {
                 os << "student_plus_normal_mixture(" << m.p << "," << m.dof << "," << m.sigma1_sq
                    << "," << m.sigma2_sq << ")";
               },
               [&](const PureNormal& m) { os << "pure_normal(" << m.sigma_sq << ")"; },
             },
             spec);
  return os.str();
}

double main_weight(const ModelSpec& spec)
{
  return std::visit(overloaded{
                      [](const TwoNormalMixture& m) { return m.p; },
                      [](const BartSimpsonModified& m) { return bart_p(m); },
                      [](const StudentPlusNormalMixture& m) { return m.p; },
                      [](const PureNormal&) { return 1.0; },
                    },
                    spec);
}

double main_variance(const ModelSpec& spec)
{
  return std::visit(overloaded{
                      [](const TwoNormalMixture& m) { return m.sigma1_sq; },
                      [](const BartSimpsonModified& m) { return m.sigma1 * m.sigma1; },
                      [](const StudentPlusNormalMixture& m) { return m.sigma1_sq; },
                      [](const PureNormal& m) { return m.sigma_sq; },
                    },
                    spec);
}

complex contaminant_cf(const ModelSpec& spec, double u)
{
  const double u2 = u * u;
  return std::visit(overloaded{
                      [&](const TwoNormalMixture& m) { return complex(std::exp(-0.5 * m.sigma2_sq * u2)); },
                      [&](const BartSimpsonModified& m) {
                        return complex(std::exp(-0.5 * m.sigma2 * m.sigma2 * u2) * bart_lattice_cf(u));
                      },
                      [&](const StudentPlusNormalMixture& m) {
                        return complex(student_cf(m.dof, u) * std::exp(-0.5 * m.sigma2_sq * u2));
                      },
                      [&](const PureNormal&) -> complex {
                        throw Error(ErrorCode::UnsupportedSpec, "PureNormal has no contaminant component");
                      },
                    },
                    spec);
}

complex model_cf(const ModelSpec& spec, double u)
{
  const double main = std::exp(-0.5 * main_variance(spec) * u * u);
  if (std::holds_alternative<PureNormal>(spec))
    return main;
  const double p = main_weight(spec);
  return p * main + (1.0 - p) * contaminant_cf(spec, u);
}

Sample sample_model(const ModelSpec& spec, std::size_t n, std::uint64_t seed, std::uint64_t substream)
{
  validate(spec);
  PhiloxStream rng(seed, substream);
  Sample out;
  out.values.resize(n);
  out.seed = seed;
  out.model_tag = model_tag(spec);

  std::visit(overloaded{
               [&](const TwoNormalMixture& m) {
                 const double s1 = std::sqrt(m.sigma1_sq), s2 = std::sqrt(m.sigma2_sq);
                 for (auto& x : out.values) {
                   const bool main = rng.uniform() < m.p;
                   x = (main ? s1 : s2) * rng.normal();
                 }
               },
               [&](const BartSimpsonModified& m) {
                 const double p = bart_p(m);
                 for (auto& x : out.values) {
                   if (rng.uniform() < p) {
                     x = m.sigma1 * rng.normal();
                   } else {
                     const double centre = 0.5 * rng.below(5) - 1.0;
                     x = centre + m.sigma2 * rng.normal();
                   }
                 }
               },
               [&](const StudentPlusNormalMixture& m) {
                 const double s1 = std::sqrt(m.sigma1_sq), s2 = std::sqrt(m.sigma2_sq);
                 const int dof = static_cast<int>(m.dof);
                 for (auto& x : out.values) {
                   if (rng.uniform() < m.p) {
                     x = s1 * rng.normal();
                   } else {
                     const double t = draw_student(rng, dof);
                     x = t + s2 * rng.normal();
                   }
                 }
               },
               [&](const PureNormal& m) {
                 const double s = std::sqrt(m.sigma_sq);
                 for (auto& x : out.values)
                   x = s * rng.normal();
               },
             },
             spec);
  return out;
}

DensityCurve exact_g_circ(const ModelSpec& spec, const UniformGrid& x_grid)
{
  validate(spec);
  DensityCurve out{ x_grid, std::vector<double>(x_grid.count()) };
  std::visit(overloaded{
               [&](const TwoNormalMixture& m) {
                 for (std::size_t k = 0; k < x_grid.count(); ++k)
                   out.values[k] = normal_pdf(x_grid.node(k), m.sigma2_sq);
               },
               [&](const BartSimpsonModified& m) {
                 const double var = m.sigma2 * m.sigma2;
                 for (std::size_t k = 0; k < x_grid.count(); ++k) {
                   double acc = 0.0;
                   for (int j = 0; j < 5; ++j)
                     acc += normal_pdf(x_grid.node(k) - (0.5 * j - 1.0), var);
                   out.values[k] = acc / 5.0;
                 }
               },
               [&](const StudentPlusNormalMixture& m) {
                 for (std::size_t k = 0; k < x_grid.count(); ++k)
                   out.values[k] = student_normal_convolution(m.dof, m.sigma2_sq, x_grid.node(k));
               },
               [&](const PureNormal&) {
                 throw Error(ErrorCode::BadSpec, "exact_g_circ needs a mixture spec");
               },
             },
             spec);
  return out;
}

DensityCurve exact_density(const ModelSpec& spec, const UniformGrid& x_grid)
{
  validate(spec);
  const double var = main_variance(spec);
  if (std::holds_alternative<PureNormal>(spec)) {
    DensityCurve out{ x_grid, std::vector<double>(x_grid.count()) };
    for (std::size_t k = 0; k < x_grid.count(); ++k)
      out.values[k] = normal_pdf(x_grid.node(k), var);
    return out;
  }
  const double p = main_weight(spec);
  DensityCurve out = exact_g_circ(spec, x_grid);
  for (std::size_t k = 0; k < x_grid.count(); ++k)
    out.values[k] = p * normal_pdf(x_grid.node(k), var) + (1.0 - p) * out.values[k];
  return out;
}

NuTildeResult nu_tilde_density(const ModelSpec& spec,
                               const UniformGrid& x_grid,
                               const NuTildeSeriesConfig& cfg)
{
  validate(spec);
  NuTildeResult out{ DensityCurve{ x_grid, std::vector<double>(x_grid.count(), 0.0) }, 0 };
  auto& values = out.density.values;

  std::visit(overloaded{
               [&](const TwoNormalMixture& m) {
                 const double r = (1.0 - m.p) / m.p;
                 const double d = m.sigma2_sq - m.sigma1_sq;
                 out.terms = series_terms(r, cfg);
                 double rm = 1.0;
                 for (int j = 1; j <= out.terms; ++j) {
                   rm *= r;
                   const double coeff = (j % 2 == 1 ? 1.0 : -1.0) * rm / j;
                   for (std::size_t k = 0; k < x_grid.count(); ++k)
                     values[k] += coeff * normal_pdf(x_grid.node(k), j * d);
                 }
               },
               [&](const BartSimpsonModified& m) {
                 const double p = bart_p(m);
                 const double r = (1.0 - p) / p;
                 const double d = m.sigma2 * m.sigma2 - m.sigma1 * m.sigma1;
                 out.terms = series_terms(r, cfg);
                 // probs[s] = P(sum of j lattice indices = s), indices uniform on 0..4
                 std::vector<double> probs{ 1.0 };
                 double rm = 1.0;
                 for (int j = 1; j <= out.terms; ++j) {
                   std::vector<double> next(probs.size() + 4, 0.0);
                   for (std::size_t s = 0; s < probs.size(); ++s)
                     for (int a = 0; a < 5; ++a)
                       next[s + a] += probs[s] / 5.0;
                   probs.swap(next);
                   rm *= r;
                   const double coeff = (j % 2 == 1 ? 1.0 : -1.0) * rm / j;
                   for (std::size_t s = 0; s < probs.size(); ++s) {
                     const double centre = 0.5 * static_cast<double>(s) - j;
                     for (std::size_t k = 0; k < x_grid.count(); ++k)
                       values[k] += coeff * probs[s] * normal_pdf(x_grid.node(k) - centre, j * d);
                   }
                 }
               },
               [&](const StudentPlusNormalMixture&) {
                 throw Error(ErrorCode::UnsupportedSpec,
                             "nu_tilde series needs closed-form convolution powers; not available for "
                             "the Student component");
               },
               [&](const PureNormal&) { out.terms = 0; },
             },
             spec);
  return out;
}

ExactTriplet exact_triplet(const ModelSpec& spec)
{
  validate(spec);
  const double p = main_weight(spec);
  return { 0.0, main_variance(spec), -std::log(p), p };
}

} // namespace qid
