#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qid/charfn.hpp"

using namespace qid;
using doctest::Approx;

namespace {

ComplexSeries series(const UniformGrid& g, auto fn)
{
  ComplexSeries out{ g, {} };
  for (auto u : g.nodes())
    out.values.push_back(fn(u));
  return out;
}

} // namespace

TEST_CASE("ecf of a point mass at zero and the u = 0 node")
{
  const UniformGrid g(-3.0, 5.0, 161);
  const auto e = ecf_on_grid(Sample{ { 0.0, 0.0, 0.0 } }, g);
  for (const auto& v : e.values) {
    CHECK(v.real() == 1.0);
    CHECK(v.imag() == 0.0);
  }
  const auto s = sample_model(TwoNormalMixture{ 0.75, 0.1, 0.5 }, 777, 3);
  const auto f = ecf_on_grid(s, g);
  const auto z = *g.zero_index();
  CHECK(f.values[z] == complex(1.0, 0.0));
  for (const auto& v : f.values)
    CHECK(std::abs(v) <= 1.0 + 1e-15);

  CHECK_THROWS_AS(ecf_on_grid(Sample{}, g), Error);
}

TEST_CASE("ecf Hermitian symmetry on a symmetric grid")
{
  const auto s = sample_model(StudentPlusNormalMixture{ 0.75, 3, 0.2, 0.5 }, 2000, 11);
  const UniformGrid g(-8.0, 8.0, 1601);
  const auto f = ecf_on_grid(s, g);
  for (std::size_t k = 0; k < g.count(); ++k) {
    const auto mirror = f.values[g.count() - 1 - k];
    CHECK(std::abs(f.values[k] - std::conj(mirror)) < 1e-12);
  }
}

TEST_CASE("ecf of N(0, 0.1) at u = 8")
{
  const std::size_t n = 100000;
  const auto s = sample_model(PureNormal{ 0.1 }, n, 8);
  const auto f = ecf_on_grid(s, UniformGrid(0.0, 8.0, 2));
  CHECK(std::exp(-3.2) == Approx(0.040762).epsilon(1e-5));
  CHECK(std::abs(f.values[1] - std::exp(-3.2)) < 3.0 / std::sqrt(double(n)));
}

TEST_CASE("distinguished log of real positive and rotating cfs")
{
  const UniformGrid g(0.0, 8.0, 4096);
  const auto gauss = distinguished_log(series(g, [](double u) { return complex(std::exp(-0.15 * u * u)); }));
  for (std::size_t k = 0; k < g.count(); ++k) {
    CHECK(gauss.imag_part[k] == 0.0);
    CHECK(gauss.real_part[k] == Approx(-0.15 * g.node(k) * g.node(k)).epsilon(1e-12));
  }

  const auto shift = distinguished_log(series(g, [](double u) { return std::polar(1.0, 5.0 * u); }));
  for (std::size_t k = 0; k < g.count(); k += 97)
    CHECK(shift.imag_part[k] == Approx(5.0 * g.node(k)).epsilon(1e-12));
  CHECK(shift.imag_part.back() == Approx(40.0).epsilon(1e-12));
}

TEST_CASE("distinguished log on a two-sided grid unwraps outwards from zero")
{
  const UniformGrid g(-8.0, 8.0, 8001);
  const auto lc = distinguished_log(series(g, [](double u) { return std::polar(std::exp(-0.05 * u * u), 3.0 * u); }));
  const auto z = *g.zero_index();
  CHECK(lc.real_part[z] == 0.0);
  CHECK(lc.imag_part[z] == 0.0);
  CHECK(lc.imag_part.front() == Approx(-24.0).epsilon(1e-12));
  CHECK(lc.imag_part.back() == Approx(24.0).epsilon(1e-12));
  for (std::size_t k = 1; k < g.count(); ++k)
    CHECK(std::abs(lc.imag_part[k] - lc.imag_part[k - 1]) < std::numbers::pi);
}

TEST_CASE("distinguished log round trip and symmetric samples")
{
  const UniformGrid g(0.0, 6.0, 4096);
  Sample s = sample_model(TwoNormalMixture{ 0.75, 0.1, 0.5 }, 3000, 21);
  for (auto& v : s.values)
    v += 0.4;
  const auto f = ecf_on_grid(s, g);
  const auto lc = distinguished_log(f);
  for (std::size_t k = 0; k < g.count(); ++k)
    CHECK(std::abs(std::exp(lc.at(k)) - f.values[k]) <= 1e-12 * std::abs(f.values[k]));

  Sample sym = sample_model(PureNormal{ 0.3 }, 1000, 4);
  const auto half = sym.values;
  for (double v : half)
    sym.values.push_back(-v);
  const auto ls = distinguished_log(ecf_on_grid(sym, UniformGrid(0.0, 3.0, 1024)));
  for (double im : ls.imag_part)
    CHECK(std::abs(im) < 1e-12);
}

TEST_CASE("distinguished log errors")
{
  try {
    distinguished_log(series(UniformGrid(1.0, 2.0, 10), [](double) { return complex(1.0); }));
    FAIL("expected MissingAnchor");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingAnchor);
  }
  const UniformGrid g(0.0, std::numbers::pi, 3);
  try {
    distinguished_log(series(g, [](double u) { return complex(std::cos(u)); }));
    FAIL("expected NearZeroModulus");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NearZeroModulus);
    REQUIRE(e.index());
    REQUIRE(e.location());
    CHECK(g.node(static_cast<std::size_t>(*e.index())) == *e.location());
  }
}

TEST_CASE("exact cfs")
{
  const UniformGrid g(0.0, 8.0, 9);
  const auto n = exact_cf(PureNormal{ 0.3 }, g);
  for (std::size_t k = 0; k < g.count(); ++k)
    CHECK(n.values[k].real() == Approx(std::exp(-0.15 * g.node(k) * g.node(k))));

  const auto mix = exact_cf(TwoNormalMixture{ 0.75, 0.1, 0.5 }, g);
  CHECK(mix.values[8].real() == Approx(0.75 * std::exp(-3.2) + 0.25 * std::exp(-16.0)).epsilon(1e-14));
  CHECK(std::abs(mix.values[8]) == Approx(0.030572).epsilon(1e-4));
  const auto lc = distinguished_log(exact_cf(TwoNormalMixture{ 0.75, 0.1, 0.5 }, UniformGrid(0.0, 8.0, 4096)));
  CHECK(lc.real_part.back() == Approx(std::log(0.75 * std::exp(-3.2) + 0.25 * std::exp(-16.0))).epsilon(1e-12));

  // Student(3) (+) N(0, sigma2^2) contaminant
  for (double u : { 0.0, 0.5, 1.7, 4.0 }) {
    const double a = std::sqrt(3.0) * u;
    const double expect = (1.0 + a) * std::exp(-a) * std::exp(-0.25 * u * u);
    CHECK(contaminant_cf(StudentPlusNormalMixture{ 0.75, 3, 0.2, 0.5 }, u).real() == Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("exact cfs agree with seeded ECFs")
{
  const std::size_t n = 1000000;
  const UniformGrid g(0.0, 8.0, 161);
  for (const ModelSpec& m : { ModelSpec{ TwoNormalMixture{ 0.75, 0.1, 0.5 } },
                              ModelSpec{ BartSimpsonModified{ 0.001, 0.05, 0.1 } },
                              ModelSpec{ StudentPlusNormalMixture{ 0.75, 3, 0.2, 0.5 } },
                              ModelSpec{ PureNormal{ 0.3 } } }) {
    const auto e = ecf_on_grid(sample_model(m, n, 99), g);
    const auto x = exact_cf(m, g);
    double worst = 0.0;
    for (std::size_t k = 0; k < g.count(); ++k)
      worst = std::max(worst, std::abs(e.values[k] - x.values[k]));
    CHECK_MESSAGE(worst < 5.0 / std::sqrt(double(n)), model_tag(m));
  }
}

TEST_CASE("event diagnostics")
{
  const UniformGrid g(0.0, 8.0, 4096);
  const auto x = exact_cf(TwoNormalMixture{ 0.75, 0.1, 0.5 }, g);
  const auto same = event_diagnostics(x, x);
  REQUIRE(same.max_relative_deviation);
  CHECK(*same.max_relative_deviation == 0.0);
  CHECK(same.min_modulus == Approx(0.030572).epsilon(1e-4));
  CHECK(same.u_max == 8.0);
  CHECK_FALSE(event_diagnostics(x).max_relative_deviation);

  const auto e = ecf_on_grid(sample_model(TwoNormalMixture{ 0.75, 0.1, 0.5 }, 1000, 5), g);
  const auto d = event_diagnostics(e, x);
  CHECK(*d.max_relative_deviation > 0.0);
  try {
    event_diagnostics(e, exact_cf(PureNormal{ 1.0 }, UniformGrid(0.0, 4.0, 4096)));
    FAIL("expected GridMismatch");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::GridMismatch);
  }
}

TEST_CASE("H validity")
{
  const UniformGrid g(0.0, 8.0, 801);
  const auto n05 = exact_cf(PureNormal{ 0.5 }, g);
  const auto a = h_validity_check(n05, 0.1);
  CHECK(a.passes_necessary);
  CHECK(a.H_at_zero == complex(1.0, 0.0));
  const auto b = h_validity_check(n05, 0.5);
  CHECK(b.passes_necessary);
  CHECK(b.max_abs_H == Approx(1.0).epsilon(1e-12));
  const auto c = h_validity_check(exact_cf(PureNormal{ 0.05 }, g), 0.1);
  CHECK_FALSE(c.passes_necessary);
  CHECK(c.max_abs_H == Approx(std::exp(0.025 * 64.0)).epsilon(1e-9));
}
