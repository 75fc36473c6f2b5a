// Acceptance suite: one [PASS]/[FAIL] line per criterion.
//
//   acceptance [--criterion N]... [--cli PATH] [--workdir DIR]
//
// Exit status is 0 only when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <omp.h>

#include "qid/kernels.hpp"
#include "qid/mixture.hpp"
#include "qid/rng.hpp"
#include "qid/spectral.hpp"
#include "qid/study.hpp"

using namespace qid;
using io::json;

namespace {

// Noiseless bias of (sigma2, lambda*) for TwoNormalMixture(0.75, 0.1, 0.5),
// U = V = 8, eps = 0.5, 4096 nodes: int w_{sigma2|lambda}(u) Re F[nu~](u) du
// with F[nu~] from a brute-force x-quadrature on [-40, 40] (16001 nodes).
// Measured once with i3_oracle() below and frozen here.
constexpr double kFrozenSigma2Bias = 3.2581487487e-04;
constexpr double kFrozenLambdaBias = -7.9576871168e-03;

// L2 distance of the noiseless s_n (T = 8) to nu~ on [-10, 10] (2001 nodes).
constexpr double kFrozenJumpL2 = 8.6684283705e-03;

const TwoNormalMixture kMix{ 0.75, 0.1, 0.5 };
const BartSimpsonModified kBart{ 0.001, 0.05, 0.1 };
const StudentPlusNormalMixture kStudent{ 0.75, 3, 0.2, 0.5 };

struct Outcome
{
  bool pass;
  std::string detail;
};

struct Context
{
  std::string cli;
  std::filesystem::path workdir;
  int workers = 1;
};

double median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

bool strictly_decreasing(const std::vector<double>& v)
{
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] < v[k - 1]))
      return false;
  return true;
}

std::string join(const std::vector<double>& v)
{
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k)
    s += fmt::format("{}{:.4g}", k ? ", " : "", v[k]);
  return "[" + s + "]";
}

StudyReport study(const Context& ctx, const std::string& name, StudyConfig cfg)
{
  cfg.outputs = ctx.workdir / name;
  cfg.workers = ctx.workers;
  std::filesystem::remove_all(cfg.outputs);
  return run_study(cfg);
}

std::vector<double> medians_by_n(const StudyReport& rep, const std::function<std::optional<double>(const RunRecord&)>& f)
{
  std::vector<double> out;
  for (auto n : rep.config.n_values) {
    std::vector<double> v;
    for (const auto& r : rep.records)
      if (r.n == n)
        if (auto x = f(r))
          v.push_back(*x);
    out.push_back(v.empty() ? std::nan("") : median(v));
  }
  return out;
}

std::string slurp(const std::filesystem::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

Outcome c1(const Context&)
{
  double worst = 0.0;
  for (auto kind : { WeightKind::Indicator, WeightKind::SmoothBump })
    for (double eps : { 0.25, 0.5 })
      for (double U : { 1.0, 8.0 }) {
        const auto id = derived_weight_identities(BaseWeight(eps, kind), U, 4096);
        worst = std::max({ worst, std::abs(id.check_sigma.first), std::abs(id.check_sigma.second - 1.0),
                           std::abs(id.check_lambda.first - 1.0), std::abs(id.check_lambda.second),
                           std::abs(id.check_gamma - 1.0) });
      }
  return { worst < 1e-8, fmt::format("max identity residual {:.3g} (tol 1e-8)", worst) };
}

std::pair<double, double> i3_oracle()
{
  const UniformGrid xg(-40.0, 40.0, 16001);
  const UniformGrid ug(0.0, 8.0, 4096);
  const auto nu = nu_tilde_density(kMix, xg);
  const auto F = kernels::serial::fourier_transform(nu.density.values, xg, ug);
  const auto dw = derive_weights(ug, BaseWeight(0.5, WeightKind::Indicator), 8.0);
  std::vector<double> a(dw.band.count()), b(dw.band.count());
  for (std::size_t j = 0; j < a.size(); ++j) {
    a[j] = dw.sigma2[j] * F[dw.offset + j].real();
    b[j] = dw.lambda_star[j] * F[dw.offset + j].real();
  }
  return { trapezoid_integrate(a, dw.band), trapezoid_integrate(b, dw.band) };
}

Outcome c2(const Context&)
{
  const auto lc = distinguished_log(exact_cf(kMix, UniformGrid(0.0, 8.0, 4096)));
  const auto t = estimate_triplet_from_log(lc, BaseWeight(0.5, WeightKind::Indicator), 8.0, 8.0);
  const double es = t.sigma2 - 0.1;
  const double el = t.lambda_star + std::log(0.75);
  const auto [live_s, live_l] = i3_oracle();
  const bool within = std::abs(es) <= std::abs(kFrozenSigma2Bias) * (1 + 1e-6) &&
                      std::abs(el) <= std::abs(kFrozenLambdaBias) * (1 + 1e-6);
  const bool pass = within && std::abs(kFrozenSigma2Bias) < 1e-2;
  return { pass, fmt::format("sigma2 err {:.6e} (budget {:.6e}), lambda err {:.6e} (budget {:.6e}); "
                             "live I3 oracle ({:.6e}, {:.6e})",
                             es, kFrozenSigma2Bias, el, kFrozenLambdaBias, live_s, live_l) };
}

Outcome c3(const Context&)
{
  const UniformGrid g(-30.0, 30.0, 6001);
  double worst = 0.0;
  for (double p : { 0.6, 0.75, 0.9 }) {
    const auto nu = nu_tilde_density(TwoNormalMixture{ p, 0.1, 0.5 }, g);
    worst = std::max(worst, std::abs(trapezoid_integrate(nu.density.values, g) + std::log(p)));
  }
  return { worst < 1e-8, fmt::format("max |int nu + log p| = {:.3g} (tol 1e-8)", worst) };
}

Outcome c4(const Context&)
{
  const auto t = exact_triplet(kMix);
  const UniformGrid xg(-30.0, 30.0, 12001);
  const UniformGrid ug(0.0, 8.0, 801);
  const auto nu = nu_tilde_density(kMix, xg);
  const auto F = kernels::serial::fourier_transform(nu.density.values, xg, ug);
  const auto exact = exact_cf(kMix, ug);
  double worst = 0.0;
  for (std::size_t k = 0; k < ug.count(); ++k) {
    const double u = ug.node(k);
    const complex rebuilt = std::exp(complex(0.0, t.gamma_star * u) - 0.5 * t.sigma2 * u * u + F[k] - t.lambda_star);
    worst = std::max(worst, std::abs(rebuilt - exact.values[k]));
  }
  return { worst < 1e-6, fmt::format("sup |rebuilt - exact| on [0, 8] = {:.3g} (tol 1e-6)", worst) };
}

Outcome c5(const Context&)
{
  const UniformGrid xg(-10.0, 10.0, 2001);
  const auto nu = nu_tilde_density(kMix, xg).density;
  const BaseWeight w(0.5, WeightKind::Indicator);
  const InversionConfig inv{ 8.0, FlatTopCosine{ 0.8 }, xg };

  const auto lc = distinguished_log(exact_cf(kMix, UniformGrid(0.0, 8.0, 4096)));
  const double noiseless = l2_distance(jump_density_from_log(lc, estimate_triplet_from_log(lc, w, 8.0, 8.0), inv), nu);

  std::vector<double> sampled;
  EstimatorConfig cfg;
  cfg.x_grid = xg;
  for (int r = 0; r < 20; ++r) {
    const auto s = sample_model(kMix, 10000, derive_run_seed(5, 10000, r));
    sampled.push_back(l2_distance(full_pipeline(s, cfg).s, nu));
  }
  const double med = median(sampled);
  const bool first = noiseless <= kFrozenJumpL2 * (1 + 1e-6);
  const bool second = med <= 2.0 * kFrozenJumpL2;
  return { first && second,
           fmt::format("noiseless L2 {:.4e} (frozen {:.4e}) {}; sampled n=1e4 median L2 {:.4e} = {:.2f}x frozen "
                       "(limit 2x) {}",
                       noiseless, kFrozenJumpL2, first ? "ok" : "FAIL", med, med / kFrozenJumpL2,
                       second ? "ok" : "FAIL") };
}

struct ModelCase
{
  const char* name;
  ModelSpec model;
  double U;
};

const std::vector<ModelCase>& study_models()
{
  // Per-model U: the band [U/2, U] must sit where |cf| is still above the
  // ECF noise at n = 1000 while the noiseless bias is below the noise at 1e4.
  static const std::vector<ModelCase> cases{
    { "two_normal", kMix, 8.0 },
    { "bart_simpson", kBart, 40.0 },
    { "student", kStudent, 5.0 },
  };
  return cases;
}

Outcome c6(const Context& ctx)
{
  bool pass = true;
  std::string detail;
  for (const auto& mc : study_models()) {
    StudyConfig cfg;
    cfg.model = mc.model;
    cfg.n_values = { 1000, 5000, 10000 };
    cfg.n_runs = 50;
    cfg.estimator.U = mc.U;
    cfg.base_seed = 6006;
    const auto rep = study(ctx, std::string("c6_") + mc.name, cfg);
    const auto mp = medians_by_n(rep, [](const RunRecord& r) { return r.p_abs_error; });
    const auto ms = medians_by_n(rep, [](const RunRecord& r) { return r.sigma2_abs_error; });
    std::size_t failed = 0;
    for (const auto& r : rep.records)
      failed += r.failed();
    const bool ok = strictly_decreasing(mp) && strictly_decreasing(ms);
    pass = pass && ok;
    detail += fmt::format("{} U={}: med|p err| {} med|s2 err| {} failed={} {}; ", mc.name, mc.U, join(mp), join(ms),
                          failed, ok ? "ok" : "FAIL");
    if (mc.name == std::string("two_normal")) {
      const bool tight = mp.back() < 0.05;
      pass = pass && tight;
      detail += fmt::format("two_normal n=1e4 med|p-0.75| {:.4f} < 0.05 {}; ", mp.back(), tight ? "ok" : "FAIL");
    }
  }
  return { pass, detail };
}

Outcome c7(const Context& ctx)
{
  StudyConfig cfg;
  cfg.model = kMix;
  cfg.n_values = { 1000, 10000, 100000 };
  cfg.n_runs = 50;
  cfg.u_schedule = USchedule::LogRate;
  cfg.sigma2_max = 1.0;
  cfg.base_seed = 7007;
  const auto rep = study(ctx, "c7_log_rate", cfg);
  const auto ms = medians_by_n(rep, [](const RunRecord& r) { return r.sigma2_abs_error; });
  // least-squares slope of log median against log n
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < ms.size(); ++k) {
    const double x = std::log(double(cfg.n_values[k])), y = std::log(ms[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = double(ms.size());
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  std::vector<double> us;
  for (auto n : cfg.n_values)
    us.push_back(cfg.estimator_for(n).U);
  return { slope <= -0.2, fmt::format("U_n {} med|s2 err| {} slope {:.3f} (need <= -0.2)", join(us), join(ms), slope) };
}

Outcome c8(const Context& ctx)
{
  bool pass = true;
  std::string detail;
  for (const auto& mc : study_models()) {
    if (mc.name == std::string("bart_simpson"))
      continue; // the KDE at h = n^{-1/5}/30 is compared on the two smooth contaminants
    StudyConfig cfg;
    cfg.model = mc.model;
    cfg.n_values = { 1000, 5000, 10000 };
    cfg.n_runs = 50;
    cfg.estimator.U = mc.U;
    cfg.ablation = true;
    cfg.base_seed = 8008;
    const auto rep = study(ctx, std::string("c8_") + mc.name, cfg);
    const auto ma = medians_by_n(rep, [](const RunRecord& r) { return r.l2_g_circ_ablation; });
    bool ratios_ok = true;
    std::vector<double> ratios;
    for (const auto& e : rep.summary["per_n"]) {
      const auto& r = e["full_over_ablation_median_l2"];
      ratios_ok = ratios_ok && r.is_number() && std::isfinite(r.get<double>()) && r.get<double>() >= 1.0;
      ratios.push_back(r.is_number() ? r.get<double>() : std::nan(""));
    }
    const bool ok = strictly_decreasing(ma) && ratios_ok;
    pass = pass && ok;
    detail += fmt::format("{}: ablation med L2 {} full/ablation {} {}; ", mc.name, join(ma), join(ratios),
                          ok ? "ok" : "FAIL");
  }
  return { pass, detail };
}

std::vector<std::filesystem::path> stored_reports(const Context& ctx)
{
  std::vector<std::filesystem::path> out;
  if (std::filesystem::exists(ctx.workdir))
    for (const auto& e : std::filesystem::recursive_directory_iterator(ctx.workdir))
      if (e.path().filename() == "records.jsonl")
        out.push_back(e.path().parent_path());
  std::sort(out.begin(), out.end());
  return out;
}

Outcome c9(const Context& ctx)
{
  for (const auto& mc : study_models()) {
    StudyConfig cfg;
    cfg.model = mc.model;
    cfg.n_values = { 1000, 5000, 10000 };
    cfg.n_runs = 20;
    cfg.estimator.U = mc.U;
    cfg.base_seed = 9009;
    study(ctx, std::string("c9_") + mc.name, cfg);
  }
  std::size_t checked = 0, violations = 0, reports = 0;
  for (const auto& dir : stored_reports(ctx)) {
    const auto rep = read_report(dir);
    ++reports;
    for (const auto& r : rep.records) {
      if (r.l2_g_circ && r.l2_g_circ_signed) {
        ++checked;
        violations += !(*r.l2_g_circ <= *r.l2_g_circ_signed) || !r.nodewise_dominance.value_or(false);
      }
      if (r.l2_g_circ_ablation && r.l2_g_circ_ablation_signed) {
        ++checked;
        violations += !(*r.l2_g_circ_ablation <= *r.l2_g_circ_ablation_signed);
      }
    }
  }
  return { checked > 0 && violations == 0,
           fmt::format("{} stored runs in {} reports, {} violations", checked, reports, violations) };
}

Outcome c10(const Context& ctx)
{
  StudyConfig cfg;
  cfg.model = kMix;
  cfg.n_values = { 1000, 5000, 10000 };
  cfg.n_runs = 50;
  cfg.em = true;
  cfg.base_seed = 10010;
  const auto rep = study(ctx, "c10_em", cfg);
  const auto med = medians_by_n(rep, [](const RunRecord& r) { return r.em_p_abs_error; });

  std::size_t traces = 0, bad = 0, em_failures = 0;
  for (const auto& dir : stored_reports(ctx))
    for (const auto& r : read_report(dir).records) {
      for (const auto& e : r.errors)
        em_failures += e.stage == "em";
      if (!r.em)
        continue;
      ++traces;
      const auto& tr = r.em->loglik_trace;
      for (std::size_t k = 1; k < tr.size(); ++k)
        if (tr[k] < tr[k - 1] - 1e-10) {
          ++bad;
          break;
        }
    }
  const bool pass = traces > 0 && bad == 0 && med.back() < 0.05;
  return { pass, fmt::format("{} EM traces, {} non-monotone, {} EM failures; EM med|p-0.75| by n {} (n=1e4 < 0.05)",
                             traces, bad, em_failures, join(med)) };
}

Outcome c11(const Context& ctx)
{
  if (ctx.cli.empty())
    return { false, "no --cli given" };
  const auto base = ctx.workdir / "c11";
  std::filesystem::remove_all(base);
  std::filesystem::create_directories(base);
  std::ofstream(base / "config.json") << R"({
  "model": {"type": "two_normal_mixture", "p": 0.75, "sigma1_sq": 0.1, "sigma2_sq": 0.5},
  "n_values": [1000, 5000], "n_runs": 8, "U": 8, "base_seed": 1111,
  "em": true, "ablation": true, "save_curves": 2
})";
  const std::vector<std::pair<std::string, int>> runs{ { "w1_a", 1 }, { "w1_b", 1 }, { "w8", 8 } };
  for (const auto& [name, w] : runs) {
    const std::string cmd = fmt::format("{} study --config {} --outputs {} --workers {} > /dev/null", ctx.cli,
                                        (base / "config.json").string(), (base / name).string(), w);
    if (std::system(cmd.c_str()) != 0)
      return { false, "study invocation failed: " + cmd };
  }
  std::size_t compared = 0;
  std::vector<std::string> diffs;
  for (const auto& e : std::filesystem::recursive_directory_iterator(base / "w1_a")) {
    if (!e.is_regular_file() || e.path().filename() == "timings.jsonl")
      continue;
    const auto rel = std::filesystem::relative(e.path(), base / "w1_a");
    const auto ref = slurp(e.path());
    for (const char* other : { "w1_b", "w8" }) {
      ++compared;
      if (slurp(base / other / rel) != ref)
        diffs.push_back(std::string(other) + "/" + rel.string());
    }
  }
  std::string d = fmt::format("{} file comparisons across 2 invocations and workers 1 vs 8, {} differ", compared,
                              diffs.size());
  for (const auto& x : diffs)
    d += " " + x;
  return { compared > 0 && diffs.empty(), d };
}

struct Criterion
{
  const char* title;
  double budget_seconds;
  Outcome (*fn)(const Context&);
};

const std::map<int, Criterion> kCriteria{
  { 1, { "weight identities", 1.0, c1 } },
  { 2, { "noiseless triplet recovery", 5.0, c2 } },
  { 3, { "nu-tilde mass identity", 1.0, c3 } },
  { 4, { "end-to-end Fourier consistency", 5.0, c4 } },
  { 5, { "jump-density recovery", 60.0, c5 } },
  { 6, { "Monte Carlo convergence", 900.0, c6 } },
  { 7, { "polynomial-rate signature", 1200.0, c7 } },
  { 8, { "decontamination MISE structure", 600.0, c8 } },
  { 9, { "positive-part dominance", 0.0, c9 } },
  { 10, { "EM baseline sanity", 0.0, c10 } },
  { 11, { "determinism", 0.0, c11 } },
};

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{ "acceptance criteria" };
  std::vector<int> selected;
  Context ctx;
  std::string workdir = (std::filesystem::temp_directory_path() / "qid_acceptance").string();
  app.add_option("--criterion", selected, "Criterion number(s); all when omitted");
  app.add_option("--cli", ctx.cli, "Path to the qid executable");
  app.add_option("--workdir", workdir, "Scratch directory for study outputs");
  CLI11_PARSE(app, argc, argv);
  ctx.workdir = workdir;
  ctx.workers = std::max(1, omp_get_num_procs());
  std::filesystem::create_directories(ctx.workdir);
  if (selected.empty())
    for (const auto& [k, _] : kCriteria)
      selected.push_back(k);

  int failures = 0;
  for (int k : selected) {
    const auto it = kCriteria.find(k);
    if (it == kCriteria.end()) {
      std::cout << fmt::format("[FAIL] C{}: no such criterion\n", k);
      ++failures;
      continue;
    }
    const auto& c = it->second;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o{ false, "" };
    try {
      o = c.fn(ctx);
    } catch (const std::exception& e) {
      o = { false, std::string("exception: ") + e.what() };
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt::format("{:.2f}s", secs);
    if (c.budget_seconds > 0.0) {
      timing += fmt::format(" (budget {:.0f}s)", c.budget_seconds);
      if (secs > c.budget_seconds) {
        o.pass = false;
        timing += " over budget";
      }
    }
    std::cout << fmt::format("[{}] C{} {}: {} [{}]\n", o.pass ? "PASS" : "FAIL", k, c.title, o.detail, timing)
              << std::flush;
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
