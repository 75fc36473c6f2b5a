#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "qid/io.hpp"
#include "qid/plot.hpp"
#include "qid/study.hpp"

using namespace qid;
using io::json;

namespace {

std::filesystem::path scratch(const std::string& name)
{
  auto dir = std::filesystem::temp_directory_path() / ("qid_unit_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("model specs round-trip through JSON")
{
  for (const ModelSpec& m : { ModelSpec{ TwoNormalMixture{ 0.75, 0.1, 0.5 } },
                              ModelSpec{ BartSimpsonModified{ 0.001, 0.05, 0.1 } },
                              ModelSpec{ StudentPlusNormalMixture{ 0.75, 3, 0.2, 0.5 } },
                              ModelSpec{ PureNormal{ 0.3 } } }) {
    const auto back = io::model_from_json(io::to_json(m));
    CHECK(io::to_json(back) == io::to_json(m));
  }
  CHECK_THROWS_AS(io::model_from_json(json{ { "type", "cauchy" } }), Error);
  CHECK_THROWS_AS(io::model_from_json(json{ { "type", "pure_normal" } }), Error);
}

TEST_CASE("CSV round trips are exact")
{
  const auto dir = scratch("csv");
  const auto s = sample_model(TwoNormalMixture{ 0.75, 0.1, 0.5 }, 500, 3);
  io::write_sample_csv(dir / "x.csv", s);
  CHECK(io::read_sample_csv(dir / "x.csv").values == s.values);

  const UniformGrid g(-2.0, 2.0, 41);
  const auto d = exact_density(TwoNormalMixture{ 0.75, 0.1, 0.5 }, g);
  io::write_csv(dir / "d.csv", d);
  const auto back = io::read_density_csv(dir / "d.csv");
  CHECK(back.values == d.values);
  CHECK(back.grid.count() == g.count());

  const auto cf = exact_cf(StudentPlusNormalMixture{ 0.75, 3, 0.2, 0.5 }, UniformGrid(0.0, 8.0, 33));
  io::write_csv(dir / "cf.csv", cf);
  CHECK(io::read_complex_csv(dir / "cf.csv").values == cf.values);
}

TEST_CASE("sample CSV parse errors name the line")
{
  const auto dir = scratch("parse");
  std::ofstream(dir / "bad.csv") << "1.0\n\n2.5\nabc\n3\n";
  try {
    io::read_sample_csv(dir / "bad.csv");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    REQUIRE(e.index());
    CHECK(*e.index() == 4);
    CHECK(std::string(e.what()).find(":4:") != std::string::npos);
  }
}

TEST_CASE("triplet JSON carries the documented keys")
{
  const auto r = full_pipeline(sample_model(TwoNormalMixture{ 0.75, 0.1, 0.5 }, 1000, 2), EstimatorConfig{});
  const auto j = io::to_json(r.triplet);
  for (const char* key : { "gamma_star", "sigma2", "lambda_star", "p_hat", "min_modulus", "U", "V", "epsilon", "T", "n",
                           "seed" })
    CHECK_MESSAGE(j.contains(key), key);
  CHECK(j["seed"] == 2);
}

TEST_CASE("study config parsing")
{
  const auto c = study_config_from_json(json::parse(R"({
    "model": {"type": "two_normal_mixture", "p": 0.75, "sigma1_sq": 0.1, "sigma2_sq": 0.5},
    "n_values": [1000, 2000], "n_runs": 3, "U": 6, "u_schedule": "log_rate", "sigma2_max": 1
  })"));
  CHECK(c.n_runs == 3);
  CHECK(c.estimator_for(1000).U == doctest::Approx(std::sqrt(std::log(1000.0))));
  CHECK(c.estimator_for(1000).t() == c.estimator_for(1000).U);

  CHECK_THROWS_AS(study_config_from_json(json{ { "n_runz", 3 } }), Error);
  CHECK_THROWS_AS(study_config_from_json(json{ { "n_runs", 0 } }), Error);
  CHECK_THROWS_AS(study_config_from_json(json{ { "n_values", { 5 } } }), Error);
}

TEST_CASE("small study: records, summary, determinism, plots")
{
  StudyConfig cfg;
  cfg.n_values = { 1000, 2000 };
  cfg.n_runs = 4;
  cfg.em = true;
  cfg.ablation = true;
  cfg.save_curves = 2;
  cfg.outputs = scratch("study_a");
  const auto rep = run_study(cfg);
  REQUIRE(rep.records.size() == 8);
  for (const auto& r : rep.records) {
    REQUIRE(r.triplet);
    CHECK(r.triplet->p_hat > 0.0);
    CHECK(r.triplet->p_hat <= 1.0);
    CHECK(std::isfinite(*r.l2_g_circ));
    CHECK(*r.nodewise_dominance);
    CHECK(*r.l2_g_circ <= *r.l2_g_circ_signed);
    CHECK(r.em);
    CHECK(r.l2_jump);
  }

  // summary recomputed from the stored records matches the stored summary
  const auto back = read_report(cfg.outputs);
  CHECK(back.records.size() == 8);
  CHECK(summarize(back.config, back.records) == back.summary);

  // same config, different worker count and directory: identical bytes
  StudyConfig again = cfg;
  again.workers = 3;
  again.outputs = scratch("study_b");
  run_study(again);
  for (const char* f : { "records.jsonl", "summary.json", "config.json" })
    CHECK_MESSAGE(slurp(cfg.outputs / f) == slurp(again.outputs / f), f);

  const auto box = emit_plots(back, PlotKind::Boxplot, cfg.outputs / "fig");
  REQUIRE(box.size() == 1);
  CHECK(slurp(box[0]).find("<svg") == 0);
  CHECK(std::filesystem::exists(cfg.outputs / "fig" / "boxplot_p_hat.csv"));
  // 2 n-values x (spectral, EM)
  const auto csv = slurp(cfg.outputs / "fig" / "boxplot_p_hat.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 16);

  CHECK(emit_plots(back, PlotKind::DensityOverlay, cfg.outputs / "fig").size() == 2);
  CHECK(emit_plots(back, PlotKind::CfOverlay, cfg.outputs / "fig").size() == 1);

  StudyReport empty = back;
  empty.records.clear();
  try {
    emit_plots(empty, PlotKind::Boxplot, cfg.outputs / "fig");
    FAIL("expected EmptyReport");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyReport);
  }
}

TEST_CASE("failed runs are recorded, not fatal")
{
  StudyConfig cfg;
  cfg.model = PureNormal{ 0.3 };
  cfg.n_values = { 50 };
  cfg.n_runs = 3;
  cfg.estimator.U = 30.0;
  cfg.estimator.modulus_floor = 0.5;
  const auto rep = run_study(cfg);
  REQUIRE(rep.records.size() == 3);
  for (const auto& r : rep.records) {
    CHECK(r.failed());
    REQUIRE_FALSE(r.errors.empty());
    CHECK(r.errors.front().code == "NearZeroModulus");
  }
  CHECK(rep.summary["per_n"][0]["failed_runs"] == 3);
}
