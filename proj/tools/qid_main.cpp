// qid: command-line front end for the spectral QID estimators.
//
//   qid study    --config study.json [--outputs DIR] [--workers K] ...
//   qid estimate --input sample.csv [--mixture] [--oracle-p P --oracle-sigma2 S]
//   qid plot     --report DIR --kind boxplot|density|cf [--metric NAME]
//   qid oracle   --model '{"type": ...}' --out DIR
//   qid sample   --model '{"type": ...}' --n N (--seed S | --base-seed B --run-id R) --out FILE
//
// Fatal errors print {"error": {...}} on stderr and exit with status 2.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "qid/io.hpp"
#include "qid/mixture.hpp"
#include "qid/plot.hpp"
#include "qid/rng.hpp"
#include "qid/spectral.hpp"
#include "qid/study.hpp"

using namespace qid;
using io::json;

namespace {

std::filesystem::path default_output_dir()
{
  if (const char* env = std::getenv("QID_OUTPUT_DIR"); env && *env)
    return env;
  return "qid_out";
}

json read_json_arg(const std::string& arg)
{
  try {
    if (!arg.empty() && arg.front() == '{')
      return json::parse(arg);
    std::ifstream in(arg);
    if (!in)
      throw Error(ErrorCode::IoError, "cannot open " + arg);
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
  }
}

int fail(const Error& e)
{
  json err{ { "code", to_string(e.code()) }, { "message", e.what() } };
  if (e.index())
    err["index"] = *e.index();
  if (e.location())
    err["location"] = *e.location();
  std::cerr << json{ { "error", err } }.dump() << std::endl;
  return 2;
}

struct EstimatorFlags
{
  double U = 8.0;
  std::optional<double> V, T;
  double epsilon = 0.5;
  std::string weight_kind = "indicator";
  std::size_t grid_count = 4096;
  double taper_a = 0.8;

  void add(CLI::App* app)
  {
    app->add_option("--U", U, "Upper frequency for (sigma2, lambda)");
    app->add_option("--V", V, "Upper frequency for gamma (default U)");
    app->add_option("--T", T, "Inversion cut-off for the jump density (default U)");
    app->add_option("--epsilon", epsilon, "Weight support starts at epsilon * U");
    app->add_option("--weight-kind", weight_kind)->check(CLI::IsMember({ "indicator", "smooth_bump" }));
    app->add_option("--grid-count", grid_count, "Frequency grid nodes");
    app->add_option("--taper-a", taper_a, "Flat-top fraction of the inversion taper");
  }

  EstimatorConfig config() const
  {
    EstimatorConfig c;
    c.U = U;
    c.V = V;
    c.T = T;
    c.epsilon = epsilon;
    c.weight_kind = weight_kind == "indicator" ? WeightKind::Indicator : WeightKind::SmoothBump;
    c.grid_count = grid_count;
    c.taper_a = taper_a;
    return c;
  }
};

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{ "Spectral estimation of quasi-infinitely divisible laws and Gaussian mixture decontamination" };
  app.require_subcommand(1);

  // study
  auto* study = app.add_subcommand("study", "Run a seeded Monte Carlo study from a JSON config");
  std::string config_path, outputs;
  std::optional<int> workers, n_runs, save_curves;
  std::optional<std::uint64_t> base_seed;
  std::vector<std::size_t> n_values;
  bool with_em = false, with_ablation = false;
  study->add_option("--config", config_path, "Study config (JSON file)")->required();
  study->add_option("--outputs", outputs, "Report directory (default $QID_OUTPUT_DIR or ./qid_out)");
  study->add_option("--workers", workers, "Worker threads");
  study->add_option("--n-runs", n_runs);
  study->add_option("--n-values", n_values);
  study->add_option("--base-seed", base_seed);
  study->add_option("--save-curves", save_curves, "Save curves for the first K runs of each n");
  study->add_flag("--em", with_em, "Also fit the EM baseline");
  study->add_flag("--ablation", with_ablation, "Also decontaminate with the true (p, sigma2)");

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Estimate the triplet from a one-column CSV sample");
  std::string input_csv, curves_dir;
  bool with_mixture = false;
  std::optional<double> oracle_p, oracle_sigma2;
  double bandwidth_c = 1.0 / 30.0;
  EstimatorFlags est_flags;
  estimate->add_option("--input", input_csv, "One real value per line")->required();
  est_flags.add(estimate);
  estimate->add_flag("--mixture", with_mixture, "Also decompose the Gaussian mixture");
  estimate->add_option("--oracle-p", oracle_p, "Decontaminate with this p instead of the estimate");
  estimate->add_option("--oracle-sigma2", oracle_sigma2, "Decontaminate with this sigma2 instead of the estimate");
  estimate->add_option("--bandwidth-c", bandwidth_c, "KDE bandwidth constant c in h = c n^(-1/5)");
  estimate->add_option("--curves-dir", curves_dir, "Write g_hat / g_circ_plus / s_n CSVs here");

  // plot
  auto* plot = app.add_subcommand("plot", "Draw SVG figures from a stored study report");
  std::string report_dir, kind = "boxplot", plot_out;
  PlotOptions plot_opts;
  std::optional<std::size_t> plot_n;
  plot->add_option("--report", report_dir, "Study report directory")->required();
  plot->add_option("--kind", kind)->check(CLI::IsMember({ "boxplot", "density", "cf" }));
  plot->add_option("--metric", plot_opts.metric, "Boxplot quantity");
  plot->add_option("--n", plot_n, "Sample size for the cf overlay");
  plot->add_option("--max-curves", plot_opts.max_curves);
  plot->add_option("--out", plot_out, "Figure directory (default REPORT/figures)");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Write exact cf, densities and nu-tilde for a model");
  std::string model_arg, oracle_out;
  double u_max = 8.0, x_min = -6.0, x_max = 6.0;
  std::size_t u_count = 4096, x_count = 2001;
  oracle->add_option("--model", model_arg, "Model JSON (inline or file)")->required();
  oracle->add_option("--out", oracle_out, "Output directory (default $QID_OUTPUT_DIR or ./qid_out)");
  oracle->add_option("--u-max", u_max);
  oracle->add_option("--u-count", u_count);
  oracle->add_option("--x-min", x_min);
  oracle->add_option("--x-max", x_max);
  oracle->add_option("--x-count", x_count);

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "Export a model sample as one-column CSV");
  std::string sample_model_arg, sample_out;
  std::size_t sample_n = 0;
  std::optional<std::uint64_t> seed, sample_base_seed;
  std::optional<std::uint64_t> run_id;
  sample_cmd->add_option("--model", sample_model_arg, "Model JSON (inline or file)")->required();
  sample_cmd->add_option("--n", sample_n)->required();
  sample_cmd->add_option("--seed", seed, "Explicit sample seed");
  sample_cmd->add_option("--base-seed", sample_base_seed, "Study base seed (with --run-id)");
  sample_cmd->add_option("--run-id", run_id);
  sample_cmd->add_option("--out", sample_out, "CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*study) {
      auto cfg_json = read_json_arg(config_path);
      if (workers)
        cfg_json["workers"] = *workers;
      if (n_runs)
        cfg_json["n_runs"] = *n_runs;
      if (!n_values.empty())
        cfg_json["n_values"] = n_values;
      if (base_seed)
        cfg_json["base_seed"] = *base_seed;
      if (save_curves)
        cfg_json["save_curves"] = *save_curves;
      if (with_em)
        cfg_json["em"] = true;
      if (with_ablation)
        cfg_json["ablation"] = true;
      if (!outputs.empty())
        cfg_json["outputs"] = outputs;
      else if (!cfg_json.contains("outputs"))
        cfg_json["outputs"] = default_output_dir().string();
      const auto cfg = study_config_from_json(cfg_json);
      const auto report = run_study(cfg);
      std::size_t failed = 0;
      for (const auto& r : report.records)
        failed += r.failed();
      std::cout << json{ { "outputs", cfg.outputs.string() },
                         { "records", report.records.size() },
                         { "failed_runs", failed } }
                     .dump()
                << std::endl;
    } else if (*estimate) {
      const auto sample = io::read_sample_csv(input_csv);
      if (sample.size() < 10)
        throw Error(ErrorCode::TooFewObservations, "estimate needs at least 10 values");
      auto cfg = est_flags.config();
      const auto pipe = full_pipeline(sample, cfg);
      json out{ { "triplet", io::to_json(pipe.triplet) } };
      if (!curves_dir.empty())
        io::write_csv(std::filesystem::path(curves_dir) / "s.csv", pipe.s);
      if (with_mixture) {
        try {
          MixtureConfig mcfg;
          mcfg.bandwidth_c = bandwidth_c;
          const auto mix = decompose_mixture(sample, oracle_p.value_or(pipe.triplet.p_hat),
                                             oracle_sigma2.value_or(pipe.triplet.sigma2), mcfg);
          const std::filesystem::path dir = curves_dir.empty() ? default_output_dir() : std::filesystem::path(curves_dir);
          io::write_csv(dir / "g_hat.csv", mix.g_hat);
          io::write_csv(dir / "g_circ_plus.csv", mix.g_circ_plus);
          out["mixture"] = io::to_json(mix, dir / "g_hat.csv", dir / "g_circ_plus.csv");
          out["mixture"]["oracle_injected"] = oracle_p.has_value() || oracle_sigma2.has_value();
        } catch (const Error& e) {
          out["mixture"] = json{ { "error", { { "code", to_string(e.code()) }, { "message", e.what() } } } };
        }
      }
      std::cout << out.dump(2) << std::endl;
    } else if (*plot) {
      const auto report = read_report(report_dir);
      plot_opts.n = plot_n;
      const PlotKind pk = kind == "boxplot" ? PlotKind::Boxplot
                          : kind == "density" ? PlotKind::DensityOverlay
                                              : PlotKind::CfOverlay;
      const auto dir = plot_out.empty() ? std::filesystem::path(report_dir) / "figures" : std::filesystem::path(plot_out);
      json files = json::array();
      for (const auto& p : emit_plots(report, pk, dir, plot_opts))
        files.push_back(p.string());
      std::cout << json{ { "figures", files } }.dump() << std::endl;
    } else if (*oracle) {
      const auto model = io::model_from_json(read_json_arg(model_arg));
      const std::filesystem::path dir = oracle_out.empty() ? default_output_dir() : std::filesystem::path(oracle_out);
      const UniformGrid ug(0.0, u_max, u_count);
      const UniformGrid xg(x_min, x_max, x_count);
      io::write_csv(dir / "cf.csv", exact_cf(model, ug));
      io::write_csv(dir / "density.csv", exact_density(model, xg));
      json info{ { "model", io::to_json(model) } };
      const auto t = exact_triplet(model);
      info["triplet"] = { { "gamma_star", t.gamma_star },
                          { "sigma2", t.sigma2 },
                          { "lambda_star", t.lambda_star },
                          { "p", t.p } };
      try {
        io::write_csv(dir / "g_circ.csv", exact_g_circ(model, xg));
      } catch (const Error& e) {
        info["g_circ"] = to_string(e.code());
      }
      try {
        const auto nu = nu_tilde_density(model, xg);
        io::write_csv(dir / "nu_tilde.csv", nu.density);
        info["nu_tilde_terms"] = nu.terms;
      } catch (const Error& e) {
        info["nu_tilde"] = to_string(e.code());
      }
      std::ofstream(dir / "oracle.json", std::ios::binary) << info.dump(2) << '\n';
      std::cout << info.dump() << std::endl;
    } else if (*sample_cmd) {
      const auto model = io::model_from_json(read_json_arg(sample_model_arg));
      std::uint64_t s = 0;
      if (seed)
        s = *seed;
      else if (sample_base_seed && run_id)
        s = derive_run_seed(*sample_base_seed, sample_n, *run_id);
      else
        throw Error(ErrorCode::InvalidArgument, "give --seed or both --base-seed and --run-id");
      io::write_sample_csv(sample_out, sample_model(model, sample_n, s));
      std::cout << json{ { "seed", s }, { "n", sample_n }, { "out", sample_out } }.dump() << std::endl;
    }
  } catch (const Error& e) {
    return fail(e);
  } catch (const std::exception& e) {
    return fail(Error(ErrorCode::InvalidArgument, e.what()));
  }
  return 0;
}
