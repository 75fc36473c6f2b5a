#include "qid/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>

#include "qid/mixture.hpp"
#include "qid/rng.hpp"

namespace qid {

namespace {

using io::json;

const char* weight_name(WeightKind k)
{
  return k == WeightKind::Indicator ? "indicator" : "smooth_bump";
}

WeightKind weight_from_name(const std::string& s)
{
  if (s == "indicator")
    return WeightKind::Indicator;
  if (s == "smooth_bump")
    return WeightKind::SmoothBump;
  throw Error(ErrorCode::InvalidArgument, "weight_kind must be 'indicator' or 'smooth_bump'");
}

template<class T>
json opt(const std::optional<T>& v)
{
  return v ? json(*v) : json(nullptr);
}

template<class T>
std::optional<T> get_opt(const json& j, const char* key)
{
  if (!j.contains(key) || j.at(key).is_null())
    return std::nullopt;
  return j.at(key).get<T>();
}

// Type-7 quantile of sorted data.
double quantile(const std::vector<double>& sorted, double q)
{
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size())
    return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

json describe(std::vector<double> v)
{
  if (v.empty())
    return json{ { "count", 0 } };
  std::sort(v.begin(), v.end());
  return json{ { "count", v.size() },   { "min", v.front() },          { "q25", quantile(v, 0.25) },
               { "median", quantile(v, 0.5) }, { "q75", quantile(v, 0.75) }, { "max", v.back() } };
}

void save_curves(const StudyConfig& cfg, const RunRecord& rec, const PipelineResult& pipe, const MixtureEstimate* mix)
{
  io::write_csv(curve_path(cfg.outputs, rec.n, rec.run_id, "ecf"), pipe.ecf);
  io::write_csv(curve_path(cfg.outputs, rec.n, rec.run_id, "s"), pipe.s);
  if (mix) {
    io::write_csv(curve_path(cfg.outputs, rec.n, rec.run_id, "g_hat"), mix->g_hat);
    io::write_csv(curve_path(cfg.outputs, rec.n, rec.run_id, "g_circ_plus"), mix->g_circ_plus);
  }
}

struct Truth
{
  ExactTriplet triplet;
  std::optional<DensityCurve> g_circ;
  std::optional<DensityCurve> nu;
};

template<class F>
void guarded(RunRecord& rec, const char* stage, F&& f)
{
  try {
    f();
  } catch (const Error& e) {
    rec.errors.push_back({ stage, std::string(to_string(e.code())), e.what() });
  } catch (const std::exception& e) {
    rec.errors.push_back({ stage, "InternalError", e.what() });
  }
}

RunRecord run_one(const StudyConfig& cfg, const Truth& truth, std::size_t n, int run_id)
{
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.n = n;
  rec.run_id = run_id;
  rec.seed = derive_run_seed(cfg.base_seed, n, static_cast<std::uint64_t>(run_id));

  const Sample sample = sample_model(cfg.model, n, rec.seed);
  auto est = cfg.estimator_for(n);
  est.x_grid = cfg.x_grid;

  std::optional<PipelineResult> pipe;
  guarded(rec, "pipeline", [&] {
    pipe = full_pipeline(sample, est);
    const auto grid = pipe->ecf.grid;
    pipe->triplet.diagnostics = event_diagnostics(pipe->ecf, exact_cf(cfg.model, grid));
    rec.triplet = pipe->triplet;
    rec.p_abs_error = std::abs(pipe->triplet.p_hat - truth.triplet.p);
    rec.sigma2_abs_error = std::abs(pipe->triplet.sigma2 - truth.triplet.sigma2);
    if (truth.nu)
      rec.l2_jump = l2_distance(pipe->s, *truth.nu);
  });

  MixtureConfig mcfg;
  mcfg.bandwidth_c = cfg.bandwidth_c;
  mcfg.x_grid = cfg.x_grid;
  std::optional<MixtureEstimate> mix;
  if (pipe) {
    guarded(rec, "mixture", [&] {
      mix = decompose_mixture(sample, pipe->triplet.p_hat, pipe->triplet.sigma2, mcfg);
      if (!truth.g_circ)
        return;
      const auto& g = *truth.g_circ;
      rec.l2_g_circ = l2_distance(mix->g_circ_plus, g);
      rec.l2_g_circ_signed = l2_distance(mix->g_circ, g);
      bool dominated = true;
      for (std::size_t k = 0; k < g.values.size(); ++k)
        dominated = dominated && std::abs(mix->g_circ_plus.values[k] - g.values[k]) <=
                                   std::abs(mix->g_circ.values[k] - g.values[k]);
      rec.nodewise_dominance = dominated;
    });
    if (run_id < cfg.save_curves && !cfg.outputs.empty())
      guarded(rec, "curves", [&] { save_curves(cfg, rec, *pipe, mix ? &*mix : nullptr); });
  }

  if (cfg.ablation && truth.g_circ) {
    guarded(rec, "ablation", [&] {
      const auto oracle = decompose_mixture(sample, truth.triplet.p, truth.triplet.sigma2, mcfg);
      rec.l2_g_circ_ablation = l2_distance(oracle.g_circ_plus, *truth.g_circ);
      rec.l2_g_circ_ablation_signed = l2_distance(oracle.g_circ, *truth.g_circ);
    });
  }

  if (cfg.em) {
    guarded(rec, "em", [&] {
      rec.em = em_fit(sample);
      rec.em_p_abs_error = std::abs(rec.em->p_hat - truth.triplet.p);
    });
  }

  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

std::ofstream open_out(const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  return out;
}

} // namespace

void StudyConfig::validate() const
{
  qid::validate(model);
  if (n_runs < 1)
    throw Error(ErrorCode::InvalidArgument, "n_runs must be >= 1");
  if (n_values.empty())
    throw Error(ErrorCode::InvalidArgument, "n_values must not be empty");
  for (auto n : n_values)
    if (n < 10 || n >= (std::size_t{ 1 } << 32))
      throw Error(ErrorCode::InvalidArgument, "every n must lie in [10, 2^32)");
  if (std::set<std::size_t>(n_values.begin(), n_values.end()).size() != n_values.size())
    throw Error(ErrorCode::InvalidArgument, "n_values must be distinct");
  if (!(bandwidth_c > 0.0))
    throw Error(ErrorCode::InvalidArgument, "bandwidth_c must be positive");
  if (!(sigma2_max > 0.0))
    throw Error(ErrorCode::InvalidArgument, "sigma2_max must be positive");
  if (workers < 1)
    throw Error(ErrorCode::InvalidArgument, "workers must be >= 1");
  if (save_curves < 0)
    throw Error(ErrorCode::InvalidArgument, "save_curves must be >= 0");
  for (auto n : n_values)
    estimator_for(n).validate();
}

EstimatorConfig StudyConfig::estimator_for(std::size_t n) const
{
  EstimatorConfig e = estimator;
  if (u_schedule == USchedule::LogRate) {
    const double u = std::sqrt(std::log(static_cast<double>(n)) / sigma2_max);
    e.U = u;
    e.V = u;
    e.T = u;
  }
  return e;
}

StudyConfig study_config_from_json(const json& j)
{
  static const std::set<std::string> known{ "model",     "n_values",    "n_runs",     "U",          "V",
                                            "T",         "epsilon",     "weight_kind", "grid_count", "taper_a",
                                            "bandwidth_c", "base_seed", "outputs",    "em",         "ablation",
                                            "u_schedule", "sigma2_max", "x_grid",     "save_curves", "workers" };
  if (!j.is_object())
    throw Error(ErrorCode::InvalidArgument, "study config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known.count(key))
      throw Error(ErrorCode::InvalidArgument, "unknown study config key '" + key + "'");

  StudyConfig c;
  try {
    if (j.contains("model"))
      c.model = io::model_from_json(j.at("model"));
    if (j.contains("n_values"))
      c.n_values = j.at("n_values").get<std::vector<std::size_t>>();
    c.n_runs = j.value("n_runs", c.n_runs);
    c.estimator.U = j.value("U", c.estimator.U);
    c.estimator.V = get_opt<double>(j, "V");
    c.estimator.T = get_opt<double>(j, "T");
    c.estimator.epsilon = j.value("epsilon", c.estimator.epsilon);
    if (j.contains("weight_kind"))
      c.estimator.weight_kind = weight_from_name(j.at("weight_kind").get<std::string>());
    c.estimator.grid_count = j.value("grid_count", c.estimator.grid_count);
    c.estimator.taper_a = j.value("taper_a", c.estimator.taper_a);
    c.bandwidth_c = j.value("bandwidth_c", c.bandwidth_c);
    c.base_seed = j.value("base_seed", c.base_seed);
    c.outputs = j.value("outputs", std::string{});
    c.em = j.value("em", c.em);
    c.ablation = j.value("ablation", c.ablation);
    if (j.contains("u_schedule")) {
      const auto s = j.at("u_schedule").get<std::string>();
      if (s == "fixed")
        c.u_schedule = USchedule::Fixed;
      else if (s == "log_rate")
        c.u_schedule = USchedule::LogRate;
      else
        throw Error(ErrorCode::InvalidArgument, "u_schedule must be 'fixed' or 'log_rate'");
    }
    c.sigma2_max = j.value("sigma2_max", c.sigma2_max);
    if (j.contains("x_grid"))
      c.x_grid = io::grid_from_json(j.at("x_grid"));
    c.save_curves = j.value("save_curves", c.save_curves);
    c.workers = j.value("workers", c.workers);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("study config: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const StudyConfig& c)
{
  return json{ { "model", io::to_json(c.model) },
               { "n_values", c.n_values },
               { "n_runs", c.n_runs },
               { "U", c.estimator.U },
               { "V", opt(c.estimator.V) },
               { "T", opt(c.estimator.T) },
               { "epsilon", c.estimator.epsilon },
               { "weight_kind", weight_name(c.estimator.weight_kind) },
               { "grid_count", c.estimator.grid_count },
               { "taper_a", c.estimator.taper_a },
               { "bandwidth_c", c.bandwidth_c },
               { "base_seed", c.base_seed },
               { "em", c.em },
               { "ablation", c.ablation },
               { "u_schedule", c.u_schedule == USchedule::Fixed ? "fixed" : "log_rate" },
               { "sigma2_max", c.sigma2_max },
               { "x_grid", io::to_json(c.x_grid) },
               { "save_curves", c.save_curves } };
}

json to_json(const RunRecord& r)
{
  json errors = json::array();
  for (const auto& e : r.errors)
    errors.push_back({ { "stage", e.stage }, { "code", e.code }, { "message", e.message } });
  return json{ { "n", r.n },
               { "run_id", r.run_id },
               { "seed", r.seed },
               { "status", r.failed() ? "failed" : "ok" },
               { "triplet", r.triplet ? io::to_json(*r.triplet) : json(nullptr) },
               { "p_abs_error", opt(r.p_abs_error) },
               { "sigma2_abs_error", opt(r.sigma2_abs_error) },
               { "l2_g_circ", opt(r.l2_g_circ) },
               { "l2_g_circ_signed", opt(r.l2_g_circ_signed) },
               { "nodewise_dominance", opt(r.nodewise_dominance) },
               { "l2_g_circ_ablation", opt(r.l2_g_circ_ablation) },
               { "l2_g_circ_ablation_signed", opt(r.l2_g_circ_ablation_signed) },
               { "l2_jump", opt(r.l2_jump) },
               { "em", r.em ? io::to_json(*r.em) : json(nullptr) },
               { "em_p_abs_error", opt(r.em_p_abs_error) },
               { "errors", errors } };
}

RunRecord run_record_from_json(const json& j)
{
  RunRecord r;
  try {
    r.n = j.at("n").get<std::size_t>();
    r.run_id = j.at("run_id").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("triplet").is_null()) {
      const auto& t = j.at("triplet");
      TripletEstimate e;
      e.gamma_star = t.at("gamma_star");
      e.sigma2 = t.at("sigma2");
      e.lambda_star = t.at("lambda_star");
      e.p_hat = t.at("p_hat");
      e.raw_sigma2 = t.at("raw_sigma2");
      e.raw_lambda_star = t.at("raw_lambda_star");
      e.diagnostics.min_modulus = t.at("min_modulus");
      e.diagnostics.u_max = t.at("u_max");
      e.diagnostics.max_relative_deviation = get_opt<double>(t, "max_relative_deviation");
      e.U = t.at("U");
      e.V = t.at("V");
      e.epsilon = t.at("epsilon");
      e.T = get_opt<double>(t, "T");
      e.grid_count = t.at("grid_count");
      e.n = t.at("n");
      e.seed = get_opt<std::uint64_t>(t, "seed");
      r.triplet = e;
    }
    r.p_abs_error = get_opt<double>(j, "p_abs_error");
    r.sigma2_abs_error = get_opt<double>(j, "sigma2_abs_error");
    r.l2_g_circ = get_opt<double>(j, "l2_g_circ");
    r.l2_g_circ_signed = get_opt<double>(j, "l2_g_circ_signed");
    r.nodewise_dominance = get_opt<bool>(j, "nodewise_dominance");
    r.l2_g_circ_ablation = get_opt<double>(j, "l2_g_circ_ablation");
    r.l2_g_circ_ablation_signed = get_opt<double>(j, "l2_g_circ_ablation_signed");
    r.l2_jump = get_opt<double>(j, "l2_jump");
    if (!j.at("em").is_null()) {
      const auto& m = j.at("em");
      EmResult e;
      e.p_hat = m.at("p_hat");
      e.sigma1_sq_hat = m.at("sigma1_sq_hat");
      e.sigma2_sq_hat = m.at("sigma2_sq_hat");
      e.iterations = m.at("iterations");
      e.converged = m.at("converged");
      e.loglik_trace = m.at("loglik_trace").get<std::vector<double>>();
      r.em = e;
    }
    r.em_p_abs_error = get_opt<double>(j, "em_p_abs_error");
    for (const auto& e : j.at("errors"))
      r.errors.push_back({ e.at("stage"), e.at("code"), e.at("message") });
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("run record: ") + e.what());
  }
  return r;
}

json summarize(const StudyConfig& config, const std::vector<RunRecord>& records)
{
  using Metric = std::function<std::optional<double>(const RunRecord&)>;
  const std::vector<std::pair<const char*, Metric>> metrics{
    { "p_hat", [](const RunRecord& r) { return r.triplet ? std::optional(r.triplet->p_hat) : std::nullopt; } },
    { "sigma2", [](const RunRecord& r) { return r.triplet ? std::optional(r.triplet->sigma2) : std::nullopt; } },
    { "p_abs_error", [](const RunRecord& r) { return r.p_abs_error; } },
    { "sigma2_abs_error", [](const RunRecord& r) { return r.sigma2_abs_error; } },
    { "l2_g_circ", [](const RunRecord& r) { return r.l2_g_circ; } },
    { "l2_g_circ_signed", [](const RunRecord& r) { return r.l2_g_circ_signed; } },
    { "l2_g_circ_ablation", [](const RunRecord& r) { return r.l2_g_circ_ablation; } },
    { "l2_jump", [](const RunRecord& r) { return r.l2_jump; } },
    { "em_p_hat", [](const RunRecord& r) { return r.em ? std::optional(r.em->p_hat) : std::nullopt; } },
    { "em_p_abs_error", [](const RunRecord& r) { return r.em_p_abs_error; } },
  };

  json per_n = json::array();
  for (auto n : config.n_values) {
    json entry{ { "n", n } };
    int failed = 0, with_errors = 0;
    for (const auto& r : records)
      if (r.n == n) {
        failed += r.failed();
        with_errors += !r.errors.empty();
      }
    entry["runs"] = config.n_runs;
    entry["failed_runs"] = failed;
    entry["runs_with_errors"] = with_errors;
    entry["U"] = config.estimator_for(n).U;

    std::optional<double> full_median, ablation_median;
    for (const auto& [name, metric] : metrics) {
      std::vector<double> values;
      for (const auto& r : records)
        if (r.n == n)
          if (auto v = metric(r); v && std::isfinite(*v))
            values.push_back(*v);
      auto d = describe(values);
      if (d.contains("median")) {
        if (std::string(name) == "l2_g_circ")
          full_median = d["median"].get<double>();
        if (std::string(name) == "l2_g_circ_ablation")
          ablation_median = d["median"].get<double>();
      }
      entry[name] = std::move(d);
    }
    entry["full_over_ablation_median_l2"] =
      full_median && ablation_median && *ablation_median > 0.0 ? json(*full_median / *ablation_median) : json(nullptr);
    per_n.push_back(std::move(entry));
  }
  return json{ { "model", model_tag(config.model) }, { "per_n", per_n } };
}

StudyReport run_study(const StudyConfig& config)
{
  config.validate();

  Truth truth{ exact_triplet(config.model), std::nullopt, std::nullopt };
  if (!std::holds_alternative<PureNormal>(config.model))
    truth.g_circ = exact_g_circ(config.model, config.x_grid);
  try {
    truth.nu = nu_tilde_density(config.model, config.x_grid).density;
  } catch (const Error& e) {
    // no closed-form oracle for this model; l2_jump stays empty
    if (e.code() != ErrorCode::UnsupportedSpec && e.code() != ErrorCode::SeriesNotConverged)
      throw;
  }

  const auto n_count = static_cast<long long>(config.n_values.size());
  const long long total = n_count * config.n_runs;
  std::vector<std::optional<RunRecord>> slots(static_cast<std::size_t>(total));

#pragma omp parallel for schedule(dynamic, 1) num_threads(config.workers)
  for (long long job = 0; job < total; ++job) {
    const auto n = config.n_values[static_cast<std::size_t>(job / config.n_runs)];
    const int run_id = static_cast<int>(job % config.n_runs);
    slots[static_cast<std::size_t>(job)] = run_one(config, truth, n, run_id);
  }

  StudyReport report{ config, {}, {} };
  report.records.reserve(slots.size());
  for (auto& s : slots)
    report.records.push_back(std::move(*s));
  report.summary = summarize(config, report.records);
  if (!config.outputs.empty())
    write_report(report, config.outputs);
  return report;
}

void write_report(const StudyReport& report, const std::filesystem::path& dir)
{
  std::filesystem::create_directories(dir);
  {
    auto out = open_out(dir / "records.jsonl");
    for (const auto& r : report.records)
      out << to_json(r).dump() << '\n';
  }
  {
    auto out = open_out(dir / "summary.json");
    out << report.summary.dump(2) << '\n';
  }
  {
    auto out = open_out(dir / "config.json");
    out << to_json(report.config).dump(2) << '\n';
  }
  {
    auto out = open_out(dir / "timings.jsonl");
    for (const auto& r : report.records)
      out << json{ { "n", r.n }, { "run_id", r.run_id }, { "wall_time", r.wall_time } }.dump() << '\n';
  }
  if (!std::holds_alternative<PureNormal>(report.config.model))
    io::write_csv(dir / "exact_g_circ.csv", exact_g_circ(report.config.model, report.config.x_grid));
}

StudyReport read_report(const std::filesystem::path& dir)
{
  auto read_json = [&](const char* name) {
    std::ifstream in(dir / name);
    if (!in)
      throw Error(ErrorCode::IoError, "cannot open " + (dir / name).string());
    try {
      return json::parse(in);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, (dir / name).string() + ": " + e.what());
    }
  };

  StudyReport report{ study_config_from_json(read_json("config.json")), {}, read_json("summary.json") };
  report.config.outputs = dir;
  std::ifstream in(dir / "records.jsonl");
  if (!in)
    throw Error(ErrorCode::IoError, "cannot open " + (dir / "records.jsonl").string());
  std::string line;
  long long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty())
      continue;
    try {
      report.records.push_back(run_record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, "records.jsonl:" + std::to_string(line_no) + ": " + e.what(), line_no);
    }
  }
  return report;
}

std::filesystem::path curve_path(const std::filesystem::path& dir, std::size_t n, int run_id, const std::string& what)
{
  return dir / "curves" / ("n" + std::to_string(n) + "_run" + std::to_string(run_id) + "_" + what + ".csv");
}

} // namespace qid
