#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qid/em.hpp"
#include "qid/io.hpp"
#include "qid/models.hpp"
#include "qid/spectral.hpp"

namespace qid {

//! Fixed: U, V, T as configured. LogRate: U = V = T = sqrt(log n / sigma2_max).
enum class USchedule { Fixed, LogRate };

struct StudyConfig
{
  ModelSpec model = TwoNormalMixture{ 0.75, 0.1, 0.5 };
  std::vector<std::size_t> n_values{ 1000, 5000, 10000 };
  int n_runs = 50;
  EstimatorConfig estimator;
  USchedule u_schedule = USchedule::Fixed;
  double sigma2_max = 1.0;
  double bandwidth_c = 1.0 / 30.0;
  std::uint64_t base_seed = 20240501;
  bool em = false;
  //! Also decontaminate with the true (p, sigma^2) injected.
  bool ablation = false;
  //! Grid for g_circ and the jump density, shared by every run.
  UniformGrid x_grid{ -6.0, 6.0, 2001 };
  //! Curves (ECF, g_hat, g_circ_plus, s_n) are written for the first this-many runs of each n.
  int save_curves = 0;

  // Execution knobs; they never influence report contents.
  std::filesystem::path outputs;
  int workers = 1;

  //! Throws InvalidArgument.
  void validate() const;
  //! Estimator knobs for sample size n after applying the schedule.
  EstimatorConfig estimator_for(std::size_t n) const;
};

//! Unknown keys are rejected so a config file cannot silently drift.
StudyConfig study_config_from_json(const io::json& j);
//! The study definition only; `outputs` and `workers` are omitted.
io::json to_json(const StudyConfig& config);

struct RunError
{
  std::string stage; // "pipeline", "mixture", "ablation", "curves", "em"
  std::string code;
  std::string message;
};

struct RunRecord
{
  std::size_t n = 0;
  int run_id = 0;
  std::uint64_t seed = 0;
  std::optional<TripletEstimate> triplet;
  std::optional<double> p_abs_error;
  std::optional<double> sigma2_abs_error;
  std::optional<double> l2_g_circ;        // positive part vs exact
  std::optional<double> l2_g_circ_signed; // signed estimate vs exact
  std::optional<bool> nodewise_dominance;
  std::optional<double> l2_g_circ_ablation;
  std::optional<double> l2_g_circ_ablation_signed;
  std::optional<double> l2_jump; // s_n vs the nu-tilde density
  std::optional<EmResult> em;
  std::optional<double> em_p_abs_error;
  std::vector<RunError> errors;
  double wall_time = 0.0; // seconds; kept out of the deterministic files

  bool failed() const noexcept { return !triplet.has_value(); }
};

io::json to_json(const RunRecord& r);
RunRecord run_record_from_json(const io::json& j);

struct StudyReport
{
  StudyConfig config;
  std::vector<RunRecord> records; // ordered by (n index, run_id)
  io::json summary;
};

//! Per-n type-7 quantiles (min, q25, median, q75, max) of every error metric,
//! failure counts and the full/ablation ratio of median g_circ errors.
io::json summarize(const StudyConfig& config, const std::vector<RunRecord>& records);

//! Runs every (n, run) pair on `workers` OpenMP threads and, when
//! config.outputs is set, writes the report there.
StudyReport run_study(const StudyConfig& config);

//! records.jsonl, summary.json, config.json (deterministic) and timings.jsonl.
void write_report(const StudyReport& report, const std::filesystem::path& dir);
StudyReport read_report(const std::filesystem::path& dir);

std::filesystem::path curve_path(const std::filesystem::path& dir,
                                 std::size_t n,
                                 int run_id,
                                 const std::string& what);

} // namespace qid
