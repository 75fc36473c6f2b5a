#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qid/study.hpp"

namespace qid {

enum class PlotKind { Boxplot, DensityOverlay, CfOverlay };

struct PlotOptions
{
  //! Boxplot quantity: any per-record scalar, e.g. "p_hat", "sigma2", "p_abs_error", "l2_g_circ".
  std::string metric = "p_hat";
  //! CfOverlay: sample size to draw (defaults to the first n of the study).
  std::optional<std::size_t> n;
  std::size_t max_curves = 20;
};

//! Writes standalone SVG files plus the CSV each one was drawn from into
//! `out_dir` and returns the SVG paths. Overlays read the curves a study
//! saved under `report.config.outputs`. Throws EmptyReport when there is
//! nothing to draw.
std::vector<std::filesystem::path> emit_plots(const StudyReport& report,
                                              PlotKind kind,
                                              const std::filesystem::path& out_dir,
                                              const PlotOptions& options = {});

} // namespace qid
