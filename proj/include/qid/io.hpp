#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "qid/charfn.hpp"
#include "qid/em.hpp"
#include "qid/mixture.hpp"
#include "qid/models.hpp"
#include "qid/spectral.hpp"

namespace qid::io {

using nlohmann::json;

json to_json(const ModelSpec& spec);
//! Throws BadSpec on an unknown "type" or missing parameters.
ModelSpec model_from_json(const json& j);

json to_json(const TripletEstimate& t);
json to_json(const EmResult& r);
json to_json(const UniformGrid& g);
UniformGrid grid_from_json(const json& j);

//! Header `u,re,im`, one node per line.
void write_csv(const std::filesystem::path& path, const ComplexSeries& series);
//! Header `x,value`.
void write_csv(const std::filesystem::path& path, const DensityCurve& curve);
DensityCurve read_density_csv(const std::filesystem::path& path);
ComplexSeries read_complex_csv(const std::filesystem::path& path);

//! One value per line, no header.
void write_sample_csv(const std::filesystem::path& path, const Sample& sample);
//! Blank lines are skipped; anything else that is not a finite real is a
//! ParseError carrying the 1-based line number.
Sample read_sample_csv(const std::filesystem::path& path);

//! Parameters plus the file paths the curves were written to.
json to_json(const MixtureEstimate& m,
             const std::filesystem::path& g_hat_csv,
             const std::filesystem::path& g_circ_plus_csv);

std::string format_double(double v);

} // namespace qid::io
