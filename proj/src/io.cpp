#include "qid/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/os.h>

namespace qid::io {

namespace {

template<class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};

double number(const json& j, const char* key)
{
  if (!j.contains(key) || !j.at(key).is_number())
    throw Error(ErrorCode::BadSpec, std::string("model spec: missing numeric field '") + key + "'");
  return j.at(key).get<double>();
}

std::ofstream open_out(const std::filesystem::path& path)
{
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return in;
}

bool parse_double(std::string_view text, double& value)
{
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
    text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
    text.remove_suffix(1);
  if (text.empty())
    return false;
  std::string buf(text);
  char* end = nullptr;
  value = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size() && std::isfinite(value);
}

std::vector<std::vector<double>> read_table(const std::filesystem::path& path, std::size_t columns)
{
  auto in = open_in(path);
  std::string line;
  std::vector<std::vector<double>> rows;
  long long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1)
      continue; // header
    if (line.empty())
      continue;
    std::vector<double> row;
    std::string_view rest(line);
    for (std::size_t c = 0; c < columns; ++c) {
      const auto comma = rest.find(',');
      const auto field = rest.substr(0, comma);
      double v;
      if (!parse_double(field, v))
        throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": bad field",
                    line_no);
      row.push_back(v);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

UniformGrid grid_from_column(const std::vector<std::vector<double>>& rows, const std::filesystem::path& path)
{
  if (rows.size() < 2)
    throw Error(ErrorCode::ParseError, path.string() + ": need at least two rows");
  return UniformGrid(rows.front()[0], rows.back()[0], rows.size());
}

} // namespace

std::string format_double(double v)
{
  return fmt::format("{}", v);
}

json to_json(const ModelSpec& spec)
{
  return std::visit(overloaded{
                      [](const TwoNormalMixture& m) {
                        return json{ { "type", "two_normal_mixture" },
                                     { "p", m.p },
                                     { "sigma1_sq", m.sigma1_sq },
                                     { "sigma2_sq", m.sigma2_sq } };
                      },
                      [](const BartSimpsonModified& m) {
                        return json{ { "type", "bart_simpson_modified" },
                                     { "delta", m.delta },
                                     { "sigma1", m.sigma1 },
                                     { "sigma2", m.sigma2 } };
                      },
                      [](const StudentPlusNormalMixture& m) {
                        return json{ { "type", "student_plus_normal_mixture" },
                                     { "p", m.p },
                                     { "dof", m.dof },
                                     { "sigma1_sq", m.sigma1_sq },
                                     { "sigma2_sq", m.sigma2_sq } };
                      },
                      [](const PureNormal& m) {
                        return json{ { "type", "pure_normal" }, { "sigma_sq", m.sigma_sq } };
                      },
                    },
                    spec);
}

ModelSpec model_from_json(const json& j)
{
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
    throw Error(ErrorCode::BadSpec, "model spec must be an object with a string 'type'");
  const auto type = j.at("type").get<std::string>();
  ModelSpec spec;
  if (type == "two_normal_mixture")
    spec = TwoNormalMixture{ number(j, "p"), number(j, "sigma1_sq"), number(j, "sigma2_sq") };
  else if (type == "bart_simpson_modified")
    spec = BartSimpsonModified{ number(j, "delta"), number(j, "sigma1"), number(j, "sigma2") };
  else if (type == "student_plus_normal_mixture")
    spec = StudentPlusNormalMixture{ number(j, "p"), number(j, "dof"), number(j, "sigma1_sq"),
                                     number(j, "sigma2_sq") };
  else if (type == "pure_normal")
    spec = PureNormal{ number(j, "sigma_sq") };
  else
    throw Error(ErrorCode::BadSpec, "unknown model type '" + type + "'");
  validate(spec);
  return spec;
}

json to_json(const TripletEstimate& t)
{
  json j{ { "gamma_star", t.gamma_star },
          { "sigma2", t.sigma2 },
          { "lambda_star", t.lambda_star },
          { "p_hat", t.p_hat },
          { "raw_sigma2", t.raw_sigma2 },
          { "raw_lambda_star", t.raw_lambda_star },
          { "min_modulus", t.diagnostics.min_modulus },
          { "u_max", t.diagnostics.u_max },
          { "U", t.U },
          { "V", t.V },
          { "epsilon", t.epsilon },
          { "grid_count", t.grid_count },
          { "n", t.n } };
  j["T"] = t.T ? json(*t.T) : json(nullptr);
  j["seed"] = t.seed ? json(*t.seed) : json(nullptr);
  if (t.diagnostics.max_relative_deviation)
    j["max_relative_deviation"] = *t.diagnostics.max_relative_deviation;
  return j;
}

json to_json(const EmResult& r)
{
  return json{ { "p_hat", r.p_hat },
               { "sigma1_sq_hat", r.sigma1_sq_hat },
               { "sigma2_sq_hat", r.sigma2_sq_hat },
               { "iterations", r.iterations },
               { "converged", r.converged },
               { "loglik_trace", r.loglik_trace } };
}

json to_json(const UniformGrid& g)
{
  return json{ { "start", g.start() }, { "stop", g.stop() }, { "count", g.count() } };
}

UniformGrid grid_from_json(const json& j)
{
  try {
    return UniformGrid(j.at("start").get<double>(), j.at("stop").get<double>(), j.at("count").get<std::size_t>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("grid: ") + e.what());
  }
}

void write_csv(const std::filesystem::path& path, const ComplexSeries& series)
{
  auto out = open_out(path);
  out << "u,re,im\n";
  for (std::size_t k = 0; k < series.values.size(); ++k)
    out << fmt::format("{},{},{}\n", series.grid.node(k), series.values[k].real(), series.values[k].imag());
}

void write_csv(const std::filesystem::path& path, const DensityCurve& curve)
{
  auto out = open_out(path);
  out << "x,value\n";
  for (std::size_t k = 0; k < curve.values.size(); ++k)
    out << fmt::format("{},{}\n", curve.grid.node(k), curve.values[k]);
}

DensityCurve read_density_csv(const std::filesystem::path& path)
{
  const auto rows = read_table(path, 2);
  DensityCurve out{ grid_from_column(rows, path), {} };
  for (const auto& r : rows)
    out.values.push_back(r[1]);
  return out;
}

ComplexSeries read_complex_csv(const std::filesystem::path& path)
{
  const auto rows = read_table(path, 3);
  ComplexSeries out{ grid_from_column(rows, path), {} };
  for (const auto& r : rows)
    out.values.emplace_back(r[1], r[2]);
  return out;
}

void write_sample_csv(const std::filesystem::path& path, const Sample& sample)
{
  auto out = open_out(path);
  for (double v : sample.values)
    out << fmt::format("{}\n", v);
}

Sample read_sample_csv(const std::filesystem::path& path)
{
  auto in = open_in(path);
  Sample out;
  std::string line;
  long long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    double v;
    if (!parse_double(line, v))
      throw Error(ErrorCode::ParseError,
                  path.string() + ":" + std::to_string(line_no) + ": cannot parse '" + line + "' as a real",
                  line_no);
    out.values.push_back(v);
  }
  return out;
}

json to_json(const MixtureEstimate& m,
             const std::filesystem::path& g_hat_csv,
             const std::filesystem::path& g_circ_plus_csv)
{
  return json{ { "p_hat", m.p_hat },
               { "sigma2_hat", m.sigma2_hat },
               { "h", m.h },
               { "x_grid", to_json(m.g_hat.grid) },
               { "g_hat_csv", g_hat_csv.string() },
               { "g_circ_plus_csv", g_circ_plus_csv.string() } };
}

} // namespace qid::io
