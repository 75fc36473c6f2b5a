#include "qid/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "qid/charfn.hpp"

namespace qid {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 50.0;

const char* const kPalette[] = { "#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#ff7f0e", "#8c564b" };

struct Range
{
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v)
  {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void pad()
  {
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double m = 0.05 * (hi - lo);
    lo -= m;
    hi += m;
  }
};

class Svg
{
public:
  Svg(Range x, Range y, std::string title)
    : x_(x)
    , y_(y)
  {
    body_ += fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="12">)"
                         "\n",
                         kWidth, kHeight);
    body_ += fmt::format(R"(<rect width="100%" height="100%" fill="white"/>)"
                         "\n");
    body_ += fmt::format(R"(<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>)"
                         "\n",
                         kWidth / 2, title);
    axes();
  }

  double px(double x) const { return kLeft + (x - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom); }

  void polyline(const std::vector<double>& xs, const std::vector<double>& ys, const char* colour, double width,
                double opacity = 1.0)
  {
    std::string pts;
    for (std::size_t k = 0; k < xs.size(); ++k)
      if (std::isfinite(ys[k]))
        pts += fmt::format("{:.2f},{:.2f} ", px(xs[k]), py(ys[k]));
    body_ += fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="{}" stroke-opacity="{}" points="{}"/>)"
                         "\n",
                         colour, width, opacity, pts);
  }

  void line(double x0, double y0, double x1, double y1, const char* colour)
  {
    body_ += fmt::format(R"(<line x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="{}"/>)"
                         "\n",
                         px(x0), py(y0), px(x1), py(y1), colour);
  }

  void box(double x0, double x1, double y0, double y1, const char* colour)
  {
    body_ += fmt::format(
      R"(<rect x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="{}" fill-opacity="0.35" stroke="{}"/>)"
      "\n",
      px(x0), py(y1), px(x1) - px(x0), py(y0) - py(y1), colour, colour);
  }

  void text(double x, double y, const std::string& s, const char* anchor = "middle")
  {
    body_ += fmt::format(R"(<text x="{:.2f}" y="{:.2f}" text-anchor="{}">{}</text>)"
                         "\n",
                         px(x), py(y), anchor, s);
  }

  void legend(int slot, const char* colour, const std::string& label)
  {
    const double y = kTop + 14.0 * slot;
    body_ += fmt::format(R"(<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="3"/>)"
                         "\n",
                         kWidth - 170, y, kWidth - 150, y, colour);
    body_ += fmt::format(R"(<text x="{}" y="{}">{}</text>)"
                         "\n",
                         kWidth - 145, y + 4, label);
  }

  void save(const std::filesystem::path& path) const
  {
    std::ofstream out(path, std::ios::binary);
    if (!out)
      throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    out << body_ << "</svg>\n";
  }

private:
  void axes()
  {
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    body_ += fmt::format(R"(<path d="M{} {} L{} {} L{} {}" fill="none" stroke="black"/>)"
                         "\n",
                         x0, y1, x0, y0, x1, y0);
    for (int k = 0; k <= 4; ++k) {
      const double v = y_.lo + (y_.hi - y_.lo) * k / 4.0;
      body_ += fmt::format(R"(<text x="{}" y="{:.2f}" text-anchor="end">{:.3g}</text>)"
                           "\n",
                           x0 - 6, py(v) + 4, v);
    }
  }

  Range x_, y_;
  std::string body_;
};

std::optional<double> metric_value(const RunRecord& r, const std::string& metric, bool em)
{
  if (em) {
    if (!r.em)
      return std::nullopt;
    if (metric == "p_hat")
      return r.em->p_hat;
    if (metric == "sigma2")
      return r.em->sigma1_sq_hat;
    if (metric == "p_abs_error")
      return r.em_p_abs_error;
    return std::nullopt;
  }
  const auto j = to_json(r);
  if (j.contains(metric) && j.at(metric).is_number())
    return j.at(metric).get<double>();
  if (r.triplet) {
    const auto t = io::to_json(*r.triplet);
    if (t.contains(metric) && t.at(metric).is_number())
      return t.at(metric).get<double>();
  }
  return std::nullopt;
}

std::vector<double> sorted_quartiles(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  auto q = [&](double p) {
    const double h = (static_cast<double>(v.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    return lo + 1 >= v.size() ? v.back() : v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
  };
  return { v.front(), q(0.25), q(0.5), q(0.75), v.back() };
}

std::filesystem::path boxplot(const StudyReport& report, const std::filesystem::path& dir, const PlotOptions& opt)
{
  struct BoxData
  {
    std::string label;
    std::vector<double> stats;
    bool em;
  };
  std::vector<BoxData> boxes;
  std::ofstream csv(dir / ("boxplot_" + opt.metric + ".csv"), std::ios::binary);
  csv << "n,estimator,run_id,value\n";
  for (auto n : report.config.n_values)
    for (bool em : { false, true }) {
      std::vector<double> values;
      for (const auto& r : report.records)
        if (r.n == n)
          if (auto v = metric_value(r, opt.metric, em); v && std::isfinite(*v)) {
            values.push_back(*v);
            csv << fmt::format("{},{},{},{}\n", n, em ? "em" : "spectral", r.run_id, *v);
          }
      if (!values.empty())
        boxes.push_back({ fmt::format("{}{}", n, em ? " EM" : ""), sorted_quartiles(values), em });
    }
  if (boxes.empty())
    throw Error(ErrorCode::EmptyReport, "boxplot: no finite values of '" + opt.metric + "' in the report");

  Range x{ 0.0, static_cast<double>(boxes.size()) }, y;
  for (const auto& b : boxes)
    for (double v : b.stats)
      y.add(v);
  y.pad();
  Svg svg(x, y, fmt::format("{} ({}, {} runs)", opt.metric, model_tag(report.config.model), report.config.n_runs));
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto& s = boxes[i].stats;
    const double c = i + 0.5;
    const char* colour = boxes[i].em ? kPalette[2] : kPalette[1];
    svg.line(c, s[0], c, s[1], "black");
    svg.line(c, s[3], c, s[4], "black");
    svg.line(c - 0.15, s[0], c + 0.15, s[0], "black");
    svg.line(c - 0.15, s[4], c + 0.15, s[4], "black");
    svg.box(c - 0.3, c + 0.3, s[1], s[3], colour);
    svg.line(c - 0.3, s[2], c + 0.3, s[2], "black");
    svg.text(c, y.lo, boxes[i].label);
  }
  const auto path = dir / ("boxplot_" + opt.metric + ".svg");
  svg.save(path);
  return path;
}

std::filesystem::path cf_overlay(const StudyReport& report, const std::filesystem::path& dir, const PlotOptions& opt)
{
  const auto n = opt.n.value_or(report.config.n_values.front());
  std::vector<ComplexSeries> fans;
  for (int run = 0; run < report.config.n_runs && fans.size() < opt.max_curves; ++run) {
    const auto path = curve_path(report.config.outputs, n, run, "ecf");
    if (std::filesystem::exists(path))
      fans.push_back(io::read_complex_csv(path));
  }
  if (fans.empty())
    throw Error(ErrorCode::EmptyReport, fmt::format("cf overlay: no saved ECF curves for n = {}", n));

  const auto exact = exact_cf(report.config.model, fans.front().grid);
  const auto u = exact.grid.nodes();
  std::ofstream csv(dir / fmt::format("cf_overlay_n{}.csv", n), std::ios::binary);
  csv << "u,exact";
  for (std::size_t f = 0; f < fans.size(); ++f)
    csv << ",ecf" << f;
  csv << '\n';
  for (std::size_t k = 0; k < u.size(); ++k) {
    csv << fmt::format("{},{}", u[k], exact.values[k].real());
    for (const auto& f : fans)
      csv << fmt::format(",{}", f.values[k].real());
    csv << '\n';
  }

  Range x{ u.front(), u.back() }, y;
  for (const auto& f : fans)
    for (const auto& v : f.values)
      y.add(v.real());
  for (const auto& v : exact.values)
    y.add(v.real());
  y.pad();
  Svg svg(x, y, fmt::format("Re cf: {} ECF realisations, n = {}", fans.size(), n));
  auto real = [](const ComplexSeries& s) {
    std::vector<double> r;
    for (const auto& v : s.values)
      r.push_back(v.real());
    return r;
  };
  for (const auto& f : fans)
    svg.polyline(u, real(f), kPalette[1], 1.0, 0.5);
  svg.polyline(u, real(exact), "black", 2.0);
  svg.legend(0, "black", "exact");
  svg.legend(1, kPalette[1], "ECF");
  const auto path = dir / fmt::format("cf_overlay_n{}.svg", n);
  svg.save(path);
  return path;
}

std::vector<std::filesystem::path> density_overlays(const StudyReport& report,
                                                    const std::filesystem::path& dir,
                                                    const PlotOptions& opt)
{
  const auto exact = exact_g_circ(report.config.model, report.config.x_grid);
  const auto x = exact.grid.nodes();
  std::vector<std::filesystem::path> out;
  for (auto n : report.config.n_values) {
    std::vector<DensityCurve> curves;
    for (int run = 0; run < report.config.n_runs && curves.size() < opt.max_curves; ++run) {
      const auto path = curve_path(report.config.outputs, n, run, "g_circ_plus");
      if (std::filesystem::exists(path))
        curves.push_back(io::read_density_csv(path));
    }
    if (curves.empty())
      continue;

    std::ofstream csv(dir / fmt::format("density_overlay_n{}.csv", n), std::ios::binary);
    csv << "x,exact";
    for (std::size_t c = 0; c < curves.size(); ++c)
      csv << ",estimate" << c;
    csv << '\n';
    for (std::size_t k = 0; k < x.size(); ++k) {
      csv << fmt::format("{},{}", x[k], exact.values[k]);
      for (const auto& c : curves)
        csv << fmt::format(",{}", c.values[k]);
      csv << '\n';
    }

    Range xr{ x.front(), x.back() }, y;
    for (const auto& c : curves)
      for (double v : c.values)
        y.add(v);
    for (double v : exact.values)
      y.add(v);
    y.pad();
    Svg svg(xr, y, fmt::format("g_circ positive part vs exact, n = {}", n));
    for (const auto& c : curves)
      svg.polyline(x, c.values, kPalette[1], 1.0, 0.5);
    svg.polyline(x, exact.values, "black", 2.0);
    svg.legend(0, "black", "exact");
    svg.legend(1, kPalette[1], "estimate");
    const auto path = dir / fmt::format("density_overlay_n{}.svg", n);
    svg.save(path);
    out.push_back(path);
  }
  if (out.empty())
    throw Error(ErrorCode::EmptyReport, "density overlay: the study saved no g_circ curves");
  return out;
}

} // namespace

std::vector<std::filesystem::path> emit_plots(const StudyReport& report,
                                              PlotKind kind,
                                              const std::filesystem::path& out_dir,
                                              const PlotOptions& options)
{
  if (report.records.empty())
    throw Error(ErrorCode::EmptyReport, "report has no records");
  std::filesystem::create_directories(out_dir);
  switch (kind) {
    case PlotKind::Boxplot:
      return { boxplot(report, out_dir, options) };
    case PlotKind::CfOverlay:
      return { cf_overlay(report, out_dir, options) };
    case PlotKind::DensityOverlay:
      return density_overlays(report, out_dir, options);
  }
  return {};
}

} // namespace qid
