#include "vts/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace vts {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string regret_csv(const ExperimentResult& result) {
  std::string out = "K,t,mean_cum_regret,std_cum_regret\n";
  for (const auto& sweep : result.sweeps) {
    const auto& agg = sweep.aggregate;
    for (std::size_t t = 0; t < agg.horizon(); ++t) {
      out += std::to_string(sweep.components) + "," + std::to_string(t + 1) + "," +
             format_double(agg.regret_mean[t]) + "," + format_double(agg.regret_std[t]) + "\n";
    }
  }
  return out;
}

std::string mse_csv(const ExperimentResult& result) {
  std::string out = "K,arm,mse_mean,mse_std\n";
  for (const auto& sweep : result.sweeps) {
    const auto& agg = sweep.aggregate;
    for (std::size_t a = 0; a < agg.mse_mean.size(); ++a) {
      out += std::to_string(sweep.components) + "," + std::to_string(a) + "," +
             format_double(agg.mse_mean[a]) + "," + format_double(agg.mse_std[a]) + "\n";
    }
  }
  return out;
}

std::string iso8601_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json build_manifest(const ExperimentConfig& config, const ExperimentResult& result,
                    const RunTimestamps& times, std::size_t workers) {
  json sweeps = json::array();
  for (const auto& s : result.sweeps) {
    json failures = json::array();
    for (const auto& f : s.failures) {
      failures.push_back(json{{"realization", f.realization}, {"seed", f.seed}, {"error", f.error}});
    }
    sweeps.push_back(json{
        {"K", s.components},
        {"realizations_aggregated", s.aggregate.realizations},
        {"seeds", s.seeds},
        {"failed_realizations", std::move(failures)},
        {"warnings",
         {{"beta_clamps", s.totals.rate_clamps},
          {"unconverged_inference_calls", s.totals.unconverged_calls}}},
        {"inference", {{"calls", s.totals.inference_calls}, {"sweeps", s.totals.sweeps}}},
    });
  }
  return json{{"software", {{"name", "vts"}, {"version", VTS_VERSION}}},
              {"config", to_json(config)},
              {"workers", workers},
              {"started", times.started},
              {"finished", times.finished},
              {"sweeps", std::move(sweeps)}};
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << contents;
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

EmittedFiles emit_csv(const ExperimentResult& result, const json& manifest,
                      const std::filesystem::path& output_dir) {
  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory " + output_dir.string() + ": " +
                             ec.message());
  }
  EmittedFiles files{output_dir / "regret.csv", output_dir / "mse.csv",
                     output_dir / "manifest.json"};
  write_file(files.regret, regret_csv(result));
  write_file(files.mse, mse_csv(result));
  write_file(files.manifest, manifest.dump(2) + "\n");
  return files;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ',')) fields.push_back(cur);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_number(const std::string& s, std::size_t line) {
  if (s.empty()) throw ParseError("empty numeric field", line);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError("not a number: \"" + s + "\"", line);
  }
  if (used != s.size()) throw ParseError("trailing characters in \"" + s + "\"", line);
  return v;
}

}  // namespace

std::vector<RegretSeries> parse_regret_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty input, expected a header", 1);
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "K,t,mean_cum_regret,std_cum_regret") {
    throw ParseError("unexpected header \"" + line + "\"", line_no);
  }

  std::vector<RegretSeries> series;
  std::map<std::size_t, std::size_t> index_of;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 4) {
      throw ParseError("expected 4 fields, found " + std::to_string(f.size()), line_no);
    }
    const double k = parse_number(f[0], line_no);
    if (!(k >= 1.0) || k != std::floor(k)) throw ParseError("K must be a positive integer", line_no);
    const auto kk = static_cast<std::size_t>(k);
    auto it = index_of.find(kk);
    if (it == index_of.end()) {
      it = index_of.emplace(kk, series.size()).first;
      series.push_back({kk, {}, {}, {}});
    }
    auto& s = series[it->second];
    s.t.push_back(parse_number(f[1], line_no));
    s.mean.push_back(parse_number(f[2], line_no));
    const double sd = parse_number(f[3], line_no);
    if (sd < 0.0) throw ParseError("negative standard deviation", line_no);
    s.std.push_back(sd);
  }
  if (series.empty()) throw ParseError("no data rows after the header", line_no);
  return series;
}

namespace {

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::string render_regret_svg(const std::vector<RegretSeries>& series) {
  constexpr double width = 800, height = 500;
  constexpr double left = 80, right = 150, top = 30, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double tmin = std::numeric_limits<double>::infinity(), tmax = -tmin;
  double ymin = tmin, ymax = -tmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      tmin = std::min(tmin, s.t[i]);
      tmax = std::max(tmax, s.t[i]);
      ymin = std::min(ymin, s.mean[i] - s.std[i]);
      ymax = std::max(ymax, s.mean[i] + s.std[i]);
    }
  }
  if (tmax <= tmin) tmax = tmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  const auto px = [&](double t) { return left + (t - tmin) / (tmax - tmin) * plot_w; };
  const auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  svg << "<g id=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
  svg << "<line x1=\"" << fmt2(left) << "\" y1=\"" << fmt2(top + plot_h) << "\" x2=\""
      << fmt2(left + plot_w) << "\" y2=\"" << fmt2(top + plot_h) << "\"/>\n";
  svg << "<line x1=\"" << fmt2(left) << "\" y1=\"" << fmt2(top) << "\" x2=\"" << fmt2(left)
      << "\" y2=\"" << fmt2(top + plot_h) << "\"/>\n";
  svg << "</g>\n";

  svg << "<g id=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double t = tmin + (tmax - tmin) * i / 5.0;
    const double y = ymin + (ymax - ymin) * i / 5.0;
    svg << "<text x=\"" << fmt2(px(t)) << "\" y=\"" << fmt2(top + plot_h + 16)
        << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
    svg << "<text x=\"" << fmt2(left - 6) << "\" y=\"" << fmt2(py(y) + 4)
        << "\" text-anchor=\"end\">" << tick_label(y) << "</text>\n";
  }
  svg << "</g>\n";
  svg << "<text id=\"xlabel\" x=\"" << fmt2(left + plot_w / 2) << "\" y=\"" << fmt2(height - 15)
      << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">t</text>\n";
  svg << "<text id=\"ylabel\" x=\"20\" y=\"" << fmt2(top + plot_h / 2)
      << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 20 "
      << fmt2(top + plot_h / 2) << ")\">cumulative regret</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % std::size(kPalette)];
    svg << "<g class=\"curve\" data-k=\"" << s.components << "\">\n";
    svg << "<path class=\"band\" fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" d=\"";
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      svg << (i == 0 ? "M" : " L") << fmt2(px(s.t[i])) << "," << fmt2(py(s.mean[i] + s.std[i]));
    }
    for (std::size_t i = s.t.size(); i-- > 0;) {
      svg << " L" << fmt2(px(s.t[i])) << "," << fmt2(py(s.mean[i] - s.std[i]));
    }
    svg << " Z\"/>\n";
    svg << "<polyline class=\"mean\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      svg << (i == 0 ? "" : " ") << fmt2(px(s.t[i])) << "," << fmt2(py(s.mean[i]));
    }
    svg << "\"/>\n";
    const double ly = top + 20 + 20.0 * static_cast<double>(si);
    svg << "<line x1=\"" << fmt2(left + plot_w + 15) << "\" y1=\"" << fmt2(ly) << "\" x2=\""
        << fmt2(left + plot_w + 40) << "\" y2=\"" << fmt2(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << fmt2(left + plot_w + 45) << "\" y=\"" << fmt2(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">VTS with K=" << s.components
        << "</text>\n";
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_plot(const std::filesystem::path& regret_csv_path, const std::filesystem::path& out) {
  std::ifstream in(regret_csv_path);
  if (!in) throw std::runtime_error("cannot open " + regret_csv_path.string());
  const auto series = parse_regret_csv(in);
  const std::string svg = render_regret_svg(series);
  write_file(out, svg);
}

}  // namespace vts
