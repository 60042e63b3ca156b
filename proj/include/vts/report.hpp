#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vts/experiment.hpp"

namespace vts {

// %.17g, so every double round-trips through text.
std::string format_double(double v);

std::string regret_csv(const ExperimentResult& result);
std::string mse_csv(const ExperimentResult& result);

struct RunTimestamps {
  std::string started;
  std::string finished;
};

std::string iso8601_now();

nlohmann::json build_manifest(const ExperimentConfig& config, const ExperimentResult& result,
                              const RunTimestamps& times, std::size_t workers);

struct EmittedFiles {
  std::filesystem::path regret;
  std::filesystem::path mse;
  std::filesystem::path manifest;
};

// Writes regret.csv, mse.csv and manifest.json into output_dir (created if missing).
// I/O failures throw std::runtime_error naming the path.
EmittedFiles emit_csv(const ExperimentResult& result, const nlohmann::json& manifest,
                      const std::filesystem::path& output_dir);

struct RegretSeries {
  std::size_t components = 0;
  std::vector<double> t;
  std::vector<double> mean;
  std::vector<double> std;
};

// Parses regret.csv. Throws ParseError (with the 1-based line) on malformed input or when
// there is no data after the header.
std::vector<RegretSeries> parse_regret_csv(std::istream& in);

std::string render_regret_svg(const std::vector<RegretSeries>& series);

// Reads regret.csv and writes the SVG plot; nothing is written if parsing fails.
void emit_plot(const std::filesystem::path& regret_csv_path, const std::filesystem::path& out);

}  // namespace vts
