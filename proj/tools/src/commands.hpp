#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"
#include "geoloc/error.hpp"

namespace geoloc::cli {

// File layout inside the output directory; each stage reads the files the
// previous one wrote.
struct OutputLayout {
  explicit OutputLayout(std::filesystem::path root);

  std::filesystem::path root;
  std::filesystem::path landmarks;              // place
  std::filesystem::path training_measurements;  // simulate
  std::filesystem::path training_csv;           // simulate, fit
  std::filesystem::path targets;                // simulate
  std::filesystem::path target_measurements;    // simulate
  std::filesystem::path curves_dir;             // fit
  std::filesystem::path fit_report;             // fit
  std::filesystem::path estimates_dir;          // locate
  std::filesystem::path eval_dir;               // eval
};

struct FitOptions {
  std::optional<std::filesystem::path> measurements;  // default: simulate output, else simulate now
};

struct LocateOptions {
  std::optional<std::filesystem::path> measurements;  // default: simulate output, else simulate now
  std::optional<std::string> target;                  // default: every target
};

void cmd_place(const PipelineConfig& config, std::ostream& log);
void cmd_simulate(const PipelineConfig& config, std::ostream& log);
void cmd_fit(const PipelineConfig& config, const FitOptions& options, std::ostream& log);
void cmd_locate(const PipelineConfig& config, const LocateOptions& options, std::ostream& log);
void cmd_eval(const PipelineConfig& config, std::ostream& log);

// Process exit code for an error category: 2 config, 3 data, 4 algorithm.
int exit_code_for(ErrorCategory category);

}  // namespace geoloc::cli
