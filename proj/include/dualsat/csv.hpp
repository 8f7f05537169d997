#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dualsat/montecarlo.hpp"

namespace dualsat {

inline constexpr std::string_view kVersion = "0.3.1";

/// `#` lines with the version and the resolved configuration.
std::string output_preamble(const ExperimentConfig& config);

/// scenario,algorithm,snr_db,mean_sr_bps_hz,std_sr,trials,discards
std::string summary_csv(const ExperimentConfig& config, const ExperimentSummary& summary);

/// One row per trial, case and SNR point; a discarded trial gets a single row
/// with the case columns left empty.
std::string trials_csv(const ExperimentConfig& config, const std::vector<TrialResult>& trials);

/// Summary cells with the pool size as an extra column, for plotting against
/// SNR or pool size.
std::string sweep_csv(const ExperimentConfig& config, const ExperimentSummary& summary);

/// Fixed-width table for the terminal.
std::string summary_table(const ExperimentSummary& summary);

/// Writes bytes unchanged (no newline translation).
void write_text(const std::filesystem::path& path, std::string_view content);

}  // namespace dualsat
