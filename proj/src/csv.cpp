#include "dualsat/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "dualsat/config.hpp"

namespace dualsat {

namespace {

std::string cell_row(const CellKey& key, const CellStats& stats, bool with_pool)
{
    std::string row = std::string(to_string(key.scenario)) + "," + std::string(to_string(key.algorithm)) + ","
                      + format_number(key.snr_db) + ",";
    if (with_pool)
        row += std::to_string(key.pool_size) + ",";
    row += format_number(stats.mean()) + "," + format_number(stats.stddev()) + "," + std::to_string(stats.trials())
           + "," + std::to_string(stats.discards) + "\n";
    return row;
}

}  // namespace

std::string output_preamble(const ExperimentConfig& config)
{
    std::string out = "# dualsat " + std::string(kVersion) + "\n";
    const std::string body = format_config(config);
    std::size_t pos = 0;
    while (pos < body.size()) {
        const auto nl = body.find('\n', pos);
        out += "# " + body.substr(pos, nl - pos) + "\n";
        pos = nl + 1;
    }
    return out;
}

std::string summary_csv(const ExperimentConfig& config, const ExperimentSummary& summary)
{
    std::string out = output_preamble(config);
    out += "scenario,algorithm,snr_db,mean_sr_bps_hz,std_sr,trials,discards\n";
    for (const auto& [key, stats] : summary.cells)
        out += cell_row(key, stats, false);
    return out;
}

std::string trials_csv(const ExperimentConfig& config, const std::vector<TrialResult>& trials)
{
    std::string out = output_preamble(config);
    out += "trial,seed,pool_size,discarded,redraws,siua_clamp_events,scenario,algorithm,snr_db,sum_rate_bps_hz,"
           "rate_sat1_bps_hz,rate_sat2_bps_hz\n";
    for (const auto& t : trials) {
        const std::string head = std::to_string(t.trial_index) + "," + std::to_string(t.seed) + ","
                                 + std::to_string(t.pool_size) + "," + (t.discarded ? "1" : "0") + ","
                                 + std::to_string(t.redraws) + "," + std::to_string(t.siua_clamp_events) + ",";
        if (t.discarded) {
            out += head + ",,,,,\n";
            continue;
        }
        for (const auto& r : t.results)
            out += head + std::string(to_string(r.scenario)) + "," + std::string(to_string(r.algorithm)) + ","
                   + format_number(r.snr_db) + "," + format_number(r.sum_rate) + ","
                   + format_number(r.per_satellite_rates.first) + "," + format_number(r.per_satellite_rates.second)
                   + "\n";
    }
    return out;
}

std::string sweep_csv(const ExperimentConfig& config, const ExperimentSummary& summary)
{
    std::string out = output_preamble(config);
    out += "scenario,algorithm,snr_db,pool_size,mean_sr_bps_hz,std_sr,trials,discards\n";
    for (const auto& [key, stats] : summary.cells)
        out += cell_row(key, stats, true);
    return out;
}

std::string summary_table(const ExperimentSummary& summary)
{
    std::string out;
    char line[160];
    std::snprintf(line, sizeof line, "%-17s %-9s %7s %6s %10s %8s %6s %8s\n", "scenario", "algorithm", "snr_db", "pool",
                  "mean_sr", "std_sr", "trials", "discards");
    out += line;
    for (const auto& [key, stats] : summary.cells) {
        std::snprintf(line, sizeof line, "%-17s %-9s %7.2f %6d %10.4f %8.4f %6d %8d\n",
                      std::string(to_string(key.scenario)).c_str(), std::string(to_string(key.algorithm)).c_str(),
                      key.snr_db, key.pool_size, stats.mean(), stats.stddev(), stats.trials(), stats.discards);
        out += line;
    }
    return out;
}

void write_text(const std::filesystem::path& path, std::string_view content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

}  // namespace dualsat
