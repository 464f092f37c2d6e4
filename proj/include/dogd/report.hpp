#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "dogd/bench.hpp"

namespace dogd {

/// File-system failure with the offending path in the message.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kCsvHeader = "experiment,rep,delay,t,regret_cum,regret_avg,gap_smoothed,eta,seed";
inline constexpr const char* kSummaryHeader = "experiment,delay,iter_threshold,std_final,time_mean_s";

/// Shortest text that parses back to the same double.
std::string format_double(double v);

std::string csv_text(const std::vector<RunRecord>& records);
std::vector<RunRecord> parse_csv(const std::string& text);

std::string summary_text(const std::vector<SummaryRow>& rows);

/// Summary rebuilt from subsampled records: per-repetition crossing of
/// gap_smoothed at the recorded rounds, std of the last regret_avg per run.
/// Timing is not recorded in the CSV, so time_mean_s is NaN.
std::vector<SummaryRow> summarize_records(const std::vector<RunRecord>& records, double threshold);

/// SVG line chart of the mean average regret per (experiment, delay) with a
/// +-1 std band across repetitions.
std::string plot_svg(const std::vector<RunRecord>& records, const std::string& title = "");

void emit_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path);
void emit_summary(const std::vector<SummaryRow>& rows, const std::filesystem::path& path);
void emit_plot(const std::vector<RunRecord>& records, const std::filesystem::path& path,
               const std::string& title = "");

std::vector<RunRecord> read_csv(const std::filesystem::path& path);

/// Writes `text` to `path`, creating parent directories; throws IoError.
void write_file(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

}  // namespace dogd
