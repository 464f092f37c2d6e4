#include "dogd/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace dogd {

std::string format_double(double v) { return fmt::format("{}", v); }

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_field(const std::string& text, int lineno, const char* name) {
  T v{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    // from_chars rejects "inf"/"nan" spellings produced by fmt only in
    // degenerate runs; accept them explicitly.
    if constexpr (std::is_floating_point_v<T>) {
      if (text == "inf") return std::numeric_limits<T>::infinity();
      if (text == "-inf") return -std::numeric_limits<T>::infinity();
      if (text == "nan") return std::numeric_limits<T>::quiet_NaN();
    }
    throw std::invalid_argument("csv line " + std::to_string(lineno) + ": bad " + name + " '" + text + "'");
  }
  return v;
}

struct Band {
  std::string experiment;
  int delay = 1;
  std::vector<int> t;
  std::vector<double> mean;
  std::vector<double> std;
};

std::vector<Band> bands(const std::vector<RunRecord>& records) {
  std::vector<std::pair<std::string, int>> order;
  std::map<std::pair<std::string, int>, std::map<int, std::vector<double>>> groups;
  for (const auto& r : records) {
    const auto key = std::make_pair(r.experiment, r.delay);
    if (!groups.count(key)) order.push_back(key);
    groups[key][r.t].push_back(r.regret_avg);
  }
  std::vector<Band> out;
  for (const auto& key : order) {
    Band b;
    b.experiment = key.first;
    b.delay = key.second;
    for (const auto& [t, values] : groups[key]) {
      double sum = 0.0;
      for (double v : values) sum += v;
      b.t.push_back(t);
      b.mean.push_back(sum / static_cast<double>(values.size()));
      b.std.push_back(sample_std(values));
    }
    out.push_back(std::move(b));
  }
  return out;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

std::string csv_text(const std::vector<RunRecord>& records) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : records) {
    if (r.experiment.find_first_of(",\n\r") != std::string::npos) {
      throw std::invalid_argument("csv: experiment label '" + r.experiment + "' contains a separator");
    }
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.experiment, r.rep, r.delay, r.t,
                       format_double(r.regret_cum), format_double(r.regret_avg),
                       format_double(r.gap_smoothed), format_double(r.eta), r.seed);
  }
  return out;
}

std::vector<RunRecord> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::invalid_argument("csv: missing or unexpected header");
  }
  std::vector<RunRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 9) throw std::invalid_argument("csv line " + std::to_string(lineno) + ": expected 9 fields");
    RunRecord r;
    r.experiment = f[0];
    r.rep = parse_field<int>(f[1], lineno, "rep");
    r.delay = parse_field<int>(f[2], lineno, "delay");
    r.t = parse_field<int>(f[3], lineno, "t");
    r.regret_cum = parse_field<double>(f[4], lineno, "regret_cum");
    r.regret_avg = parse_field<double>(f[5], lineno, "regret_avg");
    r.gap_smoothed = parse_field<double>(f[6], lineno, "gap_smoothed");
    r.eta = parse_field<double>(f[7], lineno, "eta");
    r.seed = parse_field<std::uint64_t>(f[8], lineno, "seed");
    out.push_back(std::move(r));
  }
  return out;
}

std::string summary_text(const std::vector<SummaryRow>& rows) {
  std::string out = kSummaryHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{}\n", r.experiment, r.delay,
                       r.iter_threshold ? std::to_string(*r.iter_threshold) : std::string("-"),
                       format_double(r.std_final),
                       std::isnan(r.time_mean_s) ? std::string("-") : format_double(r.time_mean_s));
  }
  return out;
}

std::vector<SummaryRow> summarize_records(const std::vector<RunRecord>& records, double threshold) {
  std::vector<std::pair<std::string, int>> order;
  struct Acc {
    std::map<int, std::optional<int>> crossing;  // rep -> first recorded t below threshold
    std::map<int, std::pair<int, double>> last;  // rep -> (t, regret_avg)
    std::map<int, double> last_cum;
  };
  std::map<std::pair<std::string, int>, Acc> groups;
  for (const auto& r : records) {
    const auto key = std::make_pair(r.experiment, r.delay);
    if (!groups.count(key)) order.push_back(key);
    Acc& a = groups[key];
    auto& c = a.crossing[r.rep];
    if (r.gap_smoothed < threshold && (!c || r.t < *c)) c = r.t;
    auto it = a.last.find(r.rep);
    if (it == a.last.end() || r.t >= it->second.first) {
      a.last[r.rep] = {r.t, r.regret_avg};
      a.last_cum[r.rep] = r.regret_cum;
    }
  }
  std::vector<SummaryRow> out;
  for (const auto& key : order) {
    const Acc& a = groups[key];
    SummaryRow row;
    row.experiment = key.first;
    row.delay = key.second;
    std::vector<std::optional<int>> crossings;
    for (const auto& [rep, c] : a.crossing) crossings.push_back(c);
    row.iter_threshold = mean_crossing(crossings);
    std::vector<double> finals;
    double cum = 0.0;
    for (const auto& [rep, v] : a.last) finals.push_back(v.second);
    for (const auto& [rep, v] : a.last_cum) cum += v;
    row.std_final = sample_std(finals);
    row.time_mean_s = std::numeric_limits<double>::quiet_NaN();
    row.mean_final_regret = cum / static_cast<double>(a.last_cum.size());
    out.push_back(std::move(row));
  }
  return out;
}

std::string plot_svg(const std::vector<RunRecord>& records, const std::string& title) {
  constexpr double W = 800, H = 500, left = 80, right = 220, top = 40, bottom = 60;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  const auto curves = bands(records);
  double tmin = 1, tmax = 1, ymin = 0, ymax = 0;
  bool first = true;
  for (const auto& b : curves) {
    for (std::size_t i = 0; i < b.t.size(); ++i) {
      const double lo = b.mean[i] - b.std[i], hi = b.mean[i] + b.std[i];
      if (first) {
        tmin = tmax = b.t[i];
        ymin = lo;
        ymax = hi;
        first = false;
      }
      tmin = std::min<double>(tmin, b.t[i]);
      tmax = std::max<double>(tmax, b.t[i]);
      ymin = std::min(ymin, lo);
      ymax = std::max(ymax, hi);
    }
  }
  if (tmax == tmin) tmax = tmin + 1;
  if (ymax == ymin) {
    const double pad = std::max(1.0, std::abs(ymin) * 0.1);
    ymin -= pad;
    ymax += pad;
  }
  const double pw = W - left - right, ph = H - top - bottom;
  auto sx = [&](double t) { return left + (t - tmin) / (tmax - tmin) * pw; };
  auto sy = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  std::string out;
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      W, H, W, H);
  out += fmt::format("<rect x=\"0\" y=\"0\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"white\"/>\n", W, H);
  if (!title.empty()) {
    out += fmt::format("<text x=\"{:.2f}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                       left + pw / 2, escape_xml(title));
  }
  out += fmt::format(
      "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" stroke=\"black\"/>\n", left,
      top, pw, ph);
  for (int i = 0; i <= 4; ++i) {
    const double t = tmin + (tmax - tmin) * i / 4.0;
    const double y = ymin + (ymax - ymin) * i / 4.0;
    out += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"black\"/>"
        "<text x=\"{0:.2f}\" y=\"{3:.2f}\" text-anchor=\"middle\">{4:.6g}</text>\n",
        sx(t), top + ph, top + ph + 5, top + ph + 20, t);
    out += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"black\"/>"
        "<text x=\"{3:.2f}\" y=\"{4:.2f}\" text-anchor=\"end\">{5:.4g}</text>\n",
        left - 5, sy(y), left, left - 8, sy(y) + 4, y);
  }
  out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">iteration</text>\n", left + pw / 2,
                     H - 15);
  out += fmt::format(
      "<text x=\"18\" y=\"{0:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0:.2f})\">average "
      "regret</text>\n",
      top + ph / 2);

  for (std::size_t c = 0; c < curves.size(); ++c) {
    const Band& b = curves[c];
    const char* color = palette[c % (sizeof(palette) / sizeof(palette[0]))];
    std::string band;
    for (std::size_t i = 0; i < b.t.size(); ++i) {
      band += fmt::format("{:.2f},{:.2f} ", sx(b.t[i]), sy(b.mean[i] + b.std[i]));
    }
    for (std::size_t i = b.t.size(); i-- > 0;) {
      band += fmt::format("{:.2f},{:.2f} ", sx(b.t[i]), sy(b.mean[i] - b.std[i]));
    }
    if (!band.empty()) band.pop_back();
    out += fmt::format("<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.2\" stroke=\"none\"/>\n", band, color);
    std::string line;
    for (std::size_t i = 0; i < b.t.size(); ++i) line += fmt::format("{:.2f},{:.2f} ", sx(b.t[i]), sy(b.mean[i]));
    if (!line.empty()) line.pop_back();
    out += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n", line, color);
    const double ly = top + 10 + 18.0 * static_cast<double>(c);
    out += fmt::format(
        "<g class=\"legend\"><line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"{3}\" "
        "stroke-width=\"2\"/><text x=\"{4:.2f}\" y=\"{5:.2f}\">{6} d={7}</text></g>\n",
        left + pw + 10, ly, left + pw + 30, color, left + pw + 35, ly + 4, escape_xml(b.experiment), b.delay);
  }
  out += "</svg>\n";
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void emit_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
  write_file(path, csv_text(records));
}

void emit_summary(const std::vector<SummaryRow>& rows, const std::filesystem::path& path) {
  write_file(path, summary_text(rows));
}

void emit_plot(const std::vector<RunRecord>& records, const std::filesystem::path& path, const std::string& title) {
  write_file(path, plot_svg(records, title));
}

std::vector<RunRecord> read_csv(const std::filesystem::path& path) { return parse_csv(read_file(path)); }

}  // namespace dogd
