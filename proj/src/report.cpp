#include "pmlab/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "pmlab/errors.hpp"

namespace pmlab::report {

namespace {

constexpr const char* kHeaderRow =
    "state,h1,h2,h3,h4,h5,h6,"
    "sigma_h1,sigma_h2,sigma_h3,sigma_h4,sigma_h5,sigma_h6,"
    "margin,sigma_margin,sd_violation";
constexpr std::size_t kColumns = 16;

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::string_view metadata_value(std::string_view line, std::string_view key) {
  // Lines look like "# key: value".
  std::string_view body = trim(line.substr(1));
  if (body.substr(0, key.size()) != key) {
    throw InvalidInput("expected metadata key '" + std::string(key) + "'");
  }
  body.remove_prefix(key.size());
  body = trim(body);
  if (body.empty() || body.front() != ':') {
    throw InvalidInput("expected ': ' after metadata key '" + std::string(key) + "'");
  }
  return trim(body.substr(1));
}

long long parse_integer(std::string_view text) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidInput("malformed integer '" + std::string(text) + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(std::string_view text) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidInput("malformed unsigned integer '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double parse_double(std::string_view text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidInput("malformed number '" + std::string(text) + "'");
  }
  return v;
}

std::string write_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "# version: " << report.version << "\n";
  out << "# master_seed: " << report.master_seed << "\n";
  out << "# shots: " << report.shots << "\n";
  out << "# resamples: " << report.resamples << "\n";
  out << "# noise: " << report.noise << "\n";
  out << "# mode: " << report.mode << "\n";
  out << kHeaderRow << "\n";
  for (const auto& row : report.rows) {
    out << row.state_label;
    for (double h : row.entropy) out << ',' << format_double(h);
    for (double s : row.entropy_sigma) out << ',' << format_double(s);
    out << ',' << format_double(row.margin);
    out << ',' << format_double(row.margin_sigma);
    out << ',' << format_double(row.sd_violation);
    out << "\n";
  }
  return out.str();
}

ExperimentReport read_csv(std::string_view text) {
  std::vector<std::string_view> lines = split(text, '\n');
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.size() < 7) throw InvalidInput("truncated report: header incomplete");

  ExperimentReport report;
  report.version = std::string(metadata_value(lines[0], "version"));
  report.master_seed = parse_unsigned(metadata_value(lines[1], "master_seed"));
  report.shots = parse_integer(metadata_value(lines[2], "shots"));
  report.resamples = static_cast<int>(parse_integer(metadata_value(lines[3], "resamples")));
  report.noise = std::string(metadata_value(lines[4], "noise"));
  report.mode = std::string(metadata_value(lines[5], "mode"));
  if (trim(lines[6]) != kHeaderRow) {
    throw InvalidInput("unexpected column header row");
  }

  for (std::size_t i = 7; i < lines.size(); ++i) {
    int row_index = static_cast<int>(i) - 6;
    std::string_view line = trim(lines[i]);
    if (line.empty()) continue;
    std::vector<std::string_view> fields = split(line, ',');
    if (fields.size() != kColumns) {
      throw ParseError("expected 16 fields, found " + std::to_string(fields.size()),
                       row_index);
    }
    photonlab::ReportRow row;
    row.state_label = std::string(fields[0]);
    try {
      for (std::size_t j = 0; j < 6; ++j) row.entropy[j] = parse_double(fields[1 + j]);
      for (std::size_t j = 0; j < 6; ++j)
        row.entropy_sigma[j] = parse_double(fields[7 + j]);
      row.margin = parse_double(fields[13]);
      row.margin_sigma = parse_double(fields[14]);
      row.sd_violation = parse_double(fields[15]);
    } catch (const InvalidInput& err) {
      throw ParseError(err.what(), row_index);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string write_json(const ExperimentReport& report) {
  nlohmann::json doc;
  doc["version"] = report.version;
  doc["master_seed"] = report.master_seed;
  doc["shots"] = report.shots;
  doc["resamples"] = report.resamples;
  doc["noise"] = report.noise;
  doc["mode"] = report.mode;
  doc["rows"] = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json jrow;
    jrow["state"] = row.state_label;
    jrow["entropy"] = row.entropy;
    jrow["entropy_sigma"] = row.entropy_sigma;
    jrow["margin"] = row.margin;
    jrow["margin_sigma"] = row.margin_sigma;
    if (std::isfinite(row.sd_violation)) {
      jrow["sd_violation"] = row.sd_violation;
    } else {
      jrow["sd_violation"] = nullptr;
    }
    doc["rows"].push_back(std::move(jrow));
  }
  return doc.dump(2) + "\n";
}

ExperimentReport read_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& err) {
    throw InvalidInput(std::string("malformed JSON report: ") + err.what());
  }
  try {
    ExperimentReport report;
    report.version = doc.at("version").get<std::string>();
    report.master_seed = doc.at("master_seed").get<std::uint64_t>();
    report.shots = doc.at("shots").get<long long>();
    report.resamples = doc.at("resamples").get<int>();
    report.noise = doc.at("noise").get<std::string>();
    report.mode = doc.at("mode").get<std::string>();
    for (const auto& jrow : doc.at("rows")) {
      photonlab::ReportRow row;
      row.state_label = jrow.at("state").get<std::string>();
      row.entropy = jrow.at("entropy").get<std::array<double, 6>>();
      row.entropy_sigma = jrow.at("entropy_sigma").get<std::array<double, 6>>();
      row.margin = jrow.at("margin").get<double>();
      row.margin_sigma = jrow.at("margin_sigma").get<double>();
      const auto& sd = jrow.at("sd_violation");
      row.sd_violation =
          sd.is_null() ? std::numeric_limits<double>::infinity() : sd.get<double>();
      report.rows.push_back(std::move(row));
    }
    return report;
  } catch (const nlohmann::json::exception& err) {
    throw InvalidInput(std::string("unexpected JSON report shape: ") + err.what());
  }
}

void save_text(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot open '" + path + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw InvalidInput("failed writing '" + path + "'");
}

std::string load_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace pmlab::report
