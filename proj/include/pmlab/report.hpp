#pragma once

#include <string>
#include <string_view>

#include "pmlab/photonlab.hpp"

namespace pmlab::report {

using photonlab::ExperimentReport;

/// Shortest stable text form of a double ("%.10g"); non-finite values print
/// as "inf", "-inf", "nan".
std::string format_double(double v);

/// Parse a double produced by format_double; InvalidInput on garbage.
double parse_double(std::string_view text);

/// CSV with "#"-prefixed run metadata, one header row and one data row per
/// state. Writing a parsed report again is byte-identical.
std::string write_csv(const ExperimentReport& report);

/// Inverse of write_csv; ParseError (with the offending 1-based data row)
/// on malformed input.
ExperimentReport read_csv(std::string_view text);

/// JSON object with the same content; sd_violation is null when not finite.
std::string write_json(const ExperimentReport& report);

/// Inverse of write_json.
ExperimentReport read_json(std::string_view text);

/// Write text to path, throwing InvalidInput when the file cannot be opened.
void save_text(const std::string& path, std::string_view text);

/// Read a whole file, throwing InvalidInput when it cannot be opened.
std::string load_text(const std::string& path);

}  // namespace pmlab::report
