#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "hbc/types.hpp"
#include "json.hpp"

namespace hbc {

// Normative column order of the session CSV.
inline constexpr std::string_view kSessionCsvHeader =
    "t,acc_x,acc_y,acc_z,gyro_x,gyro_y,gyro_z,cap_uV,label";

// CSV body with shortest round-trip number formatting, so that
// serialize(parse(x)) == x for any file this function produced.
std::string serialize_session_csv(const Session& s);
nlohmann::json session_sidecar(const Session& s);

// Parses CSV text plus its sidecar metadata. Label cells hold class names;
// an empty cell takes its label from the sidecar's "annotations" intervals
// (or DISCARD when no interval covers the frame).
// Throws FormatError (header/sidecar), ParseError (row), ValidationError
// (unknown label names).
Session parse_session(std::string_view csv, const nlohmann::json& sidecar);

// foo/bar.csv -> foo/bar.json
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

// Writes `content` to `path` via a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace hbc
