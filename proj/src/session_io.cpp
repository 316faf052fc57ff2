#include "hbc/session_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "hbc/errors.hpp"

namespace hbc {
namespace {

void append_number(std::string& out, double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw FormatError("cannot format number");
  out.append(buf.data(), ptr);
}

double parse_number(std::string_view cell, std::size_t line, std::string_view column) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    throw ParseError("bad number '" + std::string(cell) + "' in column " + std::string(column), line);
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    auto next = line.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

template <typename T>
T require(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("sidecar is missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(std::string("sidecar field '") + key + "' has the wrong type");
  }
}

}  // namespace

std::string serialize_session_csv(const Session& s) {
  const LabelSet& ls = label_set(s.label_set);
  std::string out;
  out.reserve(s.frames.size() * 96);
  out.append(kSessionCsvHeader);
  out.push_back('\n');
  for (std::size_t i = 0; i < s.frames.size(); ++i) {
    const SampleFrame& f = s.frames[i];
    append_number(out, f.t);
    for (double v : f.acc) {
      out.push_back(',');
      append_number(out, v);
    }
    for (double v : f.gyro) {
      out.push_back(',');
      append_number(out, v);
    }
    out.push_back(',');
    append_number(out, f.cap_uV);
    out.push_back(',');
    out.append(ls.name_of(i < s.labels.size() ? s.labels[i] : kDiscard));
    out.push_back('\n');
  }
  return out;
}

nlohmann::json session_sidecar(const Session& s) {
  const LabelSet& ls = label_set(s.label_set);
  nlohmann::json j;
  j["format_version"] = 1;
  j["id"] = s.id;
  j["user_id"] = s.user_id;
  j["session_index"] = s.session_index;
  j["group_id"] = s.group_id;
  j["sensor_position"] = std::string(to_string(s.position));
  j["sample_rate_hz"] = s.sample_rate_hz;
  j["acc_unit"] = std::string(to_string(s.acc_unit));
  j["label_set"] = std::string(to_string(s.label_set));
  nlohmann::json segs = nlohmann::json::array();
  for (const Segment& seg : s.segments) {
    segs.push_back({{"label", std::string(ls.name_of(seg.label))},
                    {"begin", seg.begin},
                    {"end", seg.end},
                    {"repetitions", seg.repetitions}});
  }
  j["segments"] = segs;
  return j;
}

Session parse_session(std::string_view csv, const nlohmann::json& sidecar) {
  Session s;
  s.id = require<std::string>(sidecar, "id");
  s.user_id = require<std::string>(sidecar, "user_id");
  s.session_index = require<int>(sidecar, "session_index");
  s.group_id = sidecar.value("group_id", std::string{});
  s.sample_rate_hz = require<double>(sidecar, "sample_rate_hz");
  try {
    s.position = sensor_position_from_string(require<std::string>(sidecar, "sensor_position"));
    s.acc_unit = acc_unit_from_string(sidecar.value("acc_unit", std::string("m/s2")));
    s.label_set = label_set_id_from_string(require<std::string>(sidecar, "label_set"));
  } catch (const SchemaError& e) {
    throw FormatError(e.what());
  }
  const LabelSet& ls = label_set(s.label_set);

  std::vector<std::string> unknown_labels;
  std::vector<bool> label_missing;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  static constexpr std::array<std::string_view, 9> kColumns = {
      "t", "acc_x", "acc_y", "acc_z", "gyro_x", "gyro_y", "gyro_z", "cap_uV", "label"};
  while (pos < csv.size()) {
    auto eol = csv.find('\n', pos);
    std::string_view line = csv.substr(pos, eol == std::string_view::npos ? csv.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? csv.size() : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header_seen) {
      auto cols = split(line, ',');
      for (std::string_view want : kColumns) {
        if (std::find(cols.begin(), cols.end(), want) == cols.end())
          throw FormatError("header is missing column '" + std::string(want) + "'");
      }
      if (line != kSessionCsvHeader)
        throw FormatError("header columns out of order; expected '" + std::string(kSessionCsvHeader) + "'");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != kColumns.size())
      throw ParseError("expected 9 columns, got " + std::to_string(cells.size()), line_no);
    SampleFrame f;
    f.t = parse_number(cells[0], line_no, kColumns[0]);
    for (int k = 0; k < 3; ++k) f.acc[k] = parse_number(cells[1 + k], line_no, kColumns[1 + k]);
    for (int k = 0; k < 3; ++k) f.gyro[k] = parse_number(cells[4 + k], line_no, kColumns[4 + k]);
    f.cap_uV = parse_number(cells[7], line_no, kColumns[7]);
    s.frames.push_back(f);

    std::string_view name = cells[8];
    if (name.empty()) {
      s.labels.push_back(kDiscard);
      label_missing.push_back(true);
    } else if (auto id = ls.find(name)) {
      s.labels.push_back(*id);
      label_missing.push_back(false);
    } else {
      unknown_labels.push_back("unknown label '" + std::string(name) + "' at line " + std::to_string(line_no));
      s.labels.push_back(kDiscard);
      label_missing.push_back(false);
    }
  }
  if (!header_seen) throw FormatError("empty session file");
  if (!unknown_labels.empty()) throw ValidationError(unknown_labels);

  // Interval annotations fill frames whose label cell was empty.
  if (sidecar.contains("annotations")) {
    for (const auto& a : sidecar.at("annotations")) {
      const double t0 = require<double>(a, "start_t");
      const double t1 = require<double>(a, "end_t");
      const auto name = require<std::string>(a, "label");
      auto id = ls.find(name);
      if (!id) throw ValidationError({"unknown annotation label '" + name + "'"});
      for (std::size_t i = 0; i < s.frames.size(); ++i) {
        if (label_missing[i] && s.frames[i].t >= t0 && s.frames[i].t < t1) s.labels[i] = *id;
      }
    }
  }

  if (sidecar.contains("segments")) {
    for (const auto& js : sidecar.at("segments")) {
      Segment seg;
      const auto name = require<std::string>(js, "label");
      auto id = ls.find(name);
      if (!id) throw ValidationError({"unknown segment label '" + name + "'"});
      seg.label = *id;
      seg.begin = require<std::size_t>(js, "begin");
      seg.end = require<std::size_t>(js, "end");
      seg.repetitions = require<int>(js, "repetitions");
      s.segments.push_back(seg);
    }
  }
  return s;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".json");
  return p;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace hbc
