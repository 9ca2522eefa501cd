#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "radarsplat/errors.hpp"
#include "radarsplat/scan.hpp"
#include "radarsplat/text.hpp"

namespace radarsplat {

namespace {

constexpr std::string_view kCsvHeader = "azimuth_deg,elevation_deg,depth_m";

// Angles are read in long double so that every radian value written by
// export_scan comes back bit for bit.
using WideJson = nlohmann::basic_json<std::map, std::vector, std::string, bool, std::int64_t,
                                      std::uint64_t, long double>;

void validate_record(const DepthRecord& r, std::size_t location) {
  if (!std::isfinite(r.depth) || r.depth <= 0.0) {
    throw InvalidInput("record " + std::to_string(location) +
                       ": depth must be finite and positive");
  }
  try {
    validate(r.direction);
  } catch (const InvalidInput& e) {
    throw InvalidInput("record " + std::to_string(location) + ": " + e.what());
  }
}

SparseDepthScan import_csv(std::istream& in) {
  SparseDepthScan scan;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = text::trim(line);
    if (body.empty()) continue;
    if (!header_seen) {
      if (body != kCsvHeader) {
        throw ParseError("line " + std::to_string(line_no) + ": expected header '" +
                             std::string(kCsvHeader) + "'",
                         line_no);
      }
      header_seen = true;
      continue;
    }
    const auto fields = text::split(body, ',');
    if (fields.size() != 3) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 3 fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    const auto az = parse_degrees(fields[0]);
    const auto el = parse_degrees(fields[1]);
    const auto d = text::parse_number<double>(fields[2]);
    if (!az || !el || !d) {
      throw ParseError("line " + std::to_string(line_no) + ": malformed number", line_no);
    }
    DepthRecord rec{{*az, *el}, *d};
    validate_record(rec, line_no);
    scan.records.push_back(rec);
  }
  if (scan.records.empty()) throw InvalidInput("scan contains no records");
  return scan;
}

SparseDepthScan import_json(std::istream& in) {
  WideJson doc;
  try {
    doc = WideJson::parse(in);
  } catch (const WideJson::parse_error& e) {
    throw ParseError(std::string("malformed JSON scan: ") + e.what(), e.byte);
  }
  if (!doc.is_array()) throw ParseError("JSON scan must be an array of records", 0);
  SparseDepthScan scan;
  std::size_t index = 0;
  for (const auto& item : doc) {
    ++index;
    auto number = [&](const char* key) {
      if (!item.is_object() || !item.contains(key) || !item[key].is_number()) {
        throw ParseError("record " + std::to_string(index) + ": missing numeric '" +
                             key + "'",
                         index);
      }
      return item[key].get<long double>();
    };
    DepthRecord rec{{deg_to_rad(number("azimuth_deg")), deg_to_rad(number("elevation_deg"))},
                    static_cast<double>(number("depth_m"))};
    validate_record(rec, index);
    scan.records.push_back(rec);
    if (scan.sensor.empty() && item.contains("sensor") && item["sensor"].is_string()) {
      scan.sensor = item["sensor"].get<std::string>();
    }
    if (scan.timestamp.empty() && item.contains("timestamp") &&
        item["timestamp"].is_string()) {
      scan.timestamp = item["timestamp"].get<std::string>();
    }
  }
  if (scan.records.empty()) throw InvalidInput("scan contains no records");
  return scan;
}

}  // namespace

void SparseDepthScan::validate() const {
  if (records.empty()) throw InvalidInput("scan contains no records");
  for (std::size_t i = 0; i < records.size(); ++i) validate_record(records[i], i + 1);
}

std::vector<double> SparseDepthScan::depths() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.depth);
  return out;
}

GpDataset SparseDepthScan::to_dataset(double noise_variance) const {
  GpDataset data;
  data.noise_variance = noise_variance;
  data.inputs.reserve(records.size());
  data.targets.reserve(records.size());
  for (const auto& r : records) {
    data.inputs.push_back(r.direction);
    data.targets.push_back(r.depth);
  }
  return data;
}

SparseDepthScan import_scan(std::istream& in, ScanFormat format) {
  return format == ScanFormat::json ? import_json(in) : import_csv(in);
}

void export_scan(const SparseDepthScan& scan, std::ostream& out, ScanFormat format) {
  if (format == ScanFormat::csv) {
    out << kCsvHeader << '\n';
    for (const auto& r : scan.records) {
      out << format_degrees(r.direction.azimuth) << ','
          << format_degrees(r.direction.elevation) << ',' << text::format_number(r.depth)
          << '\n';
    }
    return;
  }
  // Written by hand: the degree strings carry more digits than a double holds.
  out << '[';
  for (std::size_t i = 0; i < scan.records.size(); ++i) {
    const auto& r = scan.records[i];
    out << (i == 0 ? "\n" : ",\n") << " {\"azimuth_deg\": " << format_degrees(r.direction.azimuth)
        << ", \"elevation_deg\": " << format_degrees(r.direction.elevation)
        << ", \"depth_m\": " << text::format_number(r.depth);
    if (!scan.sensor.empty()) out << ", \"sensor\": " << nlohmann::json(scan.sensor).dump();
    if (!scan.timestamp.empty()) {
      out << ", \"timestamp\": " << nlohmann::json(scan.timestamp).dump();
    }
    out << '}';
  }
  out << (scan.records.empty() ? "]\n" : "\n]\n");
}

ScanFormat scan_format_for(const std::filesystem::path& path) {
  return path.extension() == ".json" ? ScanFormat::json : ScanFormat::csv;
}

SparseDepthScan load_scan(const std::filesystem::path& path,
                          std::optional<ScanFormat> format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open scan file " + path.string());
  return import_scan(in, format.value_or(scan_format_for(path)));
}

void save_scan(const SparseDepthScan& scan, const std::filesystem::path& path,
               std::optional<ScanFormat> format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write scan file " + path.string());
  export_scan(scan, out, format.value_or(scan_format_for(path)));
  if (!out) throw Error("failed writing scan file " + path.string());
}

}  // namespace radarsplat
