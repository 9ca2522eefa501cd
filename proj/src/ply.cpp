#include "radarsplat/ply.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "radarsplat/errors.hpp"
#include "radarsplat/text.hpp"

namespace radarsplat {

namespace {

enum class ScalarType { i8, u8, i16, u16, i32, u32, f32, f64 };

std::optional<ScalarType> scalar_type(std::string_view name) {
  if (name == "char" || name == "int8") return ScalarType::i8;
  if (name == "uchar" || name == "uint8") return ScalarType::u8;
  if (name == "short" || name == "int16") return ScalarType::i16;
  if (name == "ushort" || name == "uint16") return ScalarType::u16;
  if (name == "int" || name == "int32") return ScalarType::i32;
  if (name == "uint" || name == "uint32") return ScalarType::u32;
  if (name == "float" || name == "float32") return ScalarType::f32;
  if (name == "double" || name == "float64") return ScalarType::f64;
  return std::nullopt;
}

std::size_t scalar_size(ScalarType t) {
  switch (t) {
    case ScalarType::i8:
    case ScalarType::u8: return 1;
    case ScalarType::i16:
    case ScalarType::u16: return 2;
    case ScalarType::i32:
    case ScalarType::u32:
    case ScalarType::f32: return 4;
    case ScalarType::f64: return 8;
  }
  return 0;
}

bool is_float(ScalarType t) { return t == ScalarType::f32 || t == ScalarType::f64; }

struct Property {
  std::string name;
  ScalarType type = ScalarType::f32;
  bool is_list = false;
  ScalarType count_type = ScalarType::u8;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
};

enum class Format { ascii, binary_le, binary_be };

[[noreturn]] void fail(const std::string& msg, std::size_t offset) {
  throw ParseError("PLY byte " + std::to_string(offset) + ": " + msg, offset);
}

template <typename T>
T load_raw(const char* p, bool swap) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  if (swap) {
    char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    std::memcpy(&v, bytes, sizeof(T));
  }
  return v;
}

double decode(ScalarType t, const char* p, bool swap) {
  switch (t) {
    case ScalarType::i8: return load_raw<std::int8_t>(p, swap);
    case ScalarType::u8: return load_raw<std::uint8_t>(p, swap);
    case ScalarType::i16: return load_raw<std::int16_t>(p, swap);
    case ScalarType::u16: return load_raw<std::uint16_t>(p, swap);
    case ScalarType::i32: return load_raw<std::int32_t>(p, swap);
    case ScalarType::u32: return load_raw<std::uint32_t>(p, swap);
    case ScalarType::f32: return load_raw<float>(p, swap);
    case ScalarType::f64: return load_raw<double>(p, swap);
  }
  return 0.0;
}

// Sequential reader over the body of a PLY file.
class BodyReader {
 public:
  BodyReader(const std::string& data, std::size_t pos, Format format)
      : data_(data), pos_(pos), format_(format) {}

  double read(ScalarType t) {
    if (format_ == Format::ascii) return read_token(t);
    const std::size_t n = scalar_size(t);
    if (pos_ + n > data_.size()) fail("unexpected end of binary data", pos_);
    const double v = decode(t, data_.data() + pos_, swap());
    pos_ += n;
    return v;
  }

 private:
  bool swap() const {
    const bool host_le = std::endian::native == std::endian::little;
    return (format_ == Format::binary_le) != host_le;
  }

  double read_token(ScalarType t) {
    while (pos_ < data_.size() && std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    while (pos_ < data_.size() && !std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
    if (start == pos_) fail("unexpected end of ascii data", start);
    const std::string_view tok(data_.data() + start, pos_ - start);
    if (t == ScalarType::f32) {
      // Parse as float so that values written as float32 round-trip exactly.
      if (auto v = text::parse_number<float>(tok)) return *v;
    } else if (auto v = text::parse_number<double>(tok)) {
      return *v;
    }
    fail("malformed number '" + std::string(tok) + "'", start);
  }

  const std::string& data_;
  std::size_t pos_;
  Format format_;
};

std::uint8_t to_color(double v, ScalarType t) {
  if (is_float(t)) v *= 255.0;
  return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
}

}  // namespace

void export_ply(const PointCloud& cloud, std::ostream& out, PlyEncoding encoding) {
  out << "ply\n"
      << (encoding == PlyEncoding::ascii ? "format ascii 1.0\n"
                                         : "format binary_little_endian 1.0\n")
      << "element vertex " << cloud.points.size() << '\n'
      << "property float x\nproperty float y\nproperty float z\n"
      << "property float nx\nproperty float ny\nproperty float nz\n"
      << "property uchar red\nproperty uchar green\nproperty uchar blue\n"
      << "end_header\n";
  if (encoding == PlyEncoding::ascii) {
    for (const auto& p : cloud.points) {
      out << text::format_number(static_cast<float>(p.position.x)) << ' '
          << text::format_number(static_cast<float>(p.position.y)) << ' '
          << text::format_number(static_cast<float>(p.position.z)) << " 0 0 0 "
          << int{p.color[0]} << ' ' << int{p.color[1]} << ' ' << int{p.color[2]} << '\n';
    }
  } else {
    std::string buf;
    constexpr std::size_t kStride = 6 * sizeof(float) + 3;
    buf.resize(cloud.points.size() * kStride);
    char* dst = buf.data();
    auto put_float = [&](float f) {
      std::uint32_t bits = std::bit_cast<std::uint32_t>(f);
      for (int b = 0; b < 4; ++b) *dst++ = static_cast<char>((bits >> (8 * b)) & 0xFF);
    };
    for (const auto& p : cloud.points) {
      put_float(static_cast<float>(p.position.x));
      put_float(static_cast<float>(p.position.y));
      put_float(static_cast<float>(p.position.z));
      put_float(0.0f);
      put_float(0.0f);
      put_float(0.0f);
      for (auto c : p.color) *dst++ = static_cast<char>(c);
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw Error("failed writing PLY stream");
}

PointCloud import_ply(std::istream& in) {
  const std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};

  std::size_t pos = 0;
  auto next_line = [&](std::size_t& line_start) -> std::optional<std::string_view> {
    if (pos >= data.size()) return std::nullopt;
    line_start = pos;
    const std::size_t end = data.find('\n', pos);
    const std::size_t stop = end == std::string::npos ? data.size() : end;
    pos = end == std::string::npos ? data.size() : end + 1;
    std::string_view line(data.data() + line_start, stop - line_start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  };

  std::size_t line_start = 0;
  auto magic = next_line(line_start);
  if (!magic || *magic != "ply") fail("missing 'ply' magic string", 0);

  std::optional<Format> format;
  std::vector<Element> elements;
  bool header_done = false;
  while (auto line = next_line(line_start)) {
    std::istringstream words{std::string(*line)};
    std::string keyword;
    words >> keyword;
    if (keyword.empty() || keyword == "comment" || keyword == "obj_info") continue;
    if (keyword == "end_header") {
      header_done = true;
      break;
    }
    if (keyword == "format") {
      std::string name, version;
      words >> name >> version;
      if (version != "1.0") fail("unsupported PLY version '" + version + "'", line_start);
      if (name == "ascii") format = Format::ascii;
      else if (name == "binary_little_endian") format = Format::binary_le;
      else if (name == "binary_big_endian") format = Format::binary_be;
      else fail("unknown PLY format '" + name + "'", line_start);
    } else if (keyword == "element") {
      Element e;
      std::string count;
      words >> e.name >> count;
      const auto n = text::parse_number<std::size_t>(count);
      if (e.name.empty() || !n) fail("malformed element declaration", line_start);
      e.count = *n;
      elements.push_back(std::move(e));
    } else if (keyword == "property") {
      if (elements.empty()) fail("property declared before any element", line_start);
      Property p;
      std::string type;
      words >> type;
      if (type == "list") {
        std::string count_type, item_type;
        words >> count_type >> item_type >> p.name;
        const auto ct = scalar_type(count_type);
        const auto it = scalar_type(item_type);
        if (!ct || !it || is_float(*ct)) fail("malformed list property", line_start);
        p.is_list = true;
        p.count_type = *ct;
        p.type = *it;
      } else {
        const auto t = scalar_type(type);
        words >> p.name;
        if (!t) fail("unknown property type '" + type + "'", line_start);
        p.type = *t;
      }
      if (p.name.empty()) fail("property without a name", line_start);
      elements.back().properties.push_back(std::move(p));
    } else {
      fail("unexpected header keyword '" + keyword + "'", line_start);
    }
  }
  if (!header_done) fail("header is not terminated by end_header", pos);
  if (!format) fail("header has no format line", pos);

  PointCloud cloud;
  BodyReader reader(data, pos, *format);
  bool vertex_seen = false;
  for (const auto& e : elements) {
    if (e.name != "vertex") {
      for (std::size_t i = 0; i < e.count; ++i) {
        for (const auto& p : e.properties) {
          const auto n = p.is_list ? static_cast<std::size_t>(reader.read(p.count_type)) : 1;
          for (std::size_t k = 0; k < n; ++k) reader.read(p.type);
        }
      }
      continue;
    }
    vertex_seen = true;
    int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1, ic = -1;
    for (std::size_t k = 0; k < e.properties.size(); ++k) {
      const auto& name = e.properties[k].name;
      const int idx = static_cast<int>(k);
      if (e.properties[k].is_list) continue;
      if (name == "x") ix = idx;
      else if (name == "y") iy = idx;
      else if (name == "z") iz = idx;
      else if (name == "red") ir = idx;
      else if (name == "green") ig = idx;
      else if (name == "blue") ib = idx;
      else if (name == "confidence") ic = idx;
    }
    if (ix < 0 || iy < 0 || iz < 0) fail("vertex element lacks x, y, z properties", pos);
    cloud.points.reserve(e.count);
    std::vector<double> values(e.properties.size());
    for (std::size_t i = 0; i < e.count; ++i) {
      for (std::size_t k = 0; k < e.properties.size(); ++k) {
        const auto& p = e.properties[k];
        if (p.is_list) {
          const auto n = static_cast<std::size_t>(reader.read(p.count_type));
          for (std::size_t j = 0; j < n; ++j) reader.read(p.type);
          continue;
        }
        values[k] = reader.read(p.type);
      }
      CloudPoint pt;
      pt.position = {values[ix], values[iy], values[iz]};
      if (ir >= 0) pt.color[0] = to_color(values[ir], e.properties[ir].type);
      if (ig >= 0) pt.color[1] = to_color(values[ig], e.properties[ig].type);
      if (ib >= 0) pt.color[2] = to_color(values[ib], e.properties[ib].type);
      if (ic >= 0) pt.confidence = values[ic];
      cloud.points.push_back(pt);
    }
  }
  if (!vertex_seen) fail("no vertex element", pos);
  return cloud;
}

void save_ply(const PointCloud& cloud, const std::filesystem::path& path,
              PlyEncoding encoding) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write PLY file " + path.string());
  export_ply(cloud, out, encoding);
}

PointCloud load_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open PLY file " + path.string());
  return import_ply(in);
}

}  // namespace radarsplat
