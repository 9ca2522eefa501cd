#include "radarsplat/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>

#include "radarsplat/errors.hpp"
#include "radarsplat/text.hpp"

namespace radarsplat {

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
  throw InvalidInput("config key '" + key + "': invalid value '" + value + "' (expected " +
                     expected + ")");
}

double to_double(const std::string& key, const std::string& value) {
  const auto v = text::parse_number<double>(value);
  if (!v || !std::isfinite(*v)) bad_value(key, value, "a finite number");
  return *v;
}

double to_positive(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v <= 0.0) bad_value(key, value, "a positive number");
  return v;
}

std::size_t to_count(const std::string& key, const std::string& value, std::size_t min) {
  const auto v = text::parse_number<std::size_t>(value);
  if (!v || *v < min) bad_value(key, value, "an integer >= " + std::to_string(min));
  return *v;
}

bool to_bool(const std::string& key, const std::string& value) {
  const auto t = text::trim(value);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  bad_value(key, value, "true or false");
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

struct Field {
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

std::string num(double v) { return text::format_number(v); }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"input", [](RunConfig& c, const std::string& v) { c.input = v; },
       [](const RunConfig& c) { return c.input.string(); }},
      {"input_format",
       [](RunConfig& c, const std::string& v) {
         if (v != "auto" && v != "csv" && v != "json") {
           bad_value("input_format", v, "auto, csv or json");
         }
         c.input_format = v;
       },
       [](const RunConfig& c) { return c.input_format; }},
      {"output_dir",
       [](RunConfig& c, const std::string& v) {
         if (v.empty()) bad_value("output_dir", v, "a directory path");
         c.output_dir = v;
       },
       [](const RunConfig& c) { return c.output_dir.string(); }},
      {"regions", [](RunConfig& c, const std::string& v) { c.regions = parse_regions(v); },
       [](const RunConfig& c) { return format_regions(c.regions); }},
      {"az_min_deg", [](RunConfig& c, const std::string& v) { c.az_min_deg = to_double("az_min_deg", v); },
       [](const RunConfig& c) { return num(c.az_min_deg); }},
      {"az_max_deg", [](RunConfig& c, const std::string& v) { c.az_max_deg = to_double("az_max_deg", v); },
       [](const RunConfig& c) { return num(c.az_max_deg); }},
      {"el_min_deg", [](RunConfig& c, const std::string& v) { c.el_min_deg = to_double("el_min_deg", v); },
       [](const RunConfig& c) { return num(c.el_min_deg); }},
      {"el_max_deg", [](RunConfig& c, const std::string& v) { c.el_max_deg = to_double("el_max_deg", v); },
       [](const RunConfig& c) { return num(c.el_max_deg); }},
      {"lengthscale_min",
       [](RunConfig& c, const std::string& v) { c.gp.bounds.min = to_positive("lengthscale_min", v); },
       [](const RunConfig& c) { return num(c.gp.bounds.min); }},
      {"lengthscale_max",
       [](RunConfig& c, const std::string& v) { c.gp.bounds.max = to_positive("lengthscale_max", v); },
       [](const RunConfig& c) { return num(c.gp.bounds.max); }},
      {"lengthscale_grid",
       [](RunConfig& c, const std::string& v) { c.gp.grid_points = to_count("lengthscale_grid", v, 1); },
       [](const RunConfig& c) { return std::to_string(c.gp.grid_points); }},
      {"refine_iterations",
       [](RunConfig& c, const std::string& v) {
         c.gp.refine_iterations = to_count("refine_iterations", v, 0);
       },
       [](const RunConfig& c) { return std::to_string(c.gp.refine_iterations); }},
      {"template_lengthscale",
       [](RunConfig& c, const std::string& v) {
         c.gp.template_lengthscale = to_positive("template_lengthscale", v);
       },
       [](const RunConfig& c) { return num(c.gp.template_lengthscale); }},
      {"template_signal_variance",
       [](RunConfig& c, const std::string& v) {
         if (text::trim(v) == "auto") {
           c.gp.template_signal_variance.reset();
         } else {
           c.gp.template_signal_variance = to_positive("template_signal_variance", v);
         }
       },
       [](const RunConfig& c) {
         return c.gp.template_signal_variance ? num(*c.gp.template_signal_variance)
                                              : std::string("auto");
       }},
      {"noise_variance",
       [](RunConfig& c, const std::string& v) {
         const double x = to_double("noise_variance", v);
         if (x < 0.0) bad_value("noise_variance", v, "a non-negative number");
         c.gp.noise_variance = x;
       },
       [](const RunConfig& c) { return num(c.gp.noise_variance); }},
      {"quantile",
       [](RunConfig& c, const std::string& v) {
         const double q = to_double("quantile", v);
         if (q <= 0.0 || q > 1.0) bad_value("quantile", v, "a number in (0, 1]");
         c.quantile = q;
       },
       [](const RunConfig& c) { return num(c.quantile); }},
      {"queries", [](RunConfig& c, const std::string& v) { c.queries = to_count("queries", v, 1); },
       [](const RunConfig& c) { return std::to_string(c.queries); }},
      {"seed",
       [](RunConfig& c, const std::string& v) {
         const auto s = text::parse_number<std::uint64_t>(v);
         if (!s) bad_value("seed", v, "a non-negative integer");
         c.seed = *s;
       },
       [](const RunConfig& c) { return std::to_string(c.seed); }},
      {"raster_width",
       [](RunConfig& c, const std::string& v) { c.raster_width = to_count("raster_width", v, 1); },
       [](const RunConfig& c) { return std::to_string(c.raster_width); }},
      {"raster_height",
       [](RunConfig& c, const std::string& v) { c.raster_height = to_count("raster_height", v, 1); },
       [](const RunConfig& c) { return std::to_string(c.raster_height); }},
      {"ply_format", [](RunConfig& c, const std::string& v) { c.ply_format = parse_ply_format(v); },
       [](const RunConfig& c) {
         return std::string(c.ply_format == PlyEncoding::ascii ? "ascii" : "binary");
       }},
      {"parallel", [](RunConfig& c, const std::string& v) { c.parallel = to_bool("parallel", v); },
       [](const RunConfig& c) { return bool_text(c.parallel); }},
      {"threads", [](RunConfig& c, const std::string& v) { c.threads = to_count("threads", v, 0); },
       [](const RunConfig& c) { return std::to_string(c.threads); }},
      {"ply", [](RunConfig& c, const std::string& v) { c.ply = v; },
       [](const RunConfig& c) { return c.ply.string(); }},
      {"camera", [](RunConfig& c, const std::string& v) { c.camera = v; },
       [](const RunConfig& c) { return c.camera.string(); }},
      {"image", [](RunConfig& c, const std::string& v) { c.image = v; },
       [](const RunConfig& c) { return c.image.string(); }},
      {"point_radius",
       [](RunConfig& c, const std::string& v) { c.point_radius = to_positive("point_radius", v); },
       [](const RunConfig& c) { return num(c.point_radius); }},
      {"opacity",
       [](RunConfig& c, const std::string& v) {
         const double a = to_double("opacity", v);
         if (a <= 0.0 || a > 1.0) bad_value("opacity", v, "a number in (0, 1]");
         c.opacity = a;
       },
       [](const RunConfig& c) { return num(c.opacity); }},
      {"scene_patches",
       [](RunConfig& c, const std::string& v) { c.scene_patches = to_count("scene_patches", v, 0); },
       [](const RunConfig& c) { return std::to_string(c.scene_patches); }},
      {"scene_noise",
       [](RunConfig& c, const std::string& v) {
         const double s = to_double("scene_noise", v);
         if (s < 0.0) bad_value("scene_noise", v, "a non-negative number");
         c.scene_noise = s;
       },
       [](const RunConfig& c) { return num(c.scene_noise); }},
      {"scan_size", [](RunConfig& c, const std::string& v) { c.scan_size = to_count("scan_size", v, 1); },
       [](const RunConfig& c) { return std::to_string(c.scan_size); }},
      {"bench_sizes",
       [](RunConfig& c, const std::string& v) {
         std::vector<std::size_t> sizes;
         for (auto part : text::split(v, ',')) {
           sizes.push_back(to_count("bench_sizes", std::string(part), 1));
         }
         c.bench_sizes = std::move(sizes);
       },
       [](const RunConfig& c) {
         std::string out;
         for (std::size_t i = 0; i < c.bench_sizes.size(); ++i) {
           if (i) out += ',';
           out += std::to_string(c.bench_sizes[i]);
         }
         return out;
       }},
      {"bench_methods",
       [](RunConfig& c, const std::string& v) {
         std::vector<std::string> methods;
         for (auto part : text::split(v, ',')) {
           const std::string m(text::trim(part));
           if (m != "conventional" && m != "localized" && m != "localized-parallel") {
             bad_value("bench_methods", v,
                       "a comma list of conventional, localized, localized-parallel");
           }
           methods.push_back(m);
         }
         c.bench_methods = std::move(methods);
       },
       [](const RunConfig& c) {
         std::string out;
         for (std::size_t i = 0; i < c.bench_methods.size(); ++i) {
           if (i) out += ',';
           out += c.bench_methods[i];
         }
         return out;
       }},
      {"bench_repetitions",
       [](RunConfig& c, const std::string& v) {
         c.bench_repetitions = to_count("bench_repetitions", v, 3);
       },
       [](const RunConfig& c) { return std::to_string(c.bench_repetitions); }},
  };
  return table;
}

}  // namespace

PartitionSpec parse_regions(const std::string& text_value) {
  const auto t = text::trim(text_value);
  const auto x = t.find_first_of("xX");
  std::optional<std::size_t> a, b;
  if (x != std::string_view::npos) {
    a = text::parse_number<std::size_t>(t.substr(0, x));
    b = text::parse_number<std::size_t>(t.substr(x + 1));
  }
  if (!a || !b || *a == 0 || *b == 0) {
    throw InvalidInput("regions: invalid value '" + text_value +
                       "' (expected AxB with positive integers, e.g. 6x2)");
  }
  return {*a, *b};
}

std::string format_regions(const PartitionSpec& spec) {
  return std::to_string(spec.azimuth_cells) + "x" + std::to_string(spec.elevation_cells);
}

PlyEncoding parse_ply_format(const std::string& value) {
  const auto t = text::trim(value);
  if (t == "ascii") return PlyEncoding::ascii;
  if (t == "binary" || t == "binary_little_endian") return PlyEncoding::binary_little_endian;
  throw InvalidInput("ply_format: invalid value '" + value + "' (expected ascii or binary)");
}

AngularRange RunConfig::range() const {
  return AngularRange::from_degrees(az_min_deg, az_max_deg, el_min_deg, el_max_deg);
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto& table = fields();
  const auto it = std::find_if(table.begin(), table.end(),
                               [&](const Field& f) { return f.name == key; });
  if (it == table.end()) throw InvalidInput("unknown config key '" + key + "'");
  it->set(*this, std::string(text::trim(value)));
}

void RunConfig::validate() const {
  radarsplat::validate(range());
  gp.validate();
  if (queries == 0) throw InvalidInput("queries must be at least 1");
  if (bench_sizes.empty()) throw InvalidInput("bench_sizes must list at least one size");
  if (bench_methods.empty()) throw InvalidInput("bench_methods must list at least one method");
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.name, f.get(*this));
  return out;
}

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& f : fields()) n.push_back(f.name);
    return n;
  }();
  return names;
}

void parse_config(std::istream& in, RunConfig& config) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto body = text::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("config line " + std::to_string(line_no) +
                           ": expected 'key = value', got '" + std::string(body) + "'",
                       line_no);
    }
    const std::string key(text::trim(body.substr(0, eq)));
    const std::string value(text::trim(body.substr(eq + 1)));
    try {
      config.set(key, value);
    } catch (const InvalidInput& e) {
      throw InvalidInput(std::string(e.what()) + " at config line " + std::to_string(line_no));
    }
  }
}

void load_config(const std::filesystem::path& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file '" + path.string() + "'");
  parse_config(in, config);
}

}  // namespace radarsplat
