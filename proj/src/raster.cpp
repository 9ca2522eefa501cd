#include "radarsplat/raster.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "radarsplat/errors.hpp"
#include "radarsplat/text.hpp"

namespace radarsplat {

namespace {

Raster empty_like(const AngularRange& range, std::size_t width, std::size_t height) {
  return {width, height, range, std::vector<double>(width * height)};
}

}  // namespace

std::vector<AngularCoordinate> raster_centers(const AngularRange& range, std::size_t width,
                                              std::size_t height) {
  validate(range);
  if (width == 0 || height == 0) throw InvalidInput("raster dimensions must be at least 1");
  std::vector<AngularCoordinate> out;
  out.reserve(width * height);
  const double daz = range.azimuth_span() / static_cast<double>(width);
  const double del = range.elevation_span() / static_cast<double>(height);
  for (std::size_t j = 0; j < height; ++j) {
    const double el = range.elevation_min + (static_cast<double>(j) + 0.5) * del;
    for (std::size_t i = 0; i < width; ++i) {
      out.push_back({range.azimuth_min + (static_cast<double>(i) + 0.5) * daz, el});
    }
  }
  return out;
}

DepthField rasterize_depth_field(const LocalizedGpModel& model, const AngularRange& range,
                                 std::size_t width, std::size_t height,
                                 std::size_t threads) {
  const auto centers = raster_centers(range, width, height);
  const auto preds = model.predict_batch(centers, threads);
  DepthField f{empty_like(range, width, height), empty_like(range, width, height)};
  for (std::size_t k = 0; k < preds.size(); ++k) {
    f.mean.values[k] = preds[k].mean;
    f.variance.values[k] = preds[k].variance;
  }
  return f;
}

DepthField rasterize_depth_field(const GpPosterior& model, const AngularRange& range,
                                 std::size_t width, std::size_t height) {
  const auto centers = raster_centers(range, width, height);
  std::vector<Prediction> preds(centers.size());
  model.predict(centers, preds);
  DepthField f{empty_like(range, width, height), empty_like(range, width, height)};
  for (std::size_t k = 0; k < preds.size(); ++k) {
    f.mean.values[k] = preds[k].mean;
    f.variance.values[k] = preds[k].variance;
  }
  return f;
}

void write_raster_csv(const Raster& raster, std::ostream& out) {
  out << raster.width << ',' << raster.height << ','
      << format_degrees(raster.range.azimuth_min) << ','
      << format_degrees(raster.range.azimuth_max) << ','
      << format_degrees(raster.range.elevation_min) << ','
      << format_degrees(raster.range.elevation_max) << '\n';
  for (std::size_t j = 0; j < raster.height; ++j) {
    for (std::size_t i = 0; i < raster.width; ++i) {
      if (i) out << ',';
      out << text::format_number(raster.at(i, j));
    }
    out << '\n';
  }
}

Raster read_raster_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("raster CSV is empty", 1);
  const auto head = text::split(text::trim(line), ',');
  if (head.size() != 6) throw ParseError("raster header needs 6 fields", 1);
  const auto w = text::parse_number<std::size_t>(head[0]);
  const auto h = text::parse_number<std::size_t>(head[1]);
  double bounds[4];
  for (int k = 0; k < 4; ++k) {
    const auto v = parse_degrees(head[2 + k]);
    if (!v) throw ParseError("malformed raster header bound", 1);
    bounds[k] = *v;
  }
  if (!w || !h || *w == 0 || *h == 0) throw ParseError("malformed raster dimensions", 1);
  Raster r{*w, *h, AngularRange{bounds[0], bounds[1], bounds[2], bounds[3]}, {}};
  validate(r.range);
  r.values.reserve(r.width * r.height);
  for (std::size_t j = 0; j < r.height; ++j) {
    ++line_no;
    if (!std::getline(in, line)) throw ParseError("raster has too few rows", line_no);
    const auto fields = text::split(text::trim(line), ',');
    if (fields.size() != r.width) {
      throw ParseError("raster row " + std::to_string(j) + " has wrong width", line_no);
    }
    for (auto f : fields) {
      const auto v = text::parse_number<double>(f);
      if (!v) throw ParseError("malformed raster value", line_no);
      r.values.push_back(*v);
    }
  }
  return r;
}

void save_raster_csv(const Raster& raster, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write raster file " + path.string());
  write_raster_csv(raster, out);
  if (!out) throw Error("failed writing raster file " + path.string());
}

Raster load_raster_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open raster file " + path.string());
  return read_raster_csv(in);
}

}  // namespace radarsplat
