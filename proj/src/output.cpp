#include "tas/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tas/error.hpp"

#ifdef TAS_HAVE_PNG
#include <png.h>
#endif

namespace tas {

namespace {

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("IoError: " + what, ExitCode::failure) {}
};

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path + "'");
  return f;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_fields_csv(const std::string& path,
                      const std::vector<std::pair<std::string, const LatticeField*>>& fields) {
  if (fields.empty()) throw ValidationError("no fields to write");
  Box b = fields[0].second->box();
  for (const auto& f : fields) {
    if (f.second->n() != fields[0].second->n()) throw MismatchedRefinement("fields on different lattices");
    b = Box::hull(b, f.second->box());
  }
  auto out = open_out(path);
  out << "i,j,x,y";
  for (const auto& f : fields) out << "," << f.first;
  out << "\n";
  const int n = fields[0].second->n();
  for (int j = b.j0; j <= b.j1; ++j)
    for (int i = b.i0; i <= b.i1; ++i) {
      out << i << "," << j << "," << format_double(double(i) / n) << "," << format_double(double(j) / n);
      for (const auto& f : fields) out << "," << format_double(f.second->get(i, j));
      out << "\n";
    }
}

void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  auto out = open_out(path);
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << "\n";
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.size(); ++k) out << (k ? "," : "") << format_double(r[k]);
    out << "\n";
  }
}

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string content_hash(const LatticeField& f) {
  std::string bytes;
  const Box& b = f.box();
  const int header[5] = {f.n(), b.i0, b.i1, b.j0, b.j1};
  bytes.append(reinterpret_cast<const char*>(header), sizeof header);
  bytes.append(reinterpret_cast<const char*>(f.values().data()), f.values().size() * sizeof(double));
  return content_hash(bytes);
}

std::array<std::uint8_t, 3> colormap(double v, double vmax, Colormap cmap) {
  double t = vmax > 0.0 ? v / vmax : 0.0;
  if (!std::isfinite(t)) t = 0.0;
  t = std::clamp(t, 0.0, 1.0);
  auto q = [](double x) { return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0)); };
  if (cmap == Colormap::grayscale) return {q(t), q(t), q(t)};
  // black -> red -> yellow -> white
  return {q(3.0 * t), q(3.0 * t - 1.0), q(3.0 * t - 2.0)};
}

bool png_supported() {
#ifdef TAS_HAVE_PNG
  return true;
#else
  return false;
#endif
}

std::string render_heatmap(const LatticeField& field, const std::string& path, Colormap cmap,
                           const HeatmapMeta& meta) {
  const Box& b = field.box();
  const int W = b.width(), H = b.height();
  for (double v : field.values())
    if (!std::isfinite(v)) throw ValidationError("heatmap field has non-finite values");
  const double vmax = std::max(1.0, field.values().empty() ? 0.0 : field.max());
  std::vector<std::uint8_t> rgb(3 * std::size_t(W) * H);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      const auto c = colormap(field.at(b.i0 + x, b.j1 - y), vmax, cmap);
      std::memcpy(&rgb[3 * (std::size_t(y) * W + x)], c.data(), 3);
    }
  std::ostringstream box;
  box << "[" << b.i0 << "," << b.i1 << "]x[" << b.j0 << "," << b.j1 << "]";
  const std::string n_str = std::to_string(meta.n), box_str = box.str(), vmax_str = format_double(vmax);

#ifdef TAS_HAVE_PNG
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw IoError("cannot write '" + path + "'");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw IoError("libpng failed writing '" + path + "'");
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, W, H, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_text text[4];
  const char* keys[4] = {"n", "box", "scenario_hash", "vmax"};
  const std::string* vals[4] = {&n_str, &box_str, &meta.scenario_hash, &vmax_str};
  for (int k = 0; k < 4; ++k) {
    text[k].compression = PNG_TEXT_COMPRESSION_NONE;
    text[k].key = const_cast<char*>(keys[k]);
    text[k].text = const_cast<char*>(vals[k]->c_str());
    text[k].text_length = vals[k]->size();
  }
  png_set_text(png, info, text, 4);
  png_write_info(png, info);
  for (int y = 0; y < H; ++y) png_write_row(png, &rgb[3 * std::size_t(y) * W]);
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
  return path;
#else
  std::string out_path = path;
  if (auto dot = out_path.rfind('.'); dot != std::string::npos && out_path.substr(dot) == ".png")
    out_path.replace(dot, 4, ".ppm");
  auto out = open_out(out_path);
  out << "P6\n# n=" << n_str << " box=" << box_str << " scenario_hash=" << meta.scenario_hash << " vmax=" << vmax_str
      << "\n"
      << W << " " << H << "\n255\n";
  out.write(reinterpret_cast<const char*>(rgb.data()), std::streamsize(rgb.size()));
  return out_path;
#endif
}

Image read_image(const std::string& path) {
  Image img;
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IoError("cannot read '" + path + "'");
  char magic[2] = {0, 0};
  probe.read(magic, 2);
  if (magic[0] == 'P' && magic[1] == '6') {
    auto next_token = [&]() {
      std::string tok;
      char c;
      while (probe.get(c)) {
        if (c == '#') {
          std::string rest;
          std::getline(probe, rest);
          continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
          if (!tok.empty()) break;
          continue;
        }
        tok += c;
      }
      return tok;
    };
    img.width = std::stoi(next_token());
    img.height = std::stoi(next_token());
    next_token();
    img.rgb.resize(3 * std::size_t(img.width) * img.height);
    probe.read(reinterpret_cast<char*>(img.rgb.data()), std::streamsize(img.rgb.size()));
    return img;
  }
  probe.close();
#ifdef TAS_HAVE_PNG
  png_image pi;
  std::memset(&pi, 0, sizeof pi);
  pi.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&pi, path.c_str())) throw IoError("cannot decode '" + path + "'");
  pi.format = PNG_FORMAT_RGB;
  img.width = int(pi.width);
  img.height = int(pi.height);
  img.rgb.resize(PNG_IMAGE_SIZE(pi));
  if (!png_image_finish_read(&pi, nullptr, img.rgb.data(), 0, nullptr)) throw IoError("cannot decode '" + path + "'");
  return img;
#else
  throw IoError("PNG support not built: '" + path + "'");
#endif
}

void write_json(const std::string& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

}  // namespace tas
