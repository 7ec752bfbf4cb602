#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tas/output.hpp"

using namespace tas;

namespace {

std::string temp_dir() {
  const auto d = std::filesystem::temp_directory_path() / "tas_output_test";
  ensure_directory(d.string());
  return d.string();
}

}  // namespace

TEST_CASE("doubles print with 17 significant digits and round trip") {
  for (double v : {0.1, 1.0 / 3.0, 2.0000000000000004, -1e-300, 6.02214076e23}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("field CSV") {
  LatticeField a(2, Box{-1, 1, 0, 1}), b(2, Box{0, 2, 0, 0});
  a.at(-1, 0) = 0.25;
  b.at(2, 0) = 1.0 / 3.0;
  const std::string path = temp_dir() + "/fields.csv";
  write_fields_csv(path, {{"a", &a}, {"b", &b}});
  std::ifstream in(path);
  std::string header, line;
  std::getline(in, header);
  CHECK(header == "i,j,x,y,a,b");
  int rows = 0;
  bool found = false;
  while (std::getline(in, line)) {
    ++rows;
    if (line.rfind("2,0,", 0) == 0) {
      CHECK(line == "2,0,1,0,0,0.33333333333333331");
      found = true;
    }
  }
  CHECK(rows == 4 * 2);
  CHECK(found);
}

TEST_CASE("heatmap pixels follow the colormap") {
  LatticeField f(1, Box{-3, 4, -2, 2});
  f.at(0, 0) = 2.0;
  f.at(4, 2) = 0.5;
  f.at(-3, -2) = 1.0;
  const std::string path = render_heatmap(f, temp_dir() + "/h.png", Colormap::grayscale, {1, "abc"});
  const Image img = read_image(path);
  CHECK(img.width == 8);
  CHECK(img.height == 5);
  // top row is j = 2, first column is i = -3
  CHECK(img.pixel(3, 2) == colormap(2.0, 2.0, Colormap::grayscale));
  CHECK(img.pixel(7, 0) == colormap(0.5, 2.0, Colormap::grayscale));
  CHECK(img.pixel(0, 4) == colormap(1.0, 2.0, Colormap::grayscale));
  CHECK(img.pixel(3, 2)[0] == 255);
  CHECK(img.pixel(1, 1)[0] == 0);
}

TEST_CASE("empty field renders a uniform background") {
  const LatticeField f(1, Box{0, 9, 0, 4});
  const Image img = read_image(render_heatmap(f, temp_dir() + "/empty.png", Colormap::heat));
  CHECK(img.width == 10);
  CHECK(img.height == 5);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) CHECK(img.pixel(x, y) == img.pixel(0, 0));
}

TEST_CASE("colormap endpoints") {
  CHECK(colormap(0.0, 1.0, Colormap::grayscale) == std::array<std::uint8_t, 3>{0, 0, 0});
  CHECK(colormap(1.0, 1.0, Colormap::grayscale) == std::array<std::uint8_t, 3>{255, 255, 255});
  CHECK(colormap(1.0, 1.0, Colormap::heat) == std::array<std::uint8_t, 3>{255, 255, 255});
  CHECK(colormap(5.0, 1.0, Colormap::heat) == std::array<std::uint8_t, 3>{255, 255, 255});
}

TEST_CASE("content hash") {
  LatticeField a(1, Box::centered(3));
  a.at(1, 1) = 0.5;
  LatticeField b = a;
  CHECK(content_hash(a) == content_hash(b));
  b.at(1, 1) = std::nextafter(0.5, 1.0);
  CHECK(content_hash(a) != content_hash(b));
  CHECK(content_hash(a).size() == 16);
  CHECK(content_hash(std::string("")) == "cbf29ce484222325");
}

TEST_CASE("json report") {
  const std::string path = temp_dir() + "/r.json";
  write_json(path, {{"x", 1.5}, {"ok", true}});
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(nlohmann::json::parse(ss.str())["x"] == 1.5);
}
