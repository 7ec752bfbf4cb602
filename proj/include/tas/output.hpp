#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tas/lattice.hpp"
#include <json.hpp>

namespace tas {

// All floats in CSV and reports use 17 significant digits.
std::string format_double(double v);

// Columns i,j,x,y then one column per field, over the hull of the boxes.
void write_fields_csv(const std::string& path, const std::vector<std::pair<std::string, const LatticeField*>>& fields);

void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

// FNV-1a over the box and the raw values, as 16 hex digits.
std::string content_hash(const LatticeField& f);
std::string content_hash(const std::string& bytes);

enum class Colormap { grayscale, heat };

// Linear map of v over [0, vmax] to RGB.
std::array<std::uint8_t, 3> colormap(double v, double vmax, Colormap cmap);

struct HeatmapMeta {
  int n = 1;
  std::string scenario_hash;
};

// One pixel per site, top row = largest j, range [0, max(1, field max)].
// Writes PNG when available, otherwise a PPM next to the requested path.
// Returns the path actually written.
std::string render_heatmap(const LatticeField& field, const std::string& path, Colormap cmap = Colormap::heat,
                           const HeatmapMeta& meta = {});

bool png_supported();

struct Image {
  int width = 0, height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel
  std::array<std::uint8_t, 3> pixel(int x, int y) const {
    const std::size_t o = 3 * (std::size_t(y) * width + x);
    return {rgb[o], rgb[o + 1], rgb[o + 2]};
  }
};

// Reads back a PNG or PPM written by render_heatmap.
Image read_image(const std::string& path);

void write_json(const std::string& path, const nlohmann::json& j);

// Creates the directory (and parents) if missing.
void ensure_directory(const std::string& dir);

}  // namespace tas
