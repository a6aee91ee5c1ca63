// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Raster output. Everything is drawn into an RGB canvas and written as an
// 8-bit PNG. Plots carry no text; their numbers live in the CSV next to them.

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "ipl/core/types.hpp"

namespace ipl {

using Rgb = std::array<std::uint8_t, 3>;

struct Canvas {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

    Canvas(int w, int h, Rgb fill = {255, 255, 255});

    void set(int x, int y, Rgb c);  // ignores out-of-range points
    Rgb get(int x, int y) const;
    void fill_rect(int x, int y, int w, int h, Rgb c);
    void line(int x0, int y0, int x1, int y1, Rgb c);
    void blit(const Canvas& src, int x, int y);
};

// t in [0, 1] (clamped) to a viridis-like color.
Rgb viridis(double t);

// Value range shared by a set of images. Equal bounds widen to +/- 0.5.
std::pair<double, double> value_range(const std::vector<Image>& images);

// Each pixel becomes a scale x scale block colored by viridis over [lo, hi].
Canvas render_image(const Image& img, int scale, double lo, double hi);

// Images in a rows x cols grid (row-major order), one shared color range.
Canvas montage(const std::vector<Image>& images, int cols, int scale);

Canvas heatmap(const Eigen::MatrixXd& values, int cell);

struct Series {
    std::vector<double> x;
    std::vector<double> y;
};

// Axes plus one polyline (with point markers) per series.
Canvas line_chart(const std::vector<Series>& series, int width, int height);

// Bars from a zero baseline.
Canvas bar_chart(const std::vector<double>& values, int width, int height);

void write_png(const Canvas& canvas, const std::filesystem::path& path);

// Decoded RGB pixels of a PNG written by write_png.
Canvas read_png(const std::filesystem::path& path);

}  // namespace ipl
