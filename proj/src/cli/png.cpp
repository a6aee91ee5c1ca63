// Copyright (c) 2026, The IPL Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ipl/cli/png.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include <fmt/format.h>
#include <png.h>

#include "ipl/core/error.hpp"

namespace ipl {

namespace {

// Samples of the viridis map at t = 0, 1/8, ..., 1.
constexpr std::array<Rgb, 9> kViridis = {{
    {68, 1, 84},
    {71, 44, 122},
    {59, 81, 139},
    {44, 113, 142},
    {33, 144, 141},
    {39, 173, 129},
    {92, 200, 99},
    {170, 220, 50},
    {253, 231, 37},
}};

constexpr std::array<Rgb, 6> kPalette = {{
    {31, 119, 180},
    {255, 127, 14},
    {44, 160, 44},
    {214, 39, 40},
    {148, 103, 189},
    {140, 86, 75},
}};

constexpr Rgb kAxis = {40, 40, 40};
constexpr int kMargin = 12;

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};

}  // namespace

Canvas::Canvas(int w, int h, Rgb fill) : width(w), height(h) {
    if (w < 1 || h < 1) {
        throw PreconditionError(fmt::format("canvas must be at least 1x1, got {}x{}", w, h));
    }
    rgb.resize(static_cast<std::size_t>(w) * h * 3);
    for (std::size_t i = 0; i < rgb.size(); i += 3) {
        rgb[i] = fill[0];
        rgb[i + 1] = fill[1];
        rgb[i + 2] = fill[2];
    }
}

void Canvas::set(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= width || y >= height) {
        return;
    }
    const auto i = (static_cast<std::size_t>(y) * width + x) * 3;
    rgb[i] = c[0];
    rgb[i + 1] = c[1];
    rgb[i + 2] = c[2];
}

Rgb Canvas::get(int x, int y) const {
    const auto i = (static_cast<std::size_t>(y) * width + x) * 3;
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
}

void Canvas::fill_rect(int x, int y, int w, int h, Rgb c) {
    for (int yy = y; yy < y + h; ++yy) {
        for (int xx = x; xx < x + w; ++xx) {
            set(xx, yy, c);
        }
    }
}

void Canvas::line(int x0, int y0, int x1, int y1, Rgb c) {
    const int dx = std::abs(x1 - x0);
    const int dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1;
    const int sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        set(x0, y0, c);
        if (x0 == x1 && y0 == y1) {
            break;
        }
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

void Canvas::blit(const Canvas& src, int x, int y) {
    for (int yy = 0; yy < src.height; ++yy) {
        for (int xx = 0; xx < src.width; ++xx) {
            set(x + xx, y + yy, src.get(xx, yy));
        }
    }
}

Rgb viridis(double t) {
    if (!std::isfinite(t)) {
        t = 0.0;
    }
    t = std::clamp(t, 0.0, 1.0) * (kViridis.size() - 1);
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), kViridis.size() - 2);
    const double f = t - static_cast<double>(i);
    Rgb out{};
    for (int c = 0; c < 3; ++c) {
        out[c] = static_cast<std::uint8_t>(std::lround((1.0 - f) * kViridis[i][c] + f * kViridis[i + 1][c]));
    }
    return out;
}

std::pair<double, double> value_range(const std::vector<Image>& images) {
    double lo = 0.0;
    double hi = 0.0;
    bool first = true;
    for (const auto& img : images) {
        if (img.pixels.size() == 0) {
            continue;
        }
        lo = first ? img.pixels.minCoeff() : std::min(lo, img.pixels.minCoeff());
        hi = first ? img.pixels.maxCoeff() : std::max(hi, img.pixels.maxCoeff());
        first = false;
    }
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    return {lo, hi};
}

Canvas render_image(const Image& img, int scale, double lo, double hi) {
    if (img.pixels.size() != img.shape.size() || img.shape.size() < 1) {
        throw DimensionError(fmt::format("image declares {}x{} but has {} pixels", img.shape.height, img.shape.width,
                                         img.pixels.size()));
    }
    Canvas c(img.shape.width * scale, img.shape.height * scale);
    for (int r = 0; r < img.shape.height; ++r) {
        for (int col = 0; col < img.shape.width; ++col) {
            c.fill_rect(col * scale, r * scale, scale, scale, viridis((img.at(r, col) - lo) / (hi - lo)));
        }
    }
    return c;
}

Canvas montage(const std::vector<Image>& images, int cols, int scale) {
    if (images.empty() || cols < 1) {
        throw PreconditionError("montage needs at least one image and one column");
    }
    const auto [lo, hi] = value_range(images);
    const int rows = static_cast<int>((images.size() + cols - 1) / cols);
    const int cw = images[0].shape.width * scale;
    const int ch = images[0].shape.height * scale;
    constexpr int gap = 2;
    Canvas out(cols * cw + (cols + 1) * gap, rows * ch + (rows + 1) * gap);
    for (std::size_t i = 0; i < images.size(); ++i) {
        const int r = static_cast<int>(i) / cols;
        const int c = static_cast<int>(i) % cols;
        out.blit(render_image(images[i], scale, lo, hi), gap + c * (cw + gap), gap + r * (ch + gap));
    }
    return out;
}

Canvas heatmap(const Eigen::MatrixXd& values, int cell) {
    if (values.size() == 0) {
        throw PreconditionError("heatmap of an empty matrix");
    }
    double lo = values.minCoeff();
    double hi = values.maxCoeff();
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    Canvas out(static_cast<int>(values.cols()) * cell, static_cast<int>(values.rows()) * cell);
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            out.fill_rect(static_cast<int>(c) * cell, static_cast<int>(r) * cell, cell, cell,
                          viridis((values(r, c) - lo) / (hi - lo)));
        }
    }
    return out;
}

Canvas line_chart(const std::vector<Series>& series, int width, int height) {
    Canvas out(width, height);
    double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
    bool first = true;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                continue;
            }
            x0 = first ? s.x[i] : std::min(x0, s.x[i]);
            x1 = first ? s.x[i] : std::max(x1, s.x[i]);
            y0 = first ? s.y[i] : std::min(y0, s.y[i]);
            y1 = first ? s.y[i] : std::max(y1, s.y[i]);
            first = false;
        }
    }
    if (!(x1 > x0)) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if (!(y1 > y0)) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    const int left = kMargin, right = width - kMargin, top = kMargin, bottom = height - kMargin;
    out.line(left, bottom, right, bottom, kAxis);
    out.line(left, bottom, left, top, kAxis);
    auto px = [&](double x) { return left + static_cast<int>(std::lround((x - x0) / (x1 - x0) * (right - left))); };
    auto py = [&](double y) { return bottom - static_cast<int>(std::lround((y - y0) / (y1 - y0) * (bottom - top))); };
    for (std::size_t s = 0; s < series.size(); ++s) {
        const Rgb color = kPalette[s % kPalette.size()];
        const auto& ser = series[s];
        bool have_prev = false;
        int prev_x = 0, prev_y = 0;
        for (std::size_t i = 0; i < std::min(ser.x.size(), ser.y.size()); ++i) {
            if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i])) {
                have_prev = false;
                continue;
            }
            const int x = px(ser.x[i]);
            const int y = py(ser.y[i]);
            if (have_prev) {
                out.line(prev_x, prev_y, x, y, color);
            }
            out.fill_rect(x - 2, y - 2, 5, 5, color);
            prev_x = x;
            prev_y = y;
            have_prev = true;
        }
    }
    return out;
}

Canvas bar_chart(const std::vector<double>& values, int width, int height) {
    Canvas out(width, height);
    const int left = kMargin, right = width - kMargin, top = kMargin, bottom = height - kMargin;
    double hi = 0.0, lo = 0.0;
    for (double v : values) {
        if (std::isfinite(v)) {
            hi = std::max(hi, v);
            lo = std::min(lo, v);
        }
    }
    if (!(hi > lo)) {
        hi = lo + 1.0;
    }
    auto py = [&](double y) { return bottom - static_cast<int>(std::lround((y - lo) / (hi - lo) * (bottom - top))); };
    const int base = py(0.0);
    if (!values.empty()) {
        const double slot = static_cast<double>(right - left) / static_cast<double>(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!std::isfinite(values[i])) {
                continue;
            }
            const int x = left + static_cast<int>(std::lround(slot * (static_cast<double>(i) + 0.15)));
            const int w = std::max(1, static_cast<int>(std::lround(slot * 0.7)));
            const int y = py(values[i]);
            out.fill_rect(x, std::min(y, base), w, std::max(1, std::abs(base - y)), kPalette[i % kPalette.size()]);
        }
    }
    out.line(left, base, right, base, kAxis);
    out.line(left, bottom, left, top, kAxis);
    return out;
}

void write_png(const Canvas& canvas, const std::filesystem::path& path) {
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "wb"));
    if (!fp) {
        throw Error(fmt::format("cannot write {}", path.string()));
    }
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error("libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(fmt::format("libpng failed writing {}", path.string()));
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(canvas.width), static_cast<png_uint_32>(canvas.height), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < canvas.height; ++y) {
        png_write_row(png, canvas.rgb.data() + static_cast<std::size_t>(y) * canvas.width * 3);
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Canvas read_png(const std::filesystem::path& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
        throw Error(fmt::format("cannot read PNG {}: {}", path.string(), image.message));
    }
    image.format = PNG_FORMAT_RGB;
    Canvas out(static_cast<int>(image.width), static_cast<int>(image.height));
    if (!png_image_finish_read(&image, nullptr, out.rgb.data(), 0, nullptr)) {
        png_image_free(&image);
        throw Error(fmt::format("cannot decode PNG {}: {}", path.string(), image.message));
    }
    return out;
}

}  // namespace ipl
