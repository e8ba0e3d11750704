// Raster image loading/saving (PNG, PPM/PGM), image statistics, the 3x3
// box prefilter, and construction of the one-region-per-pixel partition.
#pragma once

#include <string>
#include <vector>

#include "vecraster/errors.hpp"
#include "vecraster/region_graph.hpp"

namespace vecraster {

/// Interleaved row-major raster with real-valued samples in [0, 255].
struct RasterImage {
    int width = 0;
    int height = 0;
    int channels = 1;  // 1 (gray) or 3 (RGB)
    std::vector<double> data;

    double& at(int x, int y, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    double at(int x, int y, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
};

struct ImageStats {
    double oscillation_sq = 0.0;  // sum over channels of (max - min)^2
    double total_area = 0.0;      // pixel count
};

inline constexpr int kMinSide = 2;
inline constexpr int kMaxSide = 16384;

/// Loads a PNG (8/16-bit gray or RGB, no alpha/palette) or binary PGM (P5)
/// / PPM (P6). 16-bit or scaled-maxval samples are mapped onto [0, 255].
RasterImage load_image(const std::string& path);

/// Writes 8-bit binary PGM (1 channel) or PPM (3 channels). Byte-exact
/// round trip for 8-bit content.
void save_ppm(const RasterImage& img, const std::string& path);

/// Writes 8-bit PNG (gray or RGB).
void save_png(const RasterImage& img, const std::string& path);

/// Per-channel range statistics used by the region-size bounds.
ImageStats compute_stats(const RasterImage& img);

/// 3x3 box filter with clamped borders; optional denoising prefilter.
RasterImage box_prefilter(const RasterImage& img);

/// One region per pixel: region id of pixel (x, y) is y*width + x + 1;
/// id 0 is the outer region carrying the domain border in its adjacency.
Partition initial_partition(const RasterImage& img);

}  // namespace vecraster
