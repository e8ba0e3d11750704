// Deterministic synthetic images and curve networks used by the tests
// and exposed through the CLI `fixture` subcommand.
#pragma once

#include <vector>

#include "vecraster/curve_net.hpp"
#include "vecraster/raster_io.hpp"

namespace vecraster {

struct PixelProbe {
    int x = 0;
    int y = 0;
};

/// One probe pixel inside each painted structure of the benchmark image.
struct BenchLayout {
    PixelProbe background;  // intensity 0,  305 px
    PixelProbe spiral;      // intensity 131, 121 px
    PixelProbe square25;    // intensity 140, 25 px
    PixelProbe square16;    // intensity 110, 16 px
    PixelProbe square4;     // intensity 255, 4 px
    PixelProbe strip190;    // intensity 190, 33 px (11 wide, 3 tall)
    PixelProbe strip85;     // intensity 85,  44 px (11 wide, 4 tall)
    PixelProbe strip180;    // intensity 180, 44 px (11 wide, 4 tall)
};

/// 37x16 gray benchmark with eight constant regions: a one-pixel-wide
/// square spiral on the left, three squares of area 25/16/4 in the middle
/// column, and an 11x11 square of three stacked strips on the right, all
/// on a black background. CLI fixture name: "fig3" (alias "bench").
RasterImage bench_image();
BenchLayout bench_layout();

/// Horizontal ramp: value(x) = round(x * 255 / (w-1)), rows constant.
RasterImage gradient_image(int w, int h);

/// Z-shaped open polyline with two interior corners.
std::vector<Vec2> z_polyline();

/// The same Z split at its corners into three straight curves pinned at
/// four junctions; pinning keeps the corners from eroding, unlike the
/// single-polyline variant.
CurveNetwork z_network();

}  // namespace vecraster
