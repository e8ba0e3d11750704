// Scanline rasterization of a vector document back to pixels, PSNR, and
// the evaluation report used by the CLI and the acceptance harness.
#pragma once

#include <iosfwd>

#include "vecraster/raster_io.hpp"
#include "vecraster/svg_emit.hpp"

namespace vecraster {

struct EvalReport {
    double psnr = 0.0;  // +infinity when the images are identical
    int region_count = 0;
    int path_segment_count = 0;  // total cubic segments in the document
    long long unfilled_pixels = 0;  // subsamples covered by no shape
};

/// Rasterizes at `supersample` times the document resolution with the
/// evenodd rule (curves flattened at 0.05 px) in stored paint order, then
/// box-averages down. Output is 3-channel. Subsamples covered by no shape
/// render white and are counted into *unfilled when provided.
RasterImage rasterize(const VectorDocument& doc, int supersample = 2,
                      long long* unfilled = nullptr);

/// 10*log10(255^2 / MSE) averaged over all pixels and channels;
/// +infinity for identical images. Mismatched shapes throw DimensionError.
double psnr(const RasterImage& a, const RasterImage& b);

/// Rasterizes and compares against the reference image (gray references
/// are expanded to three channels first).
EvalReport evaluate(const VectorDocument& doc, const RasterImage& ref,
                    int supersample = 2);

/// Header "psnr,region_count,path_segment_count,unfilled_pixels" + row.
void write_report_csv(const EvalReport& rep, std::ostream& os);

}  // namespace vecraster
