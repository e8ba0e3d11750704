// Assembly of the final vector document: walks each region's boundary
// half-edges into closed loops of fitted Bezier segments, and serializes
// or parses the SVG subset the pipeline emits.
#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "vecraster/bezier_fit.hpp"
#include "vecraster/curve_net.hpp"
#include "vecraster/raster_io.hpp"

namespace vecraster {

/// One filled path: an outer loop plus any holes, evenodd semantics.
/// Loops are chains of cubic segments; each loop closes exactly
/// (first p0 == last p3).
struct VectorShape {
    int region = -1;  // source region id; -1 when parsed back from text
    std::array<int, 3> rgb{0, 0, 0};
    std::vector<std::vector<BezierSegment>> loops;  // [0] = outer loop
    double outer_area = 0.0;  // |shoelace| of the outer loop
};

/// Shapes in paint order, back to front.
struct VectorDocument {
    double width = 0.0;
    double height = 0.0;
    std::vector<VectorShape> shapes;
};

/// Rounds a coordinate to the 0.001 px export grid.
double quantize_coord(double v);

/// Shortest decimal form with at most 3 places: "12", "0.5", "-3.125".
/// Never scientific notation; negative zero collapses to "0".
std::string format_coord(double v);

/// Builds the document from the final partition and fitted curves:
/// control points are quantized once (so the shared curve of two adjacent
/// regions serializes identically in both), each live region's boundary
/// half-edges are walked with the region kept on the left into closed
/// loops, fills are the per-region mean colors rounded half up, and
/// shapes are ordered by descending outer-loop area. The outer region 0
/// is skipped. Throws AssemblyError when a boundary cannot be closed.
VectorDocument assemble(const Partition& p, const CurveNetwork& net,
                        const std::vector<BezierPath>& paths,
                        const RasterImage& img);

/// SVG 1.1 subset: one <path> per shape with absolute M/C/Z commands,
/// fill="#rrggbb", fill-rule="evenodd", no strokes.
void write_svg(const VectorDocument& doc, std::ostream& os);
void write_svg_file(const VectorDocument& doc, const std::string& path);

/// Parses the subset produced by write_svg (plus absolute L for
/// hand-written inputs). Shapes keep document order; region ids are -1.
VectorDocument read_svg(std::istream& is);
VectorDocument read_svg_file(const std::string& path);

}  // namespace vecraster
