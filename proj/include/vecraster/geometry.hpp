// Planar geometry primitives shared by the curve, flow, fitting and
// rasterization stages. Coordinates are in pixel units, y growing downward.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace vecraster {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
inline Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
inline bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
inline bool operator!=(Vec2 a, Vec2 b) { return !(a == b); }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::sqrt(norm2(a)); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 lerp(Vec2 a, Vec2 b, double t) { return a + t * (b - a); }

/// Distance from point p to segment [a, b].
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

/// Minimum distance between segments [a, b] and [c, d]; 0 when they cross.
double segment_segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

/// Exact distance from p to the nearest point of an open polyline.
double point_polyline_distance(Vec2 p, const std::vector<Vec2>& pts);

/// Signed shoelace area of a polygon. Accepts rings with or without the
/// closing vertex repeated; the wrap edge is always included.
double polygon_signed_area(const std::vector<Vec2>& pts);

/// Area centroid of a polygon (vertex mean when the area degenerates).
Vec2 polygon_centroid(const std::vector<Vec2>& pts);

/// Total length of a polyline; `closed` adds the wrap edge when the ring
/// does not already repeat its first vertex.
double polyline_length(const std::vector<Vec2>& pts, bool closed);

/// Curvature of the circle through three points: 2|cross| / (product of
/// side lengths). Degenerate triples give 0.
double three_point_curvature(Vec2 a, Vec2 b, Vec2 c);

/// Maximum absolute three-point curvature over consecutive vertex triples.
double max_abs_curvature(const std::vector<Vec2>& pts, bool closed);

/// Uniform arc-length resampling at roughly `step` spacing by linear
/// interpolation. Open polylines keep both endpoints bit-identical; closed
/// rings (first == last) keep the first vertex and stay closed.
std::vector<Vec2> resample_polyline(const std::vector<Vec2>& pts, bool closed,
                                    double step);

/// Symmetric Hausdorff distance between two polylines, estimated by
/// densifying each at `step` spacing and measuring exact point-to-segment
/// distances against the other.
double polyline_hausdorff(const std::vector<Vec2>& a, bool a_closed,
                          const std::vector<Vec2>& b, bool b_closed,
                          double step = 0.1);

/// Convex hull (counterclockwise in mathematical orientation, no repeated
/// first vertex). Degenerate inputs return the distinct points.
std::vector<Vec2> convex_hull(std::vector<Vec2> pts);

/// True when p lies in the hull (boundary included, within tolerance eps).
bool point_in_convex_hull(Vec2 p, const std::vector<Vec2>& hull,
                          double eps = 1e-9);

}  // namespace vecraster
