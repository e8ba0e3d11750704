// Cubic Bezier chain fitting of boundary polylines (least-squares end-
// tangent fit with one Newton reparameterization pass, splitting at the
// worst point until the whole chain stays within the error budget).
#pragma once

#include <vector>

#include "vecraster/curve_net.hpp"
#include "vecraster/geometry.hpp"

namespace vecraster {

struct BezierSegment {
    Vec2 p0, p1, p2, p3;
};

struct BezierPath {
    std::vector<BezierSegment> segments;  // C0-continuous chain
    bool closed = false;
    int source_curve = -1;
};

/// Point of one segment at parameter t in [0, 1].
Vec2 bezier_point(const BezierSegment& s, double t);

/// Appends a polyline approximation of `s` (excluding p0) within `tol`.
void flatten_segment(const BezierSegment& s, double tol,
                     std::vector<Vec2>& out);

/// Polyline approximation of the whole path within `tol`, p0 included.
std::vector<Vec2> flatten_path(const BezierPath& path, double tol);

/// Fits the curve's polyline within symmetric Hausdorff distance tau.
/// Endpoints are interpolated exactly; closed curves are cut at their two
/// farthest points and fitted as two G1-joined open chains.
BezierPath fit_path(const PolyCurve& curve, double tau, int curve_id = -1);

/// Symmetric Hausdorff distance between the fitted path and the source
/// polyline, sampled every `step` length units (default 8 per unit).
double path_error(const BezierPath& path, const PolyCurve& curve,
                  double step = 0.125);

}  // namespace vecraster
