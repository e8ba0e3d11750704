#include "vecraster/bezier_fit.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace vecraster {

Vec2 bezier_point(const BezierSegment& s, double t) {
    const double mt = 1.0 - t;
    return (mt * mt * mt) * s.p0 + (3.0 * mt * mt * t) * s.p1 +
           (3.0 * mt * t * t) * s.p2 + (t * t * t) * s.p3;
}

namespace {

Vec2 bezier_d1(const BezierSegment& s, double t) {
    const double mt = 1.0 - t;
    return (3.0 * mt * mt) * (s.p1 - s.p0) +
           (6.0 * mt * t) * (s.p2 - s.p1) + (3.0 * t * t) * (s.p3 - s.p2);
}

Vec2 bezier_d2(const BezierSegment& s, double t) {
    const double mt = 1.0 - t;
    return (6.0 * mt) * (s.p2 - 2.0 * s.p1 + s.p0) +
           (6.0 * t) * (s.p3 - 2.0 * s.p2 + s.p1);
}

void flatten_rec(const BezierSegment& s, double tol, int depth,
                 std::vector<Vec2>& out) {
    const double flat =
        std::max(point_segment_distance(s.p1, s.p0, s.p3),
                 point_segment_distance(s.p2, s.p0, s.p3));
    if (flat <= tol || depth >= 24) {
        out.push_back(s.p3);
        return;
    }
    // de Casteljau split at t = 1/2
    const Vec2 p01 = 0.5 * (s.p0 + s.p1);
    const Vec2 p12 = 0.5 * (s.p1 + s.p2);
    const Vec2 p23 = 0.5 * (s.p2 + s.p3);
    const Vec2 p012 = 0.5 * (p01 + p12);
    const Vec2 p123 = 0.5 * (p12 + p23);
    const Vec2 mid = 0.5 * (p012 + p123);
    flatten_rec({s.p0, p01, p012, mid}, tol, depth + 1, out);
    flatten_rec({mid, p123, p23, s.p3}, tol, depth + 1, out);
}

Vec2 normalize_or(const Vec2& v, const Vec2& fallback) {
    const double n = norm(v);
    if (n <= 1e-12) return fallback;
    return v / n;
}

// Least-squares placement of the two inner control points along the unit
// end tangents, for chord-length parameters u.
BezierSegment generate_bezier(const std::vector<Vec2>& pts, int first,
                              int last, const std::vector<double>& u,
                              Vec2 t1, Vec2 t2) {
    BezierSegment bez;
    bez.p0 = pts[first];
    bez.p3 = pts[last];
    double c00 = 0.0, c01 = 0.0, c11 = 0.0, x0 = 0.0, x1 = 0.0;
    for (int i = first; i <= last; ++i) {
        const double uu = u[i - first], mu = 1.0 - uu;
        const double b0 = mu * mu * mu;
        const double b1 = 3.0 * mu * mu * uu;
        const double b2 = 3.0 * mu * uu * uu;
        const double b3 = uu * uu * uu;
        const Vec2 a1 = b1 * t1;
        const Vec2 a2 = b2 * t2;
        c00 += dot(a1, a1);
        c01 += dot(a1, a2);
        c11 += dot(a2, a2);
        const Vec2 r = pts[i] - (b0 + b1) * bez.p0 - (b2 + b3) * bez.p3;
        x0 += dot(a1, r);
        x1 += dot(a2, r);
    }
    const double det = c00 * c11 - c01 * c01;
    double alpha1 = 0.0, alpha2 = 0.0;
    if (std::abs(det) > 1e-12) {
        alpha1 = (x0 * c11 - x1 * c01) / det;
        alpha2 = (c00 * x1 - c01 * x0) / det;
    }
    const double seg_len = dist(bez.p0, bez.p3);
    const double eps = 1e-6 * seg_len;
    if (!(alpha1 > eps) || !(alpha2 > eps)) {
        alpha1 = alpha2 = seg_len / 3.0;  // fallback placement
    }
    bez.p1 = bez.p0 + alpha1 * t1;
    bez.p2 = bez.p3 + alpha2 * t2;
    return bez;
}

// Squared distance of each sample to its parameter image; returns the
// worst value and its index.
double max_point_error(const std::vector<Vec2>& pts, int first, int last,
                       const BezierSegment& bez, const std::vector<double>& u,
                       int& split) {
    double worst = 0.0;
    split = (first + last) / 2;
    for (int i = first + 1; i < last; ++i) {
        const double d2 = norm2(bezier_point(bez, u[i - first]) - pts[i]);
        if (d2 > worst) {
            worst = d2;
            split = i;
        }
    }
    return worst;
}

double newton_step(const BezierSegment& bez, const Vec2& p, double u) {
    const Vec2 q = bezier_point(bez, u) - p;
    const Vec2 d1 = bezier_d1(bez, u);
    const Vec2 d2 = bezier_d2(bez, u);
    const double denom = dot(d1, d1) + dot(q, d2);
    if (std::abs(denom) < 1e-12) return u;
    return std::clamp(u - dot(q, d1) / denom, 0.0, 1.0);
}

// True (dense, symmetric) error of one candidate segment against its
// polyline span, sampled finely enough that downstream oversampled
// measurements cannot exceed it meaningfully.
double segment_hausdorff(const BezierSegment& bez,
                         const std::vector<Vec2>& pts, int first, int last,
                         double step) {
    std::vector<Vec2> flat;
    flat.push_back(bez.p0);
    flatten_rec(bez, 1e-3, 0, flat);
    const std::vector<Vec2> span(pts.begin() + first, pts.begin() + last + 1);
    return polyline_hausdorff(flat, false, span, false, step);
}

struct FitContext {
    const std::vector<Vec2>* pts;
    double tau;
    double accept;  // tau with margin for downstream measurement
    std::vector<BezierSegment>* out;
};

void fit_range(FitContext& ctx, int first, int last, Vec2 t1, Vec2 t2,
               int depth) {
    const std::vector<Vec2>& pts = *ctx.pts;
    const int n = last - first + 1;
    if (n == 2 || depth > 64) {
        // Straight pieces (or a defensive bail-out) become exact lines.
        for (int i = first; i < last; ++i) {
            const Vec2 a = pts[i], b = pts[i + 1];
            ctx.out->push_back(
                {a, lerp(a, b, 1.0 / 3.0), lerp(a, b, 2.0 / 3.0), b});
        }
        return;
    }

    std::vector<double> u(n);
    u[0] = 0.0;
    for (int i = 1; i < n; ++i)
        u[i] = u[i - 1] + dist(pts[first + i - 1], pts[first + i]);
    const double total = u[n - 1];
    if (total <= 0.0) {
        ctx.out->push_back({pts[first], pts[first], pts[last], pts[last]});
        return;
    }
    for (double& v : u) v /= total;

    BezierSegment bez = generate_bezier(pts, first, last, u, t1, t2);
    int split = 0;
    double err2 = max_point_error(pts, first, last, bez, u, split);
    const double budget = ctx.accept * ctx.accept;

    if (err2 > budget) {
        // One reparameterization pass, then retry once.
        for (int i = 1; i + 1 < n; ++i)
            u[i] = newton_step(bez, pts[first + i], u[i]);
        // Parameters must stay monotone to be usable.
        bool monotone = true;
        for (int i = 1; i < n; ++i) monotone &= u[i] >= u[i - 1];
        if (monotone) {
            bez = generate_bezier(pts, first, last, u, t1, t2);
            err2 = max_point_error(pts, first, last, bez, u, split);
        }
    }

    if (err2 <= budget &&
        segment_hausdorff(bez, pts, first, last, 0.0125) <= ctx.accept) {
        ctx.out->push_back(bez);
        return;
    }

    split = std::clamp(split, first + 1, last - 1);
    const Vec2 center = normalize_or(pts[split - 1] - pts[split + 1],
                                     normalize_or(pts[split - 1] - pts[split],
                                                  Vec2{1.0, 0.0}));
    fit_range(ctx, first, split, t1, center, depth + 1);
    fit_range(ctx, split, last, -1.0 * center, t2, depth + 1);
}

}  // namespace

void flatten_segment(const BezierSegment& s, double tol,
                     std::vector<Vec2>& out) {
    flatten_rec(s, tol, 0, out);
}

std::vector<Vec2> flatten_path(const BezierPath& path, double tol) {
    std::vector<Vec2> out;
    if (path.segments.empty()) return out;
    out.push_back(path.segments.front().p0);
    for (const BezierSegment& s : path.segments) flatten_rec(s, tol, 0, out);
    return out;
}

BezierPath fit_path(const PolyCurve& curve, double tau, int curve_id) {
    BezierPath path;
    path.closed = curve.kind == CurveKind::Closed;
    path.source_curve = curve_id;
    // Accepting slightly inside tau keeps oversampled re-measurements of
    // the error under the stated bound.
    FitContext ctx{&curve.points, tau, tau * 0.995, &path.segments};

    if (!path.closed) {
        const std::vector<Vec2>& pts = curve.points;
        const int n = static_cast<int>(pts.size());
        if (n < 2) return path;
        const Vec2 t1 = normalize_or(pts[1] - pts[0], Vec2{1.0, 0.0});
        const Vec2 t2 =
            normalize_or(pts[n - 2] - pts[n - 1], Vec2{-1.0, 0.0});
        fit_range(ctx, 0, n - 1, t1, t2, 0);
        return path;
    }

    // Closed: cut at the two farthest ring points, fit the two halves as
    // open chains joined with central-difference tangents.
    std::vector<Vec2> ring = curve.points;
    if (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
    const int m = static_cast<int>(ring.size());
    if (m < 3) return path;
    int i0 = 0, i1 = m / 2;
    double best = -1.0;
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            const double d = norm2(ring[i] - ring[j]);
            if (d > best) {
                best = d;
                i0 = i;
                i1 = j;
            }
        }
    }
    auto R = [&](int i) { return ring[((i % m) + m) % m]; };
    auto tangent_at = [&](int i) {
        return normalize_or(R(i + 1) - R(i - 1), Vec2{1.0, 0.0});
    };
    std::vector<Vec2> half_a, half_b;
    for (int i = i0; i <= i1; ++i) half_a.push_back(ring[i]);
    for (int i = i1; i <= i0 + m; ++i) half_b.push_back(R(i));

    FitContext ca{&half_a, tau, tau * 0.995, &path.segments};
    fit_range(ca, 0, static_cast<int>(half_a.size()) - 1, tangent_at(i0),
              -1.0 * tangent_at(i1), 0);
    FitContext cb{&half_b, tau, tau * 0.995, &path.segments};
    fit_range(cb, 0, static_cast<int>(half_b.size()) - 1, tangent_at(i1),
              -1.0 * tangent_at(i0), 0);
    return path;
}

double path_error(const BezierPath& path, const PolyCurve& curve,
                  double step) {
    const std::vector<Vec2> flat = flatten_path(path, 1e-3);
    return polyline_hausdorff(flat, path.closed, curve.points,
                              curve.kind == CurveKind::Closed, step);
}

}  // namespace vecraster
