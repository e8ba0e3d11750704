#include "vecraster/geometry.hpp"

#include <algorithm>
#include <limits>

namespace vecraster {

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = norm2(ab);
    if (len2 <= 0.0) return dist(p, a);
    double t = dot(p - a, ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return dist(p, a + t * ab);
}

double segment_segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    // Proper crossing -> distance 0 (checked by orientation signs).
    const double d1 = cross(b - a, c - a);
    const double d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c);
    const double d4 = cross(d - c, b - c);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
        return 0.0;
    }
    double best = point_segment_distance(a, c, d);
    best = std::min(best, point_segment_distance(b, c, d));
    best = std::min(best, point_segment_distance(c, a, b));
    best = std::min(best, point_segment_distance(d, a, b));
    return best;
}

double point_polyline_distance(Vec2 p, const std::vector<Vec2>& pts) {
    if (pts.empty()) return std::numeric_limits<double>::infinity();
    if (pts.size() == 1) return dist(p, pts[0]);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        best = std::min(best, point_segment_distance(p, pts[i], pts[i + 1]));
    }
    return best;
}

double polygon_signed_area(const std::vector<Vec2>& pts) {
    if (pts.size() < 3) return 0.0;
    double twice = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        twice += cross(pts[i], pts[i + 1]);
    }
    if (pts.front() != pts.back()) twice += cross(pts.back(), pts.front());
    return 0.5 * twice;
}

Vec2 polygon_centroid(const std::vector<Vec2>& pts) {
    if (pts.empty()) return {};
    double twice = 0.0;
    Vec2 acc{0.0, 0.0};
    auto add_edge = [&](Vec2 p, Vec2 q) {
        const double c = cross(p, q);
        twice += c;
        acc = acc + c * (p + q);
    };
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) add_edge(pts[i], pts[i + 1]);
    if (pts.front() != pts.back()) add_edge(pts.back(), pts.front());
    if (std::abs(twice) < 1e-12) {
        Vec2 mean{0.0, 0.0};
        std::size_t n = pts.size();
        if (n > 1 && pts.front() == pts.back()) --n;
        for (std::size_t i = 0; i < n; ++i) mean = mean + pts[i];
        return mean / static_cast<double>(n);
    }
    return acc / (3.0 * twice);
}

double polyline_length(const std::vector<Vec2>& pts, bool closed) {
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) len += dist(pts[i], pts[i + 1]);
    if (closed && pts.size() > 1 && pts.front() != pts.back()) {
        len += dist(pts.back(), pts.front());
    }
    return len;
}

double three_point_curvature(Vec2 a, Vec2 b, Vec2 c) {
    const double ab = dist(a, b);
    const double bc = dist(b, c);
    const double ca = dist(c, a);
    const double denom = ab * bc * ca;
    if (denom <= 0.0) return 0.0;
    return 2.0 * std::abs(cross(b - a, c - b)) / denom;
}

double max_abs_curvature(const std::vector<Vec2>& pts, bool closed) {
    // Work on the distinct-vertex ring (drop a repeated closing vertex).
    std::size_t n = pts.size();
    if (closed && n > 1 && pts.front() == pts.back()) --n;
    if (n < 3) return 0.0;
    double best = 0.0;
    if (closed) {
        for (std::size_t i = 0; i < n; ++i) {
            best = std::max(best, three_point_curvature(pts[(i + n - 1) % n], pts[i],
                                                        pts[(i + 1) % n]));
        }
    } else {
        for (std::size_t i = 1; i + 1 < n; ++i) {
            best = std::max(best, three_point_curvature(pts[i - 1], pts[i], pts[i + 1]));
        }
    }
    return best;
}

std::vector<Vec2> resample_polyline(const std::vector<Vec2>& pts, bool closed,
                                    double step) {
    if (pts.size() < 2 || step <= 0.0) return pts;

    // Distinct vertices; remember whether a wrap edge must be added.
    std::vector<Vec2> v = pts;
    bool wrap = false;
    if (closed) {
        if (v.size() > 1 && v.front() == v.back()) v.pop_back();
        if (v.size() < 3) {
            // Too degenerate to resample; restore representation.
            v.push_back(v.front());
            return v;
        }
        wrap = true;
    }

    std::vector<double> cum(v.size() + (wrap ? 1 : 0), 0.0);
    for (std::size_t i = 1; i < v.size(); ++i) {
        cum[i] = cum[i - 1] + dist(v[i - 1], v[i]);
    }
    if (wrap) cum[v.size()] = cum[v.size() - 1] + dist(v.back(), v.front());
    const double total = cum.back();
    if (total <= 0.0) return pts;

    const std::size_t pieces =
        std::max<std::size_t>(wrap ? 3 : 1,
                              static_cast<std::size_t>(std::llround(total / step)));
    auto point_at = [&](double s) -> Vec2 {
        const std::size_t m = v.size();
        std::size_t lo =
            static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), s) -
                                     cum.begin());
        if (lo == 0) lo = 1;
        if (lo >= cum.size()) lo = cum.size() - 1;
        const double seg = cum[lo] - cum[lo - 1];
        const double t = seg > 0.0 ? (s - cum[lo - 1]) / seg : 0.0;
        const Vec2 a = v[lo - 1];
        const Vec2 b = v[lo % m];
        return lerp(a, b, t);
    };

    std::vector<Vec2> out;
    out.reserve(pieces + 1);
    out.push_back(v.front());
    for (std::size_t i = 1; i < pieces; ++i) {
        out.push_back(point_at(total * static_cast<double>(i) /
                               static_cast<double>(pieces)));
    }
    if (wrap) {
        out.push_back(v.front());  // explicit closure
    } else {
        out.push_back(v.back());
    }
    return out;
}

namespace {

// Sample points along a polyline at most `step` apart (vertices included).
std::vector<Vec2> densify(const std::vector<Vec2>& pts, bool closed, double step) {
    std::vector<Vec2> out;
    const std::size_t n = pts.size();
    if (n == 0) return out;
    const bool already_ring = n > 1 && pts.front() == pts.back();
    const std::size_t edges = (closed && !already_ring) ? n : n - 1;
    for (std::size_t i = 0; i < edges; ++i) {
        const Vec2 a = pts[i];
        const Vec2 b = pts[(i + 1) % n];
        out.push_back(a);
        const double len = dist(a, b);
        const int k = static_cast<int>(len / step);
        for (int j = 1; j <= k; ++j) {
            out.push_back(lerp(a, b, static_cast<double>(j) / (k + 1)));
        }
    }
    out.push_back(already_ring || closed ? pts.front() : pts.back());
    return out;
}

double directed_hausdorff(const std::vector<Vec2>& samples,
                          const std::vector<Vec2>& target, bool target_closed) {
    std::vector<Vec2> tgt = target;
    if (target_closed && tgt.size() > 1 && tgt.front() != tgt.back()) {
        tgt.push_back(tgt.front());
    }
    double worst = 0.0;
    for (const Vec2& p : samples) {
        worst = std::max(worst, point_polyline_distance(p, tgt));
    }
    return worst;
}

}  // namespace

double polyline_hausdorff(const std::vector<Vec2>& a, bool a_closed,
                          const std::vector<Vec2>& b, bool b_closed, double step) {
    if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
    const std::vector<Vec2> sa = densify(a, a_closed, step);
    const std::vector<Vec2> sb = densify(b, b_closed, step);
    return std::max(directed_hausdorff(sa, b, b_closed),
                    directed_hausdorff(sb, a, a_closed));
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n < 3) return pts;
    std::vector<Vec2> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {  // lower
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) {
            --k;
        }
        hull[k++] = pts[i];
    }
    for (std::size_t i = n - 1, t = k + 1; i > 0; --i) {  // upper
        while (k >= t &&
               cross(hull[k - 1] - hull[k - 2], pts[i - 1] - hull[k - 2]) <= 0) {
            --k;
        }
        hull[k++] = pts[i - 1];
    }
    hull.resize(k - 1);
    return hull;
}

bool point_in_convex_hull(Vec2 p, const std::vector<Vec2>& hull, double eps) {
    const std::size_t n = hull.size();
    if (n == 0) return false;
    if (n == 1) return dist(p, hull[0]) <= eps;
    if (n == 2) return point_segment_distance(p, hull[0], hull[1]) <= eps;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = hull[i];
        const Vec2 b = hull[(i + 1) % n];
        if (cross(b - a, p - a) < -eps * norm(b - a)) return false;
    }
    return true;
}

}  // namespace vecraster
