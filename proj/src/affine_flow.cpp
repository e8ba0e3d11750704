#include "vecraster/affine_flow.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace vecraster {

// Matching the inward motion of a circle under the flow: one erosion of
// chord area sigma moves the boundary by the flow time
// 0.5 * (3/2)^(2/3) * sigma^(2/3).
const double kErosionTimeScale = 0.5 * std::pow(1.5, 2.0 / 3.0);

namespace {

constexpr double kFlatCurvature = 1e-6;  // below this a vertex does not move

// Turn sign at vertex b of the path a -> b -> c; 0 when nearly straight.
int turn_sign(const Vec2& a, const Vec2& b, const Vec2& c) {
    if (three_point_curvature(a, b, c) < kFlatCurvature) return 0;
    const double cr = cross(b - a, c - b);
    return cr > 0 ? 1 : (cr < 0 ? -1 : 0);
}

// Drops consecutive (near-)duplicate points, keeping both endpoints.
std::vector<Vec2> drop_duplicates(std::vector<Vec2> pts) {
    if (pts.size() < 3) return pts;
    std::vector<Vec2> out;
    out.reserve(pts.size());
    out.push_back(pts.front());
    for (size_t i = 1; i + 1 < pts.size(); ++i)
        if (dist(pts[i], out.back()) > 1e-9) out.push_back(pts[i]);
    if (dist(pts.back(), out.back()) <= 1e-9 && out.size() > 1)
        out.back() = pts.back();
    else
        out.push_back(pts.back());
    return out;
}

// Erosion of one consistently-turning open arc: the envelope of chords
// cutting area sigma off the arc, sampled at every chord anchored at an
// arc vertex (the envelope touches each chord at its midpoint).  The arc
// endpoints are preserved exactly.
std::vector<Vec2> erode_convex_open(const std::vector<Vec2>& v,
                                    double sigma) {
    const int m = static_cast<int>(v.size()) - 1;  // edge count
    if (m < 2 || sigma <= 0.0) return v;

    // Pocket between the arc and its end-to-end chord.  Too shallow for
    // any sigma-chord: the whole arc erodes onto the chord.
    const double total = polygon_signed_area(v);
    if (std::abs(total) <= sigma) return {v.front(), v.back()};
    const double target = (total > 0 ? 2.0 : -2.0) * sigma;  // doubled area

    // Doubled signed area of the polygon [T, v[a+1], ..., v[b], H].
    auto area2 = [&](const Vec2& T, int a, int b, const Vec2& H) {
        double s = 0.0;
        Vec2 prev = T;
        for (int i = a + 1; i <= b; ++i) {
            s += cross(prev, v[i]);
            prev = v[i];
        }
        s += cross(prev, H);
        s += cross(H, T);
        return s;
    };
    // Fraction f on edge b (head) with area2(T, a, b, H(f)) == target.
    auto solve_head = [&](const Vec2& T, int a, int b) {
        const double a0 = area2(T, a, b, v[b]);
        const double a1 = area2(T, a, b, v[b + 1]);
        if (std::abs(a1 - a0) < 1e-30) return 2.0;  // degenerate: advance
        return (target - a0) / (a1 - a0);
    };
    // Fraction g on edge a (tail) with area2(T(g), a, b, H) == target.
    auto solve_tail = [&](int a, int b, const Vec2& H) {
        const double a0 = area2(v[a], a, b, H);
        const double a1 = area2(v[a + 1], a, b, H);
        if (std::abs(a1 - a0) < 1e-30) return 0.0;
        return (target - a0) / (a1 - a0);
    };

    std::vector<Vec2> out;
    out.push_back(v.front());

    // First chord, anchored at the start vertex.
    int b = 0;
    for (int k = 1; k <= m; ++k) {
        if (std::abs(area2(v[0], 0, k, v[k])) >= std::abs(target)) {
            b = k - 1;
            break;
        }
        b = k - 1;  // reaches m-1 at worst; total pocket exceeds sigma
    }
    double fb = std::clamp(solve_head(v[0], 0, b), 0.0, 1.0);
    int a = 0;
    double fa = 0.0;
    Vec2 T = v[0];
    Vec2 H = lerp(v[b], v[b + 1], fb);
    out.push_back(0.5 * (T + H));

    for (;;) {
        bool tail_event = false;
        double fb2 = 2.0;
        if (a + 1 <= b) {
            fb2 = solve_head(v[a + 1], a + 1, b);
            if (fb2 <= 1.0 + 1e-12) tail_event = true;
        }
        if (tail_event) {
            ++a;
            fa = 0.0;
            T = v[a];
            fb = std::clamp(fb2, fb, 1.0);
            H = lerp(v[b], v[b + 1], fb);
            out.push_back(0.5 * (T + H));
        } else if (b + 1 >= m) {
            // Head reaches the far endpoint: the last anchored chord.
            const double g = std::clamp(solve_tail(a, m, v[m]), fa, 1.0);
            out.push_back(0.5 * (lerp(v[a], v[a + 1], g) + v[m]));
            break;
        } else {
            ++b;
            fb = 0.0;
            H = v[b];
            const double g = std::clamp(solve_tail(a, b, H), fa, 1.0);
            fa = g;
            T = lerp(v[a], v[a + 1], g);
            out.push_back(0.5 * (T + H));
        }
    }
    out.push_back(v.back());
    return drop_duplicates(std::move(out));
}

// Erosion of a fully convex ring (distinct vertices, no closure repeat).
// Returns a ring with an explicit closure point.
std::vector<Vec2> erode_convex_closed(const std::vector<Vec2>& v,
                                      double sigma) {
    const int m = static_cast<int>(v.size());
    auto V = [&](int i) -> const Vec2& { return v[i % m]; };

    double total2 = 0.0;  // doubled signed area of the ring
    for (int i = 0; i < m; ++i) total2 += cross(V(i), V(i + 1));
    const double target = (total2 > 0 ? 2.0 : -2.0) * sigma;

    auto area2 = [&](const Vec2& T, int a, int b, const Vec2& H) {
        double s = 0.0;
        Vec2 prev = T;
        for (int i = a + 1; i <= b; ++i) {
            s += cross(prev, V(i));
            prev = V(i);
        }
        s += cross(prev, H);
        s += cross(H, T);
        return s;
    };
    auto solve_head = [&](const Vec2& T, int a, int b) {
        const double a0 = area2(T, a, b, V(b));
        const double a1 = area2(T, a, b, V(b + 1));
        if (std::abs(a1 - a0) < 1e-30) return 2.0;
        return (target - a0) / (a1 - a0);
    };
    auto solve_tail = [&](int a, int b, const Vec2& H) {
        const double a0 = area2(V(a), a, b, H);
        const double a1 = area2(V(a + 1), a, b, H);
        if (std::abs(a1 - a0) < 1e-30) return 0.0;
        return (target - a0) / (a1 - a0);
    };

    std::vector<Vec2> out;
    int b = 0;
    for (int k = 1; k <= m; ++k) {
        if (std::abs(area2(V(0), 0, k, V(k))) >= std::abs(target)) {
            b = k - 1;
            break;
        }
        b = k - 1;
    }
    double fb = std::clamp(solve_head(V(0), 0, b), 0.0, 1.0);
    int a = 0;
    double fa = 0.0;
    Vec2 T = V(0);
    Vec2 H = lerp(V(b), V(b + 1), fb);
    out.push_back(0.5 * (T + H));

    for (;;) {
        bool tail_event = false;
        double fb2 = 2.0;
        if (a + 1 <= b) {
            fb2 = solve_head(V(a + 1), a + 1, b);
            if (fb2 <= 1.0 + 1e-12) tail_event = true;
        }
        if (tail_event) {
            if (a + 1 >= m) break;  // the chord at V(m) repeats the first
            ++a;
            fa = 0.0;
            T = V(a);
            fb = std::clamp(fb2, fb, 1.0);
            H = lerp(V(b), V(b + 1), fb);
        } else {
            ++b;
            fb = 0.0;
            H = V(b);
            const double g = std::clamp(solve_tail(a, b, H), fa, 1.0);
            fa = g;
            T = lerp(V(a), V(a + 1), g);
        }
        out.push_back(0.5 * (T + H));
    }
    if (out.size() >= 2) out.push_back(out.front());  // explicit closure
    return drop_duplicates(std::move(out));
}

struct ArcComponent {
    std::vector<Vec2> pts;
    int sign = 0;
};

std::vector<Vec2> erode_component(const ArcComponent& comp, double sigma) {
    if (comp.sign == 0) return comp.pts;  // straight: a steady state
    return erode_convex_open(comp.pts, sigma);
}

}  // namespace

ErodeResult affine_erode(const std::vector<Vec2>& points, bool closed,
                         double sigma) {
    ErodeResult res;
    if (sigma <= 0.0 || points.size() < 3) {
        res.points = points;
        res.contracted = closed && points.size() < 4;
        return res;
    }

    if (!closed) {
        const std::vector<Vec2>& v = points;
        const int m = static_cast<int>(v.size()) - 1;
        // Split into maximal consistently-turning components; a sign flip
        // splits at the midpoint of the edge entering the new sign.
        std::vector<ArcComponent> comps;
        ArcComponent cur;
        cur.pts.push_back(v[0]);
        for (int i = 1; i < m; ++i) {
            const int s = turn_sign(v[i - 1], v[i], v[i + 1]);
            if (s != 0 && cur.sign != 0 && s != cur.sign) {
                const Vec2 mid = lerp(v[i - 1], v[i], 0.5);
                cur.pts.push_back(mid);
                comps.push_back(std::move(cur));
                cur = ArcComponent{};
                cur.pts.push_back(mid);
                cur.pts.push_back(v[i]);
                cur.sign = s;
            } else {
                cur.pts.push_back(v[i]);
                if (s != 0) cur.sign = s;
            }
        }
        cur.pts.push_back(v[m]);
        comps.push_back(std::move(cur));

        std::vector<Vec2> out;
        for (size_t k = 0; k < comps.size(); ++k) {
            std::vector<Vec2> part = erode_component(comps[k], sigma);
            if (k == 0)
                out = std::move(part);
            else
                out.insert(out.end(), part.begin() + 1, part.end());
        }
        res.points = drop_duplicates(std::move(out));
        return res;
    }

    // Closed curve: work on the distinct-vertex ring.
    std::vector<Vec2> ring = points;
    if (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
    const int m = static_cast<int>(ring.size());
    if (m < 3) {
        res.points = points;
        res.contracted = true;
        return res;
    }
    const double area = polygon_signed_area(ring);
    if (std::abs(area) <= 2.0 * sigma) {
        res.points = points;
        res.contracted = true;
        return res;
    }

    auto V = [&](int i) -> const Vec2& { return ring[((i % m) + m) % m]; };
    std::vector<int> sign(m, 0);
    bool any_plus = false, any_minus = false;
    for (int i = 0; i < m; ++i) {
        sign[i] = turn_sign(V(i - 1), V(i), V(i + 1));
        any_plus |= sign[i] > 0;
        any_minus |= sign[i] < 0;
    }
    if (!any_plus && !any_minus) {
        res.points = points;  // numerically straight: leave untouched
        return res;
    }
    if (!(any_plus && any_minus)) {
        res.points = erode_convex_closed(ring, sigma);
        if (res.points.size() < 4) {
            res.points = points;
            res.contracted = true;
        }
        return res;
    }

    // Mixed turning: split the ring at sign flips into open components
    // whose endpoints (inflection-edge midpoints) the flow keeps fixed.
    // A flip between consecutive nonzero-sign vertices splits the edge
    // entering the vertex that carries the new sign.
    struct Split {
        int edge;        // ring edge (edge, edge+1) holding the midpoint
        int sign_after;  // turning sign of the component that starts here
    };
    std::vector<int> nz;
    for (int i = 0; i < m; ++i)
        if (sign[i] != 0) nz.push_back(i);
    std::vector<Split> splits;
    for (size_t j = 0; j < nz.size(); ++j) {
        const int a = nz[j];
        const int b = nz[(j + 1) % nz.size()];
        if (sign[a] != sign[b]) splits.push_back({(b - 1 + m) % m, sign[b]});
    }
    std::sort(splits.begin(), splits.end(),
              [](const Split& a, const Split& b) { return a.edge < b.edge; });
    assert(splits.size() >= 2);

    std::vector<Vec2> out;
    const int S = static_cast<int>(splits.size());
    for (int q = 0; q < S; ++q) {
        const Split& s0 = splits[q];
        const Split& s1 = splits[(q + 1) % S];
        ArcComponent comp;
        comp.sign = s0.sign_after;
        comp.pts.push_back(0.5 * (V(s0.edge) + V(s0.edge + 1)));
        const int stop = s1.edge + (q + 1 == S ? m : 0);
        for (int i = s0.edge + 1; i <= stop; ++i) comp.pts.push_back(V(i));
        comp.pts.push_back(0.5 * (V(s1.edge) + V(s1.edge + 1)));
        std::vector<Vec2> part = erode_component(comp, sigma);
        if (q == 0)
            out = std::move(part);
        else
            out.insert(out.end(), part.begin() + 1, part.end());
    }
    res.points = drop_duplicates(std::move(out));
    if (res.points.size() >= 2 &&
        dist(res.points.front(), res.points.back()) > 1e-9) {
        res.points.push_back(res.points.front());
    } else if (res.points.size() >= 2) {
        res.points.back() = res.points.front();
    }
    if (res.points.size() < 4 ||
        std::abs(polygon_signed_area(res.points)) < 1e-12) {
        res.points = points;
        res.contracted = true;
    }
    return res;
}

EvolveResult evolve(const PolyCurve& curve, const FlowParams& params) {
    EvolveResult res;
    res.curve = curve;
    if (params.duration <= 0.0 || curve.points.size() < 3) {
        res.time_completed = std::max(0.0, params.duration);
        return res;
    }
    const bool closed = curve.kind == CurveKind::Closed;
    const int n =
        params.erosion_steps > 0
            ? params.erosion_steps
            : std::max(1, static_cast<int>(
                              std::ceil(params.duration / 0.2 - 1e-12)));
    const double omega = params.omega > 0.0 ? params.omega
                                            : kErosionTimeScale;
    const double sigma =
        std::pow(params.duration / (n * omega), 1.5);

    std::vector<Vec2> work = curve.points;
    for (int i = 0; i < n; ++i) {
        ErodeResult er = affine_erode(work, closed, sigma);
        if (er.contracted) {
            res.curve.points = std::move(work);
            res.contracted = true;
            res.time_completed = params.duration * i / n;
            return res;
        }
        work = std::move(er.points);
        if (i + 1 < n)
            work = resample_polyline(work, closed, params.resample_step);
    }
    res.curve.points = std::move(work);
    res.time_completed = params.duration;
    return res;
}

double max_safe_time(const CurveNetwork& net) {
    const double rho = critical_distance(net);
    if (!std::isfinite(rho)) return std::numeric_limits<double>::infinity();
    double kmax = 0.0;
    for (const PolyCurve& c : net.curves)
        if (is_movable(c))
            kmax = std::max(kmax, max_abs_curvature(
                                      c.points, c.kind == CurveKind::Closed));
    if (kmax <= 0.0) return std::numeric_limits<double>::infinity();
    return rho / std::cbrt(kmax);
}

namespace {

// After a chunk, the label-map adjacency must match the previous one.
// Edges touching a region that legitimately vanished may disappear, and a
// new edge (a, b) is tolerated only when both a and b were adjacent to
// such a vanished region (adjacency handed through the collapsed face).
bool adjacency_equivalent(const std::vector<std::pair<int, int>>& before,
                          const std::vector<std::pair<int, int>>& after,
                          const std::set<int>& vanished) {
    const std::set<std::pair<int, int>> bs(before.begin(), before.end());
    const std::set<std::pair<int, int>> as(after.begin(), after.end());
    auto had = [&](int a, int b) {
        if (a > b) std::swap(a, b);
        return bs.count({a, b}) > 0;
    };
    for (const auto& e : bs) {
        if (as.count(e)) continue;
        if (!vanished.count(e.first) && !vanished.count(e.second))
            return false;
    }
    for (const auto& e : as) {
        if (bs.count(e)) continue;
        bool explained = false;
        for (int r : vanished) {
            if (had(e.first, r) && had(e.second, r)) {
                explained = true;
                break;
            }
        }
        if (!explained) return false;
    }
    return true;
}

}  // namespace

NetworkFlowReport evolve_network(CurveNetwork& net, double duration,
                                 const NetworkFlowOptions& opts) {
    NetworkFlowReport rep;
    const int W = static_cast<int>(net.width);
    const int H = static_cast<int>(net.height);
    std::set<int> frozen;
    const double eps = 1e-9;
    double t = 0.0;

    while (t < duration - eps) {
        bool any_active = false;
        for (int ci = 0; ci < static_cast<int>(net.curves.size()); ++ci)
            if (is_movable(net.curves[ci]) && !frozen.count(ci))
                any_active = true;
        if (!any_active) {
            t = duration;
            break;
        }

        const double safe = max_safe_time(net);
        double dt = std::min(duration - t, opts.chunk_cap);
        if (std::isfinite(safe)) dt = std::min(dt, opts.safety * safe);
        dt = std::min(std::max(dt, opts.chunk_floor), duration - t);

        const std::vector<std::pair<int, int>> before =
            label_adjacency_pairs(rasterize_label_map(net, W, H), W, H);

        // Snapshot for rollback: points and liveness of candidates.
        std::map<int, std::vector<Vec2>> snapshot;
        for (int ci = 0; ci < static_cast<int>(net.curves.size()); ++ci)
            if (is_movable(net.curves[ci]) && !frozen.count(ci))
                snapshot[ci] = net.curves[ci].points;

        std::map<int, int> contracted;  // curve -> enclosed region
        std::set<int> moved;
        {
            NetworkEditor editor(net);
            for (auto& [ci, pts] : snapshot) {
                (void)pts;
                PolyCurve& c = net.curves[ci];
                FlowParams fp;
                fp.duration = dt;
                fp.resample_step = opts.resample_step;
                EvolveResult er = evolve(c, fp);
                if (er.contracted) {
                    if (opts.keep_contracting_curves) {
                        frozen.insert(ci);
                    } else {
                        contracted[ci] = editor.remove_contracted_curve(ci);
                    }
                } else {
                    c.points = resample_polyline(
                        er.curve.points, c.kind == CurveKind::Closed,
                        opts.resample_step);
                    moved.insert(ci);
                }
            }
        }

        // Validate; roll back offenders until the chunk is consistent.
        for (;;) {
            ValidationReport vr = validate_network(net);
            bool ok = vr.ok;
            std::vector<int> offenders = vr.offending_curves;
            if (ok) {
                std::set<int> vanished;
                for (const auto& [ci, region] : contracted)
                    vanished.insert(region);
                const std::vector<std::pair<int, int>> after =
                    label_adjacency_pairs(rasterize_label_map(net, W, H), W,
                                          H);
                if (!adjacency_equivalent(before, after, vanished)) {
                    ok = false;
                    offenders.clear();  // culprit unknown: roll back all
                }
            }
            if (ok) break;

            std::vector<int> victims;
            for (int ci : offenders)
                if (snapshot.count(ci)) victims.push_back(ci);
            if (victims.empty()) {  // roll back the whole chunk
                for (const auto& [ci, pts] : snapshot)
                    if (moved.count(ci) || contracted.count(ci))
                        victims.push_back(ci);
            }
            if (victims.empty()) break;  // nothing left to undo
            for (int ci : victims) {
                net.curves[ci].points = snapshot.at(ci);
                net.curves[ci].alive = true;
                moved.erase(ci);
                contracted.erase(ci);
                frozen.insert(ci);
            }
        }

        for (const auto& [ci, region] : contracted) {
            (void)ci;
            rep.vanished_regions.push_back(region);
        }
        t += dt;
        ++rep.chunks;
    }

    rep.time_done = t;
    rep.frozen_curves.assign(frozen.begin(), frozen.end());
    return rep;
}

}  // namespace vecraster
