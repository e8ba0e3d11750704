#include "vecraster/curve_net.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <unordered_map>

#include <json.hpp>

namespace vecraster {

namespace {

// Pixel labels with the outer region 0 beyond the domain.
struct LabelGrid {
    const Partition* p;
    int w, h;
    int at(int x, int y) const {
        if (x < 0 || y < 0 || x >= w || y >= h) return 0;
        return p->label_at(x, y);
    }
};

// Corner-walk directions: N, E, S, W.
constexpr int kDx[4] = {0, 1, 0, -1};
constexpr int kDy[4] = {-1, 0, 1, 0};

std::string describe_point(const Vec2& p) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "(%.6g, %.6g)", p.x, p.y);
    return buf;
}

bool on_border(const Vec2& p, double w, double h, double tol) {
    return std::abs(p.x) <= tol || std::abs(p.y) <= tol ||
           std::abs(p.x - w) <= tol || std::abs(p.y - h) <= tol;
}

}  // namespace

CurveNetwork extract_network(const Partition& p) {
    const int w = p.width, h = p.height;
    const LabelGrid g{&p, w, h};
    const int cw = w + 1, ch = h + 1;  // corner grid dimensions

    // Boundary edges between adjacent corners: ve runs (cx,cy)->(cx,cy+1),
    // he runs (cx,cy)->(cx+1,cy); an edge exists where the two pixels it
    // separates carry different labels.
    std::vector<char> ve(static_cast<size_t>(cw) * h, 0);
    std::vector<char> he(static_cast<size_t>(w) * ch, 0);
    for (int cy = 0; cy < h; ++cy)
        for (int cx = 0; cx < cw; ++cx)
            ve[static_cast<size_t>(cy) * cw + cx] =
                g.at(cx - 1, cy) != g.at(cx, cy);
    for (int cy = 0; cy < ch; ++cy)
        for (int cx = 0; cx < w; ++cx)
            he[static_cast<size_t>(cy) * w + cx] =
                g.at(cx, cy - 1) != g.at(cx, cy);

    auto edge_exists = [&](int cx, int cy, int dir) -> bool {
        switch (dir) {
            case 0: return cy > 0 && ve[static_cast<size_t>(cy - 1) * cw + cx];
            case 1: return cx < w && he[static_cast<size_t>(cy) * w + cx];
            case 2: return cy < h && ve[static_cast<size_t>(cy) * cw + cx];
            default: return cx > 0 && he[static_cast<size_t>(cy) * w + cx - 1];
        }
    };
    std::vector<char> ve_used(ve.size(), 0), he_used(he.size(), 0);
    auto edge_used = [&](int cx, int cy, int dir) -> char& {
        switch (dir) {
            case 0: return ve_used[static_cast<size_t>(cy - 1) * cw + cx];
            case 1: return he_used[static_cast<size_t>(cy) * w + cx];
            case 2: return ve_used[static_cast<size_t>(cy) * cw + cx];
            default: return he_used[static_cast<size_t>(cy) * w + cx - 1];
        }
    };

    CurveNetwork net;
    net.width = w;
    net.height = h;

    // Junction corners: >= 3 distinct labels among the 4 incident pixels,
    // or two labels in a checkerboard arrangement (degree-4 crossing).
    std::vector<int> jidx(static_cast<size_t>(cw) * ch, -1);
    for (int cy = 0; cy < ch; ++cy) {
        for (int cx = 0; cx < cw; ++cx) {
            const int nw = g.at(cx - 1, cy - 1), ne = g.at(cx, cy - 1);
            const int sw = g.at(cx - 1, cy), se = g.at(cx, cy);
            int labs[4] = {nw, ne, sw, se};
            std::sort(labs, labs + 4);
            const int distinct =
                static_cast<int>(std::unique(labs, labs + 4) - labs);
            const bool checker = nw == se && ne == sw && nw != ne;
            if (distinct >= 3 || checker) {
                jidx[static_cast<size_t>(cy) * cw + cx] =
                    static_cast<int>(net.junctions.size());
                int deg = 0;
                for (int d = 0; d < 4; ++d) deg += edge_exists(cx, cy, d);
                net.junctions.push_back(
                    {Vec2(static_cast<double>(cx), static_cast<double>(cy)),
                     deg});
            }
        }
    }

    // Region labels flanking the first step out of a corner; the left side
    // of direction d is across the normal (d.y, -d.x).
    auto side_labels = [&](int cx, int cy, int dir, int& left, int& right) {
        switch (dir) {
            case 1:  // E
                left = g.at(cx, cy - 1);
                right = g.at(cx, cy);
                break;
            case 2:  // S
                left = g.at(cx, cy);
                right = g.at(cx - 1, cy);
                break;
            case 3:  // W
                left = g.at(cx - 1, cy);
                right = g.at(cx - 1, cy - 1);
                break;
            default:  // N
                left = g.at(cx - 1, cy - 1);
                right = g.at(cx, cy - 1);
                break;
        }
    };

    auto walk = [&](int cx, int cy, int dir, bool closed_loop) {
        PolyCurve c;
        side_labels(cx, cy, dir, c.left_region, c.right_region);
        c.j_start =
            closed_loop ? -1 : jidx[static_cast<size_t>(cy) * cw + cx];
        c.points.emplace_back(static_cast<double>(cx),
                              static_cast<double>(cy));
        const int sx = cx, sy = cy;
        for (;;) {
            edge_used(cx, cy, dir) = 1;
            cx += kDx[dir];
            cy += kDy[dir];
            c.points.emplace_back(static_cast<double>(cx),
                                  static_cast<double>(cy));
            if (closed_loop && cx == sx && cy == sy) {
                c.kind = CurveKind::Closed;
                c.j_end = -1;
                break;
            }
            if (jidx[static_cast<size_t>(cy) * cw + cx] >= 0) {
                c.kind = CurveKind::Open;
                c.j_end = jidx[static_cast<size_t>(cy) * cw + cx];
                break;
            }
            // Interior of a curve: the corner has exactly one other edge.
            const int back = (dir + 2) % 4;
            int next = -1;
            for (int d = 0; d < 4; ++d) {
                if (d == back || !edge_exists(cx, cy, d)) continue;
                assert(next < 0);
                next = d;
            }
            assert(next >= 0);
            dir = next;
        }
        net.curves.push_back(std::move(c));
    };

    // Curves anchored at junctions, in scan order.
    for (int cy = 0; cy < ch; ++cy)
        for (int cx = 0; cx < cw; ++cx)
            if (jidx[static_cast<size_t>(cy) * cw + cx] >= 0)
                for (int d = 0; d < 4; ++d)
                    if (edge_exists(cx, cy, d) && !edge_used(cx, cy, d))
                        walk(cx, cy, d, false);

    // Junction-free closed loops.  The first corner of an untraced loop
    // found in scan order is its topmost-leftmost corner, whose two edges
    // run east and south; start east so loops get a canonical orientation.
    for (int cy = 0; cy < ch; ++cy)
        for (int cx = 0; cx < cw; ++cx)
            if (jidx[static_cast<size_t>(cy) * cw + cx] < 0 &&
                edge_exists(cx, cy, 1) && !edge_used(cx, cy, 1))
                walk(cx, cy, 1, true);

#ifndef NDEBUG
    for (int cy = 0; cy <= h; ++cy)
        for (int cx = 0; cx <= w; ++cx)
            for (int d = 1; d <= 2; ++d)  // every edge once, as E or S
                assert(!edge_exists(cx, cy, d) || edge_used(cx, cy, d));
#endif
    return net;
}

std::vector<int> rasterize_label_map(const CurveNetwork& net, int w, int h) {
    struct Crossing {
        double x;
        int after;  // label to the right of the crossing along the sweep
        int left;   // the curve's left label, owed to exactly-hit centers
        int curve, seg;
    };
    std::vector<std::vector<Crossing>> rows(h);

    for (int ci = 0; ci < static_cast<int>(net.curves.size()); ++ci) {
        const PolyCurve& c = net.curves[ci];
        if (!c.alive) continue;
        for (size_t k = 0; k + 1 < c.points.size(); ++k) {
            const Vec2 p = c.points[k], q = c.points[k + 1];
            if (p.y == q.y) continue;  // horizontal: no row crossing
            const bool down = p.y < q.y;
            const double ylo = down ? p.y : q.y;
            const double yhi = down ? q.y : p.y;
            // Rows j with ylo <= j + 0.5 < yhi (entry inclusive, exit not).
            int jlo = static_cast<int>(std::ceil(ylo - 0.5));
            int jhi = static_cast<int>(std::ceil(yhi - 0.5)) - 1;
            jlo = std::max(jlo, 0);
            jhi = std::min(jhi, h - 1);
            for (int j = jlo; j <= jhi; ++j) {
                const double yc = j + 0.5;
                const double t = (yc - p.y) / (q.y - p.y);
                const double x = p.x + (q.x - p.x) * t;
                rows[j].push_back({x,
                                   down ? c.left_region : c.right_region,
                                   c.left_region, ci, static_cast<int>(k)});
            }
        }
    }

    std::vector<int> labels(static_cast<size_t>(w) * h, 0);
    for (int j = 0; j < h; ++j) {
        auto& cr = rows[j];
        std::sort(cr.begin(), cr.end(),
                  [](const Crossing& a, const Crossing& b) {
                      if (a.x != b.x) return a.x < b.x;
                      if (a.curve != b.curve) return a.curve < b.curve;
                      return a.seg < b.seg;
                  });
        int cur = 0;
        size_t idx = 0;
        for (int i = 0; i < w; ++i) {
            const double cx = i + 0.5;
            while (idx < cr.size() && cr[idx].x < cx) cur = cr[idx++].after;
            if (idx < cr.size() && cr[idx].x == cx)
                labels[static_cast<size_t>(j) * w + i] = cr[idx].left;
            else
                labels[static_cast<size_t>(j) * w + i] = cur;
        }
    }
    return labels;
}

Partition rasterize_labels(const CurveNetwork& net, const RasterImage& img) {
    const int w = img.width, h = img.height;
    Partition out;
    out.width = w;
    out.height = h;
    out.channels = img.channels;
    out.pixel_labels = rasterize_label_map(net, w, h);

    int maxlab = 0;
    for (int l : out.pixel_labels) maxlab = std::max(maxlab, l);
    for (const auto& c : net.curves)
        if (c.alive)
            maxlab = std::max({maxlab, c.left_region, c.right_region});

    out.regions.assign(static_cast<size_t>(maxlab) + 1, RegionStats{});
    out.parent.resize(maxlab + 1);
    std::iota(out.parent.begin(), out.parent.end(), 0);

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int l = out.pixel_labels[static_cast<size_t>(y) * w + x];
            RegionStats& r = out.regions[l];
            r.area += 1.0;
            for (int ch = 0; ch < img.channels; ++ch) {
                const double v = img.at(x, y, ch);
                r.color_sum[ch] += v;
                r.color_sq_sum[ch] += v * v;
            }
        }
    }

    // Shared boundary lengths from label transitions (domain border -> 0).
    std::map<std::pair<int, int>, double> shared;
    auto add = [&](int a, int b) {
        if (a == b) return;
        if (a > b) std::swap(a, b);
        shared[{a, b}] += 1.0;
    };
    auto lab = [&](int x, int y) {
        return out.pixel_labels[static_cast<size_t>(y) * w + x];
    };
    for (int y = 0; y < h; ++y) {
        add(0, lab(0, y));
        add(0, lab(w - 1, y));
        for (int x = 0; x + 1 < w; ++x) add(lab(x, y), lab(x + 1, y));
    }
    for (int x = 0; x < w; ++x) {
        add(0, lab(x, 0));
        add(0, lab(x, h - 1));
        for (int y = 0; y + 1 < h; ++y) add(lab(x, y), lab(x, y + 1));
    }

    out.adjacency.assign(static_cast<size_t>(maxlab) + 1, {});
    for (const auto& [pair, len] : shared) {
        out.regions[pair.first].perimeter += len;
        out.regions[pair.second].perimeter += len;
        out.adjacency[pair.first].push_back({pair.second, len});
        out.adjacency[pair.second].push_back({pair.first, len});
    }

    out.region_count = 0;
    for (int l = 1; l <= maxlab; ++l) {
        out.regions[l].alive = out.regions[l].area > 0.0;
        if (out.regions[l].alive) ++out.region_count;
    }
    out.regions[0].alive = true;
    return out;
}

std::vector<std::pair<int, int>> label_adjacency_pairs(
    const std::vector<int>& labels, int w, int h) {
    std::set<std::pair<int, int>> pairs;
    auto add = [&](int a, int b) {
        if (a == b) return;
        if (a > b) std::swap(a, b);
        pairs.insert({a, b});
    };
    auto lab = [&](int x, int y) {
        return labels[static_cast<size_t>(y) * w + x];
    };
    for (int y = 0; y < h; ++y) {
        add(0, lab(0, y));
        add(0, lab(w - 1, y));
        for (int x = 0; x + 1 < w; ++x) add(lab(x, y), lab(x + 1, y));
    }
    for (int x = 0; x < w; ++x) {
        add(0, lab(x, 0));
        add(0, lab(x, h - 1));
        for (int y = 0; y + 1 < h; ++y) add(lab(x, y), lab(x, y + 1));
    }
    return {pairs.begin(), pairs.end()};
}

double critical_distance(const CurveNetwork& net) {
    struct Candidate {
        Vec2 pos;
        int junction;  // -1 for closed-curve contraction points
    };
    std::vector<Candidate> cands;
    for (int j = 0; j < static_cast<int>(net.junctions.size()); ++j)
        if (net.junctions[j].degree > 0)
            cands.push_back({net.junctions[j].position, j});
    for (const auto& c : net.curves)
        if (c.alive && c.kind == CurveKind::Closed)
            cands.push_back({polygon_centroid(c.points), -1});

    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : net.curves) {
        if (!is_movable(c)) continue;
        double x0 = c.points[0].x, x1 = x0, y0 = c.points[0].y, y1 = y0;
        for (const Vec2& p : c.points) {
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
        }
        const std::vector<Vec2> hull = convex_hull(c.points);
        for (const auto& cand : cands) {
            if (cand.junction >= 0 &&
                (cand.junction == c.j_start || cand.junction == c.j_end))
                continue;
            if (cand.pos.x < x0 || cand.pos.x > x1 || cand.pos.y < y0 ||
                cand.pos.y > y1)
                continue;
            if (!point_in_convex_hull(cand.pos, hull, 1e-9)) continue;
            best = std::min(best, point_polyline_distance(cand.pos, c.points));
        }
    }
    return best;
}

void dump_network(const CurveNetwork& net, std::ostream& os) {
    nlohmann::json j;
    j["width"] = net.width;
    j["height"] = net.height;
    auto& jj = j["junctions"] = nlohmann::json::array();
    for (const auto& jn : net.junctions)
        jj.push_back({{"x", jn.position.x},
                      {"y", jn.position.y},
                      {"degree", jn.degree}});
    auto& cc = j["curves"] = nlohmann::json::array();
    for (const auto& c : net.curves) {
        if (!c.alive) continue;
        nlohmann::json e;
        e["kind"] = c.kind == CurveKind::Closed ? "closed" : "open";
        e["left"] = c.left_region;
        e["right"] = c.right_region;
        e["j_start"] = c.j_start;
        e["j_end"] = c.j_end;
        auto& pts = e["points"] = nlohmann::json::array();
        for (const Vec2& p : c.points) pts.push_back({p.x, p.y});
        cc.push_back(std::move(e));
    }
    os << j.dump() << '\n';
}

// --- validation -------------------------------------------------------------

namespace {

constexpr double kContactTol = 1e-9;
constexpr double kAnchorTol = 1e-6;

struct SegRef {
    int curve, idx;
    Vec2 a, b;
};

long long cell_key(int ix, int iy) {
    return (static_cast<long long>(ix) << 32) ^
           (static_cast<unsigned int>(iy));
}

// Endpoint positions at which a curve may legally touch something.
std::vector<Vec2> anchor_points(const PolyCurve& c) {
    if (c.kind == CurveKind::Closed) return {};
    return {c.points.front(), c.points.back()};
}

bool touch_at_anchor(const SegRef& s1, const SegRef& s2, const Vec2& anchor) {
    return point_segment_distance(anchor, s1.a, s1.b) <= kAnchorTol &&
           point_segment_distance(anchor, s2.a, s2.b) <= kAnchorTol;
}

}  // namespace

ValidationReport validate_network(const CurveNetwork& net) {
    auto fail = [](std::string m, std::vector<int> curves = {}) {
        return ValidationReport{false, std::move(m), std::move(curves)};
    };
    const double w = net.width, h = net.height;

    std::vector<int> implied_degree(net.junctions.size(), 0);
    std::vector<int> seg_count(net.curves.size(), 0);

    for (int ci = 0; ci < static_cast<int>(net.curves.size()); ++ci) {
        const PolyCurve& c = net.curves[ci];
        if (!c.alive) continue;
        const std::string tag = "curve " + std::to_string(ci);
        if (c.points.size() < 2) return fail(tag + " has fewer than 2 points");
        seg_count[ci] = static_cast<int>(c.points.size()) - 1;
        if (c.left_region == c.right_region)
            return fail(tag + " has equal labels on both sides (" +
                            std::to_string(c.left_region) + ")",
                        {ci});
        if (c.left_region < 0 || c.right_region < 0)
            return fail(tag + " has a negative region label", {ci});
        for (size_t k = 0; k + 1 < c.points.size(); ++k)
            if (dist(c.points[k], c.points[k + 1]) <= 1e-12)
                return fail(tag + " repeats point " +
                                describe_point(c.points[k]),
                            {ci});
        for (const Vec2& p : c.points)
            if (p.x < -kContactTol || p.y < -kContactTol ||
                p.x > w + kContactTol || p.y > h + kContactTol)
                return fail(tag + " leaves the domain at " + describe_point(p),
                            {ci});

        if (c.kind == CurveKind::Closed) {
            if (c.points.size() < 4)
                return fail(tag + " is closed with fewer than 4 points");
            if (dist(c.points.front(), c.points.back()) > kContactTol)
                return fail(tag + " is closed but does not repeat its first "
                                  "point at the end");
            if (std::abs(polygon_signed_area(c.points)) <= 1e-12)
                return fail(tag + " encloses no area", {ci});
            if (c.j_start != -1 || c.j_end != -1)
                return fail(tag + " is closed but carries junction indices");
        } else {
            const Vec2 ends[2] = {c.points.front(), c.points.back()};
            const int js[2] = {c.j_start, c.j_end};
            for (int e = 0; e < 2; ++e) {
                if (js[e] >= 0) {
                    if (js[e] >= static_cast<int>(net.junctions.size()))
                        return fail(tag + " references junction " +
                                    std::to_string(js[e]) +
                                    " which does not exist");
                    if (dist(ends[e], net.junctions[js[e]].position) >
                        kAnchorTol)
                        return fail(tag + " endpoint " +
                                    describe_point(ends[e]) +
                                    " is away from its junction");
                    ++implied_degree[js[e]];
                } else if (!on_border(ends[e], w, h, kContactTol)) {
                    return fail(tag + " endpoint " + describe_point(ends[e]) +
                                " is anchored to nothing");
                }
            }
        }

        if (is_movable(c)) {
            int border_hits = 0;
            for (const Vec2& p : c.points)
                border_hits += on_border(p, w, h, kContactTol);
            if (c.kind == CurveKind::Closed && border_hits > 0)
                --border_hits;  // the repeated closure point counts once
            if (border_hits > 2)
                return fail(tag + " meets the domain border at more than "
                                  "two points",
                            {ci});
            for (size_t k = 0; k + 1 < c.points.size(); ++k) {
                const Vec2 mid = lerp(c.points[k], c.points[k + 1], 0.5);
                if (on_border(c.points[k], w, h, kContactTol) &&
                    on_border(c.points[k + 1], w, h, kContactTol) &&
                    on_border(mid, w, h, kContactTol))
                    return fail(tag + " runs along the domain border near " +
                                    describe_point(mid),
                                {ci});
            }
        }
    }

    for (size_t j = 0; j < net.junctions.size(); ++j)
        if (net.junctions[j].degree != implied_degree[j])
            return fail("junction " + std::to_string(j) + " has degree " +
                        std::to_string(net.junctions[j].degree) + " but " +
                        std::to_string(implied_degree[j]) +
                        " curve endpoints");

    // Contact checks through a uniform spatial hash of segments.
    std::vector<SegRef> segs;
    for (int ci = 0; ci < static_cast<int>(net.curves.size()); ++ci) {
        const PolyCurve& c = net.curves[ci];
        if (!c.alive) continue;
        for (size_t k = 0; k + 1 < c.points.size(); ++k)
            segs.push_back({ci, static_cast<int>(k), c.points[k],
                            c.points[k + 1]});
    }
    const double cell = 2.0;
    std::unordered_map<long long, std::vector<int>> grid;
    for (int si = 0; si < static_cast<int>(segs.size()); ++si) {
        const SegRef& s = segs[si];
        const int ix0 = static_cast<int>(
            std::floor((std::min(s.a.x, s.b.x) - kContactTol) / cell));
        const int ix1 = static_cast<int>(
            std::floor((std::max(s.a.x, s.b.x) + kContactTol) / cell));
        const int iy0 = static_cast<int>(
            std::floor((std::min(s.a.y, s.b.y) - kContactTol) / cell));
        const int iy1 = static_cast<int>(
            std::floor((std::max(s.a.y, s.b.y) + kContactTol) / cell));
        for (int iy = iy0; iy <= iy1; ++iy)
            for (int ix = ix0; ix <= ix1; ++ix)
                grid[cell_key(ix, iy)].push_back(si);
    }

    for (const auto& [key, bucket] : grid) {
        (void)key;
        for (size_t u = 0; u < bucket.size(); ++u) {
            for (size_t v = u + 1; v < bucket.size(); ++v) {
                const SegRef& s1 = segs[bucket[u]];
                const SegRef& s2 = segs[bucket[v]];
                if (s1.curve == s2.curve) {
                    const int m = seg_count[s1.curve];
                    const int d = std::abs(s1.idx - s2.idx);
                    if (d <= 1) continue;
                    const PolyCurve& c = net.curves[s1.curve];
                    if (c.kind == CurveKind::Closed && d == m - 1)
                        continue;  // wrap-around neighbours share the seam
                    if (segment_segment_distance(s1.a, s1.b, s2.a, s2.b) >=
                        kContactTol)
                        continue;
                    // A curve anchored to one junction at both ends may
                    // touch itself exactly there.
                    bool anchored = false;
                    if (c.kind == CurveKind::Open &&
                        dist(c.points.front(), c.points.back()) <= kAnchorTol)
                        anchored = touch_at_anchor(s1, s2, c.points.front());
                    if (!anchored)
                        return fail("curve " + std::to_string(s1.curve) +
                                        " intersects itself near " +
                                        describe_point(s1.a),
                                    {s1.curve});
                } else {
                    if (segment_segment_distance(s1.a, s1.b, s2.a, s2.b) >=
                        kContactTol)
                        continue;
                    bool shared = false;
                    for (const Vec2& a1 :
                         anchor_points(net.curves[s1.curve])) {
                        for (const Vec2& a2 :
                             anchor_points(net.curves[s2.curve])) {
                            if (dist(a1, a2) <= kAnchorTol &&
                                touch_at_anchor(s1, s2, a1)) {
                                shared = true;
                                break;
                            }
                        }
                        if (shared) break;
                    }
                    if (!shared)
                        return fail(
                            "curves " + std::to_string(s1.curve) + " and " +
                                std::to_string(s2.curve) +
                                " touch away from a shared junction near " +
                                describe_point(s1.a),
                            {s1.curve, s2.curve});
                }
            }
        }
    }

    return {};
}

// --- surgery ----------------------------------------------------------------

NetworkEditor::NetworkEditor(CurveNetwork& net) : net_(net) {
    incidence_.resize(net.junctions.size());
    for (int ci = 0; ci < static_cast<int>(net.curves.size()); ++ci) {
        const PolyCurve& c = net.curves[ci];
        if (!c.alive) continue;
        region_curves_[c.left_region].push_back(ci);
        region_curves_[c.right_region].push_back(ci);
        if (c.kind == CurveKind::Open) {
            if (c.j_start >= 0) incidence_[c.j_start].push_back({ci, 0});
            if (c.j_end >= 0) incidence_[c.j_end].push_back({ci, 1});
        }
    }
    for (size_t j = 0; j < incidence_.size(); ++j)
        net_.junctions[j].degree = static_cast<int>(incidence_[j].size());
}

void NetworkEditor::drop_incidence(int j, int curve_id, int end) {
    auto& v = incidence_[j];
    v.erase(std::remove(v.begin(), v.end(), std::make_pair(curve_id, end)),
            v.end());
    net_.junctions[j].degree = static_cast<int>(v.size());
}

void NetworkEditor::dissolve_curve(int curve_id,
                                   std::vector<int>& touched_junctions) {
    PolyCurve& c = net_.curves[curve_id];
    c.alive = false;
    if (c.kind == CurveKind::Open) {
        if (c.j_start >= 0) {
            drop_incidence(c.j_start, curve_id, 0);
            touched_junctions.push_back(c.j_start);
        }
        if (c.j_end >= 0) {
            drop_incidence(c.j_end, curve_id, 1);
            touched_junctions.push_back(c.j_end);
        }
    }
}

void NetworkEditor::reverse_curve(int curve_id) {
    PolyCurve& c = net_.curves[curve_id];
    std::reverse(c.points.begin(), c.points.end());
    std::swap(c.left_region, c.right_region);
    std::swap(c.j_start, c.j_end);
    auto flip = [&](int j) {
        for (auto& e : incidence_[j])
            if (e.first == curve_id) e.second ^= 1;
    };
    if (c.j_start >= 0) flip(c.j_start);
    if (c.j_end >= 0 && c.j_end != c.j_start) flip(c.j_end);
}

void NetworkEditor::release_junction(int j) {
    const auto ends = incidence_[j];
    assert(ends.size() == 2);
    int c1 = ends[0].first, e1 = ends[0].second;
    int c2 = ends[1].first, e2 = ends[1].second;

    if (c1 == c2) {
        // A loop anchored only here: seal it into a closed curve.
        PolyCurve& c = net_.curves[c1];
        assert(dist(c.points.front(), c.points.back()) <= kAnchorTol);
        c.points.back() = c.points.front();
        c.kind = CurveKind::Closed;
        c.j_start = c.j_end = -1;
    } else {
        if (c2 < c1) {
            std::swap(c1, c2);
            std::swap(e1, e2);
        }
        if (e1 != 1) reverse_curve(c1);  // c1 must end here
        if (e2 != 0) reverse_curve(c2);  // c2 must start here
        PolyCurve& a = net_.curves[c1];
        PolyCurve& b = net_.curves[c2];
        assert(a.left_region == b.left_region &&
               a.right_region == b.right_region);
        assert(dist(a.points.back(), b.points.front()) <= kAnchorTol);
        a.points.insert(a.points.end(), b.points.begin() + 1,
                        b.points.end());
        a.j_end = b.j_end;
        b.alive = false;
        if (b.j_end >= 0) {
            assert(b.j_end != j);
            for (auto& e : incidence_[b.j_end])
                if (e == std::make_pair(c2, 1)) e = {c1, 1};
        }
    }
    incidence_[j].clear();
    net_.junctions[j].degree = 0;
}

void NetworkEditor::merge_regions(int kept, int gone) {
    assert(kept != gone);
    std::vector<int> ids;
    if (auto it = region_curves_.find(gone); it != region_curves_.end())
        ids = std::move(it->second);
    std::vector<int> touched;
    for (int ci : ids) {
        PolyCurve& c = net_.curves[ci];
        if (!c.alive) continue;
        const bool l = c.left_region == gone;
        const bool r = c.right_region == gone;
        if (!l && !r) continue;  // stale entry
        const int other = l ? c.right_region : c.left_region;
        if (other == kept) {
            dissolve_curve(ci, touched);
        } else {
            if (l)
                c.left_region = kept;
            else
                c.right_region = kept;
            region_curves_[kept].push_back(ci);
        }
    }
    region_curves_.erase(gone);

    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()),
                  touched.end());
    for (int j : touched) {
        const int deg = static_cast<int>(incidence_[j].size());
        net_.junctions[j].degree = deg;
        assert(deg != 1);
        if (deg == 2) release_junction(j);
    }
}

void NetworkEditor::absorb_vanished(int region) {
    auto it = region_curves_.find(region);
    if (it == region_curves_.end()) return;
    std::map<int, double> share;  // neighbour -> shared boundary length
    for (int ci : it->second) {
        const PolyCurve& c = net_.curves[ci];
        if (!c.alive) continue;
        int other;
        if (c.left_region == region)
            other = c.right_region;
        else if (c.right_region == region)
            other = c.left_region;
        else
            continue;
        if (other == 0) continue;  // never absorb into the outer region
        share[other] += polyline_length(c.points, false);
    }
    if (share.empty()) {
        region_curves_.erase(region);
        return;
    }
    int kept = share.begin()->first;
    double best = share.begin()->second;
    for (const auto& [id, len] : share) {
        if (len > best) {  // ties keep the smallest id (map order)
            best = len;
            kept = id;
        }
    }
    merge_regions(kept, region);
}

int NetworkEditor::remove_contracted_curve(int curve_id) {
    PolyCurve& c = net_.curves[curve_id];
    assert(c.alive && c.kind == CurveKind::Closed);
    // Positive shoelace sum in y-down coordinates means the interior lies
    // to the right of the travel direction.
    const int enclosed = polygon_signed_area(c.points) > 0
                             ? c.right_region
                             : c.left_region;
    c.alive = false;
    return enclosed;
}

}  // namespace vecraster
