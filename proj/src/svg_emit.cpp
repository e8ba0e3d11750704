#include "vecraster/svg_emit.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "vecraster/errors.hpp"
#include "vecraster/geometry.hpp"

namespace vecraster {

double quantize_coord(double v) {
    double q = std::round(v * 1000.0) / 1000.0;
    return q == 0.0 ? 0.0 : q;  // collapse -0
}

std::string format_coord(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    std::string s(buf);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    if (s == "-0" || s.empty()) s = "0";
    return s;
}

namespace {

Vec2 quantize(Vec2 v) { return {quantize_coord(v.x), quantize_coord(v.y)}; }

// A directed traversal of one curve: the region `left` stays on the left.
struct HalfEdge {
    int curve = -1;
    bool backward = false;
    int left = 0;
    int j_from = -1;  // junction indices (always -1 for closed curves)
    int j_to = -1;
    Vec2 dir_out;  // first polyline segment direction when leaving j_from
    Vec2 dir_in;   // last polyline segment direction when arriving at j_to
};

double ccw_delta(Vec2 incoming, Vec2 outgoing) {
    // Angle swept counterclockwise (in raw y-down coordinates) from the
    // reversed incoming direction to the outgoing one; straight-back
    // (delta 0) sorts last so a walk never immediately retraces itself.
    double back = std::atan2(-incoming.y, -incoming.x);
    double out = std::atan2(outgoing.y, outgoing.x);
    double d = out - back;
    const double two_pi = 6.283185307179586476925286766559;
    while (d <= 0.0) d += two_pi;
    while (d > two_pi) d -= two_pi;
    return d;
}

std::vector<Vec2> flatten_loop(const std::vector<BezierSegment>& loop,
                               double tol) {
    std::vector<Vec2> pts;
    if (loop.empty()) return pts;
    pts.push_back(loop.front().p0);
    for (const BezierSegment& s : loop) flatten_segment(s, tol, pts);
    return pts;
}

double loop_signed_area(const std::vector<BezierSegment>& loop) {
    return polygon_signed_area(flatten_loop(loop, 0.01));
}

void append_geometry(const BezierPath& path, bool backward,
                     std::vector<BezierSegment>& out) {
    if (!backward) {
        out.insert(out.end(), path.segments.begin(), path.segments.end());
        return;
    }
    for (auto it = path.segments.rbegin(); it != path.segments.rend(); ++it) {
        out.push_back(BezierSegment{it->p3, it->p2, it->p1, it->p0});
    }
}

}  // namespace

VectorDocument assemble(const Partition& p, const CurveNetwork& net,
                        const std::vector<BezierPath>& paths,
                        const RasterImage& img) {
    VectorDocument doc;
    doc.width = img.width;
    doc.height = img.height;

    // Quantize every fitted path once; both adjacent regions then emit the
    // shared boundary with bit-identical coordinates.
    std::vector<BezierPath> qpaths(net.curves.size());
    std::vector<bool> has_path(net.curves.size(), false);
    for (const BezierPath& path : paths) {
        if (path.source_curve < 0 ||
            path.source_curve >= static_cast<int>(net.curves.size())) {
            throw AssemblyError("fitted path with unknown source curve");
        }
        BezierPath q = path;
        for (BezierSegment& s : q.segments) {
            s.p0 = quantize(s.p0);
            s.p1 = quantize(s.p1);
            s.p2 = quantize(s.p2);
            s.p3 = quantize(s.p3);
        }
        // Drop segments that quantized away entirely (keeps chains C0).
        std::vector<BezierSegment> kept;
        for (const BezierSegment& s : q.segments) {
            if (s.p0 == s.p1 && s.p0 == s.p2 && s.p0 == s.p3) continue;
            kept.push_back(s);
        }
        if (!kept.empty()) q.segments = std::move(kept);
        qpaths[path.source_curve] = std::move(q);
        has_path[path.source_curve] = true;
    }

    // Two half-edges per live curve; collect them per region.
    std::vector<HalfEdge> half(2 * net.curves.size());
    std::map<int, std::vector<int>> region_half;  // region -> half-edge ids
    for (int ci = 0; ci < static_cast<int>(net.curves.size()); ++ci) {
        const PolyCurve& c = net.curves[ci];
        if (!c.alive) continue;
        if (!has_path[ci]) {
            throw AssemblyError("curve " + std::to_string(ci) +
                                " has no fitted path");
        }
        const std::vector<Vec2>& pts = c.points;
        assert(pts.size() >= 2);
        Vec2 first_dir = pts[1] - pts[0];
        Vec2 last_dir = pts[pts.size() - 1] - pts[pts.size() - 2];
        HalfEdge fwd;
        fwd.curve = ci;
        fwd.backward = false;
        fwd.left = c.left_region;
        fwd.j_from = c.j_start;
        fwd.j_to = c.j_end;
        fwd.dir_out = first_dir;
        fwd.dir_in = last_dir;
        HalfEdge bwd;
        bwd.curve = ci;
        bwd.backward = true;
        bwd.left = c.right_region;
        bwd.j_from = c.j_end;
        bwd.j_to = c.j_start;
        bwd.dir_out = -1.0 * last_dir;
        bwd.dir_in = -1.0 * first_dir;
        half[2 * ci] = fwd;
        half[2 * ci + 1] = bwd;
        if (fwd.left != 0) region_half[fwd.left].push_back(2 * ci);
        if (bwd.left != 0) region_half[bwd.left].push_back(2 * ci + 1);
    }

    for (const auto& [region, hes] : region_half) {
        if (region >= static_cast<int>(p.regions.size()) ||
            !p.regions[region].alive) {
            throw AssemblyError("curve references dead region " +
                                std::to_string(region));
        }
    }

    std::vector<VectorShape> shapes;
    for (const auto& [region, hes] : region_half) {
        // Start-junction lookup for this region's open half-edges.
        std::map<int, std::vector<int>> at_junction;
        for (int he : hes) {
            const HalfEdge& h = half[he];
            if (net.curves[h.curve].kind == CurveKind::Open) {
                if (h.j_from < 0 || h.j_to < 0) {
                    throw AssemblyError(
                        "region " + std::to_string(region) +
                        " has an open boundary curve without junctions");
                }
                at_junction[h.j_from].push_back(he);
            }
        }

        std::map<int, bool> used;
        for (int he : hes) used[he] = false;

        VectorShape shape;
        shape.region = region;
        for (int start : hes) {
            if (used[start]) continue;
            std::vector<BezierSegment> loop;
            if (net.curves[half[start].curve].kind == CurveKind::Closed) {
                used[start] = true;
                append_geometry(qpaths[half[start].curve],
                                half[start].backward, loop);
            } else {
                int cur = start;
                while (true) {
                    used[cur] = true;
                    append_geometry(qpaths[half[cur].curve],
                                    half[cur].backward, loop);
                    int j = half[cur].j_to;
                    auto it = at_junction.find(j);
                    if (it == at_junction.end()) {
                        throw AssemblyError(
                            "region " + std::to_string(region) +
                            " boundary cannot continue at junction " +
                            std::to_string(j));
                    }
                    int next = -1;
                    double best = 1e300;
                    for (int cand : it->second) {
                        double d = ccw_delta(half[cur].dir_in,
                                             half[cand].dir_out);
                        if (d < best ||
                            (d == best && (next < 0 || cand < next))) {
                            best = d;
                            next = cand;
                        }
                    }
                    if (next < 0) {
                        throw AssemblyError(
                            "region " + std::to_string(region) +
                            " boundary dead-ends at junction " +
                            std::to_string(j));
                    }
                    if (next == start) break;
                    if (used[next]) {
                        throw AssemblyError(
                            "region " + std::to_string(region) +
                            " boundary walk revisited a curve before "
                            "closing");
                    }
                    cur = next;
                }
            }
            if (loop.empty()) continue;
            Vec2 a = loop.front().p0;
            Vec2 b = loop.back().p3;
            if (dist(a, b) > 1e-6) {
                throw AssemblyError("region " + std::to_string(region) +
                                    " produced an unclosed loop");
            }
            loop.back().p3 = a;  // exact textual closure
            shape.loops.push_back(std::move(loop));
        }
        if (shape.loops.empty()) {
            throw AssemblyError("region " + std::to_string(region) +
                                " has no boundary loops");
        }

        // Outer loop first (largest enclosed area), then holes.
        std::vector<double> areas(shape.loops.size());
        for (std::size_t i = 0; i < shape.loops.size(); ++i) {
            areas[i] = loop_signed_area(shape.loops[i]);
        }
        std::vector<std::size_t> order(shape.loops.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a2, std::size_t b2) {
                      double fa = std::fabs(areas[a2]);
                      double fb = std::fabs(areas[b2]);
                      if (fa != fb) return fa > fb;
                      Vec2 pa = shape.loops[a2].front().p0;
                      Vec2 pb = shape.loops[b2].front().p0;
                      if (pa.x != pb.x) return pa.x < pb.x;
                      return pa.y < pb.y;
                  });
        std::vector<std::vector<BezierSegment>> sorted;
        sorted.reserve(shape.loops.size());
        for (std::size_t i : order) sorted.push_back(std::move(shape.loops[i]));
        shape.loops = std::move(sorted);
        shape.outer_area = std::fabs(areas[order.front()]);

        const RegionStats& st = p.regions[region];
        assert(st.area > 0.0);
        for (int c = 0; c < 3; ++c) {
            int src = p.channels == 3 ? c : 0;
            double mean = st.color_sum[static_cast<std::size_t>(src)] / st.area;
            int byte = static_cast<int>(std::floor(mean + 0.5));
            shape.rgb[static_cast<std::size_t>(c)] =
                std::clamp(byte, 0, 255);
        }
        shapes.push_back(std::move(shape));
    }

    std::sort(shapes.begin(), shapes.end(),
              [](const VectorShape& a, const VectorShape& b) {
                  if (a.outer_area != b.outer_area)
                      return a.outer_area > b.outer_area;
                  return a.region < b.region;
              });
    doc.shapes = std::move(shapes);
    return doc;
}

void write_svg(const VectorDocument& doc, std::ostream& os) {
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
       << format_coord(doc.width) << "\" height=\"" << format_coord(doc.height)
       << "\" viewBox=\"0 0 " << format_coord(doc.width) << ' '
       << format_coord(doc.height) << "\">\n";
    char color[8];
    for (const VectorShape& shape : doc.shapes) {
        std::snprintf(color, sizeof(color), "#%02x%02x%02x", shape.rgb[0],
                      shape.rgb[1], shape.rgb[2]);
        os << "<path fill=\"" << color << "\" fill-rule=\"evenodd\" d=\"";
        for (const auto& loop : shape.loops) {
            os << 'M' << format_coord(loop.front().p0.x) << ' '
               << format_coord(loop.front().p0.y);
            for (const BezierSegment& s : loop) {
                os << 'C' << format_coord(s.p1.x) << ' '
                   << format_coord(s.p1.y) << ' ' << format_coord(s.p2.x)
                   << ' ' << format_coord(s.p2.y) << ' '
                   << format_coord(s.p3.x) << ' ' << format_coord(s.p3.y);
            }
            os << 'Z';
        }
        os << "\"/>\n";
    }
    os << "</svg>\n";
}

void write_svg_file(const VectorDocument& doc, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    write_svg(doc, os);
    os.flush();
    if (!os) throw IoError("write failed: " + path);
}

namespace {

// Minimal scanner for the emitted subset.
struct DParser {
    const std::string& d;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < d.size() &&
               (d[pos] == ' ' || d[pos] == ',' || d[pos] == '\n' ||
                d[pos] == '\t' || d[pos] == '\r')) {
            ++pos;
        }
    }
    bool at_number() {
        skip_ws();
        if (pos >= d.size()) return false;
        char c = d[pos];
        return c == '-' || c == '+' || c == '.' || (c >= '0' && c <= '9');
    }
    double number() {
        skip_ws();
        const char* begin = d.c_str() + pos;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) throw FormatError("expected number in path data");
        pos += static_cast<std::size_t>(end - begin);
        return v;
    }
    Vec2 point() {
        double x = number();
        double y = number();
        return {x, y};
    }
    int command() {
        skip_ws();
        if (pos >= d.size()) return -1;
        return d[pos++];
    }
};

std::string attribute(const std::string& element, const std::string& name) {
    std::string key = name + "=\"";
    std::size_t at = element.find(key);
    if (at == std::string::npos) return {};
    std::size_t begin = at + key.size();
    std::size_t end = element.find('"', begin);
    if (end == std::string::npos) throw FormatError("unterminated attribute");
    return element.substr(begin, end - begin);
}

std::array<int, 3> parse_fill(const std::string& fill) {
    if (fill.size() != 7 || fill[0] != '#') {
        throw FormatError("unsupported fill color: " + fill);
    }
    auto hex = [&](int i) {
        int v = 0;
        for (int k = 0; k < 2; ++k) {
            char c = fill[static_cast<std::size_t>(i + k)];
            int digit;
            if (c >= '0' && c <= '9') digit = c - '0';
            else if (c >= 'a' && c <= 'f') digit = 10 + c - 'a';
            else if (c >= 'A' && c <= 'F') digit = 10 + c - 'A';
            else throw FormatError("bad hex digit in fill");
            v = v * 16 + digit;
        }
        return v;
    };
    return {hex(1), hex(3), hex(5)};
}

BezierSegment line_segment(Vec2 a, Vec2 b) {
    return {a, lerp(a, b, 1.0 / 3.0), lerp(a, b, 2.0 / 3.0), b};
}

}  // namespace

VectorDocument read_svg(std::istream& is) {
    std::stringstream buffer;
    buffer << is.rdbuf();
    std::string text = buffer.str();

    VectorDocument doc;
    std::string vb;
    {
        std::size_t at = text.find("viewBox=\"");
        if (at == std::string::npos) throw FormatError("missing viewBox");
        std::size_t begin = at + 9;
        std::size_t end = text.find('"', begin);
        if (end == std::string::npos) throw FormatError("bad viewBox");
        vb = text.substr(begin, end - begin);
    }
    {
        DParser p{vb};
        p.number();
        p.number();
        doc.width = p.number();
        doc.height = p.number();
    }

    std::size_t pos = 0;
    while (true) {
        std::size_t at = text.find("<path", pos);
        if (at == std::string::npos) break;
        std::size_t end = text.find('>', at);
        if (end == std::string::npos) throw FormatError("unterminated <path>");
        std::string element = text.substr(at, end - at + 1);
        pos = end + 1;

        VectorShape shape;
        std::string fill = attribute(element, "fill");
        if (!fill.empty()) shape.rgb = parse_fill(fill);
        std::string d = attribute(element, "d");
        if (d.empty()) throw FormatError("<path> without d attribute");

        DParser p{d};
        std::vector<BezierSegment> loop;
        Vec2 cur{}, first{};
        bool open_subpath = false;
        while (true) {
            int c = p.command();
            if (c < 0) break;
            switch (c) {
                case 'M': {
                    if (open_subpath) {
                        throw FormatError("subpath not closed before M");
                    }
                    cur = first = p.point();
                    open_subpath = true;
                    while (p.at_number()) {  // implicit lineto pairs
                        Vec2 q = p.point();
                        loop.push_back(line_segment(cur, q));
                        cur = q;
                    }
                    break;
                }
                case 'L': {
                    do {
                        Vec2 q = p.point();
                        loop.push_back(line_segment(cur, q));
                        cur = q;
                    } while (p.at_number());
                    break;
                }
                case 'C': {
                    do {
                        Vec2 c1 = p.point();
                        Vec2 c2 = p.point();
                        Vec2 q = p.point();
                        loop.push_back(BezierSegment{cur, c1, c2, q});
                        cur = q;
                    } while (p.at_number());
                    break;
                }
                case 'Z':
                case 'z': {
                    if (cur != first) {
                        loop.push_back(line_segment(cur, first));
                        cur = first;
                    }
                    if (!loop.empty()) shape.loops.push_back(std::move(loop));
                    loop.clear();
                    open_subpath = false;
                    break;
                }
                default:
                    throw FormatError(std::string("unsupported path command ") +
                                      static_cast<char>(c));
            }
        }
        if (open_subpath && !loop.empty()) {
            throw FormatError("unclosed subpath in path data");
        }
        double best = 0.0;
        for (const auto& lp : shape.loops) {
            best = std::max(best, std::fabs(loop_signed_area(lp)));
        }
        shape.outer_area = best;
        doc.shapes.push_back(std::move(shape));
    }
    return doc;
}

VectorDocument read_svg_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    return read_svg(is);
}

}  // namespace vecraster
