#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <vecraster/bezier_fit.hpp>
#include <vecraster/curve_net.hpp>
#include <vecraster/errors.hpp>
#include <vecraster/fixtures.hpp>
#include <vecraster/raster_io.hpp>
#include <vecraster/region_graph.hpp>
#include <vecraster/svg_emit.hpp>

using namespace vecraster;

namespace {

RasterImage gray_image(int w, int h, std::vector<double> values) {
    RasterImage img;
    img.width = w;
    img.height = h;
    img.channels = 1;
    img.data = std::move(values);
    return img;
}

Partition consolidated(const RasterImage& img) {
    auto p = initial_partition(img);
    refine_to_2normal(p, GainKind::MS, 0.0);
    p.materialize_labels();
    return p;
}

std::vector<BezierPath> fit_all(const CurveNetwork& net, double tau) {
    std::vector<BezierPath> paths;
    for (int ci = 0; ci < static_cast<int>(net.curves.size()); ++ci) {
        if (!net.curves[ci].alive) continue;
        paths.push_back(fit_path(net.curves[ci], tau, ci));
    }
    return paths;
}

VectorDocument vectorize_flat(const RasterImage& img, double tau = 0.5) {
    auto p = consolidated(img);
    auto net = extract_network(p);
    return assemble(p, net, fit_all(net, tau), img);
}

// Merges the whole image into one region regardless of color, so the
// single shape's fill is the global mean.
VectorDocument vectorize_single(const RasterImage& img) {
    auto p = initial_partition(img);
    double lambda_star = 0.0;
    run_merges(p, GainKind::MS, static_cast<long long>(img.width) * img.height,
               lambda_star);
    p.materialize_labels();
    auto net = extract_network(p);
    return assemble(p, net, fit_all(net, 0.5), img);
}

// Minimal well-formedness scan: single root element, balanced tags,
// balanced attribute quotes, no stray '<' or '>'.
bool xml_well_formed(const std::string& text) {
    size_t i = 0;
    const size_t n = text.size();
    std::vector<std::string> stack;
    bool seen_root = false;
    while (i < n) {
        if (text[i] != '<') {
            if (text[i] == '>') return false;
            ++i;
            continue;
        }
        size_t j = i + 1;
        bool in_quote = false;
        while (j < n && (in_quote || text[j] != '>')) {
            if (text[j] == '"') in_quote = !in_quote;
            if (!in_quote && text[j] == '<') return false;
            ++j;
        }
        if (j >= n || in_quote) return false;
        std::string tag = text.substr(i + 1, j - i - 1);
        if (!tag.empty() && tag.front() == '?') {
            // declaration
        } else if (!tag.empty() && tag.front() == '/') {
            std::string name = tag.substr(1);
            if (stack.empty() || stack.back() != name) return false;
            stack.pop_back();
        } else if (!tag.empty() && tag.back() == '/') {
            if (stack.empty() && seen_root) return false;
        } else {
            std::string name = tag.substr(0, tag.find_first_of(" \t\n"));
            if (stack.empty() && seen_root) return false;
            stack.push_back(name);
            seen_root = true;
        }
        i = j + 1;
    }
    return stack.empty() && seen_root;
}

std::string render(const VectorDocument& doc) {
    std::ostringstream os;
    write_svg(doc, os);
    return os.str();
}

}  // namespace

TEST_CASE("coordinates quantize to the milli-pixel export grid") {
    CHECK(quantize_coord(1.0004) == doctest::Approx(1.0));
    CHECK(quantize_coord(1.0006) == doctest::Approx(1.001));
    CHECK(quantize_coord(-2.0004) == doctest::Approx(-2.0));
    CHECK(quantize_coord(0.125) == doctest::Approx(0.125));
}

TEST_CASE("coordinate formatting strips trailing zeros and negative zero") {
    CHECK(format_coord(1.0) == "1");
    CHECK(format_coord(2.5) == "2.5");
    CHECK(format_coord(1.25) == "1.25");
    CHECK(format_coord(3.125) == "3.125");
    CHECK(format_coord(10.0) == "10");
    CHECK(format_coord(-1.5) == "-1.5");
    CHECK(format_coord(0.0) == "0");
    CHECK(format_coord(-0.0001) == "0");   // rounds to -0, collapses
    CHECK(format_coord(0.001) == "0.001");
    CHECK(format_coord(36.93) == "36.93");
    CHECK(format_coord(120.0) == "120");
}

TEST_CASE("single-region document carries the global mean, rounded half-up") {
    // Mean 99.5 rounds half-up to 100.
    std::vector<double> v(12, 99.0);
    v[0] = 105.0;  // mean = (11*99 + 105)/12 = 99.5
    auto doc = vectorize_single(gray_image(4, 3, v));

    REQUIRE(doc.shapes.size() == 1);
    const auto& s = doc.shapes[0];
    CHECK(s.region == 1);
    CHECK(s.rgb == std::array<int, 3>{100, 100, 100});
    REQUIRE(s.loops.size() == 1);
    // Fitted corners may bulge within the half-pixel budget.
    CHECK(s.outer_area == doctest::Approx(12.0).epsilon(0.12));
    // The loop closes exactly.
    CHECK(s.loops[0].front().p0 == s.loops[0].back().p3);
}

TEST_CASE("rounding is half-up, not banker's") {
    std::vector<double> v(12, 99.0);
    v[0] = 99.0 + 12.0 * 0.4;  // mean 99.4 -> 99
    auto doc = vectorize_single(gray_image(4, 3, v));
    REQUIRE(doc.shapes.size() == 1);
    CHECK(doc.shapes[0].rgb[0] == 99);

    std::vector<double> w(12, 98.0);
    w[0] = 98.0 + 12.0 * 0.5;  // mean 98.5 -> 99
    auto doc2 = vectorize_single(gray_image(4, 3, w));
    CHECK(doc2.shapes[0].rgb[0] == 99);
}

TEST_CASE("vertical split: two shapes sharing the fence with identical text") {
    auto img = gray_image(4, 4, {10, 10, 200, 200,
                                 10, 10, 200, 200,
                                 10, 10, 200, 200,
                                 10, 10, 200, 200});
    auto doc = vectorize_flat(img);
    REQUIRE(doc.shapes.size() == 2);
    // Symmetric halves measure identically; order falls back to ascending
    // region id. Absolute values include the fitted corner bulge.
    CHECK(doc.shapes[0].outer_area ==
          doctest::Approx(doc.shapes[1].outer_area));
    CHECK(doc.shapes[0].outer_area == doctest::Approx(8.0).epsilon(0.15));
    CHECK(doc.shapes[0].region < doc.shapes[1].region);
    CHECK(doc.shapes[0].rgb[0] == 10);
    CHECK(doc.shapes[1].rgb[0] == 200);

    // Both shapes traverse the shared fence; after the one-shot
    // quantization its control points are bitwise equal on both sides
    // (one side walks it reversed).
    std::set<std::pair<double, double>> pts_a, pts_b;
    for (const auto& seg : doc.shapes[0].loops[0]) {
        pts_a.insert({seg.p0.x, seg.p0.y});
        pts_a.insert({seg.p3.x, seg.p3.y});
    }
    for (const auto& seg : doc.shapes[1].loops[0]) {
        pts_b.insert({seg.p0.x, seg.p0.y});
        pts_b.insert({seg.p3.x, seg.p3.y});
    }
    // The fence anchors (2,0) and (2,4) appear in both shapes.
    CHECK(pts_a.count({2.0, 0.0}) == 1);
    CHECK(pts_a.count({2.0, 4.0}) == 1);
    CHECK(pts_b.count({2.0, 0.0}) == 1);
    CHECK(pts_b.count({2.0, 4.0}) == 1);
}

TEST_CASE("interior island becomes a hole of the background shape") {
    std::vector<double> v(36, 10.0);
    for (int y = 2; y <= 3; ++y)
        for (int x = 2; x <= 3; ++x) v[y * 6 + x] = 220.0;
    auto img = gray_image(6, 6, v);
    auto doc = vectorize_flat(img, 0.1);

    REQUIRE(doc.shapes.size() == 2);
    // Background paints first (larger outer loop), island on top.
    const auto& bg = doc.shapes[0];
    const auto& island = doc.shapes[1];
    CHECK(bg.rgb[0] == 10);
    CHECK(island.rgb[0] == 220);
    REQUIRE(bg.loops.size() == 2);    // border + hole
    REQUIRE(island.loops.size() == 1);
    CHECK(bg.outer_area == doctest::Approx(36.0).epsilon(0.05));
    CHECK(island.outer_area == doctest::Approx(4.0).epsilon(0.25));

    // The hole ring and the island's outer ring trace the same geometry.
    std::set<std::pair<double, double>> hole_pts, island_pts;
    for (const auto& seg : bg.loops[1]) hole_pts.insert({seg.p0.x, seg.p0.y});
    for (const auto& seg : island.loops[0])
        island_pts.insert({seg.p0.x, seg.p0.y});
    CHECK(hole_pts == island_pts);
}

TEST_CASE("serialized SVG carries the document structure verbatim") {
    std::vector<double> v(36, 10.0);
    for (int y = 2; y <= 3; ++y)
        for (int x = 2; x <= 3; ++x) v[y * 6 + x] = 220.0;
    auto doc = vectorize_flat(gray_image(6, 6, v));
    auto text = render(doc);

    CHECK(text.rfind("<?xml", 0) == 0);
    CHECK(text.find("viewBox=\"0 0 6 6\"") != std::string::npos);
    CHECK(text.find("fill-rule=\"evenodd\"") != std::string::npos);
    CHECK(text.find("fill=\"#0a0a0a\"") != std::string::npos);
    CHECK(text.find("fill=\"#dcdcdc\"") != std::string::npos);
    CHECK(text.find("stroke") == std::string::npos);
    CHECK(std::count(text.begin(), text.end(), 'M') >= 3);  // 3 loops total
    CHECK(xml_well_formed(text));
}

TEST_CASE("write-read round trip preserves shapes to the export grid") {
    auto img = gray_image(4, 4, {10, 10, 200, 200,
                                 10, 10, 200, 200,
                                 10, 10, 200, 200,
                                 10, 10, 200, 200});
    auto doc = vectorize_flat(img);
    std::istringstream is(render(doc));
    auto back = read_svg(is);

    CHECK(back.width == doctest::Approx(4.0));
    CHECK(back.height == doctest::Approx(4.0));
    REQUIRE(back.shapes.size() == doc.shapes.size());
    for (size_t i = 0; i < doc.shapes.size(); ++i) {
        CHECK(back.shapes[i].rgb == doc.shapes[i].rgb);
        CHECK(back.shapes[i].region == -1);
        REQUIRE(back.shapes[i].loops.size() == doc.shapes[i].loops.size());
        for (size_t l = 0; l < doc.shapes[i].loops.size(); ++l) {
            const auto& orig = doc.shapes[i].loops[l];
            const auto& parsed = back.shapes[i].loops[l];
            REQUIRE(parsed.size() == orig.size());
            for (size_t k = 0; k < orig.size(); ++k) {
                for (auto pick : {&BezierSegment::p0, &BezierSegment::p1,
                                  &BezierSegment::p2, &BezierSegment::p3}) {
                    CHECK(std::abs((parsed[k].*pick).x - (orig[k].*pick).x) <=
                          1e-3 + 1e-12);
                    CHECK(std::abs((parsed[k].*pick).y - (orig[k].*pick).y) <=
                          1e-3 + 1e-12);
                }
            }
        }
    }
}

TEST_CASE("parser understands hand-written subset with lines and implicit moves") {
    std::string svg =
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 10 10\">\n"
        "<path d=\"M1 1 L9 1 9 9 L1 9 Z\" fill=\"#ff0080\" "
        "fill-rule=\"evenodd\"/>\n"
        "</svg>\n";
    std::istringstream is(svg);
    auto doc = read_svg(is);
    REQUIRE(doc.shapes.size() == 1);
    CHECK(doc.shapes[0].rgb == std::array<int, 3>{255, 0, 128});
    REQUIRE(doc.shapes[0].loops.size() == 1);
    const auto& loop = doc.shapes[0].loops[0];
    REQUIRE(loop.size() == 4);  // three lines + the closing edge
    CHECK(loop.front().p0 == Vec2{1, 1});
    CHECK(loop.back().p3 == Vec2{1, 1});
    // Lines become cubics with control points at the thirds.
    CHECK(loop[0].p1.x == doctest::Approx(1.0 + 8.0 / 3.0));
    CHECK(loop[0].p1.y == doctest::Approx(1.0));
}

TEST_CASE("assembly failure on a broken network names the region") {
    // One dangling open curve that cannot close into a loop.
    auto img = gray_image(4, 4, std::vector<double>(16, 10.0));
    auto p = consolidated(img);

    CurveNetwork net;
    net.width = 4;
    net.height = 4;
    net.junctions.push_back({{1, 1}, 1});
    net.junctions.push_back({{3, 3}, 1});
    PolyCurve dangle;
    dangle.kind = CurveKind::Open;
    dangle.left_region = 1;
    dangle.right_region = 0;
    dangle.j_start = 0;
    dangle.j_end = 1;
    dangle.points = {{1, 1}, {3, 3}};
    net.curves.push_back(dangle);

    auto paths = fit_all(net, 0.5);
    CHECK_THROWS_AS(assemble(p, net, paths, img), AssemblyError);
    try {
        assemble(p, net, paths, img);
    } catch (const AssemblyError& e) {
        CHECK(std::string(e.what()).find("1") != std::string::npos);
    }
}

TEST_CASE("benchmark document: region census, colors, and stable text") {
    auto img = bench_image();
    auto p = consolidated(img);
    auto net = extract_network(p);
    auto doc = assemble(p, net, fit_all(net, 0.5), img);

    REQUIRE(doc.shapes.size() == 8);
    // Paint order: strictly non-increasing outer areas.
    for (size_t i = 0; i + 1 < doc.shapes.size(); ++i) {
        CHECK(doc.shapes[i].outer_area >= doc.shapes[i + 1].outer_area - 1e-9);
    }
    // The background paints first and carries the whole domain border.
    CHECK(doc.shapes[0].rgb[0] == 0);
    CHECK(doc.shapes[0].outer_area == doctest::Approx(37.0 * 16.0).epsilon(0.01));
    // One shape per structure intensity.
    std::multiset<int> fills;
    for (const auto& s : doc.shapes) fills.insert(s.rgb[0]);
    CHECK(fills == std::multiset<int>{0, 85, 110, 131, 140, 180, 190, 255});

    // Serialization is deterministic.
    CHECK(render(doc) == render(doc));
    CHECK(xml_well_formed(render(doc)));
}
