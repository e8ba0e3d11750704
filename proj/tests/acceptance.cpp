// Acceptance gate: eleven numbered end-to-end checks, each printing one
// PASS/FAIL line with its measured numbers. A FAIL line is accompanied
// by the comparisons that missed, so the verdict is auditable.
#define _USE_MATH_DEFINES
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "vecraster/affine_flow.hpp"
#include "vecraster/bezier_fit.hpp"
#include "vecraster/curve_net.hpp"
#include "vecraster/fixtures.hpp"
#include "vecraster/geometry.hpp"
#include "vecraster/pipeline.hpp"
#include "vecraster/raster_eval.hpp"
#include "vecraster/raster_io.hpp"
#include "vecraster/region_graph.hpp"
#include "vecraster/svg_emit.hpp"

using namespace vecraster;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Per-criterion verdict accumulator. Every missed comparison is stored
/// as a note; the summary line plus the notes print together.
struct Gate {
    bool ok = true;
    std::vector<std::string> notes;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes.push_back(what);
        }
    }
};

void conclude(const char* id, const Gate& gate, const std::string& detail) {
    std::printf("[%s] %s  %s\n", id, gate.ok ? "PASS" : "FAIL",
                detail.c_str());
    for (const std::string& note : gate.notes) {
        std::printf("      - %s\n", note.c_str());
    }
    std::fflush(stdout);
    CHECK(gate.ok);
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

RasterImage noise_image(int w, int h, int channels, unsigned seed) {
    RasterImage img;
    img.width = w;
    img.height = h;
    img.channels = channels;
    img.data.resize(static_cast<std::size_t>(w) * h * channels);
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> dist(0, 255);
    for (double& v : img.data) v = dist(rng);
    return img;
}

/// All live adjacent interior pairs (a < b, region 0 excluded).
std::vector<std::pair<int, int>> live_pairs(const Partition& p) {
    std::vector<std::pair<int, int>> pairs;
    for (int a = 1; a < static_cast<int>(p.regions.size()); ++a) {
        if (!p.regions[static_cast<std::size_t>(a)].alive) continue;
        for (const auto& [b, len] : p.adjacency[static_cast<std::size_t>(a)]) {
            if (b > a && p.regions[static_cast<std::size_t>(b)].alive) {
                pairs.emplace_back(a, b);
            }
        }
    }
    return pairs;
}

/// A random image plus a partition coarsened by random (not greedy)
/// merges; shared by the first two criteria so they audit the same set.
struct RandomTrial {
    RasterImage img;
    Partition p;
};

RandomTrial random_trial(std::mt19937& rng) {
    std::uniform_int_distribution<int> side(2, 8);
    std::uniform_int_distribution<int> chan(0, 1);
    RandomTrial t;
    t.img = noise_image(side(rng), side(rng), chan(rng) ? 3 : 1, rng());
    t.p = initial_partition(t.img);
    const int n = t.img.width * t.img.height;
    std::uniform_int_distribution<int> merges(0, n - 2);
    int m = merges(rng);
    for (int i = 0; i < m; ++i) {
        std::vector<std::pair<int, int>> pairs = live_pairs(t.p);
        if (pairs.empty()) break;
        std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
        auto [a, b] = pairs[pick(rng)];
        merge(t.p, a, b);
    }
    t.p.materialize_labels();
    return t;
}

/// Sum over pixels and channels of the squared deviation from the mean.
double scatter_energy(const RasterImage& img,
                      const std::vector<std::pair<int, int>>& pixels) {
    if (pixels.empty()) return 0.0;
    std::array<double, 3> mean{0, 0, 0};
    for (auto [x, y] : pixels) {
        for (int c = 0; c < img.channels; ++c) {
            mean[static_cast<std::size_t>(c)] += img.at(x, y, c);
        }
    }
    for (int c = 0; c < img.channels; ++c) {
        mean[static_cast<std::size_t>(c)] /= static_cast<double>(pixels.size());
    }
    double e = 0.0;
    for (auto [x, y] : pixels) {
        for (int c = 0; c < img.channels; ++c) {
            double d = img.at(x, y, c) - mean[static_cast<std::size_t>(c)];
            e += d * d;
        }
    }
    return e;
}

std::vector<std::pair<int, int>> pixels_of_label(const Partition& p,
                                                 int label) {
    std::vector<std::pair<int, int>> px;
    for (int y = 0; y < p.height; ++y) {
        for (int x = 0; x < p.width; ++x) {
            if (p.label_at(x, y) == label) px.emplace_back(x, y);
        }
    }
    return px;
}

/// Greedy dual phase on the benchmark image down to `target` regions; no
/// smoothing, so the merge order is exactly the queue order.
Partition dual_to(const RasterImage& img, GainKind g, int target,
                  double* lambda_out = nullptr) {
    Partition p = initial_partition(img);
    double lambda = 0.0;
    run_merges(p, g, static_cast<long long>(img.width) * img.height - target,
               lambda);
    p.materialize_labels();
    if (lambda_out) *lambda_out = lambda;
    return p;
}

std::vector<Vec2> circle_ring(Vec2 c, double r, int n) {
    std::vector<Vec2> pts;
    for (int i = 0; i < n; ++i) {
        double a = 2.0 * M_PI * i / n;
        pts.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
    }
    pts.push_back(pts.front());
    return pts;
}

PolyCurve closed_curve(std::vector<Vec2> pts) {
    PolyCurve c;
    c.points = std::move(pts);
    c.kind = CurveKind::Closed;
    c.left_region = 1;
    c.right_region = 2;
    return c;
}

PolyCurve open_curve(std::vector<Vec2> pts) {
    PolyCurve c;
    c.points = std::move(pts);
    c.kind = CurveKind::Open;
    c.left_region = 1;
    c.right_region = 2;
    c.j_start = 0;
    c.j_end = 1;
    return c;
}

double mean_radius(const std::vector<Vec2>& ring) {
    Vec2 c{0, 0};
    std::size_t n = ring.size() - 1;  // closed: last repeats first
    for (std::size_t i = 0; i < n; ++i) c = c + ring[i];
    c = c / static_cast<double>(n);
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) r += dist(ring[i], c);
    return r / static_cast<double>(n);
}

/// Sorted unique (min, max) label pairs over live curves.
std::vector<std::pair<int, int>> curve_edge_set(const CurveNetwork& net) {
    std::set<std::pair<int, int>> edges;
    for (const PolyCurve& c : net.curves) {
        if (!c.alive) continue;
        edges.emplace(std::min(c.left_region, c.right_region),
                      std::max(c.left_region, c.right_region));
    }
    return {edges.begin(), edges.end()};
}

bool xml_well_formed(const std::string& text) {
    std::size_t i = 0;
    const std::size_t n = text.size();
    std::vector<std::string> stack;
    bool seen_root = false;
    while (i < n) {
        if (text[i] != '<') {
            if (text[i] == '>') return false;
            ++i;
            continue;
        }
        std::size_t j = i + 1;
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

}  // namespace

TEST_CASE("A1: pairwise variance increase vs brute-force recount") {
    Clock::time_point t0 = Clock::now();
    Gate gate;
    std::mt19937 rng(901);
    double worst = 0.0;
    int pairs_checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        RandomTrial t = random_trial(rng);
        std::vector<std::pair<int, int>> pairs = live_pairs(t.p);
        if (pairs.empty()) continue;
        std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
        auto [a, b] = pairs[pick(rng)];
        std::vector<std::pair<int, int>> pa = pixels_of_label(t.p, a);
        std::vector<std::pair<int, int>> pb = pixels_of_label(t.p, b);
        std::vector<std::pair<int, int>> pu = pa;
        pu.insert(pu.end(), pb.begin(), pb.end());
        double brute = scatter_energy(t.img, pu) - scatter_energy(t.img, pa) -
                       scatter_energy(t.img, pb);
        double got =
            pair_variance_gain(t.p.regions[static_cast<std::size_t>(a)],
                               t.p.regions[static_cast<std::size_t>(b)]);
        double scale = std::max({1.0, std::abs(brute), std::abs(got)});
        double rel = std::abs(got - brute) / scale;
        worst = std::max(worst, rel);
        ++pairs_checked;
        gate.expect(rel < 1e-10,
                    fmt("trial %d: tracked %.12g vs recount %.12g (rel %.3g)",
                        trial, got, brute, rel));
    }
    double dt = seconds_since(t0);
    gate.expect(pairs_checked >= 150, "too few adjacent pairs sampled");
    gate.expect(dt < 5.0, fmt("runtime %.2f s exceeds the 5 s budget", dt));
    conclude("A1 ", gate,
             fmt("variance-increase oracle on %d random pairs, worst rel "
                 "%.2e, %.2f s",
                 pairs_checked, worst, dt));
}

TEST_CASE("A2: area-gain cost identity on the same random set") {
    Clock::time_point t0 = Clock::now();
    Gate gate;
    std::mt19937 rng(901);  // same seed: audits the same trial set as A1
    double worst = 0.0;
    int pairs_checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        RandomTrial t = random_trial(rng);
        std::vector<std::pair<int, int>> pairs = live_pairs(t.p);
        if (pairs.empty()) continue;
        std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
        auto [a, b] = pairs[pick(rng)];
        const RegionStats& ra = t.p.regions[static_cast<std::size_t>(a)];
        const RegionStats& rb = t.p.regions[static_cast<std::size_t>(b)];
        double d2 = 0.0;
        for (int c = 0; c < t.img.channels; ++c) {
            double diff = ra.color_sum[static_cast<std::size_t>(c)] / ra.area -
                          rb.color_sum[static_cast<std::size_t>(c)] / rb.area;
            d2 += diff * diff;
        }
        double expected = std::min(ra.area, rb.area) * d2;
        double got = merge_cost(GainKind::Area, ra, rb,
                                t.p.shared_len(a, b));
        double scale = std::max({1.0, std::abs(expected), std::abs(got)});
        double rel = std::abs(got - expected) / scale;
        worst = std::max(worst, rel);
        ++pairs_checked;
        gate.expect(rel < 1e-12,
                    fmt("trial %d: cost %.15g vs min-area identity %.15g "
                        "(rel %.3g)",
                        trial, got, expected, rel));
    }
    double dt = seconds_since(t0);
    gate.expect(pairs_checked >= 150, "too few adjacent pairs sampled");
    conclude("A2 ", gate,
             fmt("smaller-area times squared mean gap identity on %d pairs, "
                 "worst rel %.2e, %.2f s",
                 pairs_checked, worst, dt));
}

TEST_CASE("A3: benchmark merge-order reproduction per gain") {
    Clock::time_point t0 = Clock::now();
    Gate gate;
    RasterImage img = bench_image();
    BenchLayout pr = bench_layout();
    auto label = [&](const Partition& p, const PixelProbe& probe) {
        return p.label_at(probe.x, probe.y);
    };

    // (a) Shared-length gain prefers the long thin spiral first.
    {
        Partition p = dual_to(img, GainKind::MS, 7);
        gate.expect(label(p, pr.spiral) == label(p, pr.background),
                    "MS at N=7: the spiral was not merged into the "
                    "background");
    }

    // (b) Area, constant, and scale gains each take the dim middle square
    // first. The scale gain actually prefers the 4-px bright square: its
    // tiny area makes the relative-perimeter term dominate, and the cost
    // comes out 125581 vs 164080 for the area-16 square. Recorded as an
    // expected miss; the greedy order itself is verified by the numbers
    // printed below.
    for (GainKind g : {GainKind::Area, GainKind::BG, GainKind::Scale}) {
        Partition p = dual_to(img, g, 7);
        const char* name = g == GainKind::Area ? "Area"
                           : g == GainKind::BG ? "BG"
                                               : "Scale";
        bool merged = label(p, pr.square16) == label(p, pr.background);
        std::string note = fmt(
            "%s at N=7: the area-16 square was not merged into the "
            "background",
            name);
        if (g == GainKind::Scale && !merged) {
            Partition q = dual_to(img, g, 8);  // consolidated structures
            int bg = label(q, pr.background);
            int s4 = label(q, pr.square4);
            int s16 = label(q, pr.square16);
            note += fmt(
                " (it merged the 4-px square instead: cost %.0f vs %.0f)",
                merge_cost(g, q.regions[static_cast<std::size_t>(bg)],
                           q.regions[static_cast<std::size_t>(s4)],
                           q.shared_len(bg, s4)),
                merge_cost(g, q.regions[static_cast<std::size_t>(bg)],
                           q.regions[static_cast<std::size_t>(s16)],
                           q.shared_len(bg, s16)));
        }
        gate.expect(merged, note);
    }

    // (c) Area down to N=5 additionally absorbs the 4-px bright square
    // and the middle strip, while the spiral survives.
    {
        Partition p = dual_to(img, GainKind::Area, 5);
        int bg = label(p, pr.background);
        gate.expect(label(p, pr.square16) == bg,
                    "Area at N=5: area-16 square not in background");
        gate.expect(label(p, pr.square4) == bg,
                    "Area at N=5: 4-px bright square not in background");
        gate.expect(label(p, pr.strip85) == bg,
                    "Area at N=5: middle strip not in background");
        gate.expect(label(p, pr.spiral) != bg,
                    "Area at N=5: the spiral should survive");
        gate.expect(label(p, pr.square25) != bg &&
                        label(p, pr.strip190) != bg &&
                        label(p, pr.strip180) != bg,
                    "Area at N=5: a structure merged that should survive");
    }

    // (d) Scale down to N=5 keeps the spiral as its own region.
    {
        Partition p = dual_to(img, GainKind::Scale, 5);
        int spiral = label(p, pr.spiral);
        gate.expect(spiral != label(p, pr.background),
                    "Scale at N=5: the spiral must remain distinct");
        for (const PixelProbe* probe :
             {&pr.square25, &pr.square16, &pr.square4, &pr.strip190,
              &pr.strip85, &pr.strip180}) {
            gate.expect(label(p, *probe) != spiral,
                        "Scale at N=5: the spiral absorbed a structure");
        }
    }

    double dt = seconds_since(t0);
    gate.expect(dt < 1.0, fmt("runtime %.2f s exceeds the 1 s budget", dt));
    conclude("A3 ", gate,
             fmt("benchmark merge order across gains, %.2f s "
                 "(known miss: scale gain takes the 4-px square before the "
                 "area-16 square)",
                 dt));
}

TEST_CASE("A4: closed-form shrink law for circles") {
    Clock::time_point t0 = Clock::now();
    Gate gate;
    double worst = 0.0;
    for (double r0 : {10.0, 50.0}) {
        for (double t : {0.25, 0.5, 1.0}) {
            PolyCurve ring = closed_curve(circle_ring({60, 60}, r0, 512));
            FlowParams fp;
            fp.duration = t;
            fp.resample_step = 0.25;
            EvolveResult ev = evolve(ring, fp);
            gate.expect(!ev.contracted,
                        fmt("r0=%g t=%g: unexpected contraction", r0, t));
            if (ev.contracted) continue;
            double expected = std::pow(
                std::pow(r0, 4.0 / 3.0) - (4.0 / 3.0) * t, 3.0 / 4.0);
            double got = mean_radius(ev.curve.points);
            double rel = std::abs(got - expected) / expected;
            worst = std::max(worst, rel);
            gate.expect(rel < 0.02,
                        fmt("r0=%g t=%g: radius %.4f vs law %.4f (%.2f%%)",
                            r0, t, got, expected, 100 * rel));
        }
    }
    double dt = seconds_since(t0);
    gate.expect(dt < 2.0, fmt("runtime %.2f s exceeds the 2 s budget", dt));
    conclude("A4 ", gate,
             fmt("radius^(4/3) decay on 512-point circles, 6 combos, worst "
                 "%.2f%%, %.2f s",
                 100 * worst, dt));
}

TEST_CASE("A5: composability and junction-release asynchrony") {
    Clock::time_point t0 = Clock::now();
    Gate gate;

    // One full step equals two half steps on a cornered closed curve.
    std::vector<Vec2> sq = {{4, 4}, {12, 4}, {12, 12}, {4, 12}, {4, 4}};
    FlowParams full;
    full.duration = 1.0;
    full.resample_step = 0.25;
    FlowParams half = full;
    half.duration = 0.5;
    EvolveResult one = evolve(closed_curve(sq), full);
    EvolveResult two_a = evolve(closed_curve(sq), half);
    EvolveResult two = evolve(two_a.curve, half);
    double d_semigroup = polyline_hausdorff(one.curve.points, true,
                                            two.curve.points, true, 0.05);
    gate.expect(d_semigroup <= 0.1,
                fmt("half+half deviates %.4f px (> 0.1) from one full step",
                    d_semigroup));

    // Pinning the interior corners for the first half, then releasing
    // them, must land visibly away from the synchronous result.
    FlowParams open_full;
    open_full.duration = 1.0;
    open_full.resample_step = 0.25;
    EvolveResult sync = evolve(open_curve(z_polyline()), open_full);

    CurveNetwork pinned = z_network();
    evolve_network(pinned, 0.5);
    for (const PolyCurve& leg : pinned.curves) {
        // Straight pinned legs must not move while the corners are held.
        double moved = polyline_hausdorff(
            leg.points, false,
            {leg.points.front(), leg.points.back()}, false, 0.05);
        gate.expect(moved < 1e-9,
                    fmt("a pinned straight leg moved %.3g px", moved));
    }
    FlowParams open_half = open_full;
    open_half.duration = 0.5;
    EvolveResult released = evolve(open_curve(z_polyline()), open_half);
    double d_async = polyline_hausdorff(sync.curve.points, false,
                                        released.curve.points, false, 0.05);
    gate.expect(d_async > 0.1,
                fmt("released-midway result is only %.4f px from the "
                    "synchronous one",
                    d_async));

    double dt = seconds_since(t0);
    conclude("A5 ", gate,
             fmt("semigroup gap %.4f px (<= 0.1), release asynchrony "
                 "%.3f px (> 0.1), %.2f s",
                 d_semigroup, d_async, dt));
}

TEST_CASE("A6: smoothing preserves network topology on random partitions") {
    Clock::time_point t0 = Clock::now();
    Gate gate;
    std::mt19937 rng(4242);
    std::uniform_int_distribution<int> side(4, 32);
    int frozen_total = 0;
    for (int trial = 0; trial < 50; ++trial) {
        RasterImage img =
            noise_image(side(rng), side(rng), 1, rng());
        Partition p = initial_partition(img);
        const int n = img.width * img.height;
        std::uniform_int_distribution<int> keep(2, std::min(12, n - 1));
        double lambda = 0.0;
        run_merges(p, GainKind::Area, n - keep(rng), lambda);
        p.materialize_labels();

        CurveNetwork net = extract_network(p);
        ValidationReport pre = validate_network(net);
        if (!pre.ok) {
            gate.expect(false, fmt("trial %d: invalid before smoothing: %s",
                                   trial, pre.message.c_str()));
            continue;
        }
        std::vector<std::pair<int, int>> edges_before = curve_edge_set(net);
        std::vector<Vec2> junctions_before;
        for (const Junction& j : net.junctions) {
            junctions_before.push_back(j.position);
        }

        NetworkFlowReport rep = evolve_network(net, 0.15);
        frozen_total += static_cast<int>(rep.frozen_curves.size());

        ValidationReport post = validate_network(net);
        gate.expect(post.ok, fmt("trial %d: invalid after smoothing: %s",
                                 trial, post.message.c_str()));
        gate.expect(rep.vanished_regions.empty(),
                    fmt("trial %d: %zu regions vanished", trial,
                        rep.vanished_regions.size()));
        gate.expect(curve_edge_set(net) == edges_before,
                    fmt("trial %d: adjacency edges changed", trial));
        bool junctions_fixed =
            net.junctions.size() == junctions_before.size();
        if (junctions_fixed) {
            for (std::size_t j = 0; j < junctions_before.size(); ++j) {
                if (!(net.junctions[j].position == junctions_before[j])) {
                    junctions_fixed = false;
                    break;
                }
            }
        }
        gate.expect(junctions_fixed, fmt("trial %d: a junction moved",
                                         trial));
    }
    double dt = seconds_since(t0);
    conclude("A6 ", gate,
             fmt("50 random partitions smoothed; edges, junctions, and "
                 "validity preserved (%d curve rollbacks), %.2f s",
                 frozen_total, dt));
}

TEST_CASE("A7: final partitions are 2-normal; area gain obeys size bounds") {
    Clock::time_point t0 = Clock::now();
    Gate gate;
    RasterImage img = noise_image(32, 32, 1, 777);
    double osc = compute_stats(img).oscillation_sq;
    int pairs_scanned = 0;
    for (GainKind g : {GainKind::BG, GainKind::MS, GainKind::Scale,
                       GainKind::ScaleMax, GainKind::Area}) {
        PipelineConfig cfg;
        cfg.gain = g;
        cfg.target_regions = 40;
        VectorizeResult res = vectorize(img, cfg);
        const Partition& p = res.partition;
        double lambda = res.trace.lambda_star;
        const char* name = g == GainKind::BG         ? "BG"
                           : g == GainKind::MS       ? "MS"
                           : g == GainKind::Scale    ? "Scale"
                           : g == GainKind::ScaleMax ? "ScaleMax"
                                                     : "Area";
        for (auto [a, b] : live_pairs(p)) {
            ++pairs_scanned;
            double cost =
                merge_cost(g, p.regions[static_cast<std::size_t>(a)],
                           p.regions[static_cast<std::size_t>(b)],
                           p.shared_len(a, b));
            gate.expect(cost > lambda,
                        fmt("%s: pair (%d,%d) costs %.6g <= threshold %.6g",
                            name, a, b, cost, lambda));
        }
        if (g == GainKind::Area) {
            double min_area = lambda / osc;
            double min_perim = 2.0 * std::sqrt(M_PI * lambda / osc);
            for (int r = 1; r < static_cast<int>(p.regions.size()); ++r) {
                const RegionStats& st =
                    p.regions[static_cast<std::size_t>(r)];
                if (!st.alive) continue;
                gate.expect(st.area >= min_area - 1e-9,
                            fmt("Area: region %d area %.3f below bound %.3f",
                                r, st.area, min_area));
                gate.expect(
                    st.perimeter >= min_perim - 1e-9,
                    fmt("Area: region %d perimeter %.3f below bound %.3f", r,
                        st.perimeter, min_perim));
            }
        }
    }
    double dt = seconds_since(t0);
    conclude("A7 ", gate,
             fmt("exhaustive post-run scans over 5 gains (%d pairs): no "
                 "mergeable pair at the final threshold; area/perimeter "
                 "floors hold, %.2f s",
                 pairs_scanned, dt));
}

TEST_CASE("A8: diagnostic arithmetic against snapshot replays") {
    Clock::time_point t0 = Clock::now();
    Gate gate;

    // Published two-decimal quotients for PSNR-per-region trades.
    double cheap = region_importance(30.49, 30.34, 107, 100);
    double costly = region_importance(30.34, 30.00, 100, 88);
    gate.expect(std::abs(cheap - 2.14e-2) < 0.005e-2,
                fmt("0.15 dB over 7 regions gave %.4e, want 2.14e-2",
                    cheap));
    gate.expect(std::abs(costly - 2.83e-2) < 0.005e-2,
                fmt("0.34 dB over 12 regions gave %.4e, want 2.83e-2",
                    costly));

    // Replay a small run step by step and recompute every sampled trace
    // row from scratch.
    RasterImage img = noise_image(12, 12, 1, 99);
    PipelineConfig cfg;
    cfg.gain = GainKind::Area;
    cfg.target_regions = 40;
    cfg.iterations = 1;
    VectorizeResult res = vectorize(img, cfg);
    const long long plan = 144 - 40;

    Partition p = initial_partition(img);
    double lambda = 0.0;
    std::vector<double> costs;
    double max_so_far = 0.0;
    int rows_checked = 0;
    for (long long i = 1; i <= plan; ++i) {
        double step_cost = -1.0;
        MergeHook hook = [&](int, int, double c) { step_cost = c; };
        long long done = run_merges(p, GainKind::Area, 1, lambda, hook);
        if (done != 1) {
            gate.expect(false, fmt("replay stalled at merge %lld", i));
            break;
        }
        costs.push_back(step_cost);
        max_so_far = std::max(max_so_far, step_cost);

        // Independent mean over all live adjacent pair costs.
        double sum = 0.0;
        long long count = 0;
        for (auto [a, b] : live_pairs(p)) {
            sum += merge_cost(GainKind::Area,
                              p.regions[static_cast<std::size_t>(a)],
                              p.regions[static_cast<std::size_t>(b)],
                              p.shared_len(a, b));
            ++count;
        }
        double mean = count == 0 ? 0.0 : sum / static_cast<double>(count);

        const TraceRow* row = nullptr;
        for (const TraceRow& r : res.trace.rows) {
            if (r.index == i) row = &r;
        }
        if (!row) continue;  // not a sampled index
        ++rows_checked;
        gate.expect(row->delta_e == step_cost,
                    fmt("merge %lld: recorded cost %.12g, replay %.12g", i,
                        row->delta_e, step_cost));
        double mean_rel = std::abs(row->mean_cost - mean) /
                          std::max(1.0, std::abs(mean));
        gate.expect(mean_rel < 1e-9,
                    fmt("merge %lld: recorded mean %.12g, replay %.12g", i,
                        row->mean_cost, mean));
        double want_p = mean == 0.0
                            ? std::numeric_limits<double>::infinity()
                            : max_so_far / mean;
        double got_p = merging_potential(res.trace, i);
        bool same = std::isinf(want_p)
                        ? std::isinf(got_p)
                        : std::abs(got_p - want_p) /
                                  std::max(1.0, std::abs(want_p)) <
                              1e-9;
        gate.expect(same, fmt("merge %lld: potential %.12g, replay %.12g",
                              i, got_p, want_p));
    }
    gate.expect(rows_checked == plan,
                fmt("expected %lld sampled rows, replayed %d", plan,
                    rows_checked));
    // Rows past the planned batch come from the cleanup pass and must
    // stay at or below the frozen threshold.
    for (const TraceRow& r : res.trace.rows) {
        if (r.index > plan) {
            gate.expect(r.delta_e <= res.trace.lambda_star + 1e-12,
                        fmt("cleanup merge %lld exceeds the threshold",
                            r.index));
        }
    }

    double dt = seconds_since(t0);
    conclude("A8 ", gate,
             fmt("importance quotients match to 3 significant figures; %d "
                 "trace rows replayed exactly, %.2f s",
                 rows_checked, dt));
}

TEST_CASE("A9: fidelity rises with the region budget on the gradient") {
    Clock::time_point t0 = Clock::now();
    Gate gate;
    RasterImage img = gradient_image(64, 64);
    std::vector<int> targets = {25, 50, 100, 200};
    std::vector<double> psnrs;
    std::vector<int> counts;
    for (int n : targets) {
        PipelineConfig cfg;
        cfg.gain = GainKind::Area;
        cfg.target_regions = n;
        VectorizeResult res = vectorize(img, cfg);
        psnrs.push_back(evaluate(res.document, img).psnr);
        counts.push_back(res.partition.region_count);
    }
    std::string measured;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        measured += fmt("%sN*=%d: %.2f dB (%d regions)", i ? ", " : "",
                        targets[i], psnrs[i], counts[i]);
    }
    for (std::size_t i = 1; i < psnrs.size(); ++i) {
        gate.expect(
            psnrs[i] > psnrs[i - 1],
            fmt("PSNR not strictly increasing at N*=%d -> N*=%d "
                "(%.2f vs %.2f dB): the 64-column ramp saturates at 64 "
                "exactly-constant strips, so both budgets above 64 "
                "reconstruct the image perfectly and tie",
                targets[i - 1], targets[i], psnrs[i - 1], psnrs[i]));
    }
    double dt = seconds_since(t0);
    conclude("A9 ", gate, measured + fmt(", %.2f s", dt));
}

TEST_CASE("A10: a 150x150 color image vectorizes inside the time budget") {
    Gate gate;
    RasterImage img = noise_image(150, 150, 3, 1234);
    PipelineConfig cfg;  // stock settings
    Clock::time_point t0 = Clock::now();
    VectorizeResult res = vectorize(img, cfg);
    double dt = seconds_since(t0);
    gate.expect(dt < 30.0, fmt("took %.2f s, budget is 30 s", dt));
    gate.expect(res.partition.region_count <= 100,
                fmt("finished with %d regions, want <= 100",
                    res.partition.region_count));
    conclude("A10", gate,
             fmt("150x150x3 with stock settings in %.2f s (< 30 s), %d "
                 "regions, %zu shapes",
                 dt, res.partition.region_count,
                 res.document.shapes.size()));
}

TEST_CASE("A11: every emitted document is well-formed, gapless, and tight") {
    Clock::time_point t0 = Clock::now();
    Gate gate;

    struct Job {
        const char* name;
        RasterImage img;
        GainKind gain;
        int targets;
        double tau;
    };
    std::vector<Job> jobs;
    jobs.push_back({"bench-area", bench_image(), GainKind::Area, 8, 0.5});
    jobs.push_back({"bench-ms", bench_image(), GainKind::MS, 7, 0.5});
    jobs.push_back({"gradient", gradient_image(64, 64), GainKind::Area, 50,
                    0.5});
    jobs.push_back({"noise-rgb", noise_image(24, 24, 3, 55), GainKind::Area,
                    30, 0.25});
    jobs.push_back({"noise-gray", noise_image(16, 16, 1, 56),
                    GainKind::ScaleMax, 10, 1.0});
    {
        RasterImage flat;
        flat.width = 8;
        flat.height = 8;
        flat.channels = 1;
        flat.data.assign(64, 99.0);
        jobs.push_back({"constant", flat, GainKind::MS, 1, 0.5});
    }

    int docs = 0;
    double worst_err = 0.0;
    for (const Job& job : jobs) {
        PipelineConfig cfg;
        cfg.gain = job.gain;
        cfg.target_regions = job.targets;
        cfg.tau = job.tau;
        VectorizeResult res = vectorize(job.img, cfg);
        ++docs;

        std::ostringstream os;
        write_svg(res.document, os);
        gate.expect(xml_well_formed(os.str()),
                    fmt("%s: serialized SVG is not well-formed XML",
                        job.name));

        long long unfilled = 0;
        rasterize(res.document, 2, &unfilled);
        gate.expect(unfilled == 0,
                    fmt("%s: %lld uncovered subsamples", job.name,
                        unfilled));

        for (const BezierPath& path : res.paths) {
            const PolyCurve& src = res.network.curves[static_cast<
                std::size_t>(path.source_curve)];
            double err = path_error(path, src, 0.0125);  // 10x oversampling
            worst_err = std::max(worst_err, err / job.tau);
            gate.expect(err <= job.tau + 1e-9,
                        fmt("%s: curve %d fit error %.4f exceeds tau %.2f",
                            job.name, path.source_curve, err, job.tau));
        }
    }
    double dt = seconds_since(t0);
    conclude("A11", gate,
             fmt("%d documents: XML valid, 0 unfilled subsamples, worst "
                 "fit error %.0f%% of tau at 10x oversampling, %.2f s",
                 docs, 100 * worst_err, dt));
}
