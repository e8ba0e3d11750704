#include "vecraster/fixtures.hpp"

#include <cassert>
#include <cmath>

namespace vecraster {

RasterImage bench_image() {
    RasterImage img;
    img.width = 37;
    img.height = 16;
    img.channels = 1;
    img.data.assign(static_cast<std::size_t>(37) * 16, 0.0);
    auto paint = [&](int x, int y, double v) {
        assert(x >= 0 && x < img.width && y >= 0 && y < img.height);
        img.at(x, y, 0) = v;
    };

    // Square spiral: a turtle from (9, 7) walking E, S, W, N with arm
    // lengths 1,1,3,3,...,15 and 7 cells of the final arm; 121 cells.
    {
        static const int arms[] = {1, 1, 3, 3, 5, 5, 7, 7,
                                   9, 9, 11, 11, 13, 13, 15, 7};
        static const int dx[] = {1, 0, -1, 0};
        static const int dy[] = {0, 1, 0, -1};
        int x = 9;
        int y = 7;
        paint(x, y, 131.0);
        for (int i = 0; i < 16; ++i) {
            for (int step = 0; step < arms[i]; ++step) {
                x += dx[i % 4];
                y += dy[i % 4];
                paint(x, y, 131.0);
            }
        }
    }

    for (int y = 1; y <= 5; ++y)
        for (int x = 18; x <= 22; ++x) paint(x, y, 140.0);
    for (int y = 7; y <= 10; ++y)
        for (int x = 18; x <= 21; ++x) paint(x, y, 110.0);
    for (int y = 12; y <= 13; ++y)
        for (int x = 18; x <= 19; ++x) paint(x, y, 255.0);

    for (int y = 1; y <= 3; ++y)
        for (int x = 25; x <= 35; ++x) paint(x, y, 190.0);
    for (int y = 4; y <= 7; ++y)
        for (int x = 25; x <= 35; ++x) paint(x, y, 85.0);
    for (int y = 8; y <= 11; ++y)
        for (int x = 25; x <= 35; ++x) paint(x, y, 180.0);

    return img;
}

BenchLayout bench_layout() {
    BenchLayout lay;
    lay.background = {0, 0};
    lay.spiral = {9, 7};
    lay.square25 = {18, 1};
    lay.square16 = {18, 7};
    lay.square4 = {18, 12};
    lay.strip190 = {25, 1};
    lay.strip85 = {25, 4};
    lay.strip180 = {25, 8};
    return lay;
}

RasterImage gradient_image(int w, int h) {
    assert(w >= 2 && h >= 1);
    RasterImage img;
    img.width = w;
    img.height = h;
    img.channels = 1;
    img.data.resize(static_cast<std::size_t>(w) * h);
    for (int x = 0; x < w; ++x) {
        double v = std::round(static_cast<double>(x) * 255.0 / (w - 1));
        for (int y = 0; y < h; ++y) img.at(x, y, 0) = v;
    }
    return img;
}

namespace {
const Vec2 kZ1{0.0, 0.0};
const Vec2 kZ2{3.0, 6.0};
const Vec2 kZ3{1.0, 6.0};
const Vec2 kZ4{2.0, 0.0};
}  // namespace

std::vector<Vec2> z_polyline() { return {kZ1, kZ3, kZ4, kZ2}; }

CurveNetwork z_network() {
    CurveNetwork net;
    net.width = 3.0;
    net.height = 6.0;
    net.junctions.resize(4);
    net.junctions[0] = {kZ1, 1};
    net.junctions[1] = {kZ2, 1};
    net.junctions[2] = {kZ3, 2};
    net.junctions[3] = {kZ4, 2};

    auto leg = [](Vec2 a, Vec2 b, int ja, int jb) {
        PolyCurve c;
        c.points = {a, b};
        c.kind = CurveKind::Open;
        c.left_region = 1;
        c.right_region = 2;
        c.j_start = ja;
        c.j_end = jb;
        return c;
    };
    net.curves.push_back(leg(kZ1, kZ3, 0, 2));
    net.curves.push_back(leg(kZ3, kZ4, 2, 3));
    net.curves.push_back(leg(kZ4, kZ2, 3, 1));
    return net;
}

}  // namespace vecraster
