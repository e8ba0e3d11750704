// Checks the erosion-to-flow time constant against the analytic circle
// shrinking law r^(4/3) = r0^(4/3) - (4/3) t and reports the constant the
// measurement implies. Exits 0 when the relative difference is below the
// tolerance.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <vector>

#include "vecraster/affine_flow.hpp"
#include "vecraster/curve_net.hpp"
#include "vecraster/geometry.hpp"

using namespace vecraster;

int main(int argc, char** argv) {
    CLI::App app{"erosion time-constant calibration against a circle"};
    double r0 = 100.0;
    double duration = 1.0;
    int points = 4096;
    double tol = 0.005;
    app.add_option("--r0", r0, "initial radius (default 100)")
        ->check(CLI::PositiveNumber);
    app.add_option("--time", duration, "flow duration (default 1.0)")
        ->check(CLI::PositiveNumber);
    app.add_option("--points", points, "circle vertex count (default 4096)")
        ->check(CLI::Range(16, 1 << 20));
    app.add_option("--tol", tol, "relative tolerance (default 0.005)")
        ->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    PolyCurve circle;
    circle.kind = CurveKind::Closed;
    circle.left_region = 1;
    circle.right_region = 2;
    const double center = r0 + 4.0;
    for (int i = 0; i <= points; ++i) {
        double a = 2.0 * M_PI * i / points;
        circle.points.push_back(
            {center + r0 * std::cos(a), center + r0 * std::sin(a)});
    }
    circle.points.back() = circle.points.front();

    FlowParams fp;
    fp.duration = duration;
    fp.resample_step = 0.25;
    EvolveResult res = evolve(circle, fp);
    if (res.contracted) {
        std::fprintf(stderr, "circle contracted; duration too large\n");
        return 1;
    }

    std::vector<Vec2> ring = res.curve.points;
    if (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
    Vec2 c = polygon_centroid(ring);
    double r_out = 0.0;
    for (const Vec2& p : ring) r_out += dist(p, c);
    r_out /= static_cast<double>(ring.size());

    const double measured_time =
        0.75 * (std::pow(r0, 4.0 / 3.0) - std::pow(r_out, 4.0 / 3.0));
    const double implied = kErosionTimeScale * measured_time / duration;
    const double rel =
        std::fabs(implied - kErosionTimeScale) / kErosionTimeScale;

    std::printf("assumed_constant,%.9f\n", kErosionTimeScale);
    std::printf("r_out,%.6f\n", r_out);
    std::printf("measured_time,%.9f\n", measured_time);
    std::printf("implied_constant,%.9f\n", implied);
    std::printf("relative_difference,%.6f\n", rel);
    return rel < tol ? 0 : 1;
}
