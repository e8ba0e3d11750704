// Command-line front end: vectorize, eval, sweep, fixture.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "vecraster/errors.hpp"
#include "vecraster/fixtures.hpp"
#include "vecraster/pipeline.hpp"
#include "vecraster/raster_eval.hpp"
#include "vecraster/raster_io.hpp"
#include "vecraster/svg_emit.hpp"

namespace {

using namespace vecraster;

const std::map<std::string, GainKind> kGainNames{
    {"area", GainKind::Area},
    {"bg", GainKind::BG},
    {"scale", GainKind::Scale},
    {"scale-max", GainKind::ScaleMax},
    {"ms", GainKind::MS},
};

struct VectorizeArgs {
    std::string in;
    std::string out;
    GainKind gain = GainKind::Area;
    int regions = 100;
    double smooth = 1.0;
    double tau = 0.5;
    int iters = 3;
    bool prefilter = false;
    std::string metrics;
    std::string trace;
    int threads = 1;
};

PipelineConfig to_config(const VectorizeArgs& a) {
    PipelineConfig cfg;
    cfg.gain = a.gain;
    cfg.target_regions = a.regions;
    cfg.smooth_time = a.smooth;
    cfg.tau = a.tau;
    cfg.iterations = a.iters;
    cfg.prefilter = a.prefilter;
    return cfg;
}

void add_shared_options(CLI::App* cmd, VectorizeArgs& a) {
    cmd->add_option("--gain", a.gain,
                    "merging gain: area|bg|scale|scale-max|ms (default area)")
        ->transform(CLI::CheckedTransformer(kGainNames, CLI::ignore_case));
    cmd->add_option("--smooth", a.smooth,
                    "total smoothing duration T (default 1.0)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tau", a.tau,
                    "curve fitting tolerance in pixels (default 0.5)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--iters", a.iters,
                    "merge/smooth rounds (default 3)")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--prefilter", a.prefilter,
                  "apply a 3x3 box prefilter before vectorizing (default off)");
    cmd->add_option("--threads", a.threads,
                    "worker cap; the current implementation is single-"
                    "threaded and accepts this for interface stability")
        ->envname("VECRASTER_THREADS")
        ->check(CLI::PositiveNumber);
}

int run_vectorize(const VectorizeArgs& a) {
    RasterImage img = load_image(a.in);
    VectorizeResult res = vectorize(img, to_config(a));
    write_svg_file(res.document, a.out);
    if (!a.metrics.empty()) {
        std::ofstream os(a.metrics, std::ios::binary);
        if (!os) throw IoError("cannot open for writing: " + a.metrics);
        write_metrics_csv(res.trace, os);
    }
    if (!a.trace.empty()) {
        std::ofstream os(a.trace, std::ios::binary);
        if (!os) throw IoError("cannot open for writing: " + a.trace);
        write_trace_csv(res.trace, os);
    }
    return 0;
}

int run_eval(const std::string& svg_path, const std::string& ref_path,
             const std::string& report_path) {
    VectorDocument doc = read_svg_file(svg_path);
    RasterImage ref = load_image(ref_path);
    EvalReport rep = evaluate(doc, ref);
    if (report_path.empty()) {
        write_report_csv(rep, std::cout);
    } else {
        std::ofstream os(report_path, std::ios::binary);
        if (!os) throw IoError("cannot open for writing: " + report_path);
        write_report_csv(rep, os);
    }
    return 0;
}

int run_sweep(VectorizeArgs a, const std::vector<int>& regions,
              const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    RasterImage img = load_image(a.in);
    std::ofstream csv(fs::path(out_dir) / "sweep.csv", std::ios::binary);
    if (!csv) throw IoError("cannot open sweep.csv in " + out_dir);
    csv << "n,psnr\n";
    for (int n : regions) {
        a.regions = n;
        VectorizeResult res = vectorize(img, to_config(a));
        fs::path svg = fs::path(out_dir) / ("n" + std::to_string(n) + ".svg");
        write_svg_file(res.document, svg.string());
        EvalReport rep = evaluate(res.document, img);
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6f", rep.psnr);
        csv << n << ',' << buf << '\n';
    }
    return 0;
}

int run_fixture(const std::string& name, std::string out, int width,
                int height) {
    if (name == "fig3" || name == "bench") {
        if (out.empty()) out = name + ".pgm";
        save_ppm(bench_image(), out);
    } else if (name == "gradient") {
        if (out.empty()) out = "gradient.pgm";
        save_ppm(gradient_image(width, height), out);
    } else if (name == "zcurve") {
        if (out.empty()) out = "zcurve.json";
        std::ofstream os(out, std::ios::binary);
        if (!os) throw IoError("cannot open for writing: " + out);
        dump_network(z_network(), os);
    } else {
        throw ConfigError("unknown fixture: " + name +
                          " (expected fig3|bench|gradient|zcurve)");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vecraster: piecewise-constant image vectorization"};
    app.require_subcommand(1);

    VectorizeArgs va;
    CLI::App* vec = app.add_subcommand(
        "vectorize", "convert a raster image into a filled-path SVG");
    vec->add_option("--in", va.in, "input image (png/pgm/ppm)")->required();
    vec->add_option("--out", va.out, "output SVG path")->required();
    vec->add_option("--regions", va.regions,
                    "target region count before the refine pass "
                    "(default 100)")
        ->check(CLI::PositiveNumber);
    add_shared_options(vec, va);
    vec->add_option("--metrics", va.metrics,
                    "write per-stage metrics CSV to this path");
    vec->add_option("--trace", va.trace,
                    "write sampled per-merge trace CSV to this path");

    std::string eval_svg, eval_ref, eval_report;
    CLI::App* ev = app.add_subcommand(
        "eval", "rasterize an SVG and compare against a reference image");
    ev->add_option("--svg", eval_svg, "SVG produced by vectorize")->required();
    ev->add_option("--ref", eval_ref, "reference raster image")->required();
    ev->add_option("--report", eval_report,
                   "report CSV path (default: stdout)");

    VectorizeArgs sa;
    std::vector<int> sweep_regions{25, 50, 100, 200};
    std::string sweep_out;
    CLI::App* sw = app.add_subcommand(
        "sweep", "vectorize at several region targets and tabulate PSNR");
    sw->add_option("--in", sa.in, "input image (png/pgm/ppm)")->required();
    sw->add_option("--regions", sweep_regions,
                   "comma-separated region targets (default 25,50,100,200)")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    sw->add_option("--out", sweep_out, "output directory")->required();
    add_shared_options(sw, sa);

    std::string fx_name, fx_out;
    int fx_w = 64, fx_h = 64;
    CLI::App* fx = app.add_subcommand(
        "fixture", "write a built-in test image or curve network");
    fx->add_option("--name", fx_name, "fig3|bench|gradient|zcurve")
        ->required();
    fx->add_option("--out", fx_out,
                   "output path (default: <name>.pgm / zcurve.json)");
    fx->add_option("--width", fx_w, "gradient width (default 64)")
        ->check(CLI::Range(2, 16384));
    fx->add_option("--height", fx_h, "gradient height (default 64)")
        ->check(CLI::Range(1, 16384));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (vec->parsed()) return run_vectorize(va);
        if (ev->parsed()) return run_eval(eval_svg, eval_ref, eval_report);
        if (sw->parsed()) return run_sweep(sa, sweep_regions, sweep_out);
        if (fx->parsed()) return run_fixture(fx_name, fx_out, fx_w, fx_h);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
