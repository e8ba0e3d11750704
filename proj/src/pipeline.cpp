#include "vecraster/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <ostream>
#include <set>
#include <stdexcept>

#include "vecraster/affine_flow.hpp"
#include "vecraster/errors.hpp"

namespace vecraster {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0)
        .count();
}

/// Mean merge cost over all live adjacent pairs (region 0 excluded);
/// 0 when no pair exists.
double mean_pair_cost(const Partition& p, GainKind kind) {
    double sum = 0.0;
    long long count = 0;
    for (int a = 1; a < static_cast<int>(p.regions.size()); ++a) {
        if (!p.regions[static_cast<std::size_t>(a)].alive) continue;
        for (const auto& [b, len] : p.adjacency[static_cast<std::size_t>(a)]) {
            if (b <= a) continue;
            if (!p.regions[static_cast<std::size_t>(b)].alive) continue;
            sum += merge_cost(kind, p.regions[static_cast<std::size_t>(a)],
                              p.regions[static_cast<std::size_t>(b)], len);
            ++count;
        }
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

struct TraceRecorder {
    MergeTrace* trace = nullptr;
    const Partition* partition = nullptr;
    GainKind gain = GainKind::Area;
    long long stride = 1;
    long long index = 0;
    double max_delta = -std::numeric_limits<double>::infinity();
    const double* lambda = nullptr;

    void observe(double cost) {
        ++index;
        max_delta = std::max(max_delta, cost);
        if (index != 1 && index % stride != 0) return;
        TraceRow row;
        row.index = index;
        row.delta_e = cost;
        row.lambda_so_far = *lambda;
        row.max_delta_so_far = max_delta;
        row.mean_cost = mean_pair_cost(*partition, gain);
        if (row.mean_cost == 0.0) {
            row.potential_flagged = true;
            row.potential = std::numeric_limits<double>::infinity();
        } else {
            row.potential = max_delta / row.mean_cost;
        }
        trace->rows.push_back(row);
    }
};

/// Regions referenced by live curves but absent from the label map get
/// absorbed on the network until the two agree.
void absorb_vanished_regions(CurveNetwork& net, int w, int h) {
    for (int guard = 0; guard < 1024; ++guard) {
        std::vector<int> labels = rasterize_label_map(net, w, h);
        std::set<int> present(labels.begin(), labels.end());
        std::set<int> vanished;
        for (const PolyCurve& c : net.curves) {
            if (!c.alive) continue;
            for (int r : {c.left_region, c.right_region}) {
                if (r != 0 && !present.count(r)) vanished.insert(r);
            }
        }
        if (vanished.empty()) return;
        NetworkEditor editor(net);
        for (int r : vanished) editor.absorb_vanished(r);
    }
    throw AssemblyError("vanished-region absorption did not converge");
}

void format_double(std::ostream& os, double v) {
    if (std::isinf(v)) {
        os << (v > 0 ? "inf" : "-inf");
        return;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    os << buf;
}

}  // namespace

double label_map_psnr(const Partition& p, const RasterImage& img) {
    double se = 0.0;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const RegionStats& st =
                p.regions[static_cast<std::size_t>(p.label_at(x, y))];
            for (int c = 0; c < img.channels; ++c) {
                double mean =
                    st.color_sum[static_cast<std::size_t>(c)] / st.area;
                double d = img.at(x, y, c) - mean;
                se += d * d;
            }
        }
    }
    if (se == 0.0) return std::numeric_limits<double>::infinity();
    double n = static_cast<double>(img.width) * img.height * img.channels;
    return 10.0 * std::log10(255.0 * 255.0 / (se / n));
}

double region_importance(double psnr_before, double psnr_after, int n_before,
                         int n_after) {
    if (n_before == n_after) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return (psnr_before - psnr_after) / (n_before - n_after);
}

double merging_potential(const MergeTrace& trace, long long i) {
    for (const TraceRow& row : trace.rows) {
        if (row.index == i) {
            return row.potential_flagged
                       ? std::numeric_limits<double>::infinity()
                       : row.max_delta_so_far / row.mean_cost;
        }
    }
    throw std::out_of_range("merge index was not sampled in the trace");
}

VectorizeResult vectorize(const RasterImage& img, const PipelineConfig& cfg) {
    const long long n_pixels =
        static_cast<long long>(img.width) * img.height;
    if (cfg.target_regions < 1) {
        throw ConfigError("target region count must be at least 1");
    }
    if (cfg.target_regions >= n_pixels) {
        throw ConfigError("target region count must be below the pixel count");
    }
    if (!(cfg.smooth_time > 0.0)) {
        throw ConfigError("smoothing time must be positive");
    }
    if (!(cfg.tau > 0.0)) {
        throw ConfigError("fitting tolerance must be positive");
    }
    if (cfg.iterations < 1 ||
        static_cast<long long>(cfg.iterations) >
            n_pixels - cfg.target_regions) {
        throw ConfigError("round count must lie in [1, pixels - targets]");
    }

    const RasterImage* input = &img;
    RasterImage filtered;
    if (cfg.prefilter) {
        filtered = box_prefilter(img);
        input = &filtered;
    }
    const RasterImage& src = *input;
    const int w = src.width;
    const int h = src.height;

    VectorizeResult result;
    MergeTrace& trace = result.trace;
    Partition p = initial_partition(src);

    const long long plan = n_pixels - cfg.target_regions;
    const long long batch_quota =
        (plan + cfg.iterations - 1) / cfg.iterations;
    double lambda_star = 0.0;

    TraceRecorder recorder;
    recorder.trace = &trace;
    recorder.partition = &p;
    recorder.gain = cfg.gain;
    recorder.stride = std::max<long long>(1, (plan + 999) / 1000);
    recorder.lambda = &lambda_star;

    CurveNetwork net;
    bool have_net = false;
    NetworkEditor* editor = nullptr;
    std::unique_ptr<NetworkEditor> editor_storage;

    MergeHook hook = [&](int survivor, int absorbed, double cost) {
        if (editor) editor->merge_regions(survivor, absorbed);
        recorder.observe(cost);
    };

    long long remaining = plan;
    for (int k = 1; k <= cfg.iterations; ++k) {
        Clock::time_point t0 = Clock::now();
        long long batch = std::min(batch_quota, remaining);
        if (batch > 0) {
            if (have_net) {
                editor_storage = std::make_unique<NetworkEditor>(net);
                editor = editor_storage.get();
            }
            long long done = run_merges(p, cfg.gain, batch, lambda_star, hook);
            remaining -= done;
            editor = nullptr;
            editor_storage.reset();
        }
        trace.stages.push_back({"dual", k, p.region_count, lambda_star,
                                label_map_psnr(p, src), ms_since(t0)});

        t0 = Clock::now();
        if (!have_net) {
            p.materialize_labels();
            net = extract_network(p);
            have_net = true;
        }
        evolve_network(net, cfg.smooth_time / cfg.iterations);
        absorb_vanished_regions(net, w, h);
        p = rasterize_labels(net, src);
        recorder.partition = &p;
        trace.stages.push_back({"primal", k, p.region_count, lambda_star,
                                label_map_psnr(p, src), ms_since(t0)});
    }

    {
        Clock::time_point t0 = Clock::now();
        editor_storage = std::make_unique<NetworkEditor>(net);
        editor = editor_storage.get();
        refine_to_2normal(p, cfg.gain, lambda_star, hook);
        editor = nullptr;
        editor_storage.reset();
        p.materialize_labels();
        trace.stages.push_back({"refine", 0, p.region_count, lambda_star,
                                label_map_psnr(p, src), ms_since(t0)});
    }

    {
        // Cosmetic smoothing of the final geometry; the partition (labels,
        // statistics, colors) stays frozen, so contraction is disabled.
        Clock::time_point t0 = Clock::now();
        NetworkFlowOptions opts;
        opts.keep_contracting_curves = true;
        evolve_network(net, 0.01, opts);
        trace.stages.push_back({"final", 0, p.region_count, lambda_star,
                                label_map_psnr(p, src), ms_since(t0)});
    }

    {
        Clock::time_point t0 = Clock::now();
        for (int ci = 0; ci < static_cast<int>(net.curves.size()); ++ci) {
            const PolyCurve& c = net.curves[static_cast<std::size_t>(ci)];
            if (!c.alive) continue;
            // Curves pinned to the domain border are rectilinear and have
            // nothing painted on their outer side, so any inward rounding
            // of a canvas corner would leave pixels uncovered. Fit them
            // exactly; the smoothing tolerance applies to interior curves,
            // whose two sides share the path and stay complementary.
            double tau = is_movable(c) ? cfg.tau : std::min(cfg.tau, 1e-9);
            result.paths.push_back(fit_path(c, tau, ci));
        }
        trace.stages.push_back({"fit", 0, p.region_count, lambda_star,
                                label_map_psnr(p, src), ms_since(t0)});
    }

    result.document = assemble(p, net, result.paths, src);
    trace.merges_total = recorder.index;
    trace.lambda_star = lambda_star;
    result.partition = std::move(p);
    result.network = std::move(net);
    return result;
}

void write_metrics_csv(const MergeTrace& trace, std::ostream& os) {
    os << "stage,k,region_count,lambda_star,psnr,wall_ms\n";
    char buf[64];
    for (const StageRow& row : trace.stages) {
        os << row.stage << ',' << row.k << ',' << row.region_count << ',';
        format_double(os, row.lambda_star);
        os << ',';
        format_double(os, row.psnr);
        os << ',';
        std::snprintf(buf, sizeof(buf), "%.3f", row.wall_ms);
        os << buf << '\n';
    }
}

void write_trace_csv(const MergeTrace& trace, std::ostream& os) {
    os << "i,delta_E,lambda_so_far,M_i,P_i\n";
    for (const TraceRow& row : trace.rows) {
        os << row.index << ',';
        format_double(os, row.delta_e);
        os << ',';
        format_double(os, row.lambda_so_far);
        os << ',';
        format_double(os, row.mean_cost);
        os << ',';
        format_double(os, row.potential);
        os << '\n';
    }
}

}  // namespace vecraster
