// End-to-end orchestration: alternating dual (greedy merge) and primal
// (curve smoothing) steps, the refine pass at the frozen threshold, the
// cosmetic final smoothing, Bezier fitting, and document assembly, plus
// the diagnostic trace and stage metrics.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vecraster/bezier_fit.hpp"
#include "vecraster/curve_net.hpp"
#include "vecraster/raster_io.hpp"
#include "vecraster/region_graph.hpp"
#include "vecraster/svg_emit.hpp"

namespace vecraster {

struct PipelineConfig {
    GainKind gain = GainKind::Area;
    int target_regions = 100;  // desired region count before refine
    double smooth_time = 1.0;  // total smoothing duration, split per round
    double tau = 0.5;          // fitting tolerance in pixels
    int iterations = 3;        // dual/primal rounds
    bool prefilter = false;    // optional 3x3 box prefilter
};

/// One sampled merge record. `mean_cost` is the mean merge cost over all
/// live adjacent pairs right after this merge (full scan); `potential`
/// is max-cost-so-far / mean_cost, +infinity (flagged) when the mean is 0.
struct TraceRow {
    long long index = 0;  // 1-based merge counter, refine included
    double delta_e = 0.0;
    double lambda_so_far = 0.0;
    double max_delta_so_far = 0.0;
    double mean_cost = 0.0;
    double potential = 0.0;
    bool potential_flagged = false;
};

struct StageRow {
    std::string stage;  // dual | primal | refine | final | fit
    int k = 0;          // round number; 0 for the tail stages
    int region_count = 0;
    double lambda_star = 0.0;
    double psnr = 0.0;  // label-map mean-color reconstruction vs input
    double wall_ms = 0.0;
};

struct MergeTrace {
    std::vector<TraceRow> rows;  // sampled every ceil((N - N*)/1000) merges
    std::vector<StageRow> stages;
    long long merges_total = 0;
    double lambda_star = 0.0;
};

struct VectorizeResult {
    VectorDocument document;
    MergeTrace trace;
    Partition partition;  // frozen after the refine step
    CurveNetwork network;
    std::vector<BezierPath> paths;
};

/// Runs the full pipeline. Throws ConfigError for invalid settings.
VectorizeResult vectorize(const RasterImage& img, const PipelineConfig& cfg);

/// max-cost-so-far / mean-pair-cost at recorded merge index i; +infinity
/// when the recorded mean is zero (constant image). Throws
/// std::out_of_range when i was not a sampled index.
double merging_potential(const MergeTrace& trace, long long i);

/// (psnr_before - psnr_after) / (n_before - n_after); NaN (not
/// applicable) when the region counts are equal.
double region_importance(double psnr_before, double psnr_after,
                         int n_before, int n_after);

/// PSNR of repainting every pixel with its region's mean color.
double label_map_psnr(const Partition& p, const RasterImage& img);

/// CSV "stage,k,region_count,lambda_star,psnr,wall_ms".
void write_metrics_csv(const MergeTrace& trace, std::ostream& os);

/// CSV "i,delta_E,lambda_so_far,M_i,P_i" (P_i printed as "inf" when
/// flagged).
void write_trace_csv(const MergeTrace& trace, std::ostream& os);

}  // namespace vecraster
