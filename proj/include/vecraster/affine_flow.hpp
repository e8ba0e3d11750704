// Smoothing of boundary curves by the curvature-power flow (normal speed
// = cbrt(curvature)), realized as repeated constant-area chord erosions,
// plus the network-level driver with its topology guard.
#pragma once

#include <vector>

#include "vecraster/curve_net.hpp"
#include "vecraster/geometry.hpp"

namespace vecraster {

/// Flow time advanced by one erosion of chord area sigma is
/// kErosionTimeScale * sigma^(2/3); the constant comes from matching the
/// inward motion of a circle, giving 0.5 * 1.5^(2/3).
extern const double kErosionTimeScale;

struct FlowParams {
    double duration = 0.0;
    // Number of erosion passes; 0 picks max(1, ceil(duration / 0.2)).
    int erosion_steps = 0;
    double omega = 0.0;  // 0 = kErosionTimeScale
    double resample_step = 1.0;  // spacing restored between passes
};

struct ErodeResult {
    std::vector<Vec2> points;
    bool contracted = false;  // closed loop too small to survive the pass
};

/// One erosion pass: replaces the curve by the envelope of all chords
/// cutting off area sigma.  Straight and inflection vertices stay put;
/// open endpoints are preserved exactly.  Closed inputs and outputs
/// repeat the first point at the end.
ErodeResult affine_erode(const std::vector<Vec2>& points, bool closed,
                         double sigma);

struct EvolveResult {
    PolyCurve curve;
    bool contracted = false;
    double time_completed = 0.0;
};

/// Moves one curve by the flow for params.duration (endpoints fixed).
/// On contraction the curve of the last completed pass is returned.
EvolveResult evolve(const PolyCurve& curve, const FlowParams& params);

/// Largest duration with no topological event guaranteed:
/// critical_distance(net) / max_curvature^(1/3) over movable curves;
/// +infinity for straight or unobstructed networks.
double max_safe_time(const CurveNetwork& net);

struct NetworkFlowOptions {
    double resample_step = 1.0;
    // Per-chunk duration cap, strictly below 1/cbrt(2*sqrt(2)) ~ 0.7071,
    // the bound under which freshly extracted pixel networks are safe.
    double chunk_cap = 0.70;
    double chunk_floor = 0.02;  // escape hatch when the guard collapses
    double safety = 0.99;       // fraction of max_safe_time spent per chunk
    // Freeze curves whose loop would contract instead of removing them;
    // used by the cosmetic final pass, which must not change any region.
    bool keep_contracting_curves = false;
};

struct NetworkFlowReport {
    double time_done = 0.0;
    int chunks = 0;
    std::vector<int> vanished_regions;  // enclosed by contracted loops
    std::vector<int> frozen_curves;     // rolled back after a violation
};

/// Evolves every movable curve of the network for `duration`, in chunks
/// bounded by the topology guard.  After each chunk the network must
/// validate and reproduce the previous label-map adjacency (up to regions
/// that legitimately vanished); offending curves are rolled back to their
/// pre-chunk shape and frozen for the rest of the call.
NetworkFlowReport evolve_network(CurveNetwork& net, double duration,
                                 const NetworkFlowOptions& opts = {});

}  // namespace vecraster
