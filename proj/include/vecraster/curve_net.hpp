// The primal structure: junction points and the network of boundary
// polycurves separating regions, plus extraction from a label map,
// validation, re-rasterization, and in-place editing during merges.
#pragma once

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vecraster/geometry.hpp"
#include "vecraster/raster_io.hpp"
#include "vecraster/region_graph.hpp"

namespace vecraster {

struct Junction {
    Vec2 position;   // grid corner; held fixed by the flow
    int degree = 0;  // number of incident live curve endpoints
};

enum class CurveKind { Closed, Open };

/// Boundary polycurve. Closed curves repeat the first point at the end;
/// Open curves run junction-to-junction (or along the domain border).
struct PolyCurve {
    std::vector<Vec2> points;
    CurveKind kind = CurveKind::Open;
    int left_region = 0;   // region id on the left of travel direction
    int right_region = 0;  // (y grows downward: left of +x travel is -y side)
    int j_start = -1;      // junction indices; -1 for Closed curves
    int j_end = -1;
    bool alive = true;
};

/// True when the flow may move the curve (not coincident with the domain
/// border, i.e. neither side is the outer region 0).
inline bool is_movable(const PolyCurve& c) {
    return c.alive && c.left_region != 0 && c.right_region != 0;
}

struct CurveNetwork {
    double width = 0.0;  // domain box [0, width] x [0, height]
    double height = 0.0;
    std::vector<Junction> junctions;
    std::vector<PolyCurve> curves;
};

/// Traces the boundary-curve network of a partition's label map.
/// Junctions are grid corners where >= 3 distinct labels meet among the 4
/// incident pixels (outside counts as label 0), plus checkerboard corners
/// (equal diagonal pairs of two labels) which become degree-4 junctions.
CurveNetwork extract_network(const Partition& p);

struct ValidationReport {
    bool ok = true;
    std::string message;
    std::vector<int> offending_curves;  // ids implicated in the violation
};

/// Structural checks: simple curves, pairwise contact only at shared
/// junction endpoints, open endpoints anchored at junctions or the domain
/// border, movable curves strictly interior except at endpoints, distinct
/// left/right labels, closed curves explicitly closed with nonzero area.
ValidationReport validate_network(const CurveNetwork& net);

/// Assigns every pixel center the label of the face containing it and
/// rebuilds a Partition with statistics recomputed from `img`.
/// A pixel center lying exactly on a curve takes that curve's left label.
Partition rasterize_labels(const CurveNetwork& net, const RasterImage& img);

/// Label map only (no statistics); shared core of rasterize_labels.
std::vector<int> rasterize_label_map(const CurveNetwork& net, int w, int h);

/// Sorted unique adjacent label pairs (a < b, outer region 0 included)
/// of a label map under 4-connectivity plus the domain border.
std::vector<std::pair<int, int>> label_adjacency_pairs(
    const std::vector<int>& labels, int w, int h);

/// Critical distance: minimum over movable curves C of the distance from
/// any junction or closed-curve contraction point (area centroid) lying
/// inside conv(C) to C, excluding C's own endpoints; +infinity when no
/// candidate point falls inside any hull.
double critical_distance(const CurveNetwork& net);

/// JSON debug dump: junctions, curves with label pairs and point arrays.
void dump_network(const CurveNetwork& net, std::ostream& os);

/// In-place network surgery mirroring dual-step merges: dissolves curves,
/// relabels sides, and splices out junctions whose degree drops to 2.
class NetworkEditor {
  public:
    explicit NetworkEditor(CurveNetwork& net);

    /// Mirrors merging region `gone` into `kept` on the network.
    void merge_regions(int kept, int gone);

    /// Removes a region whose pixel mask became empty by merging it (on
    /// the network only) into its longest-boundary neighbor.
    void absorb_vanished(int region);

    /// Deletes a contracted closed curve; returns the enclosed region id.
    int remove_contracted_curve(int curve_id);

  private:
    void dissolve_curve(int curve_id, std::vector<int>& touched_junctions);
    void release_junction(int j);
    void reverse_curve(int curve_id);
    void drop_incidence(int j, int curve_id, int end);

    CurveNetwork& net_;
    // junction -> (curve id, end: 0 = starts there, 1 = ends there)
    std::vector<std::vector<std::pair<int, int>>> incidence_;
    // region -> curve ids touching it (may contain stale entries; filtered
    // against left/right on read)
    std::unordered_map<int, std::vector<int>> region_curves_;
};

}  // namespace vecraster
