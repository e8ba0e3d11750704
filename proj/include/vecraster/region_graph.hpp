// Dual-graph region merging: region statistics, adjacency with shared
// boundary lengths, the lazy priority queue, and the greedy merge loops.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <queue>
#include <vector>

namespace vecraster {

/// Per-region sufficient statistics. Only means enter merge costs, so
/// (sum, sum of squares) tracking is numerically safe in double precision.
struct RegionStats {
    double area = 0.0;       // pixel count
    double perimeter = 0.0;  // boundary length in pixel-edge units
    std::array<double, 3> color_sum{0.0, 0.0, 0.0};
    std::array<double, 3> color_sq_sum{0.0, 0.0, 0.0};
    bool alive = false;
    std::uint64_t version = 0;  // bumped by every merge touching the region
};

/// Which gain functional divides the pairwise variance increase.
enum class GainKind { BG, MS, Scale, ScaleMax, Area };

/// A partition of the pixel grid into labeled regions plus the outer
/// region id 0, which participates in adjacency but never merges.
struct Partition {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<RegionStats> regions;  // index = region id, 0 = outside
    // adjacency[id] = sorted (neighbor id, shared boundary length) pairs
    std::vector<std::vector<std::pair<int, double>>> adjacency;
    std::vector<int> parent;       // union-find over region ids
    std::vector<int> pixel_labels; // label as assigned; resolve with find()
    int region_count = 0;          // live interior regions (id 0 excluded)

    int find(int id) const;
    int label_at(int x, int y) const {
        return find(pixel_labels[static_cast<std::size_t>(y) * width + x]);
    }
    double shared_len(int a, int b) const;
    /// Rewrites pixel_labels so every entry is its own root.
    void materialize_labels();
};

/// The right-hand side of the pairwise variance identity:
/// |a||b|/(|a|+|b|) * squared distance between mean colors.
double pair_variance_gain(const RegionStats& a, const RegionStats& b);

/// Gain functional value for a candidate merge.
double gain(GainKind kind, const RegionStats& a, const RegionStats& b,
            double shared_len);

/// Merging cost: pair_variance_gain / gain.
double merge_cost(GainKind kind, const RegionStats& a, const RegionStats& b,
                  double shared_len);

/// Candidate entry; (a, b) normalized to a < b, versions snapshot staleness.
struct QueueEntry {
    double cost = 0.0;
    int a = 0;
    int b = 0;
    std::uint64_t va = 0;
    std::uint64_t vb = 0;
};

struct QueueEntryGreater {
    bool operator()(const QueueEntry& x, const QueueEntry& y) const {
        if (x.cost != y.cost) return x.cost > y.cost;
        if (x.a != y.a) return x.a > y.a;
        return x.b > y.b;
    }
};

/// Min-heap over merge candidates with lazy stale deletion.
struct MergeQueue {
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueEntryGreater> heap;

    void push(const Partition& p, GainKind kind, int a, int b);
    /// Seeds entries for every live adjacent pair not involving region 0.
    void seed(const Partition& p, GainKind kind);
};

/// Pops the minimum-cost entry that is still valid; nullopt when exhausted.
std::optional<QueueEntry> pop_best(MergeQueue& q, const Partition& p);

/// Observer invoked after each merge: (survivor id, absorbed id, cost).
using MergeHook = std::function<void(int, int, double)>;

/// Merges b's stats and adjacency into survivor a (a = min id by caller
/// convention), updates the union-find and versions.
void merge(Partition& p, int a, int b);

/// Greedy dual step: up to `count` merges in nondecreasing cost order from
/// a freshly seeded queue; lambda_star tracks the running max cost.
/// Returns the number of merges performed.
long long run_merges(Partition& p, GainKind kind, long long count,
                     double& lambda_star, const MergeHook& hook = nullptr);

/// Refine step: merges the global minimum pair while its cost <= lambda_star
/// (threshold frozen). Post: every live adjacent pair costs > lambda_star.
long long refine_to_2normal(Partition& p, GainKind kind, double lambda_star,
                            const MergeHook& hook = nullptr);

/// Debug dump, one line per live adjacent pair: id_a id_b shared_len cost.
/// Pairs with region 0 print "inf" for the cost.
void dump_dual_graph(const Partition& p, GainKind kind, std::ostream& os);

}  // namespace vecraster
