#include "vecraster/region_graph.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <ostream>

namespace vecraster {

int Partition::find(int id) const {
    // Path-halving on a logically-const structure: parents only ever move
    // toward the root, so concurrent readers stay consistent.
    auto& par = const_cast<std::vector<int>&>(parent);
    while (par[id] != id) {
        par[id] = par[par[id]];
        id = par[id];
    }
    return id;
}

double Partition::shared_len(int a, int b) const {
    const auto& row = adjacency[a];
    auto it = std::lower_bound(row.begin(), row.end(), b,
                               [](const std::pair<int, double>& e, int id) {
                                   return e.first < id;
                               });
    if (it != row.end() && it->first == b) return it->second;
    return 0.0;
}

void Partition::materialize_labels() {
    for (int& l : pixel_labels) l = find(l);
}

double pair_variance_gain(const RegionStats& a, const RegionStats& b) {
    double diff2 = 0.0;
    for (int c = 0; c < 3; ++c) {
        const double ma = a.color_sum[c] / a.area;
        const double mb = b.color_sum[c] / b.area;
        diff2 += (ma - mb) * (ma - mb);
    }
    return a.area * b.area / (a.area + b.area) * diff2;
}

double gain(GainKind kind, const RegionStats& a, const RegionStats& b,
            double shared_len) {
    const double union_perimeter = a.perimeter + b.perimeter - 2.0 * shared_len;
    switch (kind) {
        case GainKind::BG:
            return 1.0;
        case GainKind::MS:
            return shared_len;
        case GainKind::Scale:
            return a.perimeter / a.area + b.perimeter / b.area -
                   union_perimeter / (a.area + b.area);
        case GainKind::ScaleMax:
            assert(union_perimeter > 0.0);
            return (a.area + b.area) / union_perimeter;
        case GainKind::Area:
            return std::max(a.area, b.area) / (a.area + b.area);
    }
    return 1.0;
}

double merge_cost(GainKind kind, const RegionStats& a, const RegionStats& b,
                  double shared_len) {
    return pair_variance_gain(a, b) / gain(kind, a, b, shared_len);
}

void MergeQueue::push(const Partition& p, GainKind kind, int a, int b) {
    if (a > b) std::swap(a, b);
    QueueEntry e;
    e.cost = merge_cost(kind, p.regions[a], p.regions[b], p.shared_len(a, b));
    e.a = a;
    e.b = b;
    e.va = p.regions[a].version;
    e.vb = p.regions[b].version;
    heap.push(e);
}

void MergeQueue::seed(const Partition& p, GainKind kind) {
    for (int a = 1; a < static_cast<int>(p.regions.size()); ++a) {
        if (!p.regions[a].alive) continue;
        for (const auto& [b, len] : p.adjacency[a]) {
            (void)len;
            if (b > a && p.regions[b].alive) push(p, kind, a, b);
        }
    }
}

std::optional<QueueEntry> pop_best(MergeQueue& q, const Partition& p) {
    while (!q.heap.empty()) {
        QueueEntry e = q.heap.top();
        q.heap.pop();
        if (!p.regions[e.a].alive || !p.regions[e.b].alive) continue;
        if (p.regions[e.a].version != e.va || p.regions[e.b].version != e.vb) {
            continue;
        }
        return e;
    }
    return std::nullopt;
}

namespace {

void adjacency_replace(std::vector<std::pair<int, double>>& row, int dead,
                       int survivor) {
    // Removes `dead` from the sorted row and folds its length into
    // `survivor`, inserting the survivor if absent.
    double moved = 0.0;
    auto it = std::lower_bound(row.begin(), row.end(), dead,
                               [](const std::pair<int, double>& e, int id) {
                                   return e.first < id;
                               });
    if (it != row.end() && it->first == dead) {
        moved = it->second;
        row.erase(it);
    }
    if (moved == 0.0) return;
    it = std::lower_bound(row.begin(), row.end(), survivor,
                          [](const std::pair<int, double>& e, int id) {
                              return e.first < id;
                          });
    if (it != row.end() && it->first == survivor) {
        it->second += moved;
    } else {
        row.insert(it, {survivor, moved});
    }
}

}  // namespace

void merge(Partition& p, int a, int b) {
    assert(a != 0 && b != 0 && a != b);
    assert(p.regions[a].alive && p.regions[b].alive);
    if (a > b) std::swap(a, b);  // survivor = smaller id

    RegionStats& ra = p.regions[a];
    RegionStats& rb = p.regions[b];
    const double shared = p.shared_len(a, b);
    assert(shared > 0.0);

    ra.perimeter = ra.perimeter + rb.perimeter - 2.0 * shared;
    ra.area += rb.area;
    for (int c = 0; c < 3; ++c) {
        ra.color_sum[c] += rb.color_sum[c];
        ra.color_sq_sum[c] += rb.color_sq_sum[c];
    }
    ra.version++;
    rb.alive = false;
    rb.version++;

    // Merge adjacency rows (both sorted); drop the (a, b) edge itself.
    std::vector<std::pair<int, double>> merged;
    merged.reserve(p.adjacency[a].size() + p.adjacency[b].size());
    const auto& ra_row = p.adjacency[a];
    const auto& rb_row = p.adjacency[b];
    std::size_t i = 0, j = 0;
    while (i < ra_row.size() || j < rb_row.size()) {
        const bool take_a =
            j >= rb_row.size() ||
            (i < ra_row.size() && ra_row[i].first <= rb_row[j].first);
        std::pair<int, double> e = take_a ? ra_row[i] : rb_row[j];
        if (take_a) {
            if (j < rb_row.size() && rb_row[j].first == e.first) {
                e.second += rb_row[j].second;
                ++j;
            }
            ++i;
        } else {
            ++j;
        }
        if (e.first == a || e.first == b) continue;
        merged.push_back(e);
    }
    p.adjacency[a] = std::move(merged);
    p.adjacency[b].clear();
    p.adjacency[b].shrink_to_fit();

    for (const auto& [n, len] : p.adjacency[a]) {
        (void)len;
        adjacency_replace(p.adjacency[n], b, a);
    }

    p.parent[b] = a;
    p.region_count--;
}

long long run_merges(Partition& p, GainKind kind, long long count,
                     double& lambda_star, const MergeHook& hook) {
    if (count <= 0) return 0;
    MergeQueue q;
    q.seed(p, kind);
    long long done = 0;
    while (done < count && p.region_count > 1) {
        auto best = pop_best(q, p);
        if (!best) break;
        const int a = std::min(best->a, best->b);
        const int b = std::max(best->a, best->b);
        merge(p, a, b);
        lambda_star = std::max(lambda_star, best->cost);
        ++done;
        if (hook) hook(a, b, best->cost);
        for (const auto& [n, len] : p.adjacency[a]) {
            (void)len;
            if (n != 0) q.push(p, kind, a, n);
        }
    }
    return done;
}

long long refine_to_2normal(Partition& p, GainKind kind, double lambda_star,
                            const MergeHook& hook) {
    MergeQueue q;
    q.seed(p, kind);
    long long done = 0;
    while (p.region_count > 1) {
        auto best = pop_best(q, p);
        if (!best || best->cost > lambda_star) break;
        const int a = std::min(best->a, best->b);
        const int b = std::max(best->a, best->b);
        merge(p, a, b);
        ++done;
        if (hook) hook(a, b, best->cost);
        for (const auto& [n, len] : p.adjacency[a]) {
            (void)len;
            if (n != 0) q.push(p, kind, a, n);
        }
    }
    return done;
}

void dump_dual_graph(const Partition& p, GainKind kind, std::ostream& os) {
    for (int a = 0; a < static_cast<int>(p.regions.size()); ++a) {
        if (!p.regions[a].alive && !(a == 0)) continue;
        for (const auto& [b, len] : p.adjacency[a]) {
            if (b < a) continue;
            if (a == 0 || b == 0) {
                os << a << ' ' << b << ' ' << len << " inf\n";
            } else if (p.regions[b].alive) {
                os << a << ' ' << b << ' ' << len << ' '
                   << merge_cost(kind, p.regions[a], p.regions[b], len) << '\n';
            }
        }
    }
}

}  // namespace vecraster
