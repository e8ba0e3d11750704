#include "vecraster/raster_eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <vector>

#include "vecraster/errors.hpp"
#include "vecraster/geometry.hpp"

namespace vecraster {

namespace {

constexpr double kFlattenTol = 0.05;

struct RowCrossing {
    int shape = 0;
    double x = 0.0;
};

}  // namespace

RasterImage rasterize(const VectorDocument& doc, int supersample,
                      long long* unfilled) {
    if (supersample < 1) supersample = 1;
    const int w = static_cast<int>(std::llround(doc.width));
    const int h = static_cast<int>(std::llround(doc.height));
    if (w <= 0 || h <= 0) throw DimensionError("document has no pixel area");
    const int s = supersample;
    const int rows = h * s;
    const int cols = w * s;

    // Bucket every edge's crossings by subsample row. A subsample row rr
    // samples y = (rr + 0.5) / s; an edge spanning [ylo, yhi) contributes
    // to rows with ylo <= y < yhi (half-open, so shared vertices count
    // exactly once per crossing).
    std::vector<std::vector<RowCrossing>> row_hits(
        static_cast<std::size_t>(rows));
    for (std::size_t si = 0; si < doc.shapes.size(); ++si) {
        for (const auto& loop : doc.shapes[si].loops) {
            if (loop.empty()) continue;
            std::vector<Vec2> ring;
            ring.push_back(loop.front().p0);
            for (const BezierSegment& seg : loop) {
                flatten_segment(seg, kFlattenTol, ring);
            }
            if (ring.size() < 3) continue;
            if (ring.back() != ring.front()) ring.push_back(ring.front());
            for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
                Vec2 a = ring[i];
                Vec2 b = ring[i + 1];
                if (a.y == b.y) continue;
                double ylo = std::min(a.y, b.y);
                double yhi = std::max(a.y, b.y);
                int rr0 = static_cast<int>(std::ceil(ylo * s - 0.5));
                int rr1 = static_cast<int>(std::ceil(yhi * s - 0.5)) - 1;
                rr0 = std::max(rr0, 0);
                rr1 = std::min(rr1, rows - 1);
                for (int rr = rr0; rr <= rr1; ++rr) {
                    double y = (rr + 0.5) / s;
                    double t = (y - a.y) / (b.y - a.y);
                    double x = a.x + t * (b.x - a.x);
                    row_hits[static_cast<std::size_t>(rr)].push_back(
                        {static_cast<int>(si), x});
                }
            }
        }
    }

    RasterImage out;
    out.width = w;
    out.height = h;
    out.channels = 3;
    out.data.assign(static_cast<std::size_t>(w) * h * 3, 0.0);

    long long missed = 0;
    std::vector<int> cover(static_cast<std::size_t>(cols));
    const double inv = 1.0 / (static_cast<double>(s) * s);
    for (int rr = 0; rr < rows; ++rr) {
        auto& hits = row_hits[static_cast<std::size_t>(rr)];
        std::sort(hits.begin(), hits.end(),
                  [](const RowCrossing& a, const RowCrossing& b) {
                      if (a.shape != b.shape) return a.shape < b.shape;
                      return a.x < b.x;
                  });
        std::fill(cover.begin(), cover.end(), -1);
        // Shapes arrive in document order; later spans overwrite earlier.
        std::size_t q = 0;
        while (q < hits.size()) {
            int shape = hits[q].shape;
            std::size_t run_end = q;
            while (run_end < hits.size() && hits[run_end].shape == shape) {
                ++run_end;
            }
            for (std::size_t k = q; k + 1 < run_end; k += 2) {
                double x0 = hits[k].x;
                double x1 = hits[k + 1].x;
                int ii = static_cast<int>(std::ceil(x0 * s - 0.5));
                ii = std::max(ii, 0);
                for (; ii < cols; ++ii) {
                    double x = (ii + 0.5) / s;
                    if (x >= x1) break;
                    cover[static_cast<std::size_t>(ii)] = shape;
                }
            }
            q = run_end;
        }
        int py = rr / s;
        for (int ii = 0; ii < cols; ++ii) {
            int shape = cover[static_cast<std::size_t>(ii)];
            int px = ii / s;
            double r, g, b;
            if (shape < 0) {
                ++missed;
                r = g = b = 255.0;  // blank canvas
            } else {
                const auto& rgb = doc.shapes[static_cast<std::size_t>(shape)].rgb;
                r = rgb[0];
                g = rgb[1];
                b = rgb[2];
            }
            out.at(px, py, 0) += r * inv;
            out.at(px, py, 1) += g * inv;
            out.at(px, py, 2) += b * inv;
        }
    }
    if (unfilled) *unfilled = missed;
    return out;
}

double psnr(const RasterImage& a, const RasterImage& b) {
    if (a.width != b.width || a.height != b.height ||
        a.channels != b.channels) {
        throw DimensionError("psnr inputs differ in shape");
    }
    double se = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        double d = a.data[i] - b.data[i];
        se += d * d;
    }
    if (se == 0.0) return std::numeric_limits<double>::infinity();
    double mse = se / static_cast<double>(a.data.size());
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

EvalReport evaluate(const VectorDocument& doc, const RasterImage& ref,
                    int supersample) {
    EvalReport rep;
    RasterImage got = rasterize(doc, supersample, &rep.unfilled_pixels);
    if (got.width != ref.width || got.height != ref.height) {
        throw DimensionError("document and reference sizes differ");
    }
    const RasterImage* cmp = &ref;
    RasterImage expanded;
    if (ref.channels == 1) {
        expanded.width = ref.width;
        expanded.height = ref.height;
        expanded.channels = 3;
        expanded.data.resize(ref.data.size() * 3);
        for (std::size_t i = 0; i < ref.data.size(); ++i) {
            expanded.data[3 * i + 0] = ref.data[i];
            expanded.data[3 * i + 1] = ref.data[i];
            expanded.data[3 * i + 2] = ref.data[i];
        }
        cmp = &expanded;
    }
    rep.psnr = psnr(got, *cmp);
    rep.region_count = static_cast<int>(doc.shapes.size());
    int segs = 0;
    for (const VectorShape& sh : doc.shapes) {
        for (const auto& loop : sh.loops) {
            segs += static_cast<int>(loop.size());
        }
    }
    rep.path_segment_count = segs;
    return rep;
}

void write_report_csv(const EvalReport& rep, std::ostream& os) {
    os << "psnr,region_count,path_segment_count,unfilled_pixels\n";
    char buf[64];
    if (std::isinf(rep.psnr)) {
        os << "inf";
    } else {
        std::snprintf(buf, sizeof(buf), "%.6f", rep.psnr);
        os << buf;
    }
    os << ',' << rep.region_count << ',' << rep.path_segment_count << ','
       << rep.unfilled_pixels << '\n';
}

}  // namespace vecraster
