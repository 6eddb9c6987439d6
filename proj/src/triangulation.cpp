#include "smw/triangulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include "smw/error.hpp"

namespace smw {

double orient(Point2 a, Point2 b, Point2 c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

double incircle(Point2 a, Point2 b, Point2 c, Point2 d) {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double ad = adx * adx + ady * ady;
    const double bd = bdx * bdx + bdy * bdy;
    const double cd = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

namespace {

TriangleIndices canonical(TriangleIndices t) {
    const auto smallest = std::min_element(t.begin(), t.end());
    std::rotate(t.begin(), smallest, t.end());
    return t;
}

std::pair<std::size_t, std::size_t> edge_key(std::size_t a, std::size_t b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
}

// One pass of Lawson flips; returns true if anything changed.
bool flip_pass(std::span<const Point2> p, std::vector<TriangleIndices>& tris, double eps_incircle,
               double eps_area) {
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> owners;
    for (std::size_t t = 0; t < tris.size(); ++t) {
        for (std::size_t k = 0; k < 3; ++k) {
            owners[edge_key(tris[t][k], tris[t][(k + 1) % 3])].push_back(t);
        }
    }
    for (const auto& [edge, ts] : owners) {
        if (ts.size() != 2) continue;
        const TriangleIndices t1 = tris[ts[0]];
        const TriangleIndices t2 = tris[ts[1]];
        // Orient t1 as (a, b, c) with a->b the shared edge.
        std::size_t k1 = 0;
        while (!((t1[k1] == edge.first || t1[k1] == edge.second) &&
                 (t1[(k1 + 1) % 3] == edge.first || t1[(k1 + 1) % 3] == edge.second))) {
            ++k1;
        }
        const std::size_t a = t1[k1], b = t1[(k1 + 1) % 3], c = t1[(k1 + 2) % 3];
        std::size_t d = t2[0];
        for (std::size_t v : t2) {
            if (v != a && v != b) d = v;
        }
        if (incircle(p[a], p[b], p[c], p[d]) <= eps_incircle) continue;
        // Quad a -> d -> b -> c is counter-clockwise; swap diagonal ab for cd.
        const TriangleIndices n1{a, d, c};
        const TriangleIndices n2{d, b, c};
        if (orient(p[n1[0]], p[n1[1]], p[n1[2]]) <= eps_area ||
            orient(p[n2[0]], p[n2[1]], p[n2[2]]) <= eps_area) {
            continue;
        }
        tris[ts[0]] = n1;
        tris[ts[1]] = n2;
        return true;
    }
    return false;
}

}  // namespace

std::vector<TriangleIndices> delaunay_triangulate(std::span<const Point2> points) {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (points[i].x != points[j].x) return points[i].x < points[j].x;
        return points[i].y < points[j].y;
    });
    order.erase(std::unique(order.begin(), order.end(),
                            [&](std::size_t i, std::size_t j) { return points[i] == points[j]; }),
                order.end());
    if (order.size() < 3) fail(ErrorCode::kCollinearBasis, "fewer than 3 distinct end-points");

    double extent = 0.0;
    for (std::size_t i : order) {
        extent = std::max({extent, std::abs(points[i].x - points[order[0]].x),
                           std::abs(points[i].y - points[order[0]].y)});
    }
    extent = std::max(extent, 1e-300);
    const double eps_area = 1e-12 * extent * extent;
    const double eps_incircle = 1e-12 * extent * extent * extent * extent;

    // Leading collinear run.
    std::size_t first_off = 2;
    while (first_off < order.size() &&
           std::abs(orient(points[order[0]], points[order[1]], points[order[first_off]])) <= eps_area) {
        ++first_off;
    }
    if (first_off == order.size()) fail(ErrorCode::kCollinearBasis, "all end-points are collinear");

    std::vector<TriangleIndices> tris;
    std::vector<std::size_t> hull;
    const std::size_t q = order[first_off];
    const bool left = orient(points[order[0]], points[order[first_off - 1]], points[q]) > 0.0;
    for (std::size_t m = 0; m + 1 < first_off; ++m) {
        if (left) {
            tris.push_back({order[m], order[m + 1], q});
        } else {
            tris.push_back({order[m + 1], order[m], q});
        }
    }
    if (left) {
        hull.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(first_off));
        hull.push_back(q);
    } else {
        hull.push_back(q);
        for (std::size_t m = first_off; m-- > 0;) hull.push_back(order[m]);
    }

    for (std::size_t idx = first_off + 1; idx < order.size(); ++idx) {
        const std::size_t v = order[idx];
        const std::size_t n = hull.size();
        std::vector<bool> visible(n);
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) {
            visible[i] = orient(points[hull[i]], points[hull[(i + 1) % n]], points[v]) < -eps_area;
            any = any || visible[i];
        }
        if (!any) fail(ErrorCode::kCollinearBasis, "sweep point sees no hull edge");
        // First visible edge whose predecessor is hidden.
        std::size_t s = 0;
        while (!(visible[s] && !visible[(s + n - 1) % n])) ++s;
        std::size_t e = s;
        while (visible[(e + 1) % n]) e = (e + 1) % n;
        for (std::size_t i = s;; i = (i + 1) % n) {
            tris.push_back({hull[(i + 1) % n], hull[i], v});
            if (i == e) break;
        }
        std::vector<std::size_t> next;
        for (std::size_t i = (e + 1) % n;; i = (i + 1) % n) {
            next.push_back(hull[i]);
            if (i == s) break;
        }
        next.push_back(v);
        hull = std::move(next);
    }

    // Each flip strictly reduces a bounded potential, but cap the loop anyway.
    const std::size_t max_flips = 10 * tris.size() * tris.size() + 100;
    for (std::size_t f = 0; f < max_flips && flip_pass(points, tris, eps_incircle, eps_area); ++f) {
    }

    for (auto& t : tris) t = canonical(t);
    std::sort(tris.begin(), tris.end());
    return tris;
}

}  // namespace smw
