#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "smw/plant.hpp"

namespace smw {

using TriangleIndices = std::array<std::size_t, 3>;

// Twice the signed area of (a, b, c); positive when counter-clockwise.
double orient(Point2 a, Point2 b, Point2 c);

// Positive when d lies strictly inside the circumcircle of CCW triangle (a, b, c).
double incircle(Point2 a, Point2 b, Point2 c, Point2 d);

/// Delaunay triangulation of a planar point set.
///
/// Points are swept in lexicographic (x, y) order starting from the minimum;
/// each new point is fanned to the hull edges it sees. Lawson edge flips then
/// restore the empty-circumcircle property. Co-circular quadruples are left
/// as swept, which keeps the output deterministic. Exact duplicates are
/// skipped. Triangles come out counter-clockwise, rotated so the smallest
/// index is first, and sorted.
///
/// Throws CollinearBasis when every point lies on one line.
std::vector<TriangleIndices> delaunay_triangulate(std::span<const Point2> points);

}  // namespace smw
