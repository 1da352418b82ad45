#pragma once

#include "fracspde/sparse.hpp"

#include <array>
#include <string>
#include <vector>

namespace fracspde {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
};

// Structured triangulation of a rectangle, optionally extended on all sides
// to push the boundary away from the region of interest. Immutable after
// construction.
class TriMesh {
public:
    TriMesh(std::vector<Point> nodes, std::vector<std::array<int, 3>> triangles,
            std::vector<bool> boundary, std::vector<bool> core);

    int n_nodes() const { return static_cast<int>(nodes_.size()); }
    int n_triangles() const { return static_cast<int>(triangles_.size()); }
    const std::vector<Point>& nodes() const { return nodes_; }
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
    bool is_boundary(int i) const { return boundary_[i]; }
    bool is_core(int i) const { return core_[i]; }
    std::vector<int> boundary_nodes() const;
    std::vector<int> core_nodes() const;
    double h() const { return h_; }
    double domain_diameter() const;
    double triangle_area(int t) const;
    double total_area() const;

    // Index of the node closest to p.
    int nearest_node(const Point& p) const;

    void dump(const std::string& path) const;

private:
    std::vector<Point> nodes_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<bool> boundary_;
    std::vector<bool> core_;
    double h_ = 0.0;
};

// Lattice of nx-by-ny cells over `rect` grown by `extension` on each side
// (rounded up to whole cells), each cell split into two right triangles along
// the same diagonal. core flags mark nodes inside the original rect.
TriMesh build_rect_mesh(int nx, int ny, const Rect& rect, double extension = 0.0);

// A_ij = phi_j(points[i]): barycentric weights of each point in its containing
// triangle. Throws if a point lies outside the hull beyond tolerance.
SpMat basis_eval_matrix(const TriMesh& mesh, const std::vector<Point>& points);

}  // namespace fracspde
