#include "fracspde/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace fracspde {

TriMesh::TriMesh(std::vector<Point> nodes, std::vector<std::array<int, 3>> triangles,
                 std::vector<bool> boundary, std::vector<bool> core)
    : nodes_(std::move(nodes)),
      triangles_(std::move(triangles)),
      boundary_(std::move(boundary)),
      core_(std::move(core))
{
    const int n = n_nodes();
    h_ = 0.0;
    for (const auto& t : triangles_) {
        for (int k = 0; k < 3; ++k) {
            if (t[k] < 0 || t[k] >= n) throw std::invalid_argument("mesh: node index out of range");
            const Point& a = nodes_[t[k]];
            const Point& b = nodes_[t[(k + 1) % 3]];
            h_ = std::max(h_, std::hypot(b.x - a.x, b.y - a.y));
        }
        const Point& a = nodes_[t[0]];
        const Point& b = nodes_[t[1]];
        const Point& c = nodes_[t[2]];
        const double area2 = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
        if (!(area2 > 0.0)) throw std::invalid_argument("mesh: triangle with nonpositive area");
    }
}

std::vector<int> TriMesh::boundary_nodes() const
{
    std::vector<int> out;
    for (int i = 0; i < n_nodes(); ++i)
        if (boundary_[i]) out.push_back(i);
    return out;
}

std::vector<int> TriMesh::core_nodes() const
{
    std::vector<int> out;
    for (int i = 0; i < n_nodes(); ++i)
        if (core_[i]) out.push_back(i);
    return out;
}

double TriMesh::domain_diameter() const
{
    double xmin = std::numeric_limits<double>::max(), xmax = -xmin;
    double ymin = xmin, ymax = xmax;
    for (const auto& p : nodes_) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    return std::hypot(xmax - xmin, ymax - ymin);
}

double TriMesh::triangle_area(int t) const
{
    const auto& tri = triangles_[t];
    const Point& a = nodes_[tri[0]];
    const Point& b = nodes_[tri[1]];
    const Point& c = nodes_[tri[2]];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double TriMesh::total_area() const
{
    double s = 0.0;
    for (int t = 0; t < n_triangles(); ++t) s += triangle_area(t);
    return s;
}

int TriMesh::nearest_node(const Point& p) const
{
    int best = 0;
    double bd = std::numeric_limits<double>::max();
    for (int i = 0; i < n_nodes(); ++i) {
        const double d = std::hypot(nodes_[i].x - p.x, nodes_[i].y - p.y);
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return best;
}

void TriMesh::dump(const std::string& path) const
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "nodes " << n_nodes() << " triangles " << n_triangles() << "\n";
    char buf[128];
    for (int i = 0; i < n_nodes(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %d %d\n", nodes_[i].x, nodes_[i].y,
                      boundary_[i] ? 1 : 0, core_[i] ? 1 : 0);
        out << buf;
    }
    for (const auto& t : triangles_) out << t[0] << " " << t[1] << " " << t[2] << "\n";
}

TriMesh build_rect_mesh(int nx, int ny, const Rect& rect, double extension)
{
    if (nx < 1 || ny < 1) throw std::invalid_argument("build_rect_mesh: need at least one cell");
    if (!(rect.width() > 0.0) || !(rect.height() > 0.0))
        throw std::invalid_argument("build_rect_mesh: degenerate rectangle");
    if (extension < 0.0) throw std::invalid_argument("build_rect_mesh: negative extension");

    const double dx = rect.width() / nx;
    const double dy = rect.height() / ny;
    const int kx = extension > 0.0 ? static_cast<int>(std::ceil(extension / dx - 1e-12)) : 0;
    const int ky = extension > 0.0 ? static_cast<int>(std::ceil(extension / dy - 1e-12)) : 0;
    const int mx = nx + 2 * kx;  // cells in x
    const int my = ny + 2 * ky;
    const double ox = rect.x0 - kx * dx;
    const double oy = rect.y0 - ky * dy;

    const double ctol = 1e-12 * std::max(rect.width(), rect.height());
    std::vector<Point> nodes;
    std::vector<bool> boundary, core;
    nodes.reserve(static_cast<size_t>((mx + 1) * (my + 1)));
    for (int j = 0; j <= my; ++j) {
        for (int i = 0; i <= mx; ++i) {
            // keep core lattice coordinates bit-identical to the unextended mesh
            const double x = (i >= kx && i <= kx + nx) ? rect.x0 + (i - kx) * dx : ox + i * dx;
            const double y = (j >= ky && j <= ky + ny) ? rect.y0 + (j - ky) * dy : oy + j * dy;
            nodes.push_back({x, y});
            boundary.push_back(i == 0 || i == mx || j == 0 || j == my);
            core.push_back(x >= rect.x0 - ctol && x <= rect.x1 + ctol && y >= rect.y0 - ctol &&
                           y <= rect.y1 + ctol);
        }
    }
    auto id = [mx](int i, int j) { return j * (mx + 1) + i; };
    std::vector<std::array<int, 3>> tris;
    tris.reserve(static_cast<size_t>(2 * mx * my));
    for (int j = 0; j < my; ++j) {
        for (int i = 0; i < mx; ++i) {
            const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            tris.push_back({a, b, c});
            tris.push_back({a, c, d});
        }
    }
    return TriMesh(std::move(nodes), std::move(tris), std::move(boundary), std::move(core));
}

SpMat basis_eval_matrix(const TriMesh& mesh, const std::vector<Point>& points)
{
    const double tol = 1e-10 * mesh.domain_diameter();
    const auto& nodes = mesh.nodes();
    const auto& tris = mesh.triangles();
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(3 * points.size());

    for (size_t ip = 0; ip < points.size(); ++ip) {
        const Point& p = points[ip];
        bool found = false;
        double best_viol = std::numeric_limits<double>::max();
        for (size_t t = 0; t < tris.size() && !found; ++t) {
            const Point& a = nodes[tris[t][0]];
            const Point& b = nodes[tris[t][1]];
            const Point& c = nodes[tris[t][2]];
            const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
            const double l1 = ((p.x - a.x) * (c.y - a.y) - (c.x - a.x) * (p.y - a.y)) / det;
            const double l2 = ((b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)) / det;
            const double l0 = 1.0 - l1 - l2;
            const double viol = -std::min({l0, l1, l2});
            best_viol = std::min(best_viol, viol);
            if (viol <= tol) {
                double w[3] = {l0, l1, l2};
                // clamp roundoff, keep exact unit row sum
                for (double& v : w) v = std::clamp(v, 0.0, 1.0);
                int imax = 0;
                for (int k = 1; k < 3; ++k)
                    if (w[k] > w[imax]) imax = k;
                w[imax] = 1.0 - w[(imax + 1) % 3] - w[(imax + 2) % 3];
                for (int k = 0; k < 3; ++k)
                    if (w[k] != 0.0)
                        entries.emplace_back(static_cast<int>(ip), tris[t][k], w[k]);
                found = true;
            }
        }
        if (!found)
            throw std::invalid_argument("basis_eval_matrix: point " + std::to_string(ip) + " (" +
                                        std::to_string(p.x) + ", " + std::to_string(p.y) +
                                        ") lies outside the mesh hull (violation " +
                                        std::to_string(best_viol) + ")");
    }
    SpMat A(static_cast<int>(points.size()), mesh.n_nodes());
    A.setFromTriplets(entries.begin(), entries.end());
    A.makeCompressed();
    return A;
}

}  // namespace fracspde
