#include "fracspde/fem.hpp"

#include <cmath>
#include <stdexcept>

namespace fracspde {

CoefficientField CoefficientField::constant(double kappa2_value, double h_scale)
{
    if (kappa2_value < 0.0) throw std::invalid_argument("kappa2 must be nonnegative");
    if (!(h_scale > 0.0)) throw std::invalid_argument("H scale must be positive");
    CoefficientField f;
    f.kappa2 = [kappa2_value](const Point&) { return kappa2_value; };
    f.H = [h_scale](const Point&) { return std::array<double, 3>{h_scale, 0.0, h_scale}; };
    return f;
}

CoefficientField CoefficientField::varying(std::function<double(const Point&)> kappa2_fn)
{
    CoefficientField f;
    f.kappa2 = std::move(kappa2_fn);
    f.H = [](const Point&) { return std::array<double, 3>{1.0, 0.0, 1.0}; };
    return f;
}

SpMat FemOperators::restrict_eval(const SpMat& A_nodes) const
{
    if (static_cast<int>(dof_to_node.size()) == A_nodes.cols()) return A_nodes;
    std::vector<Eigen::Triplet<double>> trips;
    std::vector<int> node_to_dof(A_nodes.cols(), -1);
    for (size_t d = 0; d < dof_to_node.size(); ++d) node_to_dof[dof_to_node[d]] = static_cast<int>(d);
    for (int j = 0; j < A_nodes.outerSize(); ++j)
        for (SpMat::InnerIterator it(A_nodes, j); it; ++it)
            if (node_to_dof[it.col()] >= 0)
                trips.emplace_back(it.row(), node_to_dof[it.col()], it.value());
    SpMat A(A_nodes.rows(), static_cast<int>(dof_to_node.size()));
    A.setFromTriplets(trips.begin(), trips.end());
    A.makeCompressed();
    return A;
}

FemOperators assemble(const TriMesh& mesh, const CoefficientField& coeff, BoundaryCondition bc)
{
    const int n_mesh = mesh.n_nodes();
    const auto& nodes = mesh.nodes();

    std::vector<Eigen::Triplet<double>> tC, tG, tL;
    tC.reserve(9 * mesh.n_triangles());
    tG.reserve(9 * mesh.n_triangles());
    tL.reserve(9 * mesh.n_triangles());

    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles()[t];
        const Point& a = nodes[tri[0]];
        const Point& b = nodes[tri[1]];
        const Point& c = nodes[tri[2]];
        const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
        const double area = 0.5 * det;

        // gradients of the barycentric basis
        const double gx[3] = {(b.y - c.y) / det, (c.y - a.y) / det, (a.y - b.y) / det};
        const double gy[3] = {(c.x - b.x) / det, (a.x - c.x) / det, (b.x - a.x) / det};

        // edge-midpoint quadrature, exact for quadratic integrands
        const Point q[3] = {{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)},
                            {0.5 * (b.x + c.x), 0.5 * (b.y + c.y)},
                            {0.5 * (c.x + a.x), 0.5 * (c.y + a.y)}};
        // phi_i at edge midpoints: midpoint of the edge opposite vertex i has phi_i = 0
        const double phi[3][3] = {{0.5, 0.0, 0.5}, {0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}};

        double Hbar[3] = {0.0, 0.0, 0.0};
        double k2[3];
        for (int s = 0; s < 3; ++s) {
            const auto Hq = coeff.H(q[s]);
            const double disc = Hq[0] * Hq[2] - Hq[1] * Hq[1];
            if (!(Hq[0] > 0.0) || !(disc > 0.0))
                throw std::invalid_argument("assemble: H not SPD at quadrature point");
            Hbar[0] += Hq[0] / 3.0;
            Hbar[1] += Hq[1] / 3.0;
            Hbar[2] += Hq[2] / 3.0;
            k2[s] = coeff.kappa2(q[s]);
            if (k2[s] < 0.0) throw std::invalid_argument("assemble: kappa2 < 0 at quadrature point");
        }

        double Gel[3][3], Cel[3][3], Mel[3][3];
        for (int i = 0; i < 3; ++i) {
            for (int j = i; j < 3; ++j) {
                Gel[i][j] = area * (Hbar[0] * gx[i] * gx[j] + Hbar[2] * gy[i] * gy[j] +
                                    Hbar[1] * (gx[i] * gy[j] + gy[i] * gx[j]));
                double cc = 0.0, mm = 0.0;
                for (int s = 0; s < 3; ++s) {
                    cc += phi[i][s] * phi[j][s];
                    mm += k2[s] * phi[i][s] * phi[j][s];
                }
                Cel[i][j] = area / 3.0 * cc;
                Mel[i][j] = area / 3.0 * mm;
                Gel[j][i] = Gel[i][j];
                Cel[j][i] = Cel[i][j];
                Mel[j][i] = Mel[i][j];
            }
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                tC.emplace_back(tri[i], tri[j], Cel[i][j]);
                tG.emplace_back(tri[i], tri[j], Gel[i][j]);
                tL.emplace_back(tri[i], tri[j], Mel[i][j] + Gel[i][j]);
            }
        }
    }

    FemOperators ops;
    ops.bc = bc;
    std::vector<int> keep;
    if (bc == BoundaryCondition::Dirichlet) {
        for (int i = 0; i < n_mesh; ++i)
            if (!mesh.is_boundary(i)) keep.push_back(i);
        if (keep.empty()) throw std::invalid_argument("assemble: empty interior under Dirichlet");
    } else {
        keep.resize(n_mesh);
        for (int i = 0; i < n_mesh; ++i) keep[i] = i;
    }
    std::vector<int> remap(n_mesh, -1);
    for (size_t d = 0; d < keep.size(); ++d) remap[keep[d]] = static_cast<int>(d);
    const int n = static_cast<int>(keep.size());

    auto build = [&](const std::vector<Eigen::Triplet<double>>& trips) {
        std::vector<Eigen::Triplet<double>> kept;
        kept.reserve(trips.size());
        for (const auto& tr : trips)
            if (remap[tr.row()] >= 0 && remap[tr.col()] >= 0)
                kept.emplace_back(remap[tr.row()], remap[tr.col()], tr.value());
        SpMat M(n, n);
        M.setFromTriplets(kept.begin(), kept.end());
        M.makeCompressed();
        return M;
    };
    ops.C = build(tC);
    ops.G = build(tG);
    ops.L = build(tL);
    ops.dof_to_node = std::move(keep);
    ops.C_lumped = ops.C * Vec::Ones(n);
    for (int i = 0; i < n; ++i)
        if (!(ops.C_lumped[i] > 0.0))
            throw std::runtime_error("assemble: nonpositive lumped mass entry");
    return ops;
}

FemOperators normalize_spectrum(FemOperators ops, double eigen_lower_bound)
{
    if (!(eigen_lower_bound > 0.0))
        throw std::invalid_argument("normalize_spectrum: bound must be positive");
    ops.L = SpMat(ops.L / eigen_lower_bound);
    ops.L.makeCompressed();
    ops.scale *= eigen_lower_bound;
    return ops;
}

}  // namespace fracspde
