#pragma once

#include "fracspde/mesh.hpp"
#include "fracspde/sparse.hpp"

#include <functional>

namespace fracspde {

enum class BoundaryCondition { Neumann, Dirichlet };

// Coefficients of L u = -div(H grad u) + kappa^2 u. H(s) must be symmetric
// positive definite and kappa2(s) >= 0 wherever queried.
struct CoefficientField {
    std::function<double(const Point&)> kappa2;
    std::function<std::array<double, 3>(const Point&)> H;  // (H11, H12, H22)

    static CoefficientField constant(double kappa2_value, double h_scale = 1.0);
    static CoefficientField varying(std::function<double(const Point&)> kappa2_fn);
};

// P1 Galerkin matrices on the mesh dofs. Under Dirichlet conditions the
// boundary rows/columns are eliminated and dof_to_node maps back to mesh
// node indices.
struct FemOperators {
    SpMat C;         // consistent mass
    Vec C_lumped;    // row sums of C
    SpMat G;         // stiffness (H grad, grad)
    SpMat L;         // kappa^2-mass + stiffness, divided by `scale`
    BoundaryCondition bc = BoundaryCondition::Neumann;
    double scale = 1.0;  // eigenvalue lower bound already divided out of L
    std::vector<int> dof_to_node;

    int n() const { return static_cast<int>(C.rows()); }
    SpMat lumped_matrix() const { return sparse_diagonal(C_lumped); }
    // restrict columns of a (points x mesh nodes) evaluation matrix to dofs
    SpMat restrict_eval(const SpMat& A_nodes) const;
};

FemOperators assemble(const TriMesh& mesh, const CoefficientField& coeff,
                      BoundaryCondition bc = BoundaryCondition::Neumann);

// Divide L by a positive lower bound of its generalized eigenvalues w.r.t.
// the lumped mass, recording the bound in `scale`. After this the
// eigenvalues of (L, C_lumped) are >= 1.
FemOperators normalize_spectrum(FemOperators ops, double eigen_lower_bound);

}  // namespace fracspde
