#pragma once

#include "fracspde/fem.hpp"
#include "fracspde/rational.hpp"
#include "fracspde/sparse.hpp"

#include <memory>
#include <random>
#include <string>
#include <vector>

namespace fracspde {

// Discrete rational SPDE model: P_l x = W_h load, u = P_r x / amplitude,
// precision Q = P_l^T C~^{-1} P_l. All mass inverses use the lumped mass.
//
// P_l = b_{m+1} C~ (C~^{-1}L)^{m_beta-1} prod_j (I - r2_j C~^{-1}L)
// P_r = c_m prod_i (I - r1_j C~^{-1}L)
//
// For integer beta the model degenerates to P_l = C~ (C~^{-1}L)^beta, P_r = I.
class SpdeModel {
public:
    SpdeModel(FemOperators ops, RationalApprox ra, double tau);

    const FemOperators& ops() const { return ops_; }
    const RationalApprox& rational() const { return ra_; }
    int n() const { return ops_.n(); }
    double amplitude() const { return amplitude_; }  // tau * scale^beta
    const SpMat& P_l() const { return P_l_; }
    const SpMat& P_r() const { return P_r_; }
    const SpMat& Q() const;                    // built on first use
    const CholFactor& Q_factor() const;        // cached sparse Cholesky of Q
    double logdet_Pl() const { return logdet_Pl_; }
    double logdet_C_lumped() const { return logdet_Cl_; }

    Vec solve_Pl(const Vec& b) const;          // P_l x = b by factor solves
    Vec solve_Pl_t(const Vec& b) const;        // P_l^T x = b
    Vec apply_Pr(const Vec& x) const;

    // nodal weights of the field: u = P_r x / amplitude with P_l x = C~^{1/2} z
    Eigen::MatrixXd sample(int n_samples, std::uint64_t seed) const;

    // column `node` of Cov(u) = P_r P_l^{-1} C~ P_l^{-T} P_r^T / amplitude^2
    Vec covariance_column(int node) const;

    // JSON description plus MatrixMarket files for P_l, P_r, Q
    void dump(const std::string& json_path) const;

private:
    FemOperators ops_;
    RationalApprox ra_;
    double tau_ = 1.0;
    double amplitude_ = 1.0;
    double scalar_ = 1.0;  // b_{m+1} (or 1 in the integer case)
    SpMat P_l_, P_r_;
    std::vector<std::shared_ptr<CholFactor>> chol_factors_;  // per product factor
    std::vector<std::shared_ptr<LuFactor>> lu_factors_;      // guarded fallback slots
    double logdet_Pl_ = 0.0;
    double logdet_Cl_ = 0.0;
    mutable std::shared_ptr<SpMat> Q_;
    mutable std::shared_ptr<CholFactor> Q_chol_;

    Vec factor_solve(size_t i, const Vec& b) const;
};

SpdeModel build_model(FemOperators ops, double beta, int m, double tau);

// standard normal draws, fixed layout, deterministic for a given seed
Eigen::MatrixXd gaussian_matrix(int rows, int cols, std::uint64_t seed);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// Sinc quadrature baseline for L^{-beta} with beta in (0,1) (Appendix-C style):
//   Q_k^beta v = (2k sin(pi beta)/pi) sum_j e^{2 beta y_j} (C~ + c_j L)^{-1} C~ v
struct QuadratureModel {
    double beta = 0.5;
    double k = 1.0;
    int K_minus = 0;
    int K_plus = 0;
    std::vector<double> y;        // nodes j*k
    std::vector<double> c;        // e^{2 y_j}
    std::vector<double> weights;  // 2k sin(pi beta)/pi * e^{2 beta y_j}
    FemOperators ops;
    std::vector<std::shared_ptr<CholFactor>> factors;  // chol(C~ + c_j L)

    Vec apply(const Vec& v) const;                // direct quadrature sum
    Vec apply_operator_form(const Vec& v) const;  // P_l^{Q,-1} P_r^Q v
};

QuadratureModel build_quadrature_model(FemOperators ops, double beta_residual, double k,
                                       int node_cap = 100000);

}  // namespace fracspde
