#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <string>
#include <vector>

namespace fracspde {

// Compressed sparse matrix with sorted, duplicate-free indices.
using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Vec = Eigen::VectorXd;

enum class Ordering { Natural, FillReducing };

SpMat sparse_identity(int n);
SpMat sparse_diagonal(const Vec& d);

// C = A * B, shapes checked. Structural zeros are kept.
SpMat spmul(const SpMat& A, const SpMat& B);
// C = a*A + b*B
SpMat spadd(const SpMat& A, const SpMat& B, double a = 1.0, double b = 1.0);
Vec matvec(const SpMat& A, const Vec& x);

// Boolean sparsity pattern of S^k (k >= 1), returned with unit values.
SpMat pattern_power(const SpMat& S, int k);
std::int64_t nnz(const SpMat& A);

bool is_symmetric(const SpMat& A, double tol = 0.0);

// Sparse Cholesky P M P^T = L L^T of an SPD matrix.
class CholFactor {
public:
    CholFactor(const SpMat& M, Ordering ordering = Ordering::FillReducing);

    Vec solve(const Vec& b) const;          // x = M^{-1} b
    Vec solve_lt(const Vec& z) const;       // x = P^T L^{-T} z, so Cov(x) = M^{-1} for z ~ N(0,I)
    double logdet() const { return logdet_; }
    const Eigen::VectorXi& permutation() const { return perm_; }
    int size() const { return n_; }

private:
    int n_ = 0;
    Eigen::VectorXi perm_;                  // row i of PMP^T is row perm_[i] of M
    std::shared_ptr<Eigen::SimplicialLLT<SpMat, Eigen::Lower, Eigen::NaturalOrdering<int>>> llt_;
    double logdet_ = 0.0;
};

// Sparse LU with partial pivoting; carries the signed log-determinant.
class LuFactor {
public:
    explicit LuFactor(const SpMat& M);

    Vec solve(const Vec& b) const;
    double log_abs_det() const { return log_abs_det_; }
    int det_sign() const { return sign_; }

private:
    std::shared_ptr<Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>> lu_;
    double log_abs_det_ = 0.0;
    int sign_ = 1;
};

// Convenience wrappers
CholFactor cholesky(const SpMat& M, Ordering ordering = Ordering::FillReducing);
LuFactor lu(const SpMat& M);

// Matrix Market coordinate format, general or symmetric (lower stored).
void write_matrix_market(const std::string& path, const SpMat& A, bool symmetric = false);
SpMat read_matrix_market(const std::string& path);

}  // namespace fracspde
