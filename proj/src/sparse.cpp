#include "fracspde/sparse.hpp"

#include <Eigen/OrderingMethods>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fracspde {

SpMat sparse_identity(int n)
{
    SpMat I(n, n);
    I.setIdentity();
    return I;
}

SpMat sparse_diagonal(const Vec& d)
{
    const int n = static_cast<int>(d.size());
    SpMat D(n, n);
    D.reserve(Eigen::VectorXi::Constant(n, 1));
    for (int i = 0; i < n; ++i) D.insert(i, i) = d[i];
    D.makeCompressed();
    return D;
}

SpMat spmul(const SpMat& A, const SpMat& B)
{
    if (A.cols() != B.rows())
        throw std::invalid_argument("spmul: shape mismatch " + std::to_string(A.cols()) +
                                    " vs " + std::to_string(B.rows()));
    SpMat C = A * B;
    C.makeCompressed();
    return C;
}

SpMat spadd(const SpMat& A, const SpMat& B, double a, double b)
{
    if (A.rows() != B.rows() || A.cols() != B.cols())
        throw std::invalid_argument("spadd: shape mismatch");
    SpMat C = a * A + b * B;
    C.makeCompressed();
    return C;
}

Vec matvec(const SpMat& A, const Vec& x)
{
    if (A.cols() != x.size()) throw std::invalid_argument("matvec: shape mismatch");
    return A * x;
}

SpMat pattern_power(const SpMat& S, int k)
{
    if (S.rows() != S.cols()) throw std::invalid_argument("pattern_power: square matrix required");
    if (k < 1) throw std::invalid_argument("pattern_power: k >= 1 required");
    auto binarize = [](SpMat& M) {
        for (int j = 0; j < M.outerSize(); ++j)
            for (SpMat::InnerIterator it(M, j); it; ++it) it.valueRef() = 1.0;
    };
    SpMat B = S;
    binarize(B);
    SpMat R = B;
    for (int i = 1; i < k; ++i) {
        R = spmul(R, B);
        binarize(R);
    }
    return R;
}

std::int64_t nnz(const SpMat& A) { return static_cast<std::int64_t>(A.nonZeros()); }

bool is_symmetric(const SpMat& A, double tol)
{
    if (A.rows() != A.cols()) return false;
    SpMat D = SpMat(A.transpose()) - A;
    double m = 0.0;
    for (int j = 0; j < D.outerSize(); ++j)
        for (SpMat::InnerIterator it(D, j); it; ++it) m = std::max(m, std::abs(it.value()));
    return m <= tol;
}

namespace {

Eigen::VectorXi compute_ordering(const SpMat& M, Ordering ordering)
{
    const int n = static_cast<int>(M.rows());
    Eigen::VectorXi perm(n);
    if (ordering == Ordering::Natural) {
        for (int i = 0; i < n; ++i) perm[i] = i;
        return perm;
    }
    Eigen::AMDOrdering<int> amd;
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> P;
    SpMat Ms = M.selfadjointView<Eigen::Lower>();
    amd(Ms, P);
    // Eigen convention: P is such that the factored matrix is P M P^T with
    // (P v)(P.indices()(i)) = v(i).
    for (int i = 0; i < n; ++i) perm[P.indices()(i)] = i;
    return perm;
}

// Report the first nonpositive pivot of M in the given ordering (best effort).
int locate_bad_pivot(const SpMat& M, const Eigen::VectorXi& perm)
{
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> P(static_cast<int>(perm.size()));
    for (int i = 0; i < perm.size(); ++i) P.indices()(perm[i]) = i;
    SpMat Mp = M.twistedBy(P.inverse());
    Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::NaturalOrdering<int>> ldlt;
    ldlt.compute(Mp);
    if (ldlt.info() == Eigen::Success) {
        Vec D = ldlt.vectorD();
        for (int i = 0; i < D.size(); ++i)
            if (!(D[i] > 0.0)) return perm.size() > i ? perm[i] : i;
    }
    return -1;
}

}  // namespace

CholFactor::CholFactor(const SpMat& M, Ordering ordering)
{
    if (M.rows() != M.cols()) throw std::invalid_argument("cholesky: square matrix required");
    n_ = static_cast<int>(M.rows());
    perm_ = compute_ordering(M, ordering);
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> P(n_);
    for (int i = 0; i < n_; ++i) P.indices()(perm_[i]) = i;
    SpMat Mp = M.twistedBy(P.inverse());
    Mp.makeCompressed();
    llt_ = std::make_shared<Eigen::SimplicialLLT<SpMat, Eigen::Lower, Eigen::NaturalOrdering<int>>>();
    llt_->compute(Mp);
    if (llt_->info() != Eigen::Success) {
        int pivot = locate_bad_pivot(M, perm_);
        throw std::runtime_error("cholesky: matrix is not positive definite (pivot index " +
                                 std::to_string(pivot) + ")");
    }
    SpMat L = llt_->matrixL();
    logdet_ = 0.0;
    for (int j = 0; j < L.outerSize(); ++j) {
        SpMat::InnerIterator it(L, j);
        // first stored entry of column j of a lower factor is the diagonal
        if (!it || it.row() != j || !(it.value() > 0.0))
            throw std::runtime_error("cholesky: nonpositive pivot (index " +
                                     std::to_string(perm_[j]) + ")");
        logdet_ += 2.0 * std::log(it.value());
    }
}

Vec CholFactor::solve(const Vec& b) const
{
    if (b.size() != n_) throw std::invalid_argument("cholesky solve: size mismatch");
    Vec bp(n_);
    for (int i = 0; i < n_; ++i) bp[i] = b[perm_[i]];
    Vec xp = llt_->matrixL().solve(bp);
    xp = llt_->matrixU().solve(xp);
    Vec x(n_);
    for (int i = 0; i < n_; ++i) x[perm_[i]] = xp[i];
    return x;
}

Vec CholFactor::solve_lt(const Vec& z) const
{
    if (z.size() != n_) throw std::invalid_argument("cholesky solve_lt: size mismatch");
    Vec xp = llt_->matrixU().solve(z);
    Vec x(n_);
    for (int i = 0; i < n_; ++i) x[perm_[i]] = xp[i];
    return x;
}

LuFactor::LuFactor(const SpMat& M)
{
    if (M.rows() != M.cols()) throw std::invalid_argument("lu: square matrix required");
    lu_ = std::make_shared<Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>>();
    SpMat Mc = M;
    Mc.makeCompressed();
    lu_->compute(Mc);
    if (lu_->info() != Eigen::Success)
        throw std::runtime_error("lu: factorization failed (numerically singular?)");
    log_abs_det_ = lu_->logAbsDeterminant();
    sign_ = static_cast<int>(lu_->signDeterminant());
    if (!std::isfinite(log_abs_det_))
        throw std::runtime_error("lu: matrix is numerically singular");
}

Vec LuFactor::solve(const Vec& b) const
{
    Vec x = lu_->solve(b);
    if (lu_->info() != Eigen::Success) throw std::runtime_error("lu solve failed");
    return x;
}

CholFactor cholesky(const SpMat& M, Ordering ordering) { return CholFactor(M, ordering); }
LuFactor lu(const SpMat& M) { return LuFactor(M); }

void write_matrix_market(const std::string& path, const SpMat& A, bool symmetric)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "%%MatrixMarket matrix coordinate real "
        << (symmetric ? "symmetric" : "general") << "\n";
    std::int64_t count = 0;
    for (int j = 0; j < A.outerSize(); ++j)
        for (SpMat::InnerIterator it(A, j); it; ++it)
            if (!symmetric || it.row() >= it.col()) ++count;
    out << A.rows() << " " << A.cols() << " " << count << "\n";
    char buf[64];
    for (int j = 0; j < A.outerSize(); ++j) {
        for (SpMat::InnerIterator it(A, j); it; ++it) {
            if (symmetric && it.row() < it.col()) continue;
            std::snprintf(buf, sizeof(buf), "%d %d %.17g\n",
                          static_cast<int>(it.row()) + 1, static_cast<int>(it.col()) + 1,
                          it.value());
            out << buf;
        }
    }
}

SpMat read_matrix_market(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
        throw std::runtime_error("not a MatrixMarket file: " + path);
    const bool symmetric = line.find("symmetric") != std::string::npos;
    if (line.find("coordinate") == std::string::npos || line.find("real") == std::string::npos)
        throw std::runtime_error("unsupported MatrixMarket flavor: " + line);
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '%') break;
    }
    std::istringstream hdr(line);
    int rows = 0, cols = 0;
    std::int64_t count = 0;
    if (!(hdr >> rows >> cols >> count)) throw std::runtime_error("bad MatrixMarket header");
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(symmetric ? 2 * count : count));
    for (std::int64_t k = 0; k < count; ++k) {
        int i, j;
        double v;
        if (!(in >> i >> j >> v)) throw std::runtime_error("truncated MatrixMarket file");
        trips.emplace_back(i - 1, j - 1, v);
        if (symmetric && i != j) trips.emplace_back(j - 1, i - 1, v);
    }
    SpMat A(rows, cols);
    A.setFromTriplets(trips.begin(), trips.end());
    A.makeCompressed();
    return A;
}

}  // namespace fracspde
