#include "fracspde/model.hpp"

#include "vendor_json.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace fracspde {

namespace {

// factor matrices M_i with P_l = b_{m+1} * C~ * prod_i (C~^{-1} M_i);
// the first m_beta-1 are L, the rest are (C~ - r2_j L)
std::vector<SpMat> left_factor_matrices(const FemOperators& ops, const RationalApprox& ra)
{
    std::vector<SpMat> out;
    SpMat Cl = ops.lumped_matrix();
    if (ra.integer_beta) {
        for (int i = 0; i < ra.m_beta; ++i) out.push_back(ops.L);
        return out;
    }
    for (int i = 0; i < ra.m_beta - 1; ++i) out.push_back(ops.L);
    for (double r : ra.r2) out.push_back(spadd(Cl, ops.L, 1.0, -r));
    return out;
}

}  // namespace

SpdeModel::SpdeModel(FemOperators ops, RationalApprox ra, double tau)
    : ops_(std::move(ops)), ra_(std::move(ra)), tau_(tau)
{
    if (!(tau_ > 0.0)) throw std::invalid_argument("SpdeModel: tau > 0 required");
    amplitude_ = tau_ * std::pow(ops_.scale, ra_.beta);
    const int n = ops_.n();
    SpMat Cl = ops_.lumped_matrix();
    SpMat Clinv = sparse_diagonal(ops_.C_lumped.cwiseInverse());

    scalar_ = ra_.integer_beta ? 1.0 : ra_.b.back();

    // materialize P_l and P_r and factor every product term
    auto mats = left_factor_matrices(ops_, ra_);
    P_l_ = Cl;
    for (const auto& M : mats) P_l_ = spmul(P_l_, spmul(Clinv, M));
    P_l_ = SpMat(scalar_ * P_l_);
    P_l_.makeCompressed();

    P_r_ = sparse_identity(n);
    if (!ra_.integer_beta) {
        for (double r : ra_.r1) P_r_ = spmul(P_r_, spmul(Clinv, spadd(Cl, ops_.L, 1.0, -r)));
        P_r_ = SpMat(ra_.c.back() * P_r_);
        P_r_.makeCompressed();
    }

    logdet_Cl_ = ops_.C_lumped.array().log().sum();
    logdet_Pl_ = n * std::log(std::abs(scalar_)) + logdet_Cl_;
    chol_factors_.resize(mats.size());
    lu_factors_.resize(mats.size());
    for (size_t i = 0; i < mats.size(); ++i) {
        const bool expect_spd =
            ra_.integer_beta || i < static_cast<size_t>(ra_.m_beta - 1) ||
            ra_.r2[i - (ra_.m_beta - 1)] <= 0.0;
        bool ok = false;
        if (expect_spd) {
            try {
                chol_factors_[i] = std::make_shared<CholFactor>(mats[i]);
                logdet_Pl_ += chol_factors_[i]->logdet() - logdet_Cl_;
                ok = true;
            } catch (const std::runtime_error&) {
                ok = false;
            }
        }
        if (!ok) {
            if (expect_spd)
                std::cerr << "fracspde: warning: product factor " << i
                          << " is not SPD, falling back to LU\n";
            lu_factors_[i] = std::make_shared<LuFactor>(mats[i]);
            if (lu_factors_[i]->det_sign() == 0)
                throw std::runtime_error("SpdeModel: singular product factor");
            logdet_Pl_ += lu_factors_[i]->log_abs_det() - logdet_Cl_;
        }
    }
}

Vec SpdeModel::factor_solve(size_t i, const Vec& b) const
{
    if (chol_factors_[i]) return chol_factors_[i]->solve(b);
    return lu_factors_[i]->solve(b);
}

Vec SpdeModel::solve_Pl(const Vec& b) const
{
    // P_l^{-1} = (1/s) M_K^{-1} C~ M_{K-1}^{-1} C~ ... C~ M_1^{-1}
    Vec v = factor_solve(0, b);
    for (size_t i = 1; i < chol_factors_.size(); ++i)
        v = factor_solve(i, ops_.C_lumped.cwiseProduct(v));
    return v / scalar_;
}

Vec SpdeModel::solve_Pl_t(const Vec& b) const
{
    const size_t K = chol_factors_.size();
    Vec v = factor_solve(K - 1, b);
    for (size_t i = K - 1; i-- > 0;) v = factor_solve(i, ops_.C_lumped.cwiseProduct(v));
    return v / scalar_;
}

Vec SpdeModel::apply_Pr(const Vec& x) const { return P_r_ * x; }

const SpMat& SpdeModel::Q() const
{
    if (!Q_) {
        SpMat Clinv = sparse_diagonal(ops_.C_lumped.cwiseInverse());
        Q_ = std::make_shared<SpMat>(spmul(SpMat(P_l_.transpose()), spmul(Clinv, P_l_)));
    }
    return *Q_;
}

const CholFactor& SpdeModel::Q_factor() const
{
    if (!Q_chol_) Q_chol_ = std::make_shared<CholFactor>(Q());
    return *Q_chol_;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream)
{
    // splitmix64 step on master + stream
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Eigen::MatrixXd gaussian_matrix(int rows, int cols, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd Z(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) Z(i, j) = normal(rng);
    return Z;
}

Eigen::MatrixXd SpdeModel::sample(int n_samples, std::uint64_t seed) const
{
    if (n_samples < 1) throw std::invalid_argument("sample: n_samples >= 1 required");
    const int n = ops_.n();
    Eigen::MatrixXd Z = gaussian_matrix(n, n_samples, seed);
    Eigen::MatrixXd U(n, n_samples);
    const Vec root = ops_.C_lumped.cwiseSqrt();
    for (int s = 0; s < n_samples; ++s) {
        Vec b = root.cwiseProduct(Z.col(s));
        Vec x = solve_Pl(b);
        U.col(s) = apply_Pr(x) / amplitude_;
    }
    return U;
}

Vec SpdeModel::covariance_column(int node) const
{
    if (node < 0 || node >= n()) throw std::invalid_argument("covariance_column: bad index");
    Vec e = Vec::Zero(n());
    e[node] = 1.0;
    Vec v = P_r_.transpose() * e;
    Vec w = solve_Pl_t(v);
    w = ops_.C_lumped.cwiseProduct(w);
    w = solve_Pl(w);
    return apply_Pr(w) / (amplitude_ * amplitude_);
}

void SpdeModel::dump(const std::string& json_path) const
{
    nlohmann::json j;
    j["beta"] = ra_.beta;
    j["m"] = ra_.m;
    j["m_beta"] = ra_.m_beta;
    j["delta"] = ra_.delta;
    j["integer_beta"] = ra_.integer_beta;
    j["c"] = ra_.c;
    j["b"] = ra_.b;
    j["r1"] = ra_.r1;
    j["r2"] = ra_.r2;
    j["sup_err"] = ra_.sup_err;
    j["tau"] = tau_;
    j["amplitude"] = amplitude_;
    j["scale"] = ops_.scale;
    j["n"] = n();
    const std::string base = json_path.substr(0, json_path.find_last_of('.'));
    j["P_l"] = base + "_Pl.mtx";
    j["P_r"] = base + "_Pr.mtx";
    j["Q"] = base + "_Q.mtx";
    write_matrix_market(base + "_Pl.mtx", P_l_);
    write_matrix_market(base + "_Pr.mtx", P_r_);
    write_matrix_market(base + "_Q.mtx", Q(), true);
    std::ofstream out(json_path);
    if (!out) throw std::runtime_error("cannot open for writing: " + json_path);
    out << j.dump(2) << "\n";
}

SpdeModel build_model(FemOperators ops, double beta, int m, double tau)
{
    RationalApprox ra = build_fractional_rational_cached(beta, m);
    return SpdeModel(std::move(ops), ra, tau);
}

}  // namespace fracspde
