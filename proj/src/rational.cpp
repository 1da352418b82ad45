#include "fracspde/rational.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fracspde {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr int kGrid = 512;  // Chebyshev interpolation grid (2nd-kind points)

struct ChebGrid {
    VectorXd t;       // cos(pi j / Ng), j = 0..Ng
    MatrixXd cosmat;  // DCT rows: coeff_k = sum_j cosmat(k, j) vals_j (k=0 then halved)

    explicit ChebGrid(int Ng, int Kmax)
    {
        t.resize(Ng + 1);
        for (int j = 0; j <= Ng; ++j) t[j] = std::cos(std::numbers::pi * j / Ng);
        cosmat.resize(Kmax + 1, Ng + 1);
        for (int k = 0; k <= Kmax; ++k) {
            for (int j = 0; j <= Ng; ++j) {
                double w = 2.0 / Ng * std::cos(std::numbers::pi * k * j / Ng);
                if (j == 0 || j == Ng) w *= 0.5;
                cosmat(k, j) = w;
            }
        }
    }

    VectorXd coeffs(const VectorXd& vals, int K) const
    {
        VectorXd out = cosmat.topRows(K + 1) * vals;
        out[0] *= 0.5;
        return out;
    }
};

// Tmat(j, k) = T_k(t_j)
MatrixXd cheb_eval_matrix(const VectorXd& t, int deg)
{
    MatrixXd T(t.size(), deg + 1);
    T.col(0).setOnes();
    if (deg >= 1) T.col(1) = t;
    for (int k = 2; k <= deg; ++k)
        T.col(k) = 2.0 * t.cwiseProduct(T.col(k - 1)) - T.col(k - 2);
    return T;
}

struct ChebPadeResult {
    VectorXd p;  // Chebyshev coefficients of q1 on [-1,1], size m+1
    VectorXd q;  // Chebyshev coefficients of q2 on [-1,1], size m+2
    double resid = 0.0;
};

// Nonlinear Chebyshev-Pade of type (m, m+1): Chebyshev coefficients of
// p/q - x^bhat vanish through T_{2m+1}. Newton with exact Jacobian from a
// cross-multiplied seed.
ChebPadeResult chebpade_nonlinear(double bhat, int m, double delta,
                                  const ChebPadeResult* seed)
{
    const int n = m + 1;
    const int K = m + n;
    const ChebGrid grid(kGrid, std::max(K, 3 * m + 6));
    const int Np = kGrid + 1;

    VectorXd x(Np), fx(Np);
    for (int j = 0; j < Np; ++j) {
        x[j] = 0.5 * (1.0 + delta) + 0.5 * (1.0 - delta) * grid.t[j];
        fx[j] = std::pow(x[j], bhat);
    }
    const double scale = fx.cwiseAbs().maxCoeff();
    VectorXd fs = fx / scale;
    MatrixXd Tmat = cheb_eval_matrix(grid.t, std::max(m, n));

    VectorXd p, q;
    if (seed) {
        p = seed->p / scale;
        q = seed->q;
    } else {
        // cross-multiplied (linearized) seed: [f*q]_k = 0 for k = m+1..m+n
        VectorXd alpha = grid.coeffs(fs, 3 * m + 6);
        MatrixXd A(n, n + 1);
        for (int jj = 0; jj <= n; ++jj) {
            for (int r = 0; r < n; ++r) {
                const int k = m + 1 + r;
                double s = 0.0;
                if (k - jj >= 0) s += 0.5 * alpha[k - jj];
                if (jj - k >= 0) s += 0.5 * alpha[jj - k];
                if (k + jj < alpha.size()) s += 0.5 * alpha[k + jj];
                A(r, jj) = s;
            }
        }
        Eigen::JacobiSVD<MatrixXd> svd(A, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        if (n >= 2 && sv[n - 1] > 0.5 * sv[0])
            throw std::runtime_error(
                "clenshaw_lord: denominator system is numerically degenerate; "
                "try a smaller m or a larger delta");
        q = svd.matrixV().col(n);
        p = grid.coeffs(fs.cwiseProduct(Tmat.leftCols(n + 1) * q), m);
    }

    int jfix = 0;
    q.cwiseAbs().maxCoeff(&jfix);

    auto residual = [&](const VectorXd& pp, const VectorXd& qq) -> VectorXd {
        VectorXd Rv = (Tmat.leftCols(m + 1) * pp).cwiseQuotient(Tmat.leftCols(n + 1) * qq);
        return grid.coeffs(Rv - fs, K);
    };

    VectorXd r = residual(p, q);
    double rn = r.cwiseAbs().maxCoeff();
    for (int it = 0; it < 60 && rn >= 1e-14; ++it) {
        VectorXd Qv = Tmat.leftCols(n + 1) * q;
        VectorXd Rv = (Tmat.leftCols(m + 1) * p).cwiseQuotient(Qv);
        MatrixXd J(K + 1, m + 1 + n);
        int col = 0;
        for (int jj = 0; jj <= m; ++jj)
            J.col(col++) = grid.coeffs(Tmat.col(jj).cwiseQuotient(Qv), K);
        for (int jj = 0; jj <= n; ++jj) {
            if (jj == jfix) continue;
            J.col(col++) = grid.coeffs((-Rv.cwiseQuotient(Qv)).cwiseProduct(Tmat.col(jj)), K);
        }
        VectorXd dv = J.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(-r);
        double lam = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 50; ++ls) {
            VectorXd pn = p + lam * dv.head(m + 1);
            VectorXd qn = q;
            int idx = 0;
            for (int jj = 0; jj <= n; ++jj) {
                if (jj == jfix) continue;
                qn[jj] += lam * dv[m + 1 + idx];
                ++idx;
            }
            VectorXd rr = residual(pn, qn);
            if (rr.cwiseAbs().maxCoeff() < rn) {
                p = pn;
                q = qn;
                r = rr;
                rn = r.cwiseAbs().maxCoeff();
                improved = true;
                break;
            }
            lam *= 0.5;
        }
        if (!improved) break;
    }
    return {p * scale, q, rn * scale};
}

// Chebyshev (on [a,b]) to ascending monomial coefficients in x.
std::vector<double> cheb_to_monomial(const VectorXd& coeffs, double a, double b)
{
    const int deg = static_cast<int>(coeffs.size()) - 1;
    std::vector<double> poly_t(deg + 1, 0.0);
    std::vector<double> Tprev{1.0}, Tcur{0.0, 1.0};
    poly_t[0] += coeffs[0];
    if (deg >= 1)
        for (int i = 0; i < 2; ++i) poly_t[i] += coeffs[1] * Tcur[i];
    for (int k = 2; k <= deg; ++k) {
        std::vector<double> Tnew(k + 1, 0.0);
        for (size_t i = 0; i < Tcur.size(); ++i) Tnew[i + 1] += 2.0 * Tcur[i];
        for (size_t i = 0; i < Tprev.size(); ++i) Tnew[i] -= Tprev[i];
        for (int i = 0; i <= k; ++i) poly_t[i] += coeffs[k] * Tnew[i];
        Tprev = std::move(Tcur);
        Tcur = std::move(Tnew);
    }
    const double u0 = -(a + b) / (b - a);
    const double u1 = 2.0 / (b - a);
    std::vector<double> out(deg + 1, 0.0);
    std::vector<double> cur{1.0};
    for (int k = 0; k <= deg; ++k) {
        for (size_t i = 0; i < cur.size(); ++i) out[i] += poly_t[k] * cur[i];
        std::vector<double> nxt(cur.size() + 1, 0.0);
        for (size_t i = 0; i < cur.size(); ++i) {
            nxt[i] += u0 * cur[i];
            nxt[i + 1] += u1 * cur[i];
        }
        cur = std::move(nxt);
    }
    return out;
}

double polyval(const std::vector<double>& coeffs, double x)
{
    double v = 0.0;
    for (size_t i = coeffs.size(); i-- > 0;) v = v * x + coeffs[i];
    return v;
}

// Branch validation: small residual, q2 pole-free on [-1,1] (t-variable),
// positive ratio on the interval.
bool valid_branch(const ChebPadeResult& res, double scale_resid)
{
    if (!(res.resid <= 1e-10 * scale_resid)) return false;
    const int n = static_cast<int>(res.q.size()) - 1;
    std::vector<double> mono = cheb_to_monomial(res.q, -1.0, 1.0);
    while (mono.size() > 1 && mono.back() == 0.0) mono.pop_back();
    if (static_cast<int>(mono.size()) - 1 >= 1) {
        const int d = static_cast<int>(mono.size()) - 1;
        MatrixXd comp = MatrixXd::Zero(d, d);
        for (int i = 0; i < d; ++i) comp(i, d - 1) = -mono[i] / mono[d];
        for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
        Eigen::EigenSolver<MatrixXd> es(comp, false);
        for (int i = 0; i < d; ++i) {
            const auto z = es.eigenvalues()[i];
            if (std::abs(z.imag()) < 1e-7 && z.real() >= -1.0 - 1e-9 && z.real() <= 1.0 + 1e-9)
                return false;
        }
    }
    const int ncheck = 2001;
    const int mdeg = static_cast<int>(res.p.size()) - 1;
    for (int i = 0; i < ncheck; ++i) {
        const double t = -1.0 + 2.0 * i / (ncheck - 1);
        double pv = res.p[0], qv = res.q[0];
        double Tp = 1.0, Tc = t;
        for (int k = 1; k <= n; ++k) {
            if (k <= mdeg) pv += res.p[k] * Tc;
            qv += res.q[k] * Tc;
            const double Tn = 2.0 * t * Tc - Tp;
            Tp = Tc;
            Tc = Tn;
        }
        if (!(pv / qv > 0.0)) return false;
    }
    return true;
}

}  // namespace

double default_delta(int m)
{
    if (m < 1) throw std::invalid_argument("default_delta: m >= 1 required");
    return std::pow(10.0, -(5.0 + m) / 2.0);
}

double RationalApprox::evaluate(double x) const
{
    return polyval(c, x) / polyval(b, x);
}

double RationalApprox::evaluate_from_roots(double x) const
{
    double num = c.back(), den = b.back();
    for (double r : r1) num *= (x - r);
    for (double r : r2) den *= (x - r);
    return num / den;
}

RationalApprox clenshaw_lord(double beta_hat, int m, double delta)
{
    if (m < 1) throw std::invalid_argument("clenshaw_lord: m >= 1 required");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("clenshaw_lord: delta in (0,1) required");
    if (!(beta_hat > -1.0 && beta_hat < 1.0))
        throw std::invalid_argument("clenshaw_lord: beta_hat in (-1,1) required");

    RationalApprox ra;
    ra.m = m;
    ra.beta_hat = beta_hat;
    ra.delta = delta;

    if (std::abs(beta_hat) < 1e-12) {
        ra.integer_beta = true;
        ra.c = {1.0};
        ra.b = {1.0};
        ra.sup_err = 0.0;
        return ra;
    }

    const double fscale = std::pow(delta, -std::abs(beta_hat));
    ChebPadeResult res = chebpade_nonlinear(beta_hat, m, delta, nullptr);
    if (!valid_branch(res, fscale)) {
        // walk log10(delta) down from -1, halving the step on invalid branches
        const double target = std::log10(delta);
        double cur = -1.0;
        double step = -0.5;
        res = chebpade_nonlinear(beta_hat, m, std::pow(10.0, cur), nullptr);
        if (!valid_branch(res, std::pow(0.1, -std::abs(beta_hat))))
            throw std::runtime_error(
                "clenshaw_lord: no valid approximant at delta=0.1; degenerate "
                "configuration (reduce m or increase delta)");
        int halvings = 0;
        while (cur > target + 1e-12) {
            const double nxt = std::max(target, cur + step);
            ChebPadeResult trial =
                chebpade_nonlinear(beta_hat, m, std::pow(10.0, nxt), &res);
            if (valid_branch(trial, std::pow(std::pow(10.0, nxt), -std::abs(beta_hat)))) {
                res = std::move(trial);
                cur = nxt;
            } else {
                step *= 0.5;
                if (++halvings > 60)
                    throw std::runtime_error(
                        "clenshaw_lord: continuation failed to reach delta=" +
                        std::to_string(delta) + "; reduce m or increase delta");
            }
        }
    }

    std::vector<double> c = cheb_to_monomial(res.p, delta, 1.0);
    std::vector<double> b = cheb_to_monomial(res.q, delta, 1.0);
    const double s = c[m];
    if (s == 0.0) throw std::runtime_error("clenshaw_lord: vanishing leading coefficient");
    for (double& v : c) v /= s;
    for (double& v : b) v /= s;
    if (b[m + 1] == 0.0)
        throw std::runtime_error("clenshaw_lord: denominator degree dropped below m+1");
    ra.c = std::move(c);
    ra.b = std::move(b);

    // certified sup error on a Chebyshev-clustered grid
    const int ngrid = 10000;
    double se = 0.0;
    for (int i = 0; i < ngrid; ++i) {
        const double t = std::cos(std::numbers::pi * i / (ngrid - 1));
        const double x = 0.5 * (1.0 + delta) + 0.5 * (1.0 - delta) * t;
        se = std::max(se, std::abs(ra.evaluate(x) - std::pow(x, beta_hat)));
    }
    ra.sup_err = se;
    return ra;
}

std::vector<double> poly_roots(const std::vector<double>& coeffs)
{
    std::vector<double> a = coeffs;
    while (a.size() > 1 && a.back() == 0.0) a.pop_back();
    const int d = static_cast<int>(a.size()) - 1;
    if (d < 0 || a.back() == 0.0)
        throw std::invalid_argument("poly_roots: leading coefficient is zero");
    if (d == 0) return {};
    MatrixXd comp = MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) comp(i, d - 1) = -a[i] / a[d];
    for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
    Eigen::EigenSolver<MatrixXd> es(comp, false);
    std::vector<double> roots;
    roots.reserve(d);
    for (int i = 0; i < d; ++i) {
        const auto z = es.eigenvalues()[i];
        if (std::abs(z.imag()) > 1e-8 * (1.0 + std::abs(z.real())))
            throw std::runtime_error("poly_roots: genuinely complex root " +
                                     std::to_string(z.real()) + " + " +
                                     std::to_string(z.imag()) + "i");
        roots.push_back(z.real());
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

RationalApprox build_fractional_rational(double beta, int m, std::optional<double> delta)
{
    if (!(beta > 0.5))
        throw std::invalid_argument("build_fractional_rational: beta > 1/2 required");
    if (m < 1) throw std::invalid_argument("build_fractional_rational: m >= 1 required");
    const int m_beta = std::max(1, static_cast<int>(std::floor(beta + 1e-13)));
    const double beta_hat = beta - m_beta;
    const double d = delta.value_or(default_delta(m));

    RationalApprox ra = clenshaw_lord(beta_hat, m, d);
    ra.beta = beta;
    ra.m_beta = m_beta;
    if (ra.integer_beta) return ra;
    ra.r1 = poly_roots(ra.c);
    ra.r2 = poly_roots(ra.b);
    return ra;
}

namespace {
std::mutex g_cache_mutex;
std::map<std::tuple<long long, int, long long>, RationalApprox> g_cache;
}  // namespace

const RationalApprox& build_fractional_rational_cached(double beta, int m,
                                                       std::optional<double> delta)
{
    const int m_beta = std::max(1, static_cast<int>(std::floor(beta + 1e-13)));
    const double beta_hat = beta - m_beta;
    const double d = delta.value_or(default_delta(m));
    const auto key = std::make_tuple(std::llround(beta_hat * 1e12), m, std::llround(d * 1e12));
    {
        std::lock_guard<std::mutex> lock(g_cache_mutex);
        auto it = g_cache.find(key);
        if (it != g_cache.end()) return it->second;
    }
    RationalApprox ra = build_fractional_rational(beta, m, d);
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto [it, inserted] = g_cache.emplace(key, std::move(ra));
    return it->second;
}

}  // namespace fracspde
