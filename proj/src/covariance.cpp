#include "fracspde/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fracspde {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double MaternParams::range() const { return std::sqrt(8.0 * nu) / kappa; }

double MaternParams::tau() const
{
    const double b = beta();
    const double t2 = std::tgamma(nu) /
                      (phi2 * std::tgamma(2.0 * b) * std::pow(4.0 * std::numbers::pi, 0.5 * d) *
                       std::pow(kappa, 2.0 * nu));
    return std::sqrt(t2);
}

void MaternParams::validate() const
{
    if (!(kappa > 0.0) || !(phi2 > 0.0) || !(nu > 0.0) || sigma2 < 0.0 || d < 1 || d > 3)
        throw std::invalid_argument("MaternParams: positive kappa, phi2, nu required");
}

SpdeParams param_convert(const MaternParams& p)
{
    p.validate();
    return {p.beta(), p.tau()};
}

MaternParams param_convert_inverse(double beta, double tau, double kappa, int d, double sigma2)
{
    if (!(beta > 0.25 * d) || !(tau > 0.0) || !(kappa > 0.0))
        throw std::invalid_argument("param_convert_inverse: invalid parameters");
    MaternParams p;
    p.kappa = kappa;
    p.d = d;
    p.nu = 2.0 * beta - 0.5 * d;
    p.sigma2 = sigma2;
    p.phi2 = std::tgamma(p.nu) /
             (tau * tau * std::tgamma(2.0 * beta) * std::pow(4.0 * std::numbers::pi, 0.5 * d) *
              std::pow(kappa, 2.0 * p.nu));
    return p;
}

double matern_cov(double h, const MaternParams& params)
{
    params.validate();
    const double z = params.kappa * h;
    if (z <= 0.0) return params.phi2;
    // guard the K_nu overflow range; the limit is phi2 as h -> 0
    if (z < 1e-8 && params.nu > 2.0) return params.phi2;
    return params.phi2 * std::pow(2.0, 1.0 - params.nu) / std::tgamma(params.nu) *
           std::pow(z, params.nu) * bessel_k(params.nu, z);
}

namespace {

constexpr double kFirstJ0Zero = 2.404825557695773;

// McMahon approximation of the k-th zero of J0; panel boundaries only.
double j0_zero(int k)
{
    if (k == 1) return kFirstJ0Zero;
    const double b = (k - 0.25) * std::numbers::pi;
    return b + 0.125 / b;
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole, double tol,
                            int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol)
{
    if (!(b > a)) return 0.0;
    const double fa = f(a), fm = f(0.5 * (a + b)), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 28);
}

}  // namespace

SpectralModel::SpectralModel(const MaternParams& params, std::function<double(double)> symbol)
    : kappa_(params.kappa), symbol_(std::move(symbol))
{
    params.validate();
    const double tau = params.tau();
    const double tt = std::pow(params.kappa, 2.0 * params.beta()) * tau;
    tau_tilde2_ = tt * tt;
}

double SpectralModel::spectral_density(double omega) const
{
    const double x = 1.0 + omega * omega / (kappa_ * kappa_);
    const double r = symbol_(x);
    const double c = 1.0 / (4.0 * std::numbers::pi * std::numbers::pi);
    return c / tau_tilde2_ * r * r;
}

double SpectralModel::covariance(double h, double tol) const
{
    auto base = [this](double w) { return 2.0 * std::numbers::pi * w * spectral_density(w); };

    // cut radius: beyond it the (decay >= w^-3) tail bound is below tol/100
    double wcut = 1000.0 * kappa_;
    while (base(wcut) * wcut * 0.5 > 0.01 * tol && wcut < 1e12) wcut *= 2.0;

    if (h <= 0.0 || kFirstJ0Zero / h >= wcut) {
        auto g = [&](double w) {
            return h > 0.0 ? base(w) * std::cyl_bessel_j(0.0, w * h) : base(w);
        };
        // resolve the kappa-scale knee explicitly
        double acc = 0.0;
        double a = 0.0;
        for (double b = kappa_; b < wcut; b *= 4.0) {
            acc += adaptive_simpson(g, a, b, 0.05 * tol);
            a = b;
        }
        acc += adaptive_simpson(g, a, wcut, 0.05 * tol);
        return acc;
    }

    auto g = [&](double w) { return base(w) * std::cyl_bessel_j(0.0, w * h); };
    double acc = adaptive_simpson(g, 0.0, kFirstJ0Zero / h, 0.05 * tol);

    // alternating half-wave panels with iterated Aitken acceleration
    std::vector<double> partial;
    partial.reserve(256);
    double prev_accel = std::numeric_limits<double>::quiet_NaN();
    double result = acc;
    for (int k = 1; k <= 4000; ++k) {
        const double za = j0_zero(k) / h;
        const double zb = j0_zero(k + 1) / h;
        acc += adaptive_simpson(g, za, zb, 0.002 * tol);
        partial.push_back(acc);
        if (za > wcut) {
            result = acc;
            break;
        }
        if (partial.size() >= 5) {
            // two Aitken sweeps over the tail of the partial sums
            std::vector<double> s(partial.end() - 5, partial.end());
            for (int sweep = 0; sweep < 2; ++sweep) {
                std::vector<double> s2;
                for (size_t i = 0; i + 2 < s.size(); ++i) {
                    const double d2 = s[i + 2] - 2.0 * s[i + 1] + s[i];
                    if (std::abs(d2) < 1e-300)
                        s2.push_back(s[i + 2]);
                    else
                        s2.push_back(s[i + 2] - (s[i + 2] - s[i + 1]) * (s[i + 2] - s[i + 1]) / d2);
                }
                s = std::move(s2);
            }
            const double accel = s.back();
            result = accel;
            if (std::isfinite(prev_accel) && std::abs(accel - prev_accel) < 0.1 * tol) break;
            prev_accel = accel;
        }
    }
    return result;
}

double rational_spectral_cov(double h, const MaternParams& params, const RationalApprox& ra,
                             double tol)
{
    const int m = ra.m;
    const int mb = ra.m_beta;
    std::function<double(double)> symbol;
    if (ra.integer_beta) {
        symbol = [mb](double x) { return std::pow(x, -static_cast<double>(mb)); };
    } else {
        if (mb < 1) throw std::invalid_argument("rational_spectral_cov: non-integrable spectrum");
        auto c = ra.c;
        auto b = ra.b;
        symbol = [c, b, m, mb](double x) {
            double num = 0.0, den = 0.0;
            for (int i = 0; i <= m; ++i) num += c[i] * std::pow(x, m - i);
            for (int j = 0; j <= m + 1; ++j) den += b[j] * std::pow(x, m + mb - j);
            return num / den;
        };
    }
    return SpectralModel(params, std::move(symbol)).covariance(h, tol);
}

double quadrature_step_for_nodes(double beta_residual, int K_target)
{
    if (!(beta_residual > 0.0 && beta_residual < 1.0))
        throw std::invalid_argument("quadrature step: residual exponent must be in (0,1)");
    const double a = std::numbers::pi * std::numbers::pi / (4.0 * beta_residual);
    const double b = std::numbers::pi * std::numbers::pi / (4.0 * (1.0 - beta_residual));
    auto nodes = [&](double k) {
        return static_cast<int>(std::ceil(a / (k * k)) + std::ceil(b / (k * k))) + 1;
    };
    double lo = 1e-3, hi = 50.0;
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (nodes(mid) > K_target)
            lo = mid;
        else
            hi = mid;
    }
    if (nodes(hi) != K_target)
        throw std::runtime_error("quadrature step: cannot hit requested node count");
    return hi;
}

SpectralModel quadrature_spectral_model(const MaternParams& params, double k_step)
{
    const double beta = params.beta();
    const int ip = static_cast<int>(std::floor(beta + 1e-13));
    const double br = beta - ip;
    if (std::abs(br) < 1e-13) {
        return SpectralModel(params,
                             [ip](double x) { return std::pow(x, -static_cast<double>(ip)); });
    }
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const int Km = static_cast<int>(std::ceil(pi2 / (4.0 * br * k_step * k_step)));
    const int Kp = static_cast<int>(std::ceil(pi2 / (4.0 * (1.0 - br) * k_step * k_step)));
    const double w = 2.0 * k_step * std::sin(std::numbers::pi * br) / std::numbers::pi;
    auto symbol = [ip, br, Km, Kp, w, k_step](double x) {
        double s = 0.0;
        for (int j = -Km; j <= Kp; ++j) {
            const double y = j * k_step;
            s += std::exp(2.0 * br * y) / (1.0 + std::exp(2.0 * y) * x);
        }
        return w * s * std::pow(x, -static_cast<double>(ip));
    };
    return SpectralModel(params, symbol);
}

std::pair<double, double> cov_errors(const std::function<double(double)>& approx,
                                     const std::function<double(double)>& exact, double hmax)
{
    const int n = 2000;
    double num = 0.0, den = 0.0, linf = 0.0;
    for (int i = 0; i < n; ++i) {
        const double h = hmax * i / (n - 1);
        const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        const double ce = exact(h);
        const double diff = ce - approx(h);
        num += w * diff * diff;
        den += w * ce * ce;
        linf = std::max(linf, std::abs(diff));
    }
    return {std::sqrt(num / den), linf};
}

VectorXd generalized_eigenvalues(const FemOperators& ops, int max_n)
{
    const int n = ops.n();
    if (n > max_n)
        throw std::invalid_argument("generalized_eigenvalues: mesh too large for dense oracle (" +
                                    std::to_string(n) + " > " + std::to_string(max_n) + ")");
    VectorXd dinv = ops.C_lumped.cwiseSqrt().cwiseInverse();
    MatrixXd B = dinv.asDiagonal() * MatrixXd(ops.L) * dinv.asDiagonal();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (B + B.transpose()));
    return es.eigenvalues();
}

MatrixXd fractional_dense_oracle(const FemOperators& ops, double beta, double tau, int max_n)
{
    const int n = ops.n();
    if (n > max_n)
        throw std::invalid_argument("fractional_dense_oracle: mesh too large (" +
                                    std::to_string(n) + " > " + std::to_string(max_n) + ")");
    if (!(tau > 0.0)) throw std::invalid_argument("fractional_dense_oracle: tau > 0 required");
    VectorXd dinv = ops.C_lumped.cwiseSqrt().cwiseInverse();
    MatrixXd B = dinv.asDiagonal() * MatrixXd(ops.L) * dinv.asDiagonal();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (B + B.transpose()));
    const double tau_eff = tau * std::pow(ops.scale, beta);
    MatrixXd V = dinv.asDiagonal() * es.eigenvectors();
    VectorXd diag(n);
    for (int i = 0; i < n; ++i)
        diag[i] = 1.0 / (tau_eff * tau_eff * std::pow(es.eigenvalues()[i], 2.0 * beta));
    return V * diag.asDiagonal() * V.transpose();
}

}  // namespace fracspde
