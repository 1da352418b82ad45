#include "fracspde/bessel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fracspde {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Taylor coefficients of 1/Gamma(1+x) around 0.
constexpr double kD1 = 0.5772156649015328606065;
constexpr double kD2 = -0.655878071520253881077;
constexpr double kD3 = -0.042002635034095235529;
constexpr double kD4 = 0.1665386113822914895017;
constexpr double kD5 = -0.04219773455554433674821;
constexpr double kD6 = -0.009621971527876973562115;
constexpr double kD7 = 0.007218943246663099542395;
constexpr double kD8 = -0.001165167591859065112114;
constexpr double kD9 = -0.0002152416741149509728157;

// gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu), gam2 = the average; the
// series branch avoids cancellation near mu = 0.
void temme_gammas(double mu, double& gam1, double& gam2)
{
    if (std::abs(mu) <= 0.05) {
        const double m2 = mu * mu;
        gam1 = -(kD1 + m2 * (kD3 + m2 * (kD5 + m2 * (kD7 + m2 * kD9))));
        gam2 = 1.0 + m2 * (kD2 + m2 * (kD4 + m2 * (kD6 + m2 * kD8)));
    } else {
        const double gp = 1.0 / std::tgamma(1.0 + mu);
        const double gm = 1.0 / std::tgamma(1.0 - mu);
        gam1 = (gm - gp) / (2.0 * mu);
        gam2 = 0.5 * (gm + gp);
    }
}

// K_mu(x) and K_{mu+1}(x) for |mu| <= 1/2, 0 < x <= 2 (Temme 1975).
void bessel_k_temme(double mu, double x, double& kmu, double& kmu1)
{
    const double x1 = 0.5 * x;
    const double d = -std::log(x1);
    const double e = mu * d;
    const double pimu = std::numbers::pi * mu;
    const double fact = std::abs(pimu) < 1e-15 ? 1.0 : pimu / std::sin(pimu);
    const double fact2 = std::abs(e) < 1e-15 ? 1.0 : std::sinh(e) / e;
    double gam1, gam2;
    temme_gammas(mu, gam1, gam2);
    const double gampl = gam2 - mu * gam1;  // 1/Gamma(1+mu)
    const double gammi = gam2 + mu * gam1;  // 1/Gamma(1-mu)
    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    const double ee = std::exp(e);
    double p = 0.5 * ee / gampl;
    double q = 0.5 / (ee * gammi);
    double c = 1.0;
    const double dd = x1 * x1;
    double sum = ff;
    double sum1 = p;
    const double mu2 = mu * mu;
    for (int i = 1; i <= 500; ++i) {
        ff = (i * ff + p + q) / (i * i - mu2);
        c *= dd / i;
        p /= (i - mu);
        q /= (i + mu);
        const double del = c * ff;
        sum += del;
        const double del1 = c * (p - i * ff);
        sum1 += del1;
        if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    kmu = sum;
    kmu1 = sum1 * 2.0 / x;
}

// K_mu(x) and K_{mu+1}(x) for |mu| <= 1/2, x > 2 via Steed's continued
// fraction CF2 (Thompson-Barnett).
void bessel_k_cf2(double mu, double x, double& kmu, double& kmu1)
{
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25 - mu * mu;
    double q = a1, c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i <= 5000; ++i) {
        a -= 2 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < kEps) break;
    }
    h = a1 * h;
    kmu = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
    kmu1 = kmu * (mu + x + 0.5 - h) / x;
}

}  // namespace

double bessel_k(double nu, double x)
{
    if (!(x > 0.0)) throw std::invalid_argument("bessel_k: x > 0 required");
    if (nu < 0.0) nu = -nu;  // K_{-nu} = K_nu
    const int nl = static_cast<int>(nu + 0.5);
    const double mu = nu - nl;  // in [-1/2, 1/2]
    double kmu, kmu1;
    if (x <= 2.0)
        bessel_k_temme(mu, x, kmu, kmu1);
    else
        bessel_k_cf2(mu, x, kmu, kmu1);
    double km = kmu, kp = kmu1;
    for (int i = 1; i <= nl; ++i) {
        const double knext = km + 2.0 * (mu + i) / x * kp;
        km = kp;
        kp = knext;
    }
    return km;
}

}  // namespace fracspde
