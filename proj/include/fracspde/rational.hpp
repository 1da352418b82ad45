#pragma once

#include <optional>
#include <vector>

namespace fracspde {

// Degree-m rational approximation r = q1/q2 of x^(beta - m_beta) on [delta, 1],
// with q1 of degree m and q2 of degree m+1, computed by the Clenshaw-Lord
// Chebyshev-Pade construction and normalized so that c[m] = 1.
//
// For integer beta the function x^(beta-m_beta) is identically one and the
// approximation degenerates to q1 = q2 = 1 with no roots; integer_beta marks
// this case.
struct RationalApprox {
    double beta = 0.0;
    int m = 0;
    int m_beta = 1;
    double beta_hat = 0.0;
    double delta = 0.0;
    bool integer_beta = false;
    std::vector<double> c;   // q1 monomial coefficients, ascending, size m+1
    std::vector<double> b;   // q2 monomial coefficients, ascending, size m+2
    std::vector<double> r1;  // roots of q1 (size m)
    std::vector<double> r2;  // roots of q2 (size m+1)
    double sup_err = 0.0;    // grid max of |x^beta_hat - q1/q2| on [delta, 1]

    double evaluate(double x) const;             // q1(x)/q2(x)
    double evaluate_from_roots(double x) const;  // same, via root products
};

// delta = 10^{-(5+m)/2}
double default_delta(int m);

// Coefficients of the [m/m+1] Chebyshev-Pade approximant of x^beta_hat on
// [delta, 1] (no roots computed). Throws on degenerate systems.
RationalApprox clenshaw_lord(double beta_hat, int m, double delta);

// All real roots of a polynomial given by ascending monomial coefficients.
// Roots with small imaginary part (relative tolerance 1e-8) are truncated to
// real; genuinely complex roots are an error.
std::vector<double> poly_roots(const std::vector<double>& coeffs);

// Complete approximation of x^{-beta}: splits beta = beta_hat + m_beta,
// runs clenshaw_lord, extracts roots and certifies the sup error.
RationalApprox build_fractional_rational(double beta, int m,
                                         std::optional<double> delta = std::nullopt);

// Same, backed by a process-wide cache keyed on (beta_hat, m, delta) rounded
// to 1e-12. Safe for concurrent use.
const RationalApprox& build_fractional_rational_cached(double beta, int m,
                                                       std::optional<double> delta = std::nullopt);

}  // namespace fracspde
