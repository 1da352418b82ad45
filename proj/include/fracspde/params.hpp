#pragma once

#include <stdexcept>

namespace fracspde {

// Matern parameters (kappa, phi2, nu, sigma2) in d spatial dimensions, with
// conversions to the SPDE pair (beta, tau):
//   2 beta = nu + d/2
//   phi2 = Gamma(nu) / (tau^2 Gamma(2 beta) (4 pi)^{d/2} kappa^{2 nu})
struct MaternParams {
    double kappa = 1.0;
    double phi2 = 1.0;
    double nu = 0.5;
    double sigma2 = 0.0;
    int d = 2;

    double beta() const { return 0.5 * nu + 0.25 * d; }
    double range() const;  // practical correlation range sqrt(8 nu)/kappa
    double tau() const;

    void validate() const;
};

// (beta, tau) for given (kappa, phi2, nu, d)
struct SpdeParams {
    double beta = 0.0;
    double tau = 0.0;
};

SpdeParams param_convert(const MaternParams& p);
// inverse: recover (nu, phi2) from (beta, tau) at fixed kappa and d
MaternParams param_convert_inverse(double beta, double tau, double kappa, int d,
                                   double sigma2 = 0.0);

}  // namespace fracspde
