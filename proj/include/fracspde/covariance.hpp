#pragma once

#include "fracspde/bessel.hpp"
#include "fracspde/fem.hpp"
#include "fracspde/params.hpp"
#include "fracspde/rational.hpp"

#include <Eigen/Dense>
#include <functional>
#include <utility>

namespace fracspde {

// Exact Matern covariance phi2 * 2^{1-nu}/Gamma(nu) (kappa h)^nu K_nu(kappa h),
// with the h -> 0 limit phi2.
double matern_cov(double h, const MaternParams& params);

// Spectral density of the non-discretized approximation on R^2 and the
// covariance it induces. `symbol` approximates x^{-beta} on the normalized
// spectrum x = 1 + ||k||^2 / kappa^2.
class SpectralModel {
public:
    SpectralModel(const MaternParams& params, std::function<double(double)> symbol);

    double spectral_density(double omega) const;
    // isotropic inverse Fourier transform by adaptive Hankel quadrature
    double covariance(double h, double tol = 1e-8) const;

private:
    double kappa_;
    double tau_tilde2_;
    std::function<double(double)> symbol_;
};

// C_R(h) for the rational approximation of the params' beta.
double rational_spectral_cov(double h, const MaternParams& params, const RationalApprox& ra,
                             double tol = 1e-8);

// Spectral model of the Appendix-C sinc quadrature with step k (the residual
// fractional part of beta is treated by quadrature, integer part exactly).
SpectralModel quadrature_spectral_model(const MaternParams& params, double k_step);
// choose the step so that K^- + K^+ + 1 == K_target
double quadrature_step_for_nodes(double beta_residual, int K_target);

// (normalized L2, Linf) of approx vs exact on [0, hmax], 2000-point trapezoid.
std::pair<double, double> cov_errors(const std::function<double(double)>& approx,
                                     const std::function<double(double)>& exact,
                                     double hmax);

// Dense covariance of tau * L^beta u = W on the mesh: V diag((tau_eff^2
// lambda^{2 beta})^{-1}) V^T from the generalized eigendecomposition of
// (L, C_lumped), with tau_eff = tau * scale^beta. Guarded by max_n.
Eigen::MatrixXd fractional_dense_oracle(const FemOperators& ops, double beta, double tau,
                                        int max_n = 500);
// eigenvalues of the (L, C_lumped) pencil, ascending
Eigen::VectorXd generalized_eigenvalues(const FemOperators& ops, int max_n = 500);

}  // namespace fracspde
