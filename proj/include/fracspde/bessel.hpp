#pragma once

namespace fracspde {

// Modified Bessel function of the second kind K_nu(x) for real order nu >= 0
// and x > 0. Temme's series for x <= 2, Thompson-Barnett continued fraction
// for x > 2, upward recurrence in the order.
double bessel_k(double nu, double x);

}  // namespace fracspde
