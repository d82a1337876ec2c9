// faddeeva.hpp: the Faddeeva function w(z) = exp(-z^2) erfc(-iz) and the
// complex error function built on it.

#pragma once

#include <complex>

namespace cavfgr {

/// w(z) for any complex z. Relative accuracy ~1e-13 for |z| <= 10; beyond that
/// the continued fraction converges faster, not slower.
[[nodiscard]] std::complex<double> faddeeva_w(std::complex<double> z);

/// erf(z) = 1 - exp(-z^2) w(iz).
[[nodiscard]] std::complex<double> erf(std::complex<double> z);

/// exp(-b^2) * Re erf(x - i b) for x >= 0, evaluated without forming exp(+b^2).
[[nodiscard]] double gaussian_damped_re_erf(double x, double b);

}  // namespace cavfgr
