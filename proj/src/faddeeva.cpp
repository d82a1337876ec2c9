// Poppe & Wijers' algorithm: a power series for erf inside a small ellipse
// around the origin, the Laplace continued fraction (with Gautschi's
// convergent acceleration near the ellipse) everywhere else in the first
// quadrant, and reflection for the other quadrants.

#include "cavfgr/faddeeva.hpp"

#include <cmath>

namespace cavfgr {

namespace {

constexpr double kTwoOverSqrtPi = 1.12837916709551257388;

}  // namespace

std::complex<double> faddeeva_w(std::complex<double> z) {
    const double x = z.real();
    const double y = z.imag();
    const double xabs = std::abs(x);
    const double yabs = std::abs(y);
    const double xs = xabs / 6.3;
    const double ys = yabs / 4.4;
    double qrho = xs * xs + ys * ys;
    const double xquad = xabs * xabs - yabs * yabs;
    const double yquad = 2.0 * xabs * yabs;

    double u = 0.0;
    double v = 0.0;
    double u2 = 0.0;
    double v2 = 0.0;
    const bool series = qrho < 0.085264;

    if (series) {
        qrho = (1.0 - 0.85 * ys) * std::sqrt(qrho);
        const int n = static_cast<int>(std::lround(6.0 + 72.0 * qrho));
        int j = 2 * n + 1;
        double xsum = 1.0 / j;
        double ysum = 0.0;
        for (int i = n; i >= 1; --i) {
            j -= 2;
            const double xaux = (xsum * xquad - ysum * yquad) / i;
            ysum = (xsum * yquad + ysum * xquad) / i;
            xsum = xaux + 1.0 / j;
        }
        const double u1 = -kTwoOverSqrtPi * (xsum * yabs + ysum * xabs) + 1.0;
        const double v1 = kTwoOverSqrtPi * (xsum * xabs - ysum * yabs);
        const double daux = std::exp(-xquad);
        u2 = daux * std::cos(yquad);
        v2 = -daux * std::sin(yquad);
        u = u1 * u2 - v1 * v2;
        v = u1 * v2 + v1 * u2;
    } else {
        double h = 0.0;
        int kapn = 0;
        int nu = 0;
        if (qrho > 1.0) {
            qrho = std::sqrt(qrho);
            nu = static_cast<int>(3.0 + 1442.0 / (26.0 * qrho + 77.0));
        } else {
            qrho = (1.0 - ys) * std::sqrt(1.0 - qrho);
            h = 1.88 * qrho;
            kapn = static_cast<int>(std::lround(7.0 + 34.0 * qrho));
            nu = static_cast<int>(std::lround(16.0 + 26.0 * qrho));
        }
        const double h2 = 2.0 * h;
        const bool accelerate = h > 0.0;
        double qlambda = accelerate ? std::pow(h2, kapn) : 0.0;

        double rx = 0.0, ry = 0.0, sx = 0.0, sy = 0.0;
        for (int n = nu; n >= 0; --n) {
            const double np1 = n + 1.0;
            double tx = yabs + h + np1 * rx;
            const double ty = xabs - np1 * ry;
            const double c = 0.5 / (tx * tx + ty * ty);
            rx = c * tx;
            ry = c * ty;
            if (accelerate && n <= kapn) {
                tx = qlambda + sx;
                sx = rx * tx - ry * sy;
                sy = ry * tx + rx * sy;
                qlambda /= h2;
            }
        }
        if (h == 0.0) {
            u = kTwoOverSqrtPi * rx;
            v = kTwoOverSqrtPi * ry;
        } else {
            u = kTwoOverSqrtPi * sx;
            v = kTwoOverSqrtPi * sy;
        }
        if (yabs == 0.0) u = std::exp(-xabs * xabs);
    }

    if (y < 0.0) {
        // w(z) = 2 exp(-z^2) - w(-z)
        if (series) {
            u2 *= 2.0;
            v2 *= 2.0;
        } else {
            const double w1 = 2.0 * std::exp(-xquad);
            u2 = w1 * std::cos(yquad);
            v2 = -w1 * std::sin(yquad);
        }
        u = u2 - u;
        v = v2 - v;
        if (x > 0.0) v = -v;
    } else if (x < 0.0) {
        v = -v;
    }
    return {u, v};
}

std::complex<double> erf(std::complex<double> z) {
    const std::complex<double> iz{-z.imag(), z.real()};
    // Upper half plane in iz keeps w bounded; use erf(-z) = -erf(z) otherwise.
    if (iz.imag() < 0.0) return -erf(-z);
    return 1.0 - std::exp(-z * z) * faddeeva_w(iz);
}

double gaussian_damped_re_erf(double x, double b) {
    // exp(-b^2) erf(x - ib) = exp(-b^2) - exp(-x^2 + 2ixb) w(b + ix)
    const std::complex<double> phase = std::exp(std::complex<double>(-x * x, 2.0 * x * b));
    return std::exp(-b * b) - (phase * faddeeva_w({b, x})).real();
}

}  // namespace cavfgr
