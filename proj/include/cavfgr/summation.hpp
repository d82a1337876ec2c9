// summation.hpp: compensated (Neumaier) accumulators for per-mode sums.

#pragma once

#include <cmath>
#include <complex>

namespace cavfgr {

class NeumaierSum {
public:
    constexpr NeumaierSum() = default;

    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    NeumaierSum& operator+=(double x) noexcept {
        add(x);
        return *this;
    }

    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class ComplexNeumaierSum {
public:
    void add(std::complex<double> z) noexcept {
        re_.add(z.real());
        im_.add(z.imag());
    }

    ComplexNeumaierSum& operator+=(std::complex<double> z) noexcept {
        add(z);
        return *this;
    }

    [[nodiscard]] std::complex<double> value() const noexcept { return {re_.value(), im_.value()}; }

private:
    NeumaierSum re_;
    NeumaierSum im_;
};

}  // namespace cavfgr
