#pragma once

// Test functions and cutoffs: the triangle h and its Fejer transform, the
// rescaled h_X, compactly supported bumps, numerical Fourier transforms and
// the two-triangle kernel k.

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "avgrank/quadrature.hpp"

namespace avgrank {

enum class Smoothness { triangular, c3, c_infinity };

std::string to_string(Smoothness s);

/// A nonnegative function vanishing outside [lo, hi].
class SmoothWeight {
public:
    SmoothWeight(std::string name, double lo, double hi, Smoothness smoothness, std::function<double(double)> body,
                 std::vector<double> breakpoints = {});

    double operator()(double x) const { return (x <= lo_ || x >= hi_) ? 0.0 : body_(x); }

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    Smoothness smoothness() const { return smoothness_; }
    const std::string& name() const { return name_; }
    /// Interior points where the weight is not smooth or changes definition.
    const std::vector<double>& breakpoints() const { return breakpoints_; }

private:
    std::string name_;
    double lo_, hi_;
    Smoothness smoothness_;
    std::function<double(double)> body_;
    std::vector<double> breakpoints_;
};

/// sin(pi t) / (pi t), with a Taylor branch for |t| < 1e-4.
double sinc_pi(double t);

/// h(t) = max(1 - |t|, 0).
double h(double t);
/// (sin(pi t) / (pi t))^2, the transform of h under f^(t) = int e^{-2 pi i x t} f(x) dx.
double h_hat(double t);
/// h(t / log X).
double h_X(double t, double X);

/// h viewed as a weight on [-1, 1].
SmoothWeight triangle_weight();

/// exp(-1 / (1 - u^2)) with u the affine image of [lo, hi] on [-1, 1].
SmoothWeight bump(double lo, double hi);

/// x -> bump(lo, hi)(|x|): even, supported on [-hi, -lo] and [lo, hi], zero
/// near the origin. The default w1 and w2.
SmoothWeight even_bump(double lo = 0.5, double hi = 1.0);

/// (1 - u^2)^4 on [lo, hi]: three continuous derivatives and no more.
SmoothWeight c3_bump(double lo, double hi);

/// C-infinity weight on [1/2, 5/2], identically 1 on [1, 2].
SmoothWeight plateau();

/// Twist cutoff: bump on [1, 2] for delta = +1 and on [-2, -1] for delta = -1.
SmoothWeight twist_weight(int delta);

class QuadratureFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// int e^{-2 pi i x t} w(x) dx over the support. Throws QuadratureFailure if
/// the error estimate misses the target.
std::complex<double> fourier_numeric(const SmoothWeight& weight, double t, QuadratureOptions opts = {});

/// int w(x) dx.
double integral(const SmoothWeight& weight, QuadratureOptions opts = {});

/// k(t) = [X h(t) - (X - 1) h(t / (1 - 1/X))] / log^2 X, evaluated piecewise
/// so the plateau value 1/log^2 X is exact.
double kernel_k(double t, double X);

/// Closed-form transform of k, written as a product of sines to avoid the
/// cancellation in the difference of squares.
double kernel_k_hat(double t, double X);

/// k(., X) as a weight on [-1, 1] with breakpoints at 0 and +-(1 - 1/X).
SmoothWeight kernel_k_weight(double X);

}  // namespace avgrank
