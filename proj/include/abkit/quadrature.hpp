#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace abkit::numerics {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
};

struct QuadOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    std::size_t max_intervals = 2000;
};

using RealFn = std::function<double(double)>;

// Globally adaptive 7-point Gauss / 15-point Kronrod quadrature. The interval
// with the largest error estimate is bisected until
//   error <= max(rel_tol * |value|, abs_tol)
// or the estimate reaches the rounding floor of the integrand. Reversed limits
// flip the sign. Throws NumericError (with the best estimate) when
// max_intervals is exhausted or the integrand is not finite.
QuadratureResult adaptive_quad(const RealFn& f, double a, double b, const QuadOptions& opts = {});
QuadratureResult adaptive_quad(const RealFn& f, double a, double b, double rel_tol);

// Single 15-point Kronrod panel; error is |K15 - G7|, unscaled.
QuadratureResult kronrod15(const RealFn& f, double a, double b);

// Fixed-order pairwise summation so results do not depend on how the
// terms were produced.
double pairwise_sum(std::span<const double> terms);

}  // namespace abkit::numerics
