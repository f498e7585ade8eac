#include "abkit/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "abkit/errors.hpp"

namespace abkit::numerics {

namespace {

constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for xgk[1], xgk[3], xgk[5] and the centre.
constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double eps = std::numeric_limits<double>::epsilon();

struct Panel {
    double a;
    double b;
    double value;
    double error;
    double resabs;
};

double checked(const RealFn& f, double x) {
    const double y = f(x);
    if (!std::isfinite(y)) throw NumericError("adaptive_quad: integrand not finite at x = " + std::to_string(x));
    return y;
}

Panel gk15(const RealFn& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = checked(f, centre);
    double resk = fc * wgk[7];
    double resg = fc * wg[3];
    double resabs = std::abs(resk);
    std::array<double, 7> f1{}, f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * xgk[j];
        f1[j] = checked(f, centre - dx);
        f2[j] = checked(f, centre + dx);
        const double s = f1[j] + f2[j];
        resk += wgk[j] * s;
        resabs += wgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) resg += wg[j / 2] * s;
    }
    const double mean = 0.5 * resk;
    double resasc = wgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) resasc += wgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

    const double ah = std::abs(half);
    Panel p{a, b, resk * half, std::abs((resk - resg) * half), resabs * ah};
    resasc *= ah;
    if (resasc != 0.0 && p.error != 0.0) p.error = resasc * std::min(1.0, std::pow(200.0 * p.error / resasc, 1.5));
    if (p.resabs > std::numeric_limits<double>::min() / (50.0 * eps))
        p.error = std::max(50.0 * eps * p.resabs, p.error);
    return p;
}

struct ByError {
    bool operator()(const Panel& l, const Panel& r) const { return l.error < r.error; }
};

}  // namespace

QuadratureResult kronrod15(const RealFn& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double resk = f(centre) * wgk[7];
    double resg = f(centre) * wg[3];
    for (int j = 0; j < 7; ++j) {
        const double s = f(centre - half * xgk[j]) + f(centre + half * xgk[j]);
        resk += wgk[j] * s;
        if (j % 2 == 1) resg += wg[j / 2] * s;
    }
    return {resk * half, std::abs((resk - resg) * half), 15};
}

QuadratureResult adaptive_quad(const RealFn& f, double a, double b, double rel_tol) {
    QuadOptions opts;
    opts.rel_tol = rel_tol;
    return adaptive_quad(f, a, b, opts);
}

QuadratureResult adaptive_quad(const RealFn& f, double a, double b, const QuadOptions& opts) {
    if (!(opts.rel_tol > 0.0) && !(opts.abs_tol > 0.0))
        throw InvalidInput("adaptive_quad: a positive tolerance is required");
    if (!std::isfinite(a) || !std::isfinite(b)) throw InvalidInput("adaptive_quad: limits must be finite");
    if (a == b) return {0.0, 0.0, 0};
    if (a > b) {
        auto r = adaptive_quad(f, b, a, opts);
        r.value = -r.value;
        return r;
    }

    std::priority_queue<Panel, std::vector<Panel>, ByError> heap;
    heap.push(gk15(f, a, b));
    std::size_t evaluations = 15;
    double total = heap.top().value;
    double error = heap.top().error;

    auto converged = [&] {
        return error <= std::max(opts.rel_tol * std::abs(total), opts.abs_tol);
    };

    while (!converged()) {
        if (heap.size() >= opts.max_intervals)
            throw NumericError("adaptive_quad: subdivision limit reached (error estimate " +
                                   std::to_string(error) + ")",
                               total);
        Panel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        // Interval too small to split: the remaining error is rounding.
        if (!(mid > worst.a && mid < worst.b) ||
            (worst.b - worst.a) < 100.0 * eps * std::max(std::abs(worst.a), std::abs(worst.b)))
            break;
        heap.pop();
        const Panel left = gk15(f, worst.a, mid);
        const Panel right = gk15(f, mid, worst.b);
        evaluations += 30;
        heap.push(left);
        heap.push(right);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        // The panel whose estimate sits at its rounding floor cannot improve.
        if (heap.top().error <= 50.0 * eps * heap.top().resabs * 1.0000001) break;
    }

    // Re-sum from scratch to avoid drift in the running totals.
    std::vector<double> values, errors;
    values.reserve(heap.size());
    errors.reserve(heap.size());
    while (!heap.empty()) {
        values.push_back(heap.top().value);
        errors.push_back(heap.top().error);
        heap.pop();
    }
    return {pairwise_sum(values), pairwise_sum(errors), evaluations};
}

double pairwise_sum(std::span<const double> terms) {
    if (terms.size() <= 8) {
        double s = 0.0;
        for (double t : terms) s += t;
        return s;
    }
    const std::size_t half = terms.size() / 2;
    return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

}  // namespace abkit::numerics
