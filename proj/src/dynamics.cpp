#include "abkit/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "abkit/errors.hpp"

namespace abkit::dynamics {

using numerics::QuadOptions;
using numerics::adaptive_quad;

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

void require_finite_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput(std::string(what) + " must be positive and finite");
}

}  // namespace

void TimeDepForceSpec::validate() const {
    require_finite_positive(m, "mass");
    require_finite_positive(c, "speed of light");
    if (!std::isfinite(q) || !std::isfinite(x0) || !std::isfinite(v0))
        throw InvalidInput("time-dependent spec: q, x0 and v0 must be finite");
}

TimeDepIntegrals time_dep_integrals(const TimeDepForceSpec& spec, double t, const QuadOptions& opts) {
    if (t < 0.0) throw InvalidInput("time_dep_integrals: t must be non-negative");
    TimeDepIntegrals out;
    if (t == 0.0) return out;
    if (spec.A) out.area = adaptive_quad([&](double s) { return spec.A(s); }, 0.0, t, opts).value;
    if (spec.Vprime) {
        out.impulse = adaptive_quad([&](double s) { return spec.Vprime(s); }, 0.0, t, opts).value;
        out.moment = adaptive_quad([&](double s) { return s * spec.Vprime(s); }, 0.0, t, opts).value;
    }
    return out;
}

TrajectoryPoint solve_time_dep(const TimeDepForceSpec& spec, double t, const QuadOptions& opts) {
    spec.validate();
    const auto I = time_dep_integrals(spec, t, opts);
    const double A0 = spec.vector_potential(0.0);
    const double qm = spec.q / spec.m;
    TrajectoryPoint pt;
    pt.t = t;
    pt.v = spec.v0 - qm / spec.c * (spec.vector_potential(t) - A0) - qm * I.impulse;
    pt.x = spec.x0 + spec.v0 * t - qm / spec.c * (I.area - A0 * t) - qm * (t * I.impulse - I.moment);
    pt.p = spec.p0() - spec.q * I.impulse;
    return pt;
}

double difference_step(double scale) { return std::cbrt(eps) * scale; }

double central_difference(const std::function<double(double)>& f, double x, double h) {
    return (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h);
}

double GeneralPotentialSpec::dV_dx(double x, double t) const {
    if (Vprime) return Vprime(x, t);
    if (!V) return 0.0;
    return central_difference([&](double s) { return V(s, t); }, x, difference_step(length_scale));
}

double GeneralPotentialSpec::dA_dt(double x, double t) const {
    if (Adot) return Adot(x, t);
    if (!A) return 0.0;
    return central_difference([&](double s) { return A(x, s); }, t, difference_step(time_scale));
}

double GeneralPotentialSpec::dA_dx(double x, double t) const {
    if (Aprime) return Aprime(x, t);
    if (!A) return 0.0;
    return central_difference([&](double s) { return A(s, t); }, x, difference_step(length_scale));
}

void GeneralPotentialSpec::validate() const {
    require_finite_positive(m, "mass");
    require_finite_positive(c, "speed of light");
    require_finite_positive(length_scale, "length scale");
    require_finite_positive(time_scale, "time scale");
    if (!std::isfinite(q)) throw InvalidInput("charge must be finite");
}

double derivative_mismatch(const GeneralPotentialSpec& spec, const std::vector<double>& xs,
                           const std::vector<double>& ts) {
    const double hx = difference_step(spec.length_scale);
    const double ht = difference_step(spec.time_scale);
    double worst = 0.0;
    auto compare = [&](double supplied, double numeric, double magnitude) {
        const double denom = std::max({std::abs(supplied), std::abs(numeric), magnitude});
        if (denom > 0.0) worst = std::max(worst, std::abs(supplied - numeric) / denom);
    };
    for (double x : xs) {
        for (double t : ts) {
            if (spec.Vprime && spec.V) {
                const double fd = central_difference([&](double s) { return spec.V(s, t); }, x, hx);
                compare(spec.Vprime(x, t), fd, std::abs(spec.V(x, t)) / spec.length_scale);
            }
            if (spec.A && spec.Aprime) {
                const double fd = central_difference([&](double s) { return spec.A(s, t); }, x, hx);
                compare(spec.Aprime(x, t), fd, std::abs(spec.A(x, t)) / spec.length_scale);
            }
            if (spec.A && spec.Adot) {
                const double fd = central_difference([&](double s) { return spec.A(x, s); }, t, ht);
                compare(spec.Adot(x, t), fd, std::abs(spec.A(x, t)) / spec.time_scale);
            }
        }
    }
    return worst;
}

void validate_derivatives(const GeneralPotentialSpec& spec, const std::vector<double>& xs,
                          const std::vector<double>& ts, double rel_tol) {
    const double worst = derivative_mismatch(spec, xs, ts);
    if (worst > rel_tol)
        throw InvalidInput("supplied derivative disagrees with central difference (relative mismatch " +
                           std::to_string(worst) + ")");
}

// ---------------------------------------------------------------------------
// ClassicalTrajectory

ClassicalTrajectory::ClassicalTrajectory(std::vector<double> times, std::vector<double> x,
                                         std::vector<double> v, std::vector<double> a, double q,
                                         double m, double c, FieldFn A)
    : times_(std::move(times)), x_(std::move(x)), v_(std::move(v)), a_(std::move(a)), q_(q), m_(m), c_(c),
      A_(A ? std::make_shared<const FieldFn>(std::move(A)) : nullptr) {
    const std::size_t n = times_.size();
    if (n < 2 || x_.size() != n || v_.size() != n || a_.size() != n)
        throw InvalidInput("trajectory needs at least two samples of equal length");
    for (std::size_t i = 1; i < n; ++i)
        if (!(times_[i] > times_[i - 1])) throw InvalidInput("trajectory times must be strictly increasing");
    require_finite_positive(m_, "mass");
    require_finite_positive(c_, "speed of light");
}

ClassicalTrajectory ClassicalTrajectory::uniform(double x0, double v0, double t0, double t1, double m,
                                                 std::size_t n) {
    n = std::max<std::size_t>(n, 2);
    std::vector<double> ts(n), xs(n), vs(n, v0), as(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        ts[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
        xs[i] = x0 + v0 * (ts[i] - t0);
    }
    return ClassicalTrajectory(std::move(ts), std::move(xs), std::move(vs), std::move(as), 0.0, m, 1.0);
}

bool ClassicalTrajectory::spans(double t0, double t1) const noexcept {
    const double slack = 1e-12 * std::max({1.0, std::abs(t_begin()), std::abs(t_end())});
    return t0 >= t_begin() - slack && t1 <= t_end() + slack;
}

std::size_t ClassicalTrajectory::segment(double t) const {
    if (t < t_begin() || t > t_end()) {
        const double slack = 1e-12 * std::max({1.0, std::abs(t_begin()), std::abs(t_end())});
        if (t < t_begin() - slack || t > t_end() + slack)
            throw InvalidInput("time " + std::to_string(t) + " outside trajectory span");
    }
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t i = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
    return std::min(i, times_.size() - 2);
}

// Quintic Hermite interpolant on one segment, built from (x, v, a) at both ends.
struct ClassicalTrajectory::Local {
    double s, h;
    double x0, v0, a0, x1, v1, a1;

    double position() const {
        const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
        return (1 - 10 * s3 + 15 * s4 - 6 * s5) * x0 + h * (s - 6 * s3 + 8 * s4 - 3 * s5) * v0 +
               h * h * (0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5) * a0 + (10 * s3 - 15 * s4 + 6 * s5) * x1 +
               h * (-4 * s3 + 7 * s4 - 3 * s5) * v1 + h * h * (0.5 * s3 - s4 + 0.5 * s5) * a1;
    }
    double velocity() const {
        const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
        return (-30 * s2 + 60 * s3 - 30 * s4) * (x0 - x1) / h + (1 - 18 * s2 + 32 * s3 - 15 * s4) * v0 +
               (-12 * s2 + 28 * s3 - 15 * s4) * v1 +
               h * ((s - 4.5 * s2 + 6 * s3 - 2.5 * s4) * a0 + (1.5 * s2 - 4 * s3 + 2.5 * s4) * a1);
    }
    double acceleration() const {
        const double s2 = s * s, s3 = s2 * s;
        return (-60 * s + 180 * s2 - 120 * s3) * (x0 - x1) / (h * h) +
               ((-36 * s + 96 * s2 - 60 * s3) * v0 + (-24 * s + 84 * s2 - 60 * s3) * v1) / h +
               (1 - 9 * s + 18 * s2 - 10 * s3) * a0 + (3 * s - 12 * s2 + 10 * s3) * a1;
    }
};

ClassicalTrajectory::Local ClassicalTrajectory::local(double t) const {
    const std::size_t i = segment(t);
    const double h = times_[i + 1] - times_[i];
    return {(t - times_[i]) / h, h, x_[i], v_[i], a_[i], x_[i + 1], v_[i + 1], a_[i + 1]};
}

double ClassicalTrajectory::position(double t) const { return local(t).position(); }
double ClassicalTrajectory::velocity(double t) const { return local(t).velocity(); }
double ClassicalTrajectory::acceleration(double t) const { return local(t).acceleration(); }

double ClassicalTrajectory::vector_potential(double t) const {
    return A_ ? (*A_)(position(t), t) : 0.0;
}

double ClassicalTrajectory::momentum(double t) const {
    return m_ * velocity(t) + q_ / c_ * vector_potential(t);
}

std::vector<double> ClassicalTrajectory::momenta() const {
    std::vector<double> p(times_.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = m_ * v_[i] + (A_ ? q_ / c_ * (*A_)(x_[i], times_[i]) : 0.0);
    return p;
}

// ---------------------------------------------------------------------------
// Integration

namespace {

using Accel = std::function<double(double t, double x, double v)>;

struct Samples {
    std::vector<double> t, x, v, a;
};

// Dormand-Prince 5(4) for x'' = accel(t, x, v), recording every accepted step.
Samples dopri5(const Accel& accel, double t0, double t1, double x0, double v0, double length_scale,
               double time_scale, const TrajectoryOptions& opts) {
    if (!(opts.tol > 0.0)) throw InvalidInput("integration tolerance must be positive");
    if (!(t1 > t0)) throw InvalidInput("integration span must have t1 > t0");
    const double span = t1 - t0;
    const double max_step = opts.max_step > 0.0 ? opts.max_step : span / 64.0;
    const double vel_scale = length_scale / time_scale;

    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    Samples s;
    double t = t0, x = x0, v = v0;
    double acc = accel(t, x, v);
    s.t.push_back(t);
    s.x.push_back(x);
    s.v.push_back(v);
    s.a.push_back(acc);

    double h = std::min(max_step, span * 1e-3);
    std::size_t steps = 0;
    while (t < t1) {
        if (++steps > opts.max_steps) throw NumericError("integrator exceeded max_steps", t);
        const bool last = t + h >= t1 - 1e-14 * span;
        if (last) h = t1 - t;
        if (h < 16.0 * eps * std::max(std::abs(t), span))
            throw NumericError("integrator step size underflow at t = " + std::to_string(t), t);

        // State y = (x, v), y' = (v, accel).
        const double kx1 = v, kv1 = acc;
        const double x2 = x + h * a21 * kx1, v2 = v + h * a21 * kv1;
        const double kx2 = v2, kv2 = accel(t + c2 * h, x2, v2);
        const double x3 = x + h * (a31 * kx1 + a32 * kx2), v3 = v + h * (a31 * kv1 + a32 * kv2);
        const double kx3 = v3, kv3 = accel(t + c3 * h, x3, v3);
        const double x4 = x + h * (a41 * kx1 + a42 * kx2 + a43 * kx3);
        const double v4 = v + h * (a41 * kv1 + a42 * kv2 + a43 * kv3);
        const double kx4 = v4, kv4 = accel(t + c4 * h, x4, v4);
        const double x5 = x + h * (a51 * kx1 + a52 * kx2 + a53 * kx3 + a54 * kx4);
        const double v5 = v + h * (a51 * kv1 + a52 * kv2 + a53 * kv3 + a54 * kv4);
        const double kx5 = v5, kv5 = accel(t + c5 * h, x5, v5);
        const double x6 = x + h * (a61 * kx1 + a62 * kx2 + a63 * kx3 + a64 * kx4 + a65 * kx5);
        const double v6 = v + h * (a61 * kv1 + a62 * kv2 + a63 * kv3 + a64 * kv4 + a65 * kv5);
        const double kx6 = v6, kv6 = accel(t + h, x6, v6);
        const double xn = x + h * (b1 * kx1 + b3 * kx3 + b4 * kx4 + b5 * kx5 + b6 * kx6);
        const double vn = v + h * (b1 * kv1 + b3 * kv3 + b4 * kv4 + b5 * kv5 + b6 * kv6);
        const double kx7 = vn, kv7 = accel(t + h, xn, vn);

        const double ex = h * (e1 * kx1 + e3 * kx3 + e4 * kx4 + e5 * kx5 + e6 * kx6 + e7 * kx7);
        const double ev = h * (e1 * kv1 + e3 * kv3 + e4 * kv4 + e5 * kv5 + e6 * kv6 + e7 * kv7);
        const double sx = opts.tol * (length_scale + std::max(std::abs(x), std::abs(xn)));
        const double sv = opts.tol * (vel_scale + std::max(std::abs(v), std::abs(vn)));
        const double err = std::max(std::abs(ex) / sx, std::abs(ev) / sv);
        if (!std::isfinite(err)) {
            h *= 0.2;
            continue;
        }

        if (err <= 1.0) {
            t = last ? t1 : t + h;
            x = xn;
            v = vn;
            acc = kv7;
            s.t.push_back(t);
            s.x.push_back(x);
            s.v.push_back(v);
            s.a.push_back(acc);
        }
        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h = std::min(max_step, h * (err <= 1.0 ? factor : std::min(1.0, factor)));
    }
    return s;
}

void check_finite_start(double x0, double v0, double t0, double t1) {
    if (!std::isfinite(x0) || !std::isfinite(v0) || !std::isfinite(t0) || !std::isfinite(t1))
        throw InvalidInput("initial conditions and span must be finite");
}

}  // namespace

ClassicalTrajectory integrate_general(const GeneralPotentialSpec& spec, double x0, double v0, double t0,
                                      double t1, const TrajectoryOptions& opts) {
    spec.validate();
    check_finite_start(x0, v0, t0, t1);
    const double qm = spec.q / spec.m;
    Accel accel;
    if (opts.first_order_mode)
        accel = [&](double t, double, double) { return qm * spec.efield(x0 + v0 * (t - t0), t); };
    else
        accel = [&](double t, double x, double) { return qm * spec.efield(x, t); };
    auto s = dopri5(accel, t0, t1, x0, v0, spec.length_scale, spec.time_scale, opts);
    return ClassicalTrajectory(std::move(s.t), std::move(s.x), std::move(s.v), std::move(s.a), spec.q, spec.m,
                               spec.c, spec.A);
}

ClassicalTrajectory approx_trajectory(const GeneralPotentialSpec& spec, const ClassicalTrajectory& reference,
                                      double X0, double V0, double t0, double t1,
                                      const TrajectoryOptions& opts) {
    spec.validate();
    check_finite_start(X0, V0, t0, t1);
    if (!reference.spans(t0, t1)) throw InvalidInput("approx_trajectory: reference does not span the interval");
    const double qm = spec.q / spec.m;
    const Accel accel = [&](double t, double, double) {
        return qm * spec.efield(reference.position(std::clamp(t, reference.t_begin(), reference.t_end())), t);
    };
    auto s = dopri5(accel, t0, t1, X0, V0, spec.length_scale, spec.time_scale, opts);
    return ClassicalTrajectory(std::move(s.t), std::move(s.x), std::move(s.v), std::move(s.a), spec.q, spec.m,
                               spec.c, spec.A);
}

GeneralPotentialSpec to_general(const TimeDepForceSpec& spec) {
    GeneralPotentialSpec g;
    g.q = spec.q;
    g.m = spec.m;
    g.c = spec.c;
    if (spec.A) {
        g.A = [A = spec.A](double, double t) { return A(t); };
        g.Aprime = [](double, double) { return 0.0; };
    }
    g.V = [s = spec](double x, double t) { return s.potential(x, t); };
    g.Vprime = [s = spec](double, double t) { return s.gradient(t); };
    return g;
}

TimeDepForceSpec linearize(const GeneralPotentialSpec& spec, double x0, double v0, Linearization about,
                           const ClassicalTrajectory* classical) {
    std::function<double(double)> ref;
    if (about == Linearization::StraightLine) {
        ref = [x0, v0](double t) { return x0 + v0 * t; };
    } else {
        if (!classical) throw InvalidInput("classical-path linearization needs a trajectory");
        ref = [traj = std::make_shared<ClassicalTrajectory>(*classical)](double t) { return traj->position(t); };
    }
    TimeDepForceSpec out;
    out.q = spec.q;
    out.m = spec.m;
    out.c = spec.c;
    out.x0 = x0;
    out.v0 = v0;
    out.A = [spec, ref](double t) { return spec.vector_potential(ref(t), t); };
    out.Vprime = [spec, ref](double t) { return spec.dV_dx(ref(t), t); };
    out.g = [spec, ref](double t) {
        const double r = ref(t);
        return spec.potential(r, t) - r * spec.dV_dx(r, t);
    };
    return out;
}

LinearizationReport linearization_difference(const GeneralPotentialSpec& spec, double x0, double v0, double T,
                                             const TrajectoryOptions& opts) {
    const auto exact = integrate_general(spec, x0, v0, 0.0, T, opts);
    QuadOptions q;
    q.rel_tol = std::max(opts.tol, 1e-13);
    LinearizationReport r;
    r.x_exact = exact.position(T);
    r.x_straight = solve_time_dep(linearize(spec, x0, v0, Linearization::StraightLine), T, q).x;
    r.x_classical = solve_time_dep(linearize(spec, x0, v0, Linearization::ClassicalPath, &exact), T, q).x;
    r.difference = r.x_straight - r.x_classical;
    return r;
}

}  // namespace abkit::dynamics
