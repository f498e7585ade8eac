#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "abkit/quadrature.hpp"

namespace abkit::dynamics {

using TimeFn = std::function<double(double t)>;
using FieldFn = std::function<double(double x, double t)>;

// 1D particle whose forces depend on time only:
//   H = (p - q A(t)/c)^2 / 2m + q x V'(t) + q g(t).
// Empty functions are treated as identically zero.
struct TimeDepForceSpec {
    double q = 0.0;
    double m = 1.0;
    double c = 1.0;
    TimeFn A;
    TimeFn Vprime;
    TimeFn g;
    double x0 = 0.0;
    double v0 = 0.0;

    double vector_potential(double t) const { return A ? A(t) : 0.0; }
    double gradient(double t) const { return Vprime ? Vprime(t) : 0.0; }
    double offset(double t) const { return g ? g(t) : 0.0; }
    // Initial canonical momentum m v0 + q A(0)/c.
    double p0() const { return m * v0 + q / c * vector_potential(0.0); }
    // Scalar potential g(t) + x V'(t).
    double potential(double x, double t) const { return offset(t) + x * gradient(t); }

    void validate() const;
};

// Running integrals of the time-only force:
//   area = int_0^t A,  impulse = int_0^t V',  moment = int_0^t t' V'(t') dt'.
struct TimeDepIntegrals {
    double area = 0.0;
    double impulse = 0.0;
    double moment = 0.0;
};

TimeDepIntegrals time_dep_integrals(const TimeDepForceSpec& spec, double t,
                                    const numerics::QuadOptions& opts = {});

struct TrajectoryPoint {
    double t = 0.0;
    double x = 0.0;
    double v = 0.0;
    double p = 0.0;
};

// Closed-form classical solution for a time-only force.
TrajectoryPoint solve_time_dep(const TimeDepForceSpec& spec, double t,
                               const numerics::QuadOptions& opts = {});

// General potentials A(x,t), V(x,t). Missing derivatives fall back to
// fourth-order central differences with step eps^(1/3) * scale.
struct GeneralPotentialSpec {
    double q = 0.0;
    double m = 1.0;
    double c = 1.0;
    FieldFn A;
    FieldFn V;
    FieldFn Vprime;  // dV/dx
    FieldFn Adot;    // dA/dt
    FieldFn Aprime;  // dA/dx
    double length_scale = 1.0;
    double time_scale = 1.0;

    double vector_potential(double x, double t) const { return A ? A(x, t) : 0.0; }
    double potential(double x, double t) const { return V ? V(x, t) : 0.0; }
    double dV_dx(double x, double t) const;
    double dA_dt(double x, double t) const;
    double dA_dx(double x, double t) const;
    // Electric field along the path, -V' - Adot / c.
    double efield(double x, double t) const { return -dV_dx(x, t) - dA_dt(x, t) / c; }

    void validate() const;
};

// Compares supplied derivatives with central differences on the given
// sample points; returns the largest relative mismatch.
double derivative_mismatch(const GeneralPotentialSpec& spec, const std::vector<double>& xs,
                           const std::vector<double>& ts);
// Throws InvalidInput when derivative_mismatch exceeds rel_tol.
void validate_derivatives(const GeneralPotentialSpec& spec, const std::vector<double>& xs,
                          const std::vector<double>& ts, double rel_tol = 1e-6);

// Fourth-order central difference of f at x with step h.
double central_difference(const std::function<double(double)>& f, double x, double h);
// Step eps^(1/3) * scale.
double difference_step(double scale);

// Sampled trajectory with quintic Hermite interpolation of x (from x, v, a);
// velocity is the derivative of that interpolant. Canonical momentum is
// m v + q A(x, t) / c evaluated from the stored vector potential.
class ClassicalTrajectory {
public:
    ClassicalTrajectory(std::vector<double> times, std::vector<double> x, std::vector<double> v,
                        std::vector<double> a, double q, double m, double c, FieldFn A = {});

    // Free motion x0 + v0 (t - t0), sampled at n points.
    static ClassicalTrajectory uniform(double x0, double v0, double t0, double t1, double m,
                                       std::size_t n = 2);

    double t_begin() const noexcept { return times_.front(); }
    double t_end() const noexcept { return times_.back(); }
    bool spans(double t0, double t1) const noexcept;

    double position(double t) const;
    double velocity(double t) const;
    double acceleration(double t) const;
    double momentum(double t) const;
    double vector_potential(double t) const;

    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<double>& positions() const noexcept { return x_; }
    const std::vector<double>& velocities() const noexcept { return v_; }
    const std::vector<double>& accelerations() const noexcept { return a_; }
    std::vector<double> momenta() const;

    double charge() const noexcept { return q_; }
    double mass() const noexcept { return m_; }
    double light_speed() const noexcept { return c_; }

private:
    struct Local;
    std::size_t segment(double t) const;
    Local local(double t) const;

    std::vector<double> times_;
    std::vector<double> x_;
    std::vector<double> v_;
    std::vector<double> a_;
    double q_;
    double m_;
    double c_;
    std::shared_ptr<const FieldFn> A_;
};

struct TrajectoryOptions {
    double tol = 1e-10;
    double max_step = 0.0;  // 0: span / 64
    std::size_t max_steps = 1000000;
    // Evaluate the force on the unperturbed line x0 + v0 t (linear in q).
    bool first_order_mode = false;
};

// Adaptive Dormand-Prince 5(4) integration of m x'' = q E(x, t).
// Throws NumericError carrying the time reached on step-size underflow.
ClassicalTrajectory integrate_general(const GeneralPotentialSpec& spec, double x0, double v0,
                                      double t0, double t1, const TrajectoryOptions& opts = {});

// Integrates X'' = (q/m) E(x_ref(t), t): the force is taken on the reference
// path, so it is independent of X.
ClassicalTrajectory approx_trajectory(const GeneralPotentialSpec& spec,
                                      const ClassicalTrajectory& reference, double X0, double V0,
                                      double t0, double t1, const TrajectoryOptions& opts = {});

// Time-only spec as a general spec (A(x,t) = A(t), V(x,t) = g(t) + x V'(t)).
GeneralPotentialSpec to_general(const TimeDepForceSpec& spec);

enum class Linearization { StraightLine, ClassicalPath };

// Time-only spec obtained by expanding a general potential to first order in
// x about a reference path: either x0 + v0 t or the classical trajectory.
TimeDepForceSpec linearize(const GeneralPotentialSpec& spec, double x0, double v0,
                           Linearization about, const ClassicalTrajectory* classical = nullptr);

struct LinearizationReport {
    double x_straight = 0.0;   // x(T) from the straight-line expansion
    double x_classical = 0.0;  // x(T) from the classical-path expansion
    double x_exact = 0.0;      // integrate_general
    double difference = 0.0;   // x_straight - x_classical
};

LinearizationReport linearization_difference(const GeneralPotentialSpec& spec, double x0, double v0,
                                             double T, const TrajectoryOptions& opts = {});

}  // namespace abkit::dynamics
