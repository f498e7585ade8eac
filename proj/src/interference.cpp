#include "abkit/interference.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <limits>
#include <string>

#include "abkit/errors.hpp"

namespace abkit::interference {

using dynamics::ClassicalTrajectory;
using dynamics::GeneralPotentialSpec;
using numerics::adaptive_quad;
using numerics::QuadOptions;

Mat3 GaugeDyad::operator()(const Vec3& r) const {
    const double d = norm(r);
    if (!(d > 0.0)) throw NumericError("dyad evaluated at zero separation");
    Mat3 D;
    const double inv = 1.0 / d;
    if (gauge == Gauge::Lorenz) {
        D(0, 0) = D(1, 1) = D(2, 2) = inv;
        return D;
    }
    const double inv3 = inv * inv * inv;
    const double c[3] = {r.x, r.y, r.z};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) D(i, j) = 0.5 * ((i == j ? inv : 0.0) + c[i] * c[j] * inv3);
    return D;
}

Vec3 GaugeDyad::apply(const Vec3& r, const Vec3& v) const {
    const double d = norm(r);
    if (!(d > 0.0)) throw NumericError("dyad evaluated at zero separation");
    if (gauge == Gauge::Lorenz) return v * (1.0 / d);
    return 0.5 * (v * (1.0 / d) + r * (dot(r, v) / (d * d * d)));
}

PathGeometry PathGeometry::line(const Vec3& origin, const Vec3& direction) {
    const double n = norm(direction);
    if (!(n > 0.0) || !std::isfinite(n)) throw InvalidInput("line direction must be a non-zero vector");
    PathGeometry g;
    g.kind_ = Kind::Line;
    g.origin_ = origin;
    g.direction_ = direction * (1.0 / n);
    return g;
}

PathGeometry PathGeometry::circle(double radius, double height, double angle0, int orientation) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidInput("circle radius must be positive");
    if (orientation != 1 && orientation != -1) throw InvalidInput("circle orientation must be +1 or -1");
    PathGeometry g;
    g.kind_ = Kind::Circle;
    g.origin_ = {0.0, 0.0, height};
    g.radius_ = radius;
    g.angle0_ = angle0;
    g.orientation_ = orientation;
    return g;
}

Vec3 PathGeometry::point(double s) const {
    if (kind_ == Kind::Line) return origin_ + direction_ * s;
    const double phi = angle0_ + orientation_ * s / radius_;
    return {radius_ * std::cos(phi), radius_ * std::sin(phi), origin_.z};
}

Vec3 PathGeometry::tangent(double s) const {
    if (kind_ == Kind::Line) return direction_;
    const double phi = angle0_ + orientation_ * s / radius_;
    return Vec3{-std::sin(phi), std::cos(phi), 0.0} * static_cast<double>(orientation_);
}

void BranchConfiguration::validate(double T) const {
    if (!(T > 0.0) || !std::isfinite(T)) throw InvalidInput("interaction time must be positive");
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidInput("speed of light must be positive");
    if (particles.empty()) throw InvalidInput(std::string("branch ") + label + " has no electron");
    if (!multiplicity.empty() && multiplicity.size() != particles.size())
        throw InvalidInput(std::string("branch ") + label + ": one multiplicity per particle required");
    for (double w : multiplicity)
        if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidInput("multiplicities must be non-negative");
    for (const auto& p : particles) {
        if (!p.trajectory.spans(0.0, T))
            throw InvalidInput(std::string("branch ") + label + ": trajectory does not cover [0, T]");
        if (!std::isfinite(p.charge) || !(p.mass > 0.0)) throw InvalidInput("particle charge or mass invalid");
    }
}

namespace {

// Pair integrand pieces at time t for electron e and source n.
struct PairState {
    Vec3 r;  // x_e - x_n
    Vec3 ve;
    Vec3 vn;
    double dist;
};

PairState pair_state(const ParticleTrack& e, const ParticleTrack& n, double t) {
    PairState s{e.position(t) - n.position(t), e.velocity(t), n.velocity(t), 0.0};
    s.dist = norm(s.r);
    return s;
}

// Samples the separation, refines the closest approach and throws if the
// pair collides within [0, T].
void check_separation(const ParticleTrack& e, const ParticleTrack& n, double T) {
    constexpr int samples = 1025;
    double best_t = 0.0;
    double best = std::numeric_limits<double>::infinity();
    double scale = 0.0;
    int best_i = 0;
    for (int i = 0; i < samples; ++i) {
        const double t = T * i / (samples - 1);
        const double d = norm(e.position(t) - n.position(t));
        scale = std::max({scale, d, norm(e.position(t)), norm(n.position(t))});
        if (d < best) best = d, best_t = t, best_i = i;
    }
    double lo = T * std::max(best_i - 1, 0) / (samples - 1);
    double hi = T * std::min(best_i + 1, samples - 1) / (samples - 1);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int k = 0; k < 80 && hi - lo > 1e-15 * T; ++k) {
        const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
        const double da = norm(e.position(a) - n.position(a));
        const double db = norm(e.position(b) - n.position(b));
        if (da < best) best = da, best_t = a;
        if (db < best) best = db, best_t = b;
        if (da < db) hi = b; else lo = a;
    }
    if (!(best > 1e-10 * scale))
        throw SingularityError("particles coincide at t = " + std::to_string(best_t), best_t);
}

}  // namespace

double interaction_phase(const BranchConfiguration& branch, const GaugeDyad& dyad, double T,
                         Attribution attribution, const QuadOptions& quad) {
    branch.validate(T);
    const auto& e = branch.particles.front();
    const std::size_t N = branch.particles.size();
    for (std::size_t n = 1; n < N; ++n)
        if (branch.weight(n) != 0.0 && branch.particles[n].charge != 0.0)
            check_separation(e, branch.particles[n], T);
    const double c = branch.c;

    switch (attribution) {
        case Attribution::Electron: {
            // q_e (v_e . A(x_e) / c - V(x_e)) with A, V summed over sources.
            auto f = [&](double t) {
                const Vec3 xe = e.position(t), ve = e.velocity(t);
                Vec3 A{};
                double V = 0.0;
                for (std::size_t n = 1; n < N; ++n) {
                    const auto& s = branch.particles[n];
                    const double w = branch.weight(n);
                    if (w == 0.0 || s.charge == 0.0) continue;
                    const Vec3 r = xe - s.position(t);
                    A += dyad.apply(r, s.velocity(t)) * (w * s.charge / c);
                    V += w * s.charge / norm(r);
                }
                return e.charge * (dot(ve, A) / c - V);
            };
            return adaptive_quad(f, 0.0, T, quad).value;
        }
        case Attribution::Sources: {
            std::vector<double> parts;
            parts.reserve(N);
            for (std::size_t n = 1; n < N; ++n) {
                const auto& s = branch.particles[n];
                const double w = branch.weight(n);
                if (w == 0.0 || s.charge == 0.0) continue;
                auto f = [&](double t) {
                    const Vec3 xn = s.position(t);
                    const Vec3 r = xn - e.position(t);
                    const Vec3 A = dyad.apply(r, e.velocity(t)) * (e.charge / c);
                    return s.charge * (dot(s.velocity(t), A) / c - e.charge / norm(r));
                };
                parts.push_back(w * adaptive_quad(f, 0.0, T, quad).value);
            }
            return numerics::pairwise_sum(parts);
        }
        case Attribution::Hamiltonian: {
            auto H = [&](double t) {
                double h = 0.0;
                for (std::size_t n = 1; n < N; ++n) {
                    const auto& s = branch.particles[n];
                    const double w = branch.weight(n);
                    if (w == 0.0 || s.charge == 0.0) continue;
                    const auto st = pair_state(e, s, t);
                    const double coupling = w * e.charge * s.charge;
                    h += coupling / st.dist - coupling / (c * c) * dot(st.ve, dyad(st.r).apply(st.vn));
                }
                return h;
            };
            return -adaptive_quad(H, 0.0, T, quad).value;
        }
    }
    throw InvalidInput("unknown attribution");
}

double overlap_exponent(const packet::GaussianPacket& a, const packet::GaussianPacket& b) {
    if (a.sigma() != b.sigma()) throw UnsupportedConfiguration("overlap of packets with different widths");
    const double s = a.sigma();
    const double dx = a.x_center() - b.x_center();
    const double dp = a.ledger().p_final - b.ledger().p_final;
    return dx * dx / (8.0 * s * s) + 0.5 * s * s * dp * dp;
}

OverlapPhase gaussian_overlap(const packet::GaussianPacket& a, const packet::GaussianPacket& b) {
    const double expo = overlap_exponent(a, b);
    // Phase of each packet is p x + offset.
    const auto& la = a.ledger();
    const auto& lb = b.ledger();
    const double offset_a = -la.p_final * la.x_final + la.kinetic + la.potential;
    const double offset_b = -lb.p_final * lb.x_final + lb.kinetic + lb.potential;
    const double x_mid = 0.5 * (a.x_center() + b.x_center());
    return {std::exp(-expo), (la.p_final - lb.p_final) * x_mid + offset_a - offset_b};
}

OutcomeProbabilities outcome_probabilities(double visibility, double phase) {
    if (!(visibility >= 0.0 && visibility <= 1.0)) throw InvalidInput("visibility must lie in [0, 1]");
    if (!std::isfinite(phase)) throw InvalidInput("phase must be finite");
    const double plus = std::clamp(0.5 * (1.0 + visibility * std::cos(phase)), 0.0, 1.0);
    return {plus, 1.0 - plus};
}

InterferenceResult detection_probabilities(const BranchConfiguration& branchA, const BranchConfiguration& branchB,
                                           std::span<const packet::GaussianPacket> packetsA,
                                           std::span<const packet::GaussianPacket> packetsB, const GaugeDyad& dyad,
                                           double T, const DetectionOptions& opts) {
    branchA.validate(T);
    branchB.validate(T);
    const std::size_t N = branchA.particles.size();
    if (branchB.particles.size() != N || packetsA.size() != N || packetsB.size() != N)
        throw InvalidInput("branches and packets must list the same particles");
    for (std::size_t n = 0; n < N; ++n)
        if (branchA.weight(n) != branchB.weight(n))
            throw InvalidInput("multiplicities differ between branches");

    const auto& ea = packetsA[0];
    const auto& eb = packetsB[0];
    const double sigma = ea.sigma();
    if (std::abs(ea.x_center() - eb.x_center()) > opts.recombination_tol * sigma ||
        sigma * std::abs(ea.ledger().p_final - eb.ledger().p_final) > opts.recombination_tol)
        throw InvalidInput("electron packets do not recombine");

    InterferenceResult r;
    r.per_particle_overlap.reserve(N);
    std::vector<double> exponents;
    for (std::size_t n = 0; n < N; ++n) {
        r.per_particle_overlap.push_back(gaussian_overlap(packetsA[n], packetsB[n]));
        if (n > 0) exponents.push_back(branchA.weight(n) * overlap_exponent(packetsA[n], packetsB[n]));
    }
    // Recombined electron packets overlap exactly.
    r.per_particle_overlap.front().magnitude = 1.0;
    r.exponent_sum = numerics::pairwise_sum(exponents);
    r.visibility = std::exp(-r.exponent_sum);

    r.interaction_phase_A = interaction_phase(branchA, dyad, T, Attribution::Hamiltonian, opts.quad);
    r.interaction_phase_B = interaction_phase(branchB, dyad, T, Attribution::Hamiltonian, opts.quad);
    r.electron_phase_A = interaction_phase(branchA, dyad, T, Attribution::Electron, opts.quad);
    r.electron_phase_B = interaction_phase(branchB, dyad, T, Attribution::Electron, opts.quad);
    r.source_phase_A = interaction_phase(branchA, dyad, T, Attribution::Sources, opts.quad);
    r.source_phase_B = interaction_phase(branchB, dyad, T, Attribution::Sources, opts.quad);

    r.phase_from_sources = r.source_phase_A - r.source_phase_B;
    r.phase_from_electron = r.electron_phase_A - r.electron_phase_B;
    // Each particle picks up its own phase; the extra phase int H_int
    // removes the double count.
    r.phase_joint = (r.electron_phase_A + r.source_phase_A - r.interaction_phase_A) -
                    (r.electron_phase_B + r.source_phase_B - r.interaction_phase_B);
    r.total_phase = r.phase_from_sources;
    const auto P = outcome_probabilities(r.visibility, r.total_phase);
    r.P_plus = P.plus;
    r.P_minus = P.minus;
    return r;
}

namespace {

void require_common_start(const ClassicalTrajectory& a, const ClassicalTrajectory& b, double T) {
    if (!a.spans(0.0, T) || !b.spans(0.0, T)) throw InvalidInput("trajectories must cover [0, T]");
    const double x0 = a.position(0.0), v0 = a.velocity(0.0);
    const double tol = 1e-12 * std::max({1.0, std::abs(x0), std::abs(v0) * T});
    if (std::abs(b.position(0.0) - x0) > tol || std::abs(b.velocity(0.0) - v0) * T > tol)
        throw InvalidInput("branches must start from the same position and velocity");
}

// Integrates over [0, T] split at the sample times of both trajectories,
// where the interpolants are only twice differentiable.
// `size` bounds |f| without cancellation and sets the absolute tolerance.
double integrate_split(const ClassicalTrajectory& a, const ClassicalTrajectory& b,
                       const std::function<double(double)>& f, const std::function<double(double)>& size, double T,
                       const QuadOptions& quad) {
    std::vector<double> cuts{0.0, T};
    for (const auto* tr : {&a, &b})
        for (double t : tr->times())
            if (t > 0.0 && t < T) cuts.push_back(t);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    // These integrals may cancel to zero: floor the tolerance at rel_tol
    // times the size of the terms that cancel.
    double peak = 0.0;
    for (int i = 0; i <= 256; ++i) peak = std::max(peak, std::abs(size(T * i / 256.0)));
    QuadOptions opts = quad;
    opts.abs_tol = std::max(quad.abs_tol, quad.rel_tol * peak * T / static_cast<double>(cuts.size()));
    std::vector<double> parts;
    parts.reserve(cuts.size());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        parts.push_back(adaptive_quad(f, cuts[i], cuts[i + 1], opts).value);
    return numerics::pairwise_sum(parts);
}

double canonical(const GeneralPotentialSpec& s, const ClassicalTrajectory& tr, double t) {
    return s.m * tr.velocity(t) + s.q * s.vector_potential(tr.position(t), t) / s.c;
}

}  // namespace

ReductionReport kinetic_phase_reduction_check(const ClassicalTrajectory& traj_A, const ClassicalTrajectory& traj_B,
                                              const GeneralPotentialSpec& spec_A, const GeneralPotentialSpec& spec_B,
                                              double T, const QuadOptions& quad) {
    spec_A.validate();
    spec_B.validate();
    if (!(T > 0.0)) throw InvalidInput("T must be positive");
    if (spec_A.q != spec_B.q || spec_A.m != spec_B.m || spec_A.c != spec_B.c)
        throw InvalidInput("both branches must describe the same particle");
    require_common_start(traj_A, traj_B, T);
    const double xa = traj_A.position(T), xb = traj_B.position(T);
    const double travel = std::max({std::abs(xa - traj_A.position(0.0)), spec_A.length_scale, 1e-300});
    if (std::abs(xa - xb) > 1e-9 * travel)
        throw InvalidInput("end points of the two branches do not coincide");

    const double q = spec_A.q, m = spec_A.m, c = spec_A.c;
    const double v0 = traj_A.velocity(0.0);
    ReductionReport r;
    r.kinetic_difference = integrate_split(traj_A, traj_B,
                               [&](double t) {
                                   const double pa = canonical(spec_A, traj_A, t);
                                   const double pb = canonical(spec_B, traj_B, t);
                                   return (pa - pb) * (pa + pb) / (2.0 * m);
                               },
                               [&](double t) {
                                   const double pa = canonical(spec_A, traj_A, t);
                                   const double pb = canonical(spec_B, traj_B, t);
                                   return (pa * pa + pb * pb) / (2.0 * m);
                               },
                               T, quad);
    r.vector_term = integrate_split(traj_A, traj_B,
                        [&](double t) {
                            return v0 * q / c *
                                   (spec_A.vector_potential(traj_A.position(t), t) -
                                    spec_B.vector_potential(traj_B.position(t), t));
                        },
                        [&](double t) {
                            return std::abs(v0 * q / c) * (std::abs(spec_A.vector_potential(traj_A.position(t), t)) +
                                                           std::abs(spec_B.vector_potential(traj_B.position(t), t)));
                        },
                        T, quad);
    r.field_double_integral = integrate_split(traj_A, traj_B,
                                  [&](double t) {
                                      return (T - t) * (spec_A.efield(traj_A.position(t), t) -
                                                        spec_B.efield(traj_B.position(t), t));
                                  },
                                  [&](double t) {
                                      return (T - t) * (std::abs(spec_A.efield(traj_A.position(t), t)) +
                                                        std::abs(spec_B.efield(traj_B.position(t), t)));
                                  },
                                  T, quad);
    r.residual = r.kinetic_difference - r.vector_term;
    return r;
}

ParticlePhaseReport per_particle_phase_check(const ClassicalTrajectory& traj_A, const ClassicalTrajectory& traj_B,
                                             const GeneralPotentialSpec& spec_A, const GeneralPotentialSpec& spec_B,
                                             double T, const QuadOptions& quad) {
    spec_A.validate();
    spec_B.validate();
    if (!(T > 0.0)) throw InvalidInput("T must be positive");
    if (spec_A.q != spec_B.q || spec_A.m != spec_B.m || spec_A.c != spec_B.c)
        throw InvalidInput("both branches must describe the same particle");
    require_common_start(traj_A, traj_B, T);

    // Phase difference of two packets evaluated between their centres.
    const double x_mid = 0.5 * (traj_A.position(T) + traj_B.position(T));
    ParticlePhaseReport r;
    r.full = packet::phase_general(traj_A, spec_A, x_mid, T, quad) -
             packet::phase_general(traj_B, spec_B, x_mid, T, quad);

    const double q = spec_A.q, c = spec_A.c;
    const double x0 = traj_A.position(0.0), v0 = traj_A.velocity(0.0);
    r.compact = adaptive_quad(
                    [&](double t) {
                        const double x = x0 + v0 * t;
                        return q * v0 / c * (spec_A.vector_potential(x, t) - spec_B.vector_potential(x, t)) -
                               q * (spec_A.potential(x, t) - spec_B.potential(x, t));
                    },
                    0.0, T, quad)
                    .value;
    r.residual = r.full - r.compact;
    return r;
}

}  // namespace abkit::interference
