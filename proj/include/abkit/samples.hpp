#pragma once

#include <cmath>
#include <random>

#include <numbers>
#include <vector>

#include "abkit/dynamics.hpp"
#include "abkit/interference.hpp"
#include "abkit/packet.hpp"

namespace abkit::samples {

// Smooth time-only spec with a few sinusoids in A, V' and g.
inline dynamics::TimeDepForceSpec random_smooth_spec(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> w(0.3, 3.0);
    const double a0 = u(rng), a1 = u(rng), wa = w(rng), pa = u(rng);
    const double b0 = 0.5 * u(rng), b1 = 0.5 * u(rng), wb = w(rng);
    const double g0 = u(rng), wg = w(rng);
    dynamics::TimeDepForceSpec s;
    s.q = 2.0 * u(rng);
    s.m = 0.5 + 4.5 * (0.5 + 0.5 * u(rng));
    s.c = 1.0 + (0.5 + 0.5 * u(rng)) * 2.0;
    s.A = [=](double t) { return a0 + a1 * std::sin(wa * t + pa); };
    s.Vprime = [=](double t) { return b0 + b1 * std::cos(wb * t); };
    s.g = [=](double t) { return g0 * std::sin(wg * t); };
    s.x0 = u(rng);
    s.v0 = 1.0 + 0.5 * u(rng);
    return s;
}

// Heavy, fast-enough packet in natural units that passes the regime test:
// sigma = 1, m in [2000, 4000], v0 ~ 1, weak sinusoidal A and V'.
struct PacketCase {
    dynamics::TimeDepForceSpec spec;
    double sigma = 1.0;
    double T = 1.0;
};

inline PacketCase random_packet_case(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PacketCase pc;
    const double amp = 0.1 + 0.2 * u(rng), wa = 0.5 + 2.5 * u(rng), pa = 6.28 * u(rng);
    const double b0 = 0.05 * (2.0 * u(rng) - 1.0), b1 = 0.05 * (2.0 * u(rng) - 1.0), wb = 0.5 + 2.5 * u(rng);
    const double g0 = 0.2 * (2.0 * u(rng) - 1.0), wg = 0.5 + 2.0 * u(rng);
    pc.spec.q = 1.0;
    pc.spec.c = 1.0;
    pc.spec.m = 2000.0 + 2000.0 * u(rng);
    pc.spec.A = [=](double t) { return amp * std::sin(wa * t + pa); };
    pc.spec.Vprime = [=](double t) { return b0 + b1 * std::cos(wb * t); };
    pc.spec.g = [=](double t) { return g0 * std::cos(wg * t); };
    pc.spec.x0 = 0.0;
    pc.spec.v0 = 0.8 + 0.4 * u(rng);
    pc.T = 1.0 + u(rng);
    return pc;
}

// Uniform motion at `speed` along a straight line.
inline interference::ParticleTrack straight_track(double q, double m, Vec3 origin, Vec3 dir, double speed, double T) {
    return {q, m, dynamics::ClassicalTrajectory::uniform(0.0, speed, 0.0, T, m),
            interference::PathGeometry::line(origin, dir)};
}

// Uniform motion at `speed` around a horizontal circle.
inline interference::ParticleTrack ring_track(double q, double m, double radius, double z, double angle0,
                                              int orientation, double speed, double T) {
    return {q, m, dynamics::ClassicalTrajectory::uniform(0.0, speed, 0.0, T, m),
            interference::PathGeometry::circle(radius, z, angle0, orientation)};
}

// Electron (particle 0) on a half circle of radius 4 around a stack of
// counter-rotating charged rings of radius 1.
struct RingCase {
    interference::BranchConfiguration branch;
    double T = 0.0;
};

inline RingCase rotating_rings_case() {
    constexpr double pi = std::numbers::pi;
    const double a = 1.0, R = 4.0, u = 2.0, v0 = 0.3;
    RingCase rc;
    rc.T = pi * R / u;
    rc.branch.c = 50.0;
    rc.branch.particles.push_back(ring_track(-1.0, 1.0, R, 0.0, -pi / 2, 1, u, rc.T));
    for (int i = 0; i < 8; ++i)
        for (int j = -2; j <= 2; ++j) {
            const double phi0 = 2 * pi * (i + 0.5) / 8;
            rc.branch.particles.push_back(ring_track(0.05, 100.0, a, 0.8 * j, phi0, 1, v0, rc.T));
            rc.branch.particles.push_back(ring_track(-0.05, 100.0, a, 0.8 * j, phi0, -1, v0, rc.T));
        }
    return rc;
}

// Packet with a hand-set phase ledger.
inline packet::GaussianPacket ledger_packet(double sigma, double x, double p, double kinetic = 0.0,
                                            double potential = 0.0) {
    packet::PhaseLedger L;
    L.p_final = p;
    L.x_final = x;
    L.kinetic = kinetic;
    L.potential = potential;
    return packet::GaussianPacket(sigma, x, p, L);
}

// Electron passes above (A) or below (B) a slowly moving source of charge
// qn over T = 2; the source packets end slightly apart.
struct TwoBranchCase {
    interference::BranchConfiguration A, B;
    std::vector<packet::GaussianPacket> packets_A, packets_B;
    double T = 2.0;
};

inline TwoBranchCase crossing_case(double qn) {
    const double T = 2.0, sigma = 0.1;
    TwoBranchCase s;
    s.A.label = 'A';
    s.B.label = 'B';
    s.A.c = s.B.c = 5.0;
    s.A.particles = {straight_track(-1.0, 1.0, {-2.0, 1.0, 0}, {1, 0, 0}, 2.0, T),
                     straight_track(qn, 50.0, {0, 0, 0}, {0, 1, 0}, 0.1, T)};
    s.B.particles = {straight_track(-1.0, 1.0, {-2.0, -1.0, 0}, {1, 0, 0}, 2.0, T),
                     straight_track(qn, 50.0, {0, 0, 0}, {0, 1, 0}, 0.1, T)};
    s.packets_A = {ledger_packet(sigma, 2.0, 2.0), ledger_packet(sigma, 0.2, 5.0, 0.1)};
    s.packets_B = {ledger_packet(sigma, 2.0, 2.0), ledger_packet(sigma, 0.2 + 1e-3, 5.0 + 0.1, 0.1)};
    return s;
}

}  // namespace abkit::samples
