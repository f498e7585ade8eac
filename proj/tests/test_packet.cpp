#include <cmath>
#include <numbers>
#include <random>

#include "abkit/errors.hpp"
#include "abkit/packet.hpp"
#include "doctest.h"
#include "abkit/samples.hpp"

using namespace abkit;
using namespace abkit::packet;
using dynamics::TimeDepForceSpec;

TEST_CASE("uncharged packet moves freely and accumulates p^2 T / 2m") {
    TimeDepForceSpec s;
    s.m = 1000.0;
    s.x0 = 0.5;
    s.v0 = 2.0;
    const auto pk = evolve_packet_timedep(s, 1.0, 0.3);
    CHECK(pk.x_center() == doctest::Approx(0.5 + 2.0 * 0.3));
    CHECK(pk.p_mean() == doctest::Approx(2000.0));
    CHECK(pk.phase(pk.x_center()) == doctest::Approx(2000.0 * 2000.0 * 0.3 / 2000.0).epsilon(1e-14));
}

TEST_CASE("constant force: moment and potential terms equal the integral of q x0 V' + q g") {
    TimeDepForceSpec s;
    s.q = 0.5;
    s.m = 1000.0;
    s.Vprime = [](double) { return 0.2; };
    s.g = [](double t) { return 0.1 * std::sin(t); };
    s.x0 = 0.7;
    s.v0 = 1.5;
    const double T = 0.8;
    const auto pk = evolve_packet_timedep(s, 1.0, T);
    const double gamma = -numerics::adaptive_quad(
                             [&](double t) { return s.q * s.x0 * s.gradient(t) + s.q * s.offset(t); }, 0.0, T, 1e-13)
                             .value;
    CHECK(std::abs(pk.ledger().potential + pk.ledger().legacy_moment - gamma) < 1e-12);
}

TEST_CASE("packets are normalized") {
    std::mt19937_64 rng(5);
    const auto pc = samples::random_packet_case(rng);
    const auto pk = evolve_packet_timedep(pc.spec, pc.sigma, pc.T);
    const auto r = numerics::adaptive_quad([&](double x) { return pk.density(x); }, pk.x_center() - 40.0,
                                           pk.x_center() + 40.0, 1e-13);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(pk.amplitude(pk.x_center() + 0.3)) ==
          doctest::Approx(std::sqrt(pk.density(pk.x_center() + 0.3))));
}

TEST_CASE("packet centre is the classical end point") {
    std::mt19937_64 rng(6);
    const auto pc = samples::random_packet_case(rng);
    const auto pk = evolve_packet_timedep(pc.spec, pc.sigma, pc.T);
    const auto cl = dynamics::solve_time_dep(pc.spec, pc.T);
    CHECK(std::abs(pk.x_center() - cl.x) <= 1e-12 * std::max(1.0, std::abs(cl.x)));
    CHECK(std::abs(pk.p_mean() - cl.p) <= 1e-12 * std::abs(cl.p));
}

TEST_CASE("constant added to the potential only shifts the potential term") {
    std::mt19937_64 rng(8);
    auto pc = samples::random_packet_case(rng);
    const auto before = evolve_packet_timedep(pc.spec, pc.sigma, pc.T);
    auto g = pc.spec.g;
    const double c0 = 0.37;
    pc.spec.g = [g, c0](double t) { return g(t) + c0; };
    const auto after = evolve_packet_timedep(pc.spec, pc.sigma, pc.T);
    CHECK(after.ledger().potential - before.ledger().potential ==
          doctest::Approx(-pc.spec.q * c0 * pc.T).epsilon(1e-10));
    CHECK(after.ledger().kinetic == before.ledger().kinetic);
    CHECK(after.x_center() == before.x_center());
}

TEST_CASE("ledger total at the centre is kinetic plus potential") {
    std::mt19937_64 rng(9);
    const auto pc = samples::random_packet_case(rng);
    const auto L = evolve_packet_timedep(pc.spec, pc.sigma, pc.T).ledger();
    CHECK(L.total_at(L.x_final) == L.kinetic + L.potential);
    CHECK(L.quantum_potential_bound == doctest::Approx(pc.T / (8.0 * pc.spec.m)));
    CHECK(L.dropped_quadratic > 0.0);
}

TEST_CASE("regime failures name the ratio") {
    TimeDepForceSpec s;
    s.m = 1.0;
    s.v0 = 1.0;
    try {
        evolve_packet_timedep(s, 1.0, 1.0);
        FAIL("expected RegimeError");
    } catch (const RegimeError& e) {
        CHECK(e.ratio_name() == "wavelength_ratio");
    }
    s.m = 1e4;
    try {
        evolve_packet_timedep(s, 1.0, 100.0);
        FAIL("expected RegimeError");
    } catch (const RegimeError& e) {
        CHECK(e.ratio_name() == "spreading_ratio");
        CHECK(e.ratio() == doctest::Approx(100.0 / 2e4));
    }
}

TEST_CASE("phase identity: force-free case has no difference") {
    TimeDepForceSpec s;
    s.m = 2.0;
    s.v0 = 3.0;
    const auto r = check_phase_identity(s, 1.0, 1.5);
    CHECK(r.lhs == doctest::Approx(2.0 * 9.0 * 1.5 / 2.0));
    CHECK(r.rhs == doctest::Approx(2.0 * 9.0 * 1.5 / 2.0));
    CHECK(r.difference == doctest::Approx(0.0));
}

TEST_CASE("phase identity: residual after the q^2 terms vanishes for generic specs") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 10; ++i) {
        const auto s = samples::random_smooth_spec(rng);
        const auto r = check_phase_identity(s, 1.0, 2.0, {1e-12, 0.0, 2000});
        CHECK(r.relative_residual < 1e-10);
        CHECK(std::abs(r.kinetic_integral - r.kinetic_rearranged) <= 1e-10 * std::abs(r.kinetic_integral));
    }
}

TEST_CASE("phase identity: raw difference scales as q^2") {
    std::mt19937_64 rng(22);
    auto s = samples::random_smooth_spec(rng);
    s.q = 1e-2;
    const double d1 = check_phase_identity(s, 1.0, 2.0, {1e-13, 0.0, 2000}).difference;
    s.q = 5e-3;
    const double d2 = check_phase_identity(s, 1.0, 2.0, {1e-13, 0.0, 2000}).difference;
    CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("general phase of free motion at the centre is m v0^2 T / 2") {
    dynamics::GeneralPotentialSpec g;
    g.m = 3.0;
    const auto traj = dynamics::integrate_general(g, 0.0, 2.0, 0.0, 1.5);
    CHECK(phase_general(traj, g, traj.position(1.5), 1.5) == doctest::Approx(3.0 * 4.0 / 2.0 * 1.5).epsilon(1e-12));
}

TEST_CASE("general phase on an integrated trajectory matches the closed-form general phase") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 3; ++i) {
        const auto s = samples::random_smooth_spec(rng);
        const double T = 2.0;
        dynamics::TrajectoryOptions o;
        o.tol = 1e-13;
        const auto gspec = dynamics::to_general(s);
        const auto traj = dynamics::integrate_general(gspec, s.x0, s.v0, 0.0, T, o);
        const auto r = check_phase_identity(s, 1.0, T, {1e-12, 0.0, 2000});
        const double ph = phase_general(traj, gspec, traj.position(T), T, {1e-12, 0.0, 2000});
        CHECK(std::abs(ph - r.rhs) <= 1e-9 * std::abs(r.rhs));
    }
}

TEST_CASE("general phase agrees with the time-only phase when q is weak") {
    std::mt19937_64 rng(24);
    auto s = samples::random_smooth_spec(rng);
    s.q = 1e-6;
    const double T = 1.0;
    dynamics::TrajectoryOptions o;
    o.tol = 1e-13;
    const auto gspec = dynamics::to_general(s);
    const auto traj = dynamics::integrate_general(gspec, s.x0, s.v0, 0.0, T, o);
    const auto L = timedep_ledger(s, 1.0, T, {1e-13, 0.0, 2000});
    const double x = L.x_final + 0.4;
    CHECK(std::abs(phase_general(traj, gspec, x, T, {1e-13, 0.0, 2000}) - L.total_at(x)) <= 1e-10 * std::abs(L.total_at(x)));
}

TEST_CASE("trajectory must cover the requested time") {
    dynamics::GeneralPotentialSpec g;
    const auto traj = dynamics::integrate_general(g, 0.0, 1.0, 0.0, 1.0);
    CHECK_THROWS_AS(phase_general(traj, g, 0.0, 2.0), InvalidInput);
}

TEST_CASE("exact solution starts as the initial Gaussian and stays normalized") {
    std::mt19937_64 rng(25);
    auto s = samples::random_smooth_spec(rng);
    const double sigma = 0.8;
    std::vector<double> xs;
    for (int i = -400; i <= 400; ++i) xs.push_back(s.x0 + 0.025 * i);
    const auto psi0 = exact_timedep_wavefunction(s, sigma, 0.0, xs);
    for (std::size_t i = 0; i < xs.size(); i += 50) {
        const double d = xs[i] - s.x0;
        const auto expected = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25) *
                              std::exp(std::complex<double>(-d * d / (4 * sigma * sigma), s.p0() * d));
        CHECK(std::abs(psi0[i] - expected) < 1e-12);
    }
    const double t = 1.3;
    const double xc = dynamics::solve_time_dep(s, t).x;
    const auto dens = numerics::adaptive_quad(
        [&](double x) {
            const double xv[1] = {x};
            return std::norm(exact_timedep_wavefunction(s, sigma, t, xv)[0]);
        },
        xc - 30.0, xc + 30.0, 1e-11);
    CHECK(dens.value == doctest::Approx(1.0).epsilon(1e-10));
}
