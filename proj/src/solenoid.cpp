#include "abkit/solenoid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "abkit/errors.hpp"
#include "abkit/parallel.hpp"

namespace abkit::solenoid {

using numerics::adaptive_quad;
using numerics::pairwise_sum;
using numerics::QuadOptions;

namespace {

constexpr double pi = std::numbers::pi;

Vec3 azimuthal(double phi) { return {-std::sin(phi), std::cos(phi), 0.0}; }

double traverse_sign(Traverse t) { return t == Traverse::A ? 1.0 : -1.0; }

// Angular rate of the electron.
double electron_rate(Traverse traverse, const SolenoidSpec& spec) { return traverse_sign(traverse) * spec.u / spec.R; }

std::vector<int> selected_signs(SignSelection s) {
    switch (s) {
        case SignSelection::Positive: return {1};
        case SignSelection::Negative: return {-1};
        case SignSelection::Both: return {1, -1};
    }
    return {};
}

}  // namespace

void SolenoidSpec::validate() const {
    units.validate();
    auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
    if (!positive(a) || !positive(R) || !positive(L)) throw InvalidInput("solenoid: a, R and L must be positive");
    if (!(a < R)) throw InvalidInput("solenoid: the electron orbit must lie outside the solenoid (a < R)");
    if (!positive(u)) throw InvalidInput("solenoid: electron speed must be positive");
    if (!(v0 >= 0.0) || !std::isfinite(v0)) throw InvalidInput("solenoid: piece speed must be non-negative");
    if (!(Q >= 0.0) || !std::isfinite(Q)) throw InvalidInput("solenoid: Q is the magnitude of the shell charge");
    if (!positive(M)) throw InvalidInput("solenoid: shell mass must be positive");
    if (n_a == 0 || n_L == 0) throw InvalidInput("solenoid: n_a and n_L must be positive");
    if (!std::isfinite(e)) throw InvalidInput("solenoid: electron charge must be finite");
}

double b_field(const SolenoidSpec& spec) {
    spec.validate();
    return 4.0 * spec.v0 * spec.Q / (spec.units.c * spec.a * spec.L);
}

double ab_phase_reference(const SolenoidSpec& spec) {
    const double B0 = b_field(spec);
    return spec.electron_charge() * pi * spec.a * spec.a * B0 / (spec.units.hbar * spec.units.c);
}

double ab_phase_from_count(double electron_count, double a, double L, double v0, const units::UnitSystem& u) {
    const double alpha = u.e_charge * u.e_charge / (u.hbar * u.c);
    return 4.0 * pi * electron_count * alpha * (v0 / u.c) * (a / L);
}

double electron_angle(Traverse traverse, double t, const SolenoidSpec& spec) {
    return traverse == Traverse::A ? -pi / 2 + spec.u * t / spec.R : 3 * pi / 2 - spec.u * t / spec.R;
}

Vec3 electron_position(Traverse traverse, double t, const SolenoidSpec& spec) {
    const double phi = electron_angle(traverse, t, spec);
    return {spec.R * std::cos(phi), spec.R * std::sin(phi), 0.0};
}

Vec3 electron_velocity(Traverse traverse, double t, const SolenoidSpec& spec) {
    return azimuthal(electron_angle(traverse, t, spec)) * (spec.R * electron_rate(traverse, spec));
}

Vec3 electron_vector_potential(const Vec3& point, Traverse traverse, double t, const SolenoidSpec& spec, Gauge gauge,
                               PotentialPart part) {
    const Vec3 d = point - electron_position(traverse, t, spec);
    const double r = norm(d);
    if (!(r > 0.0)) throw SingularityError("piece at the electron position at t = " + std::to_string(t), t);
    const Vec3 vel = electron_velocity(traverse, t, spec);
    const double k = spec.electron_charge() / spec.units.c;
    const Vec3 lorenz = vel * (k / r);
    if (gauge == Gauge::Lorenz) {
        if (part == PotentialPart::CoulombSecond) return {};
        return part == PotentialPart::CoulombFirst ? 0.5 * lorenz : lorenz;
    }
    const Vec3 first = 0.5 * lorenz;
    const Vec3 second = d * (0.5 * k * dot(vel, d) / (r * r * r));
    switch (part) {
        case PotentialPart::Full: return first + second;
        case PotentialPart::CoulombFirst: return first;
        case PotentialPart::CoulombSecond: return second;
    }
    return {};
}

Vec3 electron_vector_potential_rate(const Vec3& point, Traverse traverse, double t, const SolenoidSpec& spec,
                                    Gauge gauge) {
    const Vec3 pos = electron_position(traverse, t, spec);
    const Vec3 d = point - pos;
    const double r = norm(d);
    if (!(r > 0.0)) throw SingularityError("piece at the electron position at t = " + std::to_string(t), t);
    const double w = electron_rate(traverse, spec);
    const Vec3 vel = electron_velocity(traverse, t, spec);
    const Vec3 acc = pos * (-w * w);
    const double k = spec.electron_charge() / spec.units.c;
    const double r3 = r * r * r;
    const double dv = dot(d, vel);
    // d/dt [vel / r] with d' = -vel.
    const Vec3 lorenz = (acc * (1.0 / r) + vel * (dv / r3)) * k;
    if (gauge == Gauge::Lorenz) return lorenz;
    // d/dt [d (vel . d) / r^3].
    const Vec3 second =
        (vel * (-dv / r3) + d * ((dot(acc, d) - dot(vel, vel)) / r3) + d * (3.0 * dv * dv / (r3 * r * r))) * k;
    return 0.5 * lorenz + 0.5 * second;
}

Vec3 piece_position(const PieceState& piece, double t, const SolenoidSpec& spec) {
    const double phi = piece.phi0 + piece.charge_sign * spec.v0 * t / spec.a;
    return {spec.a * std::cos(phi), spec.a * std::sin(phi), piece.z};
}

Vec3 piece_velocity(const PieceState& piece, double t, const SolenoidSpec& spec) {
    const double phi = piece.phi0 + piece.charge_sign * spec.v0 * t / spec.a;
    return azimuthal(phi) * (piece.charge_sign * spec.v0);
}

double piece_phase(const PieceState& piece, Traverse traverse, const SolenoidSpec& spec, Gauge gauge,
                   const PieceOptions& opts) {
    if (piece.charge_sign != 1 && piece.charge_sign != -1) throw InvalidInput("piece charge sign must be +1 or -1");
    if (piece.q == 0.0 || spec.v0 == 0.0) return 0.0;
    const double T = spec.traverse_time();
    const double charge = piece.charge_sign * piece.q;
    auto f = [&](double t) {
        const double ts = opts.fixed_site ? 0.0 : t;
        const Vec3 x = piece_position(piece, ts, spec);
        const Vec3 v = piece_velocity(piece, ts, spec);
        return charge / spec.units.c * dot(v, electron_vector_potential(x, traverse, t, spec, gauge, opts.part));
    };
    return adaptive_quad(f, 0.0, T, opts.quad).value / spec.units.hbar;
}

std::vector<PieceState> lattice(const SolenoidSpec& spec, int charge_sign) {
    std::vector<PieceState> out;
    out.reserve(spec.n_a * spec.n_L);
    const double q = spec.piece_charge(), m = spec.piece_mass();
    for (std::size_t j = 0; j < spec.n_L; ++j) {
        const double z = -0.5 * spec.L + (j + 0.5) * spec.L / static_cast<double>(spec.n_L);
        for (std::size_t i = 0; i < spec.n_a; ++i)
            out.push_back({2 * pi * (i + 0.5) / static_cast<double>(spec.n_a), z, charge_sign, q, m});
    }
    return out;
}

namespace {

// One sign, continuum of pieces over [-half, half]: the phase integrand no
// longer depends on t after the angular integral, so the time integral is
// T times the angular one.
double continuum_sign(const SolenoidSpec& spec, Traverse traverse, Gauge gauge, PotentialPart part, double half,
                      const QuadOptions& quad) {
    const double a = spec.a, R = spec.R, c = spec.units.c;
    const double T = spec.traverse_time();
    const double pref = traverse_sign(traverse) * spec.Q * spec.v0 * spec.electron_charge() * spec.u * T /
                        (2 * pi * spec.L * c * c * spec.units.hbar);
    auto rho2 = [&](double th) { return R * R + a * a - 2 * a * R * std::cos(th); };
    // int dz / sqrt(rho^2 + z^2) over the shell length.
    auto lorenz = [&](double th) { return std::cos(th) * 2.0 * std::asinh(half / std::sqrt(rho2(th))); };
    // int dz / (rho^2 + z^2)^(3/2).
    auto second = [&](double th) {
        const double p2 = rho2(th);
        const double s = std::sin(th);
        return 0.5 * a * R * s * s * 2.0 * half / (p2 * std::sqrt(p2 + half * half));
    };
    // Scale for the cancelling cos(theta) integral.
    QuadOptions q = quad;
    q.abs_tol = std::max(quad.abs_tol, quad.rel_tol * 1e-3 * 2 * pi * std::abs(lorenz(0.0)));
    const double L_int = adaptive_quad(lorenz, 0.0, 2 * pi, q).value;
    if (gauge == Gauge::Lorenz) {
        if (part == PotentialPart::CoulombSecond) return 0.0;
        return pref * (part == PotentialPart::CoulombFirst ? 0.5 : 1.0) * L_int;
    }
    double total = 0.0;
    if (part != PotentialPart::CoulombSecond) total += 0.5 * L_int;
    if (part != PotentialPart::CoulombFirst) total += adaptive_quad(second, 0.0, 2 * pi, quad).value;
    return pref * total;
}

}  // namespace

PhaseResult solenoid_phase(const SolenoidSpec& spec, Traverse traverse, Gauge gauge, const PhaseOptions& opts) {
    spec.validate();
    PhaseResult res;
    const auto signs = selected_signs(opts.signs);
    if (opts.mode == Mode::Continuum) {
        if (spec.L / spec.R < 10.0)
            res.warnings.push_back("L/R = " + std::to_string(spec.L / spec.R) +
                                   " is below 10; finite-length corrections are not small");
        const double one = continuum_sign(spec, traverse, gauge, opts.part, 0.5 * spec.L, opts.quad);
        res.value = one * static_cast<double>(signs.size());
        if (opts.extrapolate) {
            // Doubling L at fixed Q / L; the finite-length error falls as 1 / L^2.
            const double twice = continuum_sign(spec, traverse, gauge, opts.part, spec.L, opts.quad);
            res.extrapolated = (4.0 * twice - one) / 3.0 * static_cast<double>(signs.size());
            res.error_estimate = std::abs(res.extrapolated - res.value);
        } else {
            res.extrapolated = res.value;
        }
        return res;
    }

    PieceOptions po{opts.part, opts.fixed_site, opts.quad};
    std::vector<double> per_sign;
    for (int s : signs) {
        const auto pieces = lattice(spec, s);
        std::vector<double> rings(spec.n_L);
        parallel_for(spec.n_L, opts.threads, [&](std::size_t j) {
            std::vector<double> parts(spec.n_a);
            for (std::size_t i = 0; i < spec.n_a; ++i)
                parts[i] = piece_phase(pieces[j * spec.n_a + i], traverse, spec, gauge, po);
            rings[j] = pairwise_sum(parts);
        });
        per_sign.push_back(pairwise_sum(rings));
    }
    res.value = res.extrapolated = pairwise_sum(per_sign);
    return res;
}

double electron_side_phase(const SolenoidSpec& spec, Traverse traverse, Gauge gauge, const PhaseOptions& opts) {
    spec.validate();
    const auto signs = selected_signs(opts.signs);
    const double T = spec.traverse_time();
    const double c = spec.units.c, e = spec.electron_charge();
    if (opts.mode == Mode::Continuum) {
        // Static azimuthal potential at the orbit from the current sheet
        // K = Q v0 / (2 pi a L) of one shell.
        const double a = spec.a, R = spec.R;
        const double K = spec.Q * spec.v0 / (2 * pi * a * spec.L);
        auto ring = [&](double th) {
            const double p2 = R * R + a * a - 2 * a * R * std::cos(th);
            const double s = std::sin(th);
            auto fz = [&](double z) {
                const double S2 = p2 + z * z;
                const double S = std::sqrt(S2);
                if (gauge == Gauge::Lorenz) return std::cos(th) / S;
                return 0.5 * (std::cos(th) / S + a * R * s * s / (S2 * S));
            };
            // Split at z = 0 where the integrand peaks.
            return adaptive_quad(fz, -0.5 * spec.L, 0.0, opts.quad).value +
                   adaptive_quad(fz, 0.0, 0.5 * spec.L, opts.quad).value;
        };
        QuadOptions q = opts.quad;
        q.abs_tol = std::max(q.abs_tol, q.rel_tol * 1e-3 * 2 * pi * std::abs(ring(0.0)));
        const double A_phi = K / c * a * adaptive_quad(ring, 0.0, 2 * pi, q).value;
        return traverse_sign(traverse) * e / c * spec.u * T * A_phi / spec.units.hbar *
               static_cast<double>(signs.size());
    }

    std::vector<PieceState> pieces;
    for (int s : signs) {
        const auto l = lattice(spec, s);
        pieces.insert(pieces.end(), l.begin(), l.end());
    }
    const interference::GaugeDyad dyad{gauge};
    auto f = [&](double t) {
        const Vec3 X = electron_position(traverse, t, spec);
        const Vec3 vel = electron_velocity(traverse, t, spec);
        std::vector<double> terms(pieces.size());
        for (std::size_t n = 0; n < pieces.size(); ++n) {
            const auto& p = pieces[n];
            const double ts = opts.fixed_site ? 0.0 : t;
            const Vec3 d = X - piece_position(p, ts, spec);
            if (!(norm(d) > 0.0)) throw SingularityError("electron meets a piece", t);
            const Vec3 A = dyad.apply(d, piece_velocity(p, ts, spec)) * (p.charge_sign * p.q / c);
            terms[n] = dot(vel, A);
        }
        return e / c * pairwise_sum(terms);
    };
    return adaptive_quad(f, 0.0, T, opts.quad).value / spec.units.hbar;
}

TimeAverageResult time_averaged_phase(const SolenoidSpec& spec, Traverse traverse, const QuadOptions& quad) {
    spec.validate();
    const double a = spec.a, R = spec.R, c = spec.units.c, u = spec.u;
    const double e = spec.electron_charge();
    const double T = spec.traverse_time();
    const double sgn = traverse_sign(traverse);
    TimeAverageResult res;
    res.closed_form = sgn * spec.Q * e * spec.v0 * a * pi / (spec.L * c * c * spec.units.hbar);
    if (spec.Q == 0.0 || spec.v0 == 0.0) return res;

    // <A>_T at a site, with 1/S expanded to first order in a.
    auto averaged = [&](double phi, double D) {
        auto f = [&](double t) {
            const double cs = std::cos(phi - electron_angle(traverse, t, spec));
            return sgn * u * e / c * (cs / D + a * R * cs * cs / (D * D * D));
        };
        return adaptive_quad(f, 0.0, T, quad).value / T;
    };
    // Phase per unit length along z: (Q / 2 pi L) int dphi v0 T <A> / (c hbar).
    auto slice = [&](double z) {
        const double D = std::hypot(R, z);
        QuadOptions q = quad;
        q.abs_tol = std::max(quad.abs_tol, quad.rel_tol * 1e-3 * u * std::abs(e) / (c * D));
        const double ring = adaptive_quad([&](double phi) { return averaged(phi, D); }, 0.0, 2 * pi, q).value;
        return spec.Q / (2 * pi * spec.L) * spec.v0 * T * ring / (c * spec.units.hbar);
    };
    res.finite_length =
        adaptive_quad(slice, -0.5 * spec.L, 0.0, quad).value + adaptive_quad(slice, 0.0, 0.5 * spec.L, quad).value;
    // z = R tan(alpha) over the whole line.
    auto mapped = [&](double alpha) {
        const double cs = std::cos(alpha);
        return slice(R * std::tan(alpha)) * R / (cs * cs);
    };
    res.infinite_length = adaptive_quad(mapped, -0.5 * pi, 0.0, quad).value + adaptive_quad(mapped, 0.0, 0.5 * pi, quad).value;
    return res;
}

double impulse_phase_view(const SolenoidSpec& spec, Traverse traverse, Gauge gauge, const PhaseOptions& opts) {
    spec.validate();
    const double T = spec.traverse_time();
    const double c = spec.units.c;
    std::vector<double> per_sign;
    for (int s : selected_signs(opts.signs)) {
        const auto pieces = lattice(spec, s);
        std::vector<double> rings(spec.n_L);
        parallel_for(spec.n_L, opts.threads, [&](std::size_t j) {
            std::vector<double> parts(spec.n_a);
            for (std::size_t i = 0; i < spec.n_a; ++i) {
                const auto& p = pieces[j * spec.n_a + i];
                const double charge = p.charge_sign * p.q;
                const Vec3 site = piece_position(p, 0.0, spec);
                const Vec3 v = piece_velocity(p, 0.0, spec);
                // Sudden impulse as the potential switches on.
                const Vec3 kick = electron_vector_potential(site, traverse, 0.0, spec, gauge) * (-charge / c);
                auto f = [&](double t) {
                    const Vec3 F = electron_vector_potential_rate(site, traverse, t, spec, gauge) * (-charge / c);
                    return (T - t) * dot(v, F);
                };
                const double accumulated = adaptive_quad(f, 0.0, T, opts.quad).value;
                parts[i] = -(dot(v, kick) * T + accumulated) / spec.units.hbar;
            }
            rings[j] = pairwise_sum(parts);
        });
        per_sign.push_back(pairwise_sum(rings));
    }
    return pairwise_sum(per_sign);
}

BudgetReport visibility_budget(double target_phase, const Geometry& g, const BudgetOptions& opts) {
    opts.units.validate();
    if (!(target_phase >= 0.0) || !std::isfinite(target_phase)) throw InvalidInput("target phase must be non-negative");
    auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
    if (!positive(g.a) || !positive(g.R) || !positive(g.L) || !positive(g.v0) || !positive(g.u))
        throw InvalidInput("geometry values must be positive");
    if (!(g.a < g.R)) throw InvalidInput("the electron orbit must lie outside the solenoid (a < R)");
    if (!positive(opts.constraint_margin)) throw InvalidInput("constraint margin must be positive");

    const auto& U = opts.units;
    BudgetReport r;
    r.traverse_time = pi * g.R / g.u;
    if (target_phase == 0.0) return r;

    r.electron_count = target_phase / ab_phase_from_count(1.0, g.a, g.L, g.v0, U);
    r.constraint_bound = r.electron_count * (U.m_electron * g.v0 * g.a / U.hbar) * (2 * pi * g.a / g.L);
    const double allowed = opts.constraint_margin * r.constraint_bound;
    if (!(allowed >= 1.0))
        throw UnsupportedConfiguration("no pieces-per-ring count satisfies n_a^3 <= " + std::to_string(allowed));
    double n_a = 1.0;
    while (std::pow(n_a * 10.0, 3) <= allowed) n_a *= 10.0;
    r.pieces_per_ring = n_a;
    r.sigma = 2 * pi * g.a / n_a;
    r.rings = std::max(1.0, std::round(g.L / r.sigma));
    r.pieces = n_a * r.rings;
    r.electrons_per_piece = r.electron_count / r.pieces;
    r.piece_mass = r.electrons_per_piece * U.m_electron;
    r.wavelength = 2 * pi * U.hbar / (r.piece_mass * g.v0);
    r.wavelengths_per_packet = r.sigma / r.wavelength;
    // A phase 2 pi corresponds to a shift of one wavelength.
    r.piece_shift = target_phase * r.wavelength / (2 * pi) / r.pieces;
    r.speed_change = r.piece_shift / r.traverse_time;

    const double dk = r.piece_mass * r.speed_change / U.hbar;
    r.position_exponent_sum = r.pieces * r.piece_shift * r.piece_shift / (8 * r.sigma * r.sigma);
    r.momentum_exponent_sum = r.pieces * 0.5 * (r.sigma * dk) * (r.sigma * dk);
    r.visibility = std::exp(-(r.position_exponent_sum + r.momentum_exponent_sum));

    // Every piece of both shells as a pair of packets, wavenumbers measured
    // from the common mean m v0 / hbar, which drops out of the overlap.
    const packet::GaussianPacket still(r.sigma, 0.0, 0.0, {});
    const packet::GaussianPacket shifted(r.sigma, r.piece_shift, 0.0, {.x_final = r.piece_shift});
    const packet::GaussianPacket kicked(r.sigma, 0.0, dk, {.p_final = dk});
    const double all = 2.0 * r.pieces;
    r.direct_position_exponent_sum = all * interference::overlap_exponent(still, shifted);
    r.direct_momentum_exponent_sum = all * interference::overlap_exponent(still, kicked);
    r.direct_visibility = std::exp(-(r.direct_position_exponent_sum + r.direct_momentum_exponent_sum));

    // Per-ring share of the phase along the axis.
    const double a = g.a, R = g.R;
    auto share = [&](double z) {
        auto f = [&](double th) { return std::cos(th) / std::sqrt(R * R + a * a - 2 * a * R * std::cos(th) + z * z); };
        QuadOptions q;
        q.abs_tol = 1e-14 / std::hypot(R, z);
        return adaptive_quad(f, 0.0, 2 * pi, q).value;
    };
    const double half = 0.5 * g.L;
    const double s1 = 2.0 * adaptive_quad(share, 0.0, half, 1e-9).value;
    const double s2 = 2.0 * adaptive_quad([&](double z) { const double f = share(z); return f * f; }, 0.0, half, 1e-9).value;
    r.axial_inhomogeneity = g.L * s2 / (s1 * s1);
    return r;
}

}  // namespace abkit::solenoid
