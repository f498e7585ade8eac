#pragma once

#include <span>
#include <vector>

#include "abkit/dynamics.hpp"
#include "abkit/packet.hpp"
#include "abkit/propagator.hpp"
#include "abkit/quadrature.hpp"
#include "abkit/vec3.hpp"

namespace abkit::interference {

using numerics::OverlapPhase;

enum class Gauge { Lorenz, Coulomb };

// Two-body vector-potential dyad: A at r from a charge q moving with v is
// (q / c) D(r) v. Lorenz: 1/r. Coulomb (Darwin): (1/r + r r^T / r^3) / 2.
struct GaugeDyad {
    Gauge gauge = Gauge::Lorenz;

    Mat3 operator()(const Vec3& r) const;
    Vec3 apply(const Vec3& r, const Vec3& v) const;
};

// Embeds a 1D path coordinate (arc length) in space.
class PathGeometry {
public:
    static PathGeometry line(const Vec3& origin, const Vec3& direction);
    // Circle of `radius` in the plane z = height, starting at angle0 and
    // advancing counter-clockwise (orientation +1) or clockwise (-1).
    static PathGeometry circle(double radius, double height, double angle0, int orientation);

    Vec3 point(double s) const;
    Vec3 tangent(double s) const;

private:
    enum class Kind { Line, Circle };
    Kind kind_ = Kind::Line;
    Vec3 origin_{};
    Vec3 direction_{1.0, 0.0, 0.0};
    double radius_ = 0.0;
    double angle0_ = 0.0;
    int orientation_ = 1;
};

struct ParticleTrack {
    double charge = 0.0;
    double mass = 1.0;
    dynamics::ClassicalTrajectory trajectory;
    PathGeometry path;

    Vec3 position(double t) const { return path.point(trajectory.position(t)); }
    Vec3 velocity(double t) const {
        return path.tangent(trajectory.position(t)) * trajectory.velocity(t);
    }
};

// One branch of the experiment: particle 0 is the electron, the rest are
// sources. Sources interact with the electron only.
struct BranchConfiguration {
    char label = 'A';
    std::vector<ParticleTrack> particles;
    double c = 1.0;
    // Identical copies represented by each source (1 if empty).
    std::vector<double> multiplicity;

    double weight(std::size_t n) const { return multiplicity.empty() ? 1.0 : multiplicity.at(n); }
    void validate(double T) const;
};

enum class Attribution {
    Electron,     // electron moving in the sources' potentials
    Sources,      // each source moving in the electron's potentials
    Hamiltonian,  // minus the time integral of the interaction energy
};

// Phase (hbar = 1) of one branch under the chosen attribution. All three
// agree when the dyad is symmetric. Throws SingularityError naming the time
// if two interacting particles coincide.
double interaction_phase(const BranchConfiguration& branch, const GaugeDyad& dyad, double T,
                         Attribution attribution = Attribution::Hamiltonian,
                         const numerics::QuadOptions& quad = {});

// Overlap <B|A> of two equal-width packets in closed form.
OverlapPhase gaussian_overlap(const packet::GaussianPacket& a, const packet::GaussianPacket& b);
// -ln |<B|A>| = dx^2 / 8 sigma^2 + sigma^2 dp^2 / 2.
double overlap_exponent(const packet::GaussianPacket& a, const packet::GaussianPacket& b);

struct InterferenceResult {
    std::vector<OverlapPhase> per_particle_overlap;
    double interaction_phase_A = 0.0;  // minus integral of H_int on A
    double interaction_phase_B = 0.0;
    double electron_phase_A = 0.0;
    double electron_phase_B = 0.0;
    double source_phase_A = 0.0;
    double source_phase_B = 0.0;
    // Total phase from each assembly order.
    double phase_from_sources = 0.0;   // Phi_N^A - Phi_N^B
    double phase_from_electron = 0.0;  // Phi_e^A - Phi_e^B
    double phase_joint = 0.0;          // electron + sources + extra phase
    double total_phase = 0.0;
    double exponent_sum = 0.0;
    double visibility = 1.0;
    double P_plus = 0.0;
    double P_minus = 0.0;
};

struct OutcomeProbabilities {
    double plus = 0.0;
    double minus = 0.0;
};

// P = (1 +- V cos phase) / 2; P_minus is formed as 1 - P_plus.
OutcomeProbabilities outcome_probabilities(double visibility, double phase);

struct DetectionOptions {
    numerics::QuadOptions quad{};
    double recombination_tol = 1e-12;  // in units of sigma and 1/sigma
};

// Two-outcome probabilities P = (1 +- V cos(Phi_A - Phi_B)) / 2 with
// V the product of source overlap magnitudes.
InterferenceResult detection_probabilities(const BranchConfiguration& branchA, const BranchConfiguration& branchB,
                                           std::span<const packet::GaussianPacket> packetsA,
                                           std::span<const packet::GaussianPacket> packetsB, const GaugeDyad& dyad,
                                           double T, const DetectionOptions& opts = {});

struct ReductionReport {
    double kinetic_difference = 0.0;  // int (p_A^2 - p_B^2) / 2m
    double vector_term = 0.0;         // int v0 (q/c) (A_A - A_B)
    double field_double_integral = 0.0;  // int_0^T int_0^t (E_A - E_B)
    double residual = 0.0;               // kinetic_difference - vector_term
};

// Kinetic-phase difference of two branches whose end points coincide,
// against its first-order form; the residual is O(q^2).
ReductionReport kinetic_phase_reduction_check(const dynamics::ClassicalTrajectory& traj_A,
                                              const dynamics::ClassicalTrajectory& traj_B,
                                              const dynamics::GeneralPotentialSpec& spec_A,
                                              const dynamics::GeneralPotentialSpec& spec_B, double T,
                                              const numerics::QuadOptions& quad = {});

struct ParticlePhaseReport {
    double full = 0.0;     // end-point, kinetic and potential terms
    double compact = 0.0;  // int q v0/c (A_A - A_B) - q int (V_A - V_B)
    double residual = 0.0;
};

// Per-particle phase difference assembled from momenta and displacements,
// against its compact vector/scalar potential form.
ParticlePhaseReport per_particle_phase_check(const dynamics::ClassicalTrajectory& traj_A,
                                             const dynamics::ClassicalTrajectory& traj_B,
                                             const dynamics::GeneralPotentialSpec& spec_A,
                                             const dynamics::GeneralPotentialSpec& spec_B, double T,
                                             const numerics::QuadOptions& quad = {});

}  // namespace abkit::interference
