#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "abkit/dynamics.hpp"

namespace abkit::numerics {

// Periodic uniform grid x_i = x_min + i dx, dx = (x_max - x_min) / n.
class GridWavefunction {
public:
    GridWavefunction(double x_min, double x_max, std::vector<std::complex<double>> amplitudes, double time = 0.0);

    static GridWavefunction sample(double x_min, double x_max, std::size_t n,
                                   const std::function<std::complex<double>(double)>& psi, double time = 0.0);

    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_max_; }
    std::size_t size() const noexcept { return psi_.size(); }
    double dx() const noexcept { return (x_max_ - x_min_) / static_cast<double>(psi_.size()); }
    double x(std::size_t i) const noexcept { return x_min_ + static_cast<double>(i) * dx(); }
    double time() const noexcept { return time_; }
    std::vector<double> positions() const;

    const std::vector<std::complex<double>>& amplitudes() const noexcept { return psi_; }
    std::vector<std::complex<double>>& amplitudes() noexcept { return psi_; }

    double norm() const;        // sum |psi|^2 dx
    double mean_position() const;
    // Largest edge density (outer 1% of points) relative to the peak density.
    double edge_fraction() const;

    void set_time(double t) noexcept { time_ = t; }

private:
    double x_min_;
    double x_max_;
    std::vector<std::complex<double>> psi_;
    double time_;
};

struct PropagateOptions {
    double leak_tolerance = 1e-12;
    std::size_t leak_check_interval = 32;
};

// Second-order Strang split-step Fourier propagation of
//   i dpsi/dt = [(p - q A(t)/c)^2 / 2m + q (x V'(t) + g(t))] psi   (hbar = 1)
// from psi0.time() to psi0.time() + T. Throws NumericError carrying the leak
// magnitude when the packet reaches the grid edges.
GridWavefunction propagate_schrodinger_1d(const dynamics::TimeDepForceSpec& hamiltonian, GridWavefunction psi0,
                                          double T, std::size_t steps, const PropagateOptions& opts = {});

struct OverlapPhase {
    double magnitude = 0.0;
    double phase = 0.0;
};

// Normalized overlap <a|b>. With `previous` the phase is unwrapped to the
// branch nearest it; otherwise the principal value is returned.
OverlapPhase extract_global_phase(const GridWavefunction& a, const GridWavefunction& b,
                                  std::optional<double> previous = {});

// Shifts `phase` by a multiple of 2 pi to lie nearest `reference`.
double unwrap_near(double phase, double reference);

struct GridChoice {
    double x_min = 0.0;
    double x_max = 0.0;
    std::size_t n = 0;
};

// Grid spanning the start and the classical end point with `margin` widths
// on either side, at least 2^14 points, and fine enough to resolve the
// packet's momentum content.
GridChoice default_grid(const dynamics::TimeDepForceSpec& spec, double sigma, double T, double margin = 12.0);

// Normalized Gaussian of width sigma at spec.x0 with canonical momentum
// spec.p0(), sampled on `grid`.
GridWavefunction initial_packet(const dynamics::TimeDepForceSpec& spec, double sigma, const GridChoice& grid);

// Overlap of the propagated wavefunction with the closed-form packet after
// T, both on the default grid.
OverlapPhase packet_oracle_check(const dynamics::TimeDepForceSpec& spec, double sigma, double T,
                                 std::size_t steps);

}  // namespace abkit::numerics
