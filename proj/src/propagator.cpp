#include "abkit/propagator.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "abkit/errors.hpp"
#include "abkit/packet.hpp"

namespace abkit::numerics {

using cd = std::complex<double>;

GridWavefunction::GridWavefunction(double x_min, double x_max, std::vector<cd> amplitudes, double time)
    : x_min_(x_min), x_max_(x_max), psi_(std::move(amplitudes)), time_(time) {
    if (!(x_max > x_min)) throw InvalidInput("grid needs x_max > x_min");
    if (psi_.size() < 4) throw InvalidInput("grid needs at least 4 points");
}

GridWavefunction GridWavefunction::sample(double x_min, double x_max, std::size_t n,
                                          const std::function<cd(double)>& psi, double time) {
    std::vector<cd> values(n);
    const double dx = (x_max - x_min) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = psi(x_min + static_cast<double>(i) * dx);
    return GridWavefunction(x_min, x_max, std::move(values), time);
}

std::vector<double> GridWavefunction::positions() const {
    std::vector<double> xs(psi_.size());
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = x(i);
    return xs;
}

double GridWavefunction::norm() const {
    std::vector<double> d(psi_.size());
    std::transform(psi_.begin(), psi_.end(), d.begin(), [](const cd& z) { return std::norm(z); });
    return pairwise_sum(d) * dx();
}

double GridWavefunction::mean_position() const {
    std::vector<double> w(psi_.size()), xw(psi_.size());
    for (std::size_t i = 0; i < psi_.size(); ++i) {
        w[i] = std::norm(psi_[i]);
        xw[i] = w[i] * x(i);
    }
    return pairwise_sum(xw) / pairwise_sum(w);
}

double GridWavefunction::edge_fraction() const {
    const std::size_t n = psi_.size();
    const std::size_t band = std::max<std::size_t>(4, n / 100);
    double peak = 0.0, edge = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::norm(psi_[i]);
        peak = std::max(peak, d);
        if (i < band || i >= n - band) edge = std::max(edge, d);
    }
    return peak > 0.0 ? edge / peak : 0.0;
}

namespace {

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// FFTW planning is not thread safe; execution of distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

GridWavefunction propagate_schrodinger_1d(const dynamics::TimeDepForceSpec& h, GridWavefunction psi, double T,
                                          std::size_t steps, const PropagateOptions& opts) {
    h.validate();
    if (!(T > 0.0)) throw InvalidInput("propagation time must be positive");
    if (steps == 0) throw InvalidInput("propagation needs at least one step");

    const std::size_t n = psi.size();
    auto& data = psi.amplitudes();
    auto* raw = reinterpret_cast<fftw_complex*>(data.data());
    Plan forward, backward;
    {
        std::lock_guard lock(planner_mutex());
        forward.reset(fftw_plan_dft_1d(static_cast<int>(n), raw, raw, FFTW_FORWARD, FFTW_ESTIMATE));
        backward.reset(fftw_plan_dft_1d(static_cast<int>(n), raw, raw, FFTW_BACKWARD, FFTW_ESTIMATE));
    }
    if (!forward || !backward) throw NumericError("FFT planning failed");

    const double dx = psi.dx();
    const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * dx);
    std::vector<double> k(n), xs = psi.positions();
    for (std::size_t j = 0; j < n; ++j) {
        const auto jj = static_cast<double>(j);
        k[j] = (j < n / 2 ? jj : jj - static_cast<double>(n)) * dk;
    }

    const double dt = T / static_cast<double>(steps);
    const double inv_n = 1.0 / static_cast<double>(n);
    const double q = h.q, m = h.m, c = h.c;
    const double t_start = psi.time();

    auto check_leak = [&](double t) {
        const double leak = psi.edge_fraction();
        if (leak > opts.leak_tolerance)
            throw NumericError("wavefunction reached grid boundary at t = " + std::to_string(t), leak);
    };

    for (std::size_t s = 0; s < steps; ++s) {
        const double t_mid = t_start + (static_cast<double>(s) + 0.5) * dt;
        const double grad = h.gradient(t_mid), off = h.offset(t_mid);
        const double shift = q * h.vector_potential(t_mid) / c;

        for (std::size_t i = 0; i < n; ++i) data[i] *= std::polar(1.0, -0.5 * dt * q * (xs[i] * grad + off));
        fftw_execute(forward.get());
        for (std::size_t j = 0; j < n; ++j) {
            const double kin = k[j] - shift;
            data[j] *= std::polar(inv_n, -dt * kin * kin / (2.0 * m));
        }
        fftw_execute(backward.get());
        for (std::size_t i = 0; i < n; ++i) data[i] *= std::polar(1.0, -0.5 * dt * q * (xs[i] * grad + off));

        if (opts.leak_check_interval > 0 && (s + 1) % opts.leak_check_interval == 0)
            check_leak(t_start + static_cast<double>(s + 1) * dt);
    }
    psi.set_time(t_start + T);
    check_leak(psi.time());
    return psi;
}

double unwrap_near(double phase, double reference) {
    const double two_pi = 2.0 * std::numbers::pi;
    return phase + two_pi * std::round((reference - phase) / two_pi);
}

OverlapPhase extract_global_phase(const GridWavefunction& a, const GridWavefunction& b,
                                  std::optional<double> previous) {
    if (a.size() != b.size() || a.x_min() != b.x_min() || a.x_max() != b.x_max())
        throw InvalidInput("extract_global_phase: wavefunctions live on different grids");
    const auto& pa = a.amplitudes();
    const auto& pb = b.amplitudes();
    std::vector<double> re(pa.size()), im(pa.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
        const cd z = std::conj(pa[i]) * pb[i];
        re[i] = z.real();
        im[i] = z.imag();
    }
    const cd overlap(pairwise_sum(re) * a.dx(), pairwise_sum(im) * a.dx());
    const double na = a.norm(), nb = b.norm();
    if (!(na > 0.0) || !(nb > 0.0)) throw NumericError("extract_global_phase: zero wavefunction");
    const double mag = std::abs(overlap) / std::sqrt(na * nb);
    if (mag < 1e-14) throw NumericError("extract_global_phase: degenerate overlap", mag);
    double phase = std::arg(overlap);
    if (previous) phase = unwrap_near(phase, *previous);
    return {mag, phase};
}

GridChoice default_grid(const dynamics::TimeDepForceSpec& spec, double sigma, double T, double margin) {
    const double x_end = dynamics::solve_time_dep(spec, T).x;
    GridChoice g;
    g.x_min = std::min(spec.x0, x_end) - margin * sigma;
    g.x_max = std::max(spec.x0, x_end) + margin * sigma;
    // Highest canonical momentum present: |p| along the path plus a margin of
    // the momentum width 1 / (2 sigma).
    double p_max = std::abs(spec.p0());
    for (int i = 1; i <= 64; ++i) {
        const double t = T * i / 64.0;
        const auto pt = dynamics::solve_time_dep(spec, t);
        p_max = std::max({p_max, std::abs(pt.p), std::abs(spec.m * pt.v)});
    }
    p_max += margin / sigma;
    const double needed = 1.5 * (g.x_max - g.x_min) * p_max / std::numbers::pi;
    g.n = std::size_t{1} << 14;
    while (static_cast<double>(g.n) < needed) g.n <<= 1;
    return g;
}

GridWavefunction initial_packet(const dynamics::TimeDepForceSpec& spec, double sigma, const GridChoice& grid) {
    const double p0 = spec.p0();
    const double norm = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25);
    return GridWavefunction::sample(grid.x_min, grid.x_max, grid.n, [&](double x) {
        const double d = x - spec.x0;
        return norm * std::exp(std::complex<double>(-d * d / (4.0 * sigma * sigma), p0 * d));
    });
}

OverlapPhase packet_oracle_check(const dynamics::TimeDepForceSpec& spec, double sigma, double T,
                                 std::size_t steps) {
    const auto grid = default_grid(spec, sigma, T);
    const auto psi = propagate_schrodinger_1d(spec, initial_packet(spec, sigma, grid), T, steps);
    const auto pk = packet::evolve_packet_timedep(spec, sigma, T);
    const auto analytic =
        GridWavefunction::sample(grid.x_min, grid.x_max, grid.n, [&](double x) { return pk.amplitude(x); }, T);
    return extract_global_phase(psi, analytic);
}

}  // namespace abkit::numerics
