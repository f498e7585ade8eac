#include <cmath>
#include <vector>

#include "abkit/capacitor.hpp"
#include "abkit/errors.hpp"
#include "abkit/quadrature.hpp"
#include "doctest.h"

using namespace abkit;
using namespace abkit::capacitor;

namespace {

// Heavy plates so the fixed-plate regime holds.
CapacitorSpec heavy_spec() {
    CapacitorSpec s;
    s.sigma_s = 0.8;
    s.area = 2.0;
    s.D = 1.5;
    s.M = 1e6;
    s.e = 0.3;
    s.T = 2.0;
    s.u = 5.0;
    return s;
}

CapacitorSpec free_spec(double ratio) {
    CapacitorSpec s;
    s.sigma_s = 1.3;
    s.area = 2.0;
    s.M = 4.0;
    s.v0 = 0.7;
    s.e = ratio * s.sigma_s * s.area;
    return s;
}

}  // namespace

TEST_CASE("fixed plates: shift is -e sigma D T / hbar and vanishes for a neutral particle") {
    auto s = heavy_spec();
    CHECK(fixed_plate_phase_shift(s) == doctest::Approx(-0.3 * 0.8 * 1.5 * 2.0).epsilon(1e-14));
    s.e = 0.0;
    CHECK(fixed_plate_phase_shift(s) == 0.0);
    CHECK(plate_attributed_phase(s).total == 0.0);
}

TEST_CASE("fixed plates: doubling D doubles the shift") {
    auto s = heavy_spec();
    const double base = fixed_plate_phase_shift(s);
    s.D *= 2.0;
    CHECK(fixed_plate_phase_shift(s) == doctest::Approx(2.0 * base).epsilon(1e-14));
}

TEST_CASE("fixed plates: shift agrees with quadrature of the branch potential difference") {
    const auto s = heavy_spec();
    // Electron energy +- e sigma D / 2 on the two sides.
    const double q = numerics::adaptive_quad(
                         [&](double) { return -(0.5 * s.e * s.sigma_s * s.D) * 2.0; }, 0.0, s.T)
                         .value;
    CHECK(fixed_plate_phase_shift(s) == doctest::Approx(q).epsilon(1e-12));
}

TEST_CASE("fixed plates: the four plate contributions are each a quarter of the shift") {
    const auto s = heavy_spec();
    const auto led = plate_attributed_phase(s);
    const double shift = fixed_plate_phase_shift(s);
    for (const auto& row : led.plates)
        for (const auto& p : row) CHECK(p.contribution == doctest::Approx(0.25 * shift).epsilon(1e-12));
    CHECK(std::abs(led.total - shift) <= 1e-12 * std::abs(shift));
    // Kinetic parts cancel between traverses.
    for (int j = 0; j < 2; ++j)
        CHECK(led.plates[0][j].ledger.kinetic == doctest::Approx(led.plates[1][j].ledger.kinetic).epsilon(1e-12));
    CHECK(led.displacement_ratio < 1e-3);
}

TEST_CASE("fixed plates: light plates leave the fixed-plate regime") {
    auto s = heavy_spec();
    s.M = 1.0;
    CHECK_THROWS_AS(plate_attributed_phase(s), RegimeError);
    try {
        plate_attributed_phase(s);
    } catch (const RegimeError& err) {
        CHECK(err.ratio_name() == "displacement_ratio");
        CHECK(err.ratio() > 1e-3);
    }
}

TEST_CASE("fixed plates: ramps add a correction proportional to their duration") {
    auto s = heavy_spec();
    CHECK(ramp_correction(s) == 0.0);
    s.ramp_time = 0.1;
    CHECK(ramp_correction(s) == doctest::Approx(fixed_plate_phase_shift(s) * 0.1 / s.T).epsilon(1e-14));
}

TEST_CASE("split: total is independent of the electron fraction") {
    const auto s = heavy_spec();
    const double shift = fixed_plate_phase_shift(s);
    std::vector<double> fractions{0.37};
    for (int i = 0; i <= 10; ++i) fractions.push_back(0.1 * i);
    for (const double f : fractions) {
        const auto sp = attribution_split(s, f);
        CHECK(std::abs(sp.total - shift) <= 1e-12 * std::abs(shift));
        CHECK(sp.electron == doctest::Approx(f * shift).epsilon(1e-12));
        CHECK(sp.upper_plate == doctest::Approx(0.5 * (1.0 - f) * shift).epsilon(1e-12));
    }
    const auto all_plates = attribution_split(s, 0.0);
    CHECK(all_plates.electron == 0.0);
    const auto all_electron = attribution_split(s, 1.0);
    CHECK(std::abs(all_electron.upper_plate) <= 1e-14 * std::abs(shift));
    CHECK(std::abs(all_electron.lower_plate) <= 1e-14 * std::abs(shift));
    CHECK_THROWS_AS(attribution_split(s, 1.5), InvalidInput);
}

TEST_CASE("free plates: a neutral particle gives symmetric branches and no shift") {
    const auto r = free_plate_scenario(free_spec(0.0));
    CHECK(r.T_plus == r.T_minus);
    CHECK(r.D_plus == r.D_minus);
    CHECK(r.phase_shift == 0.0);
    CHECK(r.plate_visibility == 1.0);
}

TEST_CASE("free plates: the attracting branch returns first") {
    const auto r = free_plate_scenario(free_spec(0.1));
    CHECK(r.T_plus < r.T_bar);
    CHECK(r.T_bar < r.T_minus);
    CHECK(r.D_plus < r.D_minus);
    CHECK(r.D_plus == doctest::Approx(0.25 * 0.7 * r.T_plus).epsilon(1e-14));
}

TEST_CASE("free plates: terms are -1/3 and +2/3 of sigma e v0 T_bar^2 at small coupling") {
    for (const double ratio : {1e-3, 1e-4, 1e-5}) {
        const auto s = free_spec(ratio);
        const auto r = free_plate_scenario(s);
        const double unit = s.sigma_s * s.e * s.v0 * r.T_bar * r.T_bar;
        CHECK(r.approx_electron_field_term == doctest::Approx(-unit / 3.0).epsilon(1e-14));
        CHECK(r.approx_self_field_term == doctest::Approx(2.0 * unit / 3.0).epsilon(1e-14));
        CHECK(std::abs(r.electron_field_term / r.approx_electron_field_term - 1.0) <= 3.0 * ratio);
        CHECK(std::abs(r.self_field_term / r.approx_self_field_term - 1.0) <= 3.0 * ratio);
        CHECK(std::abs(r.phase_shift / r.approx_phase_shift - 1.0) <= 3.0 * ratio);
        CHECK(free_plate_scenario(s, false).phase_shift == r.approx_phase_shift);
    }
}

TEST_CASE("free plates: closed forms agree with quadrature along the trajectories") {
    const auto r = free_plate_scenario(free_spec(0.2));
    CHECK(r.quadrature_electron_field_term == doctest::Approx(r.electron_field_term).epsilon(1e-10));
    CHECK(r.quadrature_self_field_term == doctest::Approx(r.self_field_term).epsilon(1e-9));
}

TEST_CASE("free plates: potential integral equals the work integral") {
    for (const double ratio : {0.01, 0.2, 0.6}) {
        const auto r = free_plate_scenario(free_spec(ratio));
        CHECK(r.potential_integral == doctest::Approx(r.work_integral).epsilon(1e-9));
    }
}

TEST_CASE("free plates: coupling at or above sigma A is rejected") {
    CHECK_THROWS_AS(free_plate_scenario(free_spec(1.0)), InvalidInput);
    CHECK_THROWS_AS(free_plate_scenario(free_spec(1.5)), InvalidInput);
    auto s = free_spec(0.1);
    s.v0 = 0.0;
    CHECK_THROWS_AS(free_plate_scenario(s), InvalidInput);
}

TEST_CASE("capacitor validation") {
    auto s = heavy_spec();
    s.D = -1.0;
    CHECK_THROWS_AS(fixed_plate_phase_shift(s), InvalidInput);
    s = heavy_spec();
    s.e = NAN;
    CHECK_THROWS_AS(fixed_plate_phase_shift(s), InvalidInput);
}
