#include <doctest.h>

#include <cmath>

#include "sdq/filters.hpp"
#include "sdq/mse.hpp"
#include "sdq/simulate.hpp"
#include "sdq/spectral.hpp"
#include "sdq/tiling.hpp"

using namespace sdq;

TEST_CASE("time-domain error routes agree and zero input gives zero error") {
    Modulator mod{2, QuantizerRule::ideal(), std::sqrt(2.0) - 1.0};
    auto traj = run(mod, {0.0, 0.0}, 50'000);
    auto res = mse::mse_time_domain(traj, sinc_p(16, 3), 1000);
    CHECK(res.route_residual <= 1e-9);
    CHECK(res.mse > 0.0);

    Modulator zero{2, QuantizerRule::ideal(), 0.0};
    auto zt = run(zero, {0.0, 0.0}, 5'000);
    auto zres = mse::mse_time_domain(zt, sinc_p(8, 3), 100);
    CHECK(zres.mse == 0.0);
    CHECK(zres.max_abs_err == 0.0);
}

TEST_CASE("uniform error bound |e| <= |u_m|_inf |D^m phi|_1") {
    Modulator mod{2, QuantizerRule::ideal(), std::sqrt(2.0) - 1.0};
    auto traj = run(mod, {0.0, 0.0}, 100'000);
    for (int M : {4, 16, 64}) {
        auto phi = sinc_p(M, 3);
        auto res = mse::mse_time_domain(traj, phi, 1000);
        double um_inf = 0.5;  // ideal rule pins |u_m| < 1/2
        CHECK(res.max_abs_err <= um_inf * l1_norm(difference(phi, 2)) + 1e-12);
    }
}

TEST_CASE("first-order rect-average error stays below 1/M") {
    Modulator mod{1, QuantizerRule::ideal(), std::sqrt(2.0) - 1.0};
    auto traj = run(mod, {0.0}, 100'000);
    for (int M : {4, 32, 128, 1024}) {
        auto res = mse::mse_time_domain(traj, rect(M), 1000);
        CHECK(res.max_abs_err <= 1.0 / M);
        CHECK(res.mse <= 1.0 / (static_cast<double>(M) * M));
    }
}

TEST_CASE("trajectory shorter than the filter support is rejected") {
    Modulator mod{1, QuantizerRule::ideal(), 0.3};
    auto traj = run(mod, {0.0}, 50);
    CHECK_THROWS_AS(mse::mse_time_domain(traj, rect(128), 0), LengthError);
}

TEST_CASE("sin-power/sinc integral identity") {
    CHECK(mse::sin_power_sinc_identity(1, 8) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(mse::sin_power_sinc_identity(2, 16) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(mse::sin_power_sinc_identity(3, 4) == doctest::Approx(1.0).epsilon(1e-10));
    for (int m : {1, 2, 3})
        for (int M : {2, 3, 5, 17, 33, 64})
            CHECK(std::abs(mse::sin_power_sinc_identity(m, M) - 1.0) <= 1e-8);
}

TEST_CASE("spectral MSE of a flat density matches the identity value") {
    // s == 1/12 and sinc^{m+1}_M gives E_ac = (1/12) C(2m,m) M^{-2m-1}.
    mse::SpectralMeasure measure;
    measure.order = 2;
    measure.rho_ac = {1.0 / 12.0};  // flat density
    for (int M : {8, 32}) {
        auto tf = TransferFunction::sinc_closed(M, 3);
        auto [pp, ac] = mse::mse_spectral(measure, tf, 2, std::sqrt(2.0) - 1.0);
        CHECK(pp == 0.0);
        double want = (1.0 / 12.0) * 6.0 * std::pow(static_cast<double>(M), -5.0);
        CHECK(ac == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("spectral MSE pure-point sum for first-order masses") {
    // Ideal first-order masses 1/(4 pi^2 n^2) against sinc^2_M.
    const double pi = 3.14159265358979323846;
    double x = std::sqrt(2.0) - 1.0;
    mse::SpectralMeasure measure;
    measure.order = 1;
    for (long long n = -512; n <= 512; ++n) {
        if (n == 0) continue;
        measure.atoms.push_back(
            {n, sdq::arith::frac(n * x), 1.0 / (4.0 * pi * pi * n * n)});
    }
    auto tf = TransferFunction::sinc_closed(16, 2);
    auto [pp, ac] = mse::mse_spectral(measure, tf, 1, x);
    CHECK(ac == 0.0);
    // Oracle: direct sum with the closed-form transfer magnitude.
    double want = 0.0;
    for (const auto& a : measure.atoms) {
        double s = 2.0 * std::sin(pi * a.location);
        want += s * s * std::pow(sinc_pow_abs(16, 2, a.location), 2) * a.mass;
    }
    CHECK(pp == doctest::Approx(want).epsilon(1e-12));
    CHECK(pp > 0.0);
}

TEST_CASE("zero transfer gives zero spectral MSE") {
    mse::SpectralMeasure measure;
    measure.order = 2;
    measure.rho_ac = {1.0 / 12.0};
    measure.atoms.push_back({1, 0.4142, 0.01});
    // The ideal low-pass at M with an atom far outside the passband.
    auto tf = TransferFunction::ideal_lowpass(64);
    auto [pp, ac] = mse::mse_spectral(measure, tf, 2, 0.4142);
    CHECK(pp == 0.0);              // atom outside the passband
    CHECK(ac > 0.0);               // band integral remains
    CHECK(ac < 1e-6);
}

TEST_CASE("time-domain and spectral routes agree on a certified scheme") {
    Modulator mod{2, QuantizerRule::ideal(), std::sqrt(2.0) - 1.0};
    const long long burn = 1000;
    auto traj = run(mod, {0.0, 0.0}, 1'000'000 + burn);
    auto tile = sdq::tiling::build_tile(traj, 128, {burn, 0.02});
    auto mp = tile.extract_midpoint();
    auto pp = sdq::spectral::pure_point_part(mp, mod.x, 50);
    mse::SpectralMeasure measure;
    measure.order = 2;
    measure.atoms = pp.atoms;
    measure.rho_ac = sdq::spectral::ac_part_order2(mp, mod.x, 50);

    double prev = 1e9;
    for (int M : {16, 64, 256}) {
        auto td = mse::mse_time_domain(traj, sinc_p(M, 3), burn);
        auto [e_pp, e_ac] = mse::mse_spectral(measure, TransferFunction::sinc_closed(M, 3),
                                              2, mod.x);
        double spectral_total = e_pp + e_ac;
        double tol = 5.0 * td.sigma_block + 0.05 * spectral_total;
        CHECK(std::abs(td.mse - spectral_total) <= tol);
        // Monotone localization: larger windows never increase the error
        // beyond noise.
        CHECK(td.mse <= prev + 2.0 * td.sigma_block);
        prev = td.mse;
    }
}

TEST_CASE("atom masses plus density mass reproduce rho[0]") {
    Modulator mod{1, QuantizerRule::ideal(), std::sqrt(2.0) - 1.0};
    auto traj = run(mod, {0.0}, 1'000'000);
    auto tile = sdq::tiling::build_tile(traj, 1024, {1000, 0.02});
    auto mp = tile.extract_midpoint();
    auto pp = sdq::spectral::pure_point_part(mp, mod.x, 1);
    double atom_sum = 0.0;
    for (const auto& a : pp.atoms) atom_sum += a.mass;
    auto est = sdq::spectral::autocorrelation(traj, 1, 1000);
    // Order 1 is purely atomic; the truncated mass sum accounts for rho[0]
    // up to the coefficient tail 1/(2 pi^2 N_fourier).
    CHECK(std::abs(atom_sum - est.rho[0]) < 1e-3);
}

TEST_CASE("ideal low-pass asymptotic constant via ratio test") {
    // For a flat density, E_ac(ideal_M) M^{2m+1} / s(0) converges to the
    // band integral constant (2 pi)^{2m} / (m + 1/2).
    const double pi = 3.14159265358979323846;
    for (int m : {1, 2, 3}) {
        mse::SpectralMeasure measure;
        measure.order = m;
        measure.rho_ac = {1.0 / 12.0};
        auto [pp, ac] =
            mse::mse_spectral(measure, TransferFunction::ideal_lowpass(1024), m, 0.41);
        (void)pp;
        double ratio = ac * std::pow(1024.0, 2 * m + 1) / (1.0 / 12.0);
        double want = std::pow(2.0 * pi, 2 * m) / (m + 0.5);
        CHECK(ratio == doctest::Approx(want).epsilon(1e-3));
    }
}

TEST_CASE("fit of an exact power law recovers slope and constant") {
    mse::MseCurve curve;
    for (int M : {16, 32, 64, 128, 256, 512})
        curve.points.push_back({M, 7.0 * std::pow(static_cast<double>(M), -5.0), 0, 0});
    auto fit = mse::fit_decay(curve);
    CHECK(fit.slope == doctest::Approx(-5.0).epsilon(1e-12));
    CHECK(fit.constant == doctest::Approx(7.0).epsilon(1e-10));
    CHECK(fit.residual < 1e-12);
}

TEST_CASE("first-order pure-point decay for a bounded-quotient input") {
    // Golden-ratio input, sinc^2 filtering: the atom sum decays near M^-4;
    // the finite-range log-log slope passes -3.8 once M >= 32.
    const double pi = 3.14159265358979323846;
    double x = (std::sqrt(5.0) - 1.0) / 2.0;
    mse::SpectralMeasure measure;
    measure.order = 1;
    for (long long n = -100000; n <= 100000; ++n) {
        if (n == 0) continue;
        measure.atoms.push_back(
            {n, sdq::arith::frac(n * x), 1.0 / (4.0 * pi * pi * n * n)});
    }
    mse::MseCurve curve;
    for (int M = 32; M <= 1024; M *= 2) {
        auto [pp, ac] = mse::mse_spectral(measure, TransferFunction::sinc_closed(M, 2),
                                          1, x);
        (void)ac;
        curve.points.push_back({M, pp, pp, 0.0});
    }
    auto fit = mse::fit_decay(curve);
    CHECK(fit.slope <= -3.8);
    CHECK(fit.slope >= -4.2);
}

TEST_CASE("fit rejects degenerate data") {
    mse::MseCurve curve;
    for (int M : {16, 32, 64, 128, 256})
        curve.points.push_back({M, 0.0, 0, 0});
    CHECK_THROWS_AS(mse::fit_decay(curve), DegenerateError);

    mse::MseCurve tiny;
    tiny.points.push_back({16, 1.0, 0, 0});
    CHECK_THROWS_AS(mse::fit_decay(tiny), ArgumentError);
}

TEST_CASE("liouville input construction") {
    auto li = mse::liouville_input(0.5, 2);
    CHECK(li.x == doctest::Approx(0.765625059604645).epsilon(1e-15));
    CHECK(li.k_last == 4);
    CHECK(li.truncated);
    REQUIRE(li.resonances.size() == 2);  // q = 2, 3

    for (const auto& r : li.resonances) {
        CHECK(r.norm_nqx > r.lower_gate);
        CHECK(r.norm_nqx < r.upper_gate);
    }
    CHECK(li.resonances[0].n_q == 4);
    CHECK(li.resonances[0].big_m == 4);       // floor(0.5 * 2^3)
    CHECK(li.resonances[1].n_q == 64);
    CHECK(li.resonances[1].big_m == 65536);   // floor(0.5 * 2^17)

    // l beyond double precision: no representable factorial terms.
    auto far = mse::liouville_input(0.5, 5);
    CHECK(far.truncated);
    CHECK(far.resonances.empty());
    CHECK(far.x == 0.5);
}
