#include "sdq/mse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sdq/arith.hpp"

namespace sdq::mse {

namespace {
constexpr double kPi = std::numbers::pi;

double binomial(int n, int k) {
    double acc = 1.0;
    for (int i = 1; i <= k; ++i)
        acc = acc * static_cast<double>(n - k + i) / static_cast<double>(i);
    return acc;
}
}  // namespace

TimeDomainMse mse_time_domain(const Trajectory& traj, const Filter& phi,
                              long long burn_in) {
    const int m = traj.order();
    const double x = traj.mod.x;
    const Filter dphi = difference(phi, m);
    const auto L = static_cast<long long>(phi.size());

    // e[n] = x - (q*phi)[n] needs q back to n - L + 1 >= 1;
    // e[n] = (u_m * D^m phi)[n] needs u_m back to n - (L + m) + 1 >= 0.
    long long n0 = std::max(burn_in, L + m - 1);
    if (n0 > traj.steps)
        throw LengthError("trajectory shorter than filter support plus burn-in");

    const double inv_denom = 1.0 / static_cast<double>(phi.denom);
    const double inv_ddenom = 1.0 / static_cast<double>(dphi.denom);

    TimeDomainMse out;
    const long long count = traj.steps - n0 + 1;
    const long long block = std::max<long long>(1, count / 8);
    double block_acc = 0.0;
    long long block_n = 0;
    std::vector<double> block_means;

    long double sum_sq = 0.0L;
    for (long long n = n0; n <= traj.steps; ++n) {
        // Symbol route, exact integer convolution.
        __int128 acc_q = 0;
        for (size_t i = 0; i < phi.numer.size(); ++i)
            acc_q += static_cast<__int128>(phi.numer[i]) *
                     traj.symbols[static_cast<size_t>(n - 1 - static_cast<long long>(i))];
        double e1 = x - static_cast<double>(acc_q) * inv_denom;

        // State route through the differenced filter.
        long double acc_u = 0.0L;
        for (size_t i = 0; i < dphi.numer.size(); ++i)
            acc_u += static_cast<long double>(dphi.numer[i]) *
                     traj.last_coord(n - static_cast<long long>(i));
        double e2 = static_cast<double>(acc_u) * inv_ddenom;

        out.route_residual = std::max(out.route_residual, std::abs(e1 - e2));
        out.max_abs_err = std::max(out.max_abs_err, std::abs(e1));
        sum_sq += static_cast<long double>(e1) * e1;

        block_acc += e1 * e1;
        if (++block_n == block) {
            block_means.push_back(block_acc / static_cast<double>(block_n));
            block_acc = 0.0;
            block_n = 0;
        }
    }
    out.samples = static_cast<std::uint64_t>(count);
    out.mse = static_cast<double>(sum_sq / static_cast<long double>(count));
    if (block_means.size() >= 2) {
        double mean = 0.0;
        for (double b : block_means) mean += b;
        mean /= static_cast<double>(block_means.size());
        double var = 0.0;
        for (double b : block_means) var += (b - mean) * (b - mean);
        var /= static_cast<double>(block_means.size() - 1);
        out.sigma_block = std::sqrt(var / static_cast<double>(block_means.size()));
    }
    return out;
}

std::pair<double, double> mse_spectral(const SpectralMeasure& measure,
                                       const TransferFunction& transfer, int m,
                                       double x) {
    (void)x;
    double e_pp = 0.0;
    for (const spectral::Atom& a : measure.atoms) {
        double s = 2.0 * std::sin(kPi * a.location);
        e_pp += std::pow(s * s, m) * transfer.abs2(a.location) * a.mass;
    }

    const auto K = static_cast<int>(measure.rho_ac.size()) - 1;
    auto density = [&](double xi) {
        double acc = measure.rho_ac.empty() ? 0.0 : measure.rho_ac[0];
        for (int k = 1; k <= K; ++k)
            acc += 2.0 * (1.0 - static_cast<double>(k) / K) *
                   measure.rho_ac[static_cast<size_t>(k)] * std::cos(2.0 * kPi * k * xi);
        return acc;
    };
    auto weight = [&](double xi) {
        double s = 2.0 * std::sin(kPi * xi);
        return std::pow(s * s, m) * transfer.abs2(xi);
    };

    double e_ac = 0.0;
    if (measure.rho_ac.empty()) {
        e_ac = 0.0;
    } else if (transfer.kind == TransferFunction::Kind::IdealLowpass) {
        // The weight vanishes outside [-1/M, 1/M]; integrate that band only.
        const int P = 8192;
        const double a = 1.0 / transfer.M;
        double acc = 0.0;
        for (int j = 0; j < P; ++j) {
            double xi = -a + 2.0 * a * (j + 0.5) / P;
            double s = 2.0 * std::sin(kPi * xi);
            acc += std::pow(s * s, m) * density(xi);
        }
        e_ac = acc * (2.0 * a / P);
    } else {
        // The integrand is a trigonometric polynomial; a midpoint rule with
        // more points than its degree integrates it exactly.
        int degree = K + 2 * m;
        if (transfer.kind == TransferFunction::Kind::SincClosed)
            degree += 2 * transfer.p * (transfer.M - 1);
        else
            degree += 2 * static_cast<int>(transfer.fir.size() - 1);
        int P = degree + 9;
        double acc = 0.0;
        for (int j = 0; j < P; ++j) {
            double xi = (j + 0.5) / P;
            acc += weight(xi) * density(xi);
        }
        e_ac = acc / P;
    }
    return {e_pp, e_ac};
}

double sin_power_sinc_identity(int m, int M) {
    if (m < 1 || M < 1) throw ArgumentError("identity requires m >= 1 and M >= 1");
    auto integrand = [&](double xi) {
        double s = 2.0 * std::sin(kPi * xi);
        double a = sinc_pow_abs(M, m + 1, xi);
        return std::pow(s * s, m) * a * a;
    };
    int degree = 2 * m + 2 * (m + 1) * (M - 1);
    int P = degree + 9;
    double acc = 0.0;
    for (int j = 0; j < P; ++j) acc += integrand((j + 0.5) / P);
    double val = acc / P;
    double acc2 = 0.0;
    for (int j = 0; j < 2 * P; ++j) acc2 += integrand((j + 0.5) / (2 * P));
    double val2 = acc2 / (2 * P);
    if (std::abs(val2 - val) > 1e-12 * std::max(1.0, std::abs(val)))
        throw QuadratureError("identity quadrature failed to stabilize");
    double expected = binomial(2 * m, m) * std::pow(static_cast<double>(M), -2 * m - 1);
    return val / expected;
}

FitResult fit_decay(const MseCurve& curve) {
    const auto& pts = curve.points;
    if (pts.size() < 5) throw ArgumentError("fit needs at least 5 points");
    int min_m = pts[0].M, max_m = pts[0].M;
    for (const auto& p : pts) {
        min_m = std::min(min_m, p.M);
        max_m = std::max(max_m, p.M);
    }
    if (max_m < 4 * min_m) throw ArgumentError("fit needs at least two octaves of M");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : pts) {
        if (!(p.total > 0.0)) throw DegenerateError("log fit requires positive errors");
        double lx = std::log(static_cast<double>(p.M));
        double ly = std::log(p.total);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    auto n = static_cast<double>(pts.size());
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;
    double residual = 0.0;
    for (const auto& p : pts) {
        double lx = std::log(static_cast<double>(p.M));
        residual = std::max(residual, std::abs(std::log(p.total) - (intercept + slope * lx)));
    }
    return {slope, std::exp(intercept), residual};
}

LiouvilleInput liouville_input(double x0, int l, double c2) {
    if (l < 2) throw ArgumentError("l must be >= 2");
    if (!(c2 > 0.0 && c2 <= 1.0)) throw ArgumentError("c2 must lie in (0, 1]");

    LiouvilleInput out;
    out.x0 = x0;
    out.l = l;
    out.c2 = c2;
    out.truncated = true;  // the factorial tail is always cut at double precision

    double x = x0;
    long long fact = 1;
    for (int k = 2; k <= l; ++k) fact *= k;  // l!
    int k_last = 0;
    for (int k = l; fact <= 60; fact *= ++k) {
        x += std::ldexp(1.0, -static_cast<int>(fact));
        k_last = k;
    }
    out.x = x;
    out.k_last = k_last;

    for (int q = l; q < k_last; ++q) {
        long long qfact = 1;
        for (int i = 2; i <= q; ++i) qfact *= i;
        long long e = q * qfact - 1;
        if (qfact > 62 || e + 1 > 62) continue;  // not representable in 64 bits
        Resonance r;
        r.q = q;
        r.n_q = 1LL << qfact;
        r.big_m = static_cast<long long>(std::floor(std::ldexp(c2, static_cast<int>(e))));
        r.norm_nqx = arith::nearest_int_distance(static_cast<double>(r.n_q) * x);
        r.lower_gate = c2 / (4.0 * static_cast<double>(r.big_m));
        r.upper_gate = c2 / static_cast<double>(r.big_m);
        out.resonances.push_back(r);
    }
    return out;
}

}  // namespace sdq::mse
