#include "sdq/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "sdq/arith.hpp"

namespace sdq::spectral {

namespace {
constexpr double kPi = std::numbers::pi;
}

double saw_autocorr(double t) {
    double f = arith::frac(t);
    return (f * f - f + 1.0 / 6.0) / 2.0;
}

AutocorrAccumulator::AutocorrAccumulator(int k_max) : k_(k_max) {
    if (k_max < 0) throw ArgumentError("k_max must be >= 0");
    ring_.assign(static_cast<size_t>(k_max) + 1, 0.0);
    sums_.assign(static_cast<size_t>(k_max) + 1, 0.0);
}

void AutocorrAccumulator::push(double um) {
    size_t pos = static_cast<size_t>(n_ % (k_ + 1));
    ring_[pos] = um;
    long long lags = std::min<long long>(static_cast<long long>(n_), k_);
    for (long long k = 0; k <= lags; ++k) {
        size_t prev = static_cast<size_t>((n_ - k) % (k_ + 1));
        sums_[static_cast<size_t>(k)] += ring_[prev] * um;
    }
    ++n_;
}

AutocorrEstimate AutocorrAccumulator::estimate() const {
    AutocorrEstimate est;
    est.k_max = k_;
    est.n_samples = n_;
    est.rho.resize(static_cast<size_t>(k_) + 1, 0.0);
    for (int k = 0; k <= k_; ++k) {
        std::uint64_t pairs = n_ > static_cast<std::uint64_t>(k) ? n_ - k : 0;
        est.rho[static_cast<size_t>(k)] =
            pairs ? sums_[static_cast<size_t>(k)] / static_cast<double>(pairs) : 0.0;
    }
    return est;
}

AutocorrEstimate autocorrelation(const Trajectory& traj, int k_max, long long burn_in,
                                 int threads) {
    long long available = traj.steps - burn_in + 1;
    if (available < 100LL * std::max(1, k_max))
        throw UnderSampledError("need at least 100 * k_max post-burn-in samples");

    AutocorrEstimate est;
    est.k_max = k_max;
    est.n_samples = static_cast<std::uint64_t>(available);
    est.rho.assign(static_cast<size_t>(k_max) + 1, 0.0);

    auto eval_lag = [&](int k) {
        long double acc = 0.0L;
        long long pairs = 0;
        for (long long n = burn_in; n + k <= traj.steps; ++n) {
            acc += static_cast<long double>(traj.last_coord(n)) * traj.last_coord(n + k);
            ++pairs;
        }
        est.rho[static_cast<size_t>(k)] =
            pairs ? static_cast<double>(acc / pairs) : 0.0;
    };
    if (threads <= 1) {
        for (int k = 0; k <= k_max; ++k) eval_lag(k);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (int k = next.fetch_add(1); k <= k_max; k = next.fetch_add(1))
                    eval_lag(k);
            });
        for (auto& th : pool) th.join();
    }
    return est;
}

PurePointPart pure_point_part(const tiling::MidpointFunction& mp, double x,
                              int k_max, double mass_floor) {
    PurePointPart out;
    const auto n_fourier = static_cast<long long>(mp.fourier.size()) - 1;
    for (long long n = -n_fourier; n <= n_fourier; ++n) {
        double mass = std::norm(mp.fourier[static_cast<size_t>(std::llabs(n))]);
        if (mass < mass_floor) continue;
        out.atoms.push_back({n, arith::frac(static_cast<double>(n) * x), mass});
    }
    out.rho_pp.assign(static_cast<size_t>(k_max) + 1, 0.0);
    for (int k = 0; k <= k_max; ++k) {
        double acc = 0.0;
        for (const Atom& a : out.atoms)
            acc += a.mass * std::cos(2.0 * kPi * k * static_cast<double>(a.n) * x);
        out.rho_pp[static_cast<size_t>(k)] = acc;
    }
    return out;
}

std::vector<double> ac_part_order2(const tiling::MidpointFunction& mp, double x,
                                   int k_max) {
    if (mp.order != 2)
        throw OrderError("the explicit ac formula is implemented for order 2");
    std::vector<double> rho(static_cast<size_t>(k_max) + 1, 0.0);
    for (int k = 0; k <= k_max; ++k) {
        int pts = std::max(4 * mp.grid, 256 * std::max(1, k));
        double acc = 0.0;
        for (int j = 0; j < pts; ++j) {
            double v = (j + 0.5) / pts;
            double arg = k * v - mp.lambda_interp(v - x / 2.0 + k * x / 2.0) +
                         mp.lambda_interp(v - x / 2.0 - k * x / 2.0);
            acc += saw_autocorr(arg);
        }
        rho[static_cast<size_t>(k)] = acc / pts;
    }
    return rho;
}

DensityEstimate density_estimate(std::span<const double> rho_ac, int grid) {
    if (rho_ac.empty()) throw ArgumentError("need at least the k = 0 coefficient");
    const auto K = static_cast<int>(rho_ac.size()) - 1;
    DensityEstimate out;
    out.xi.resize(static_cast<size_t>(grid));
    out.s.resize(static_cast<size_t>(grid));
    auto window = [&](int k) {
        return K > 0 ? 1.0 - static_cast<double>(k) / K : (k == 0 ? 1.0 : 0.0);
    };
    for (int j = 0; j < grid; ++j) {
        double xi = static_cast<double>(j) / grid;
        double acc = rho_ac[0];
        for (int k = 1; k <= K; ++k)
            acc += 2.0 * window(k) * rho_ac[static_cast<size_t>(k)] *
                   std::cos(2.0 * kPi * k * xi);
        out.xi[static_cast<size_t>(j)] = xi;
        out.s[static_cast<size_t>(j)] = acc;
    }
    out.s0_windowed = rho_ac[0];
    out.s0_raw = rho_ac[0];
    for (int k = 1; k <= K; ++k) {
        out.s0_windowed += 2.0 * window(k) * rho_ac[static_cast<size_t>(k)];
        out.s0_raw += 2.0 * rho_ac[static_cast<size_t>(k)];
    }
    return out;
}

double herglotz_min_eigenvalue(std::span<const double> rho) {
    const auto n = static_cast<Eigen::Index>(rho.size());
    Eigen::MatrixXd T(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            T(i, j) = rho[static_cast<size_t>(std::llabs(i - j))];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

FourierDecayFit fourier_decay_fit(const tiling::MidpointFunction& mp, double floor) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n_used = 0;
    for (size_t n = 1; n < mp.fourier.size(); ++n) {
        double a = std::abs(mp.fourier[n]);
        if (a < floor) continue;
        double lx = std::log(static_cast<double>(n));
        double ly = std::log(a);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++n_used;
    }
    if (n_used < 3)
        throw DegenerateError("too few coefficients above the floor for a decay fit");
    double denom = n_used * sxx - sx * sx;
    double slope = (n_used * sxy - sx * sy) / denom;
    double intercept = (sy - slope * sx) / n_used;
    return {-slope, std::exp(intercept), n_used};
}

double pure_point_tail_bound(const FourierDecayFit& fit, int n_fourier, int m) {
    if (fit.beta <= 0.5)
        return std::numeric_limits<double>::infinity();  // tail sum diverges
    double tail = 0.0;
    // sum_{n > N} n^{-2 beta} bounded by the integral from N.
    tail = std::pow(static_cast<double>(n_fourier), 1.0 - 2.0 * fit.beta) /
           (2.0 * fit.beta - 1.0);
    return 2.0 * std::pow(4.0, m) * fit.c * fit.c * tail;  // both signs of n
}

ZeroMeanFn saw_autocorr_fn() {
    ZeroMeanFn f;
    // A integrates to zero over a period: (1/3 - 1/2 + 1/6)/2 = 0.
    f.f = [](double t) { return saw_autocorr(t); };
    f.norm_A = 1.0 / 12.0;
    f.norm_Linf = 1.0 / 12.0;
    f.norm_L2 = 1.0 / (12.0 * std::sqrt(5.0));
    return f;
}

namespace {

double midpoint_integral(const std::function<double(double)>& g, int pts) {
    double acc = 0.0;
    for (int j = 0; j < pts; ++j) acc += g((j + 0.5) / pts);
    return acc / pts;
}

}  // namespace

DecayLemmaReport verify_decay_lemma(const ZeroMeanFn& f,
                                    const std::function<double(double)>& phi,
                                    int k_max, const DecayLemmaOptions& opts) {
    if (k_max < 1) throw ArgumentError("k_max must be >= 1");
    DecayLemmaReport rep;

    // Norms of phi from dense sampling: TV(phi) as the limit of sums of
    // |increments|, and the derivative norms from difference quotients.
    const int N = 1 << 15;
    std::vector<double> ph(static_cast<size_t>(N) + 1);
    for (int j = 0; j <= N; ++j) ph[static_cast<size_t>(j)] = phi(static_cast<double>(j) / N);
    double tv = 0.0;
    for (int j = 0; j < N; ++j)
        tv += std::abs(ph[static_cast<size_t>(j + 1)] - ph[static_cast<size_t>(j)]);
    rep.phi_tv = tv;
    if (opts.check_smooth_bound) {
        std::vector<double> dph(static_cast<size_t>(N));
        for (int j = 0; j < N; ++j)
            dph[static_cast<size_t>(j)] =
                (ph[static_cast<size_t>(j + 1)] - ph[static_cast<size_t>(j)]) * N;
        double dtv = 0.0, dl2 = 0.0;
        for (int j = 0; j < N; ++j) {
            int jn = (j + 1) % N;
            dtv += std::abs(dph[static_cast<size_t>(jn)] - dph[static_cast<size_t>(j)]);
            dl2 += dph[static_cast<size_t>(j)] * dph[static_cast<size_t>(j)] / N;
        }
        rep.dphi_tv = dtv;
        rep.dphi_l2sq = dl2;
    }

    for (int k = 1; k <= k_max; ++k) {
        auto integrand = [&](double v) { return f.f(k * v + phi(v)); };
        int pts = opts.base_grid * k;
        double c1 = midpoint_integral(integrand, pts);
        double c2 = midpoint_integral(integrand, 2 * pts);
        if (std::abs(c2 - c1) > opts.richardson_tol)
            throw QuadratureError("oscillatory integral failed to stabilize at k = " +
                                  std::to_string(k));
        DecayBoundRow row;
        row.k = k;
        row.c = c2;
        row.bound_tv = f.norm_A * rep.phi_tv / k;
        row.bound_smooth =
            opts.check_smooth_bound
                ? (f.norm_L2 * rep.dphi_tv / std::sqrt(12.0) +
                   f.norm_Linf * rep.dphi_l2sq) /
                      (static_cast<double>(k) * k)
                : 0.0;
        if (std::abs(row.c) > row.bound_tv + 1e-12) rep.all_within = false;
        if (opts.check_smooth_bound && std::abs(row.c) > row.bound_smooth + 1e-12)
            rep.all_within = false;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace sdq::spectral
