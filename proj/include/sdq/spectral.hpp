#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sdq/errors.hpp"
#include "sdq/simulate.hpp"
#include "sdq/tiling.hpp"

namespace sdq::spectral {

// Autocorrelation of the sawtooth <.>_0 in closed form:
// A(t) = (<t>^2 - <t> + 1/6) / 2 with <t> the fractional part.
double saw_autocorr(double t);

struct AutocorrEstimate {
    int k_max = 0;
    std::uint64_t n_samples = 0;
    std::vector<double> rho;  // rho[k], k = 0..k_max; rho[-k] = rho[k]
};

// Streaming single-pass estimator of rho_u over lags 0..k_max.
class AutocorrAccumulator {
  public:
    explicit AutocorrAccumulator(int k_max);
    void push(double um);
    AutocorrEstimate estimate() const;

  private:
    int k_;
    std::uint64_t n_ = 0;
    std::vector<double> ring_;
    std::vector<double> sums_;
};

// rho_u[k] = (1/N) sum u_m[n] u_m[n+k] from the post-burn-in states. Lags
// are computed independently (optionally across threads); each lag is a
// fixed-order sum, so the result does not depend on scheduling.
// Throws UnderSampledError when fewer than 100 * k_max samples remain.
AutocorrEstimate autocorrelation(const Trajectory& traj, int k_max,
                                 long long burn_in = 1000, int threads = 1);

struct Atom {
    long long n;      // frequency index; location is <n x>
    double location;
    double mass;
};

struct PurePointPart {
    std::vector<Atom> atoms;
    std::vector<double> rho_pp;  // k = 0..k_max
};

// Atoms at <n x> with mass |gbar_hat[n]|^2, and the resulting pure-point
// autocorrelation rho_pp[k] = sum_n mass e^{-2 pi i k n x}.
PurePointPart pure_point_part(const tiling::MidpointFunction& mp, double x,
                              int k_max, double mass_floor = 1e-12);

// Second-order formula for the absolutely continuous part:
// rho_ac[k] = int_T A(k v - lambda(v - x/2 + k x/2) + lambda(v - x/2 - k x/2)) dv.
// Throws OrderError unless the midpoint function comes from an order-2 tile.
std::vector<double> ac_part_order2(const tiling::MidpointFunction& mp, double x,
                                   int k_max);

struct DensityEstimate {
    std::vector<double> xi;  // sample locations in [0, 1)
    std::vector<double> s;   // windowed density values
    double s0_windowed = 0.0;
    double s0_raw = 0.0;     // plain sum of coefficients
};

// Fejer-windowed trigonometric sum of the rho_ac coefficients.
DensityEstimate density_estimate(std::span<const double> rho_ac, int grid = 512);

// Smallest eigenvalue of the (K+1)x(K+1) Toeplitz matrix of rho; the
// estimated sequence must be positive semidefinite up to noise.
double herglotz_min_eigenvalue(std::span<const double> rho);

struct FourierDecayFit {
    double beta;      // |gbar_hat[n]| ~ c n^{-beta}
    double c;
    int n_used;       // coefficients above the noise floor that entered the fit
};

// Log-log fit of the measured |gbar_hat[n]| decay; feeds the truncation-tail
// report of the pure-point MSE sum.
FourierDecayFit fourier_decay_fit(const tiling::MidpointFunction& mp,
                                  double floor = 1e-9);

// Bound on the pure-point sum truncated at the stored coefficient range:
// sum_{n > n_fourier} (2 sin)^{2m} |Phi|^2 mass <= 4^m c^2 sum n^{-2 beta}.
double pure_point_tail_bound(const FourierDecayFit& fit, int n_fourier, int m);

// --- decay-bound verification (oscillatory integrals c[k]) ---

struct ZeroMeanFn {
    std::function<double(double)> f;
    double norm_A = 0.0;     // sum of |Fourier coefficients|
    double norm_L2 = 0.0;
    double norm_Linf = 0.0;
};

// The sawtooth autocorrelation with its exact norms 1/12, 1/(12 sqrt 5), 1/12.
ZeroMeanFn saw_autocorr_fn();

struct DecayBoundRow {
    int k;
    double c;             // computed integral
    double bound_tv;      // |f|_A |phi|_TV / k
    double bound_smooth;  // second bound; only valid when phi' exists
};

struct DecayLemmaReport {
    std::vector<DecayBoundRow> rows;
    double phi_tv = 0.0;
    double dphi_tv = 0.0;
    double dphi_l2sq = 0.0;
    bool all_within = true;
};

struct DecayLemmaOptions {
    int base_grid = 2048;        // points per unit of k
    double richardson_tol = 1e-6;
    bool check_smooth_bound = true;
};

// Computes c[k] = int f(k v + phi(v)) dv for k = 1..k_max by refined midpoint
// quadrature and checks both bounds. Throws QuadratureError when grid
// refinement fails to stabilize the integral.
DecayLemmaReport verify_decay_lemma(const ZeroMeanFn& f,
                                    const std::function<double(double)>& phi,
                                    int k_max, const DecayLemmaOptions& opts = {});

}  // namespace sdq::spectral
