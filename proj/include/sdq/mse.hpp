#pragma once

#include <span>
#include <string>
#include <vector>

#include "sdq/errors.hpp"
#include "sdq/filters.hpp"
#include "sdq/simulate.hpp"
#include "sdq/spectral.hpp"

namespace sdq::mse {

struct TimeDomainMse {
    double mse = 0.0;
    double max_abs_err = 0.0;
    double route_residual = 0.0;  // max |(x - q*phi) - u_m*(D^m phi)|
    double sigma_block = 0.0;     // 8-way block bootstrap spread of the mean
    std::uint64_t samples = 0;
};

// Mean square error of e = x - q*phi over the post-burn-in window, computed
// through both the symbol route and the state route; the two must agree
// pointwise to 1e-9. Throws LengthError when the trajectory cannot cover the
// filter support.
TimeDomainMse mse_time_domain(const Trajectory& traj, const Filter& phi,
                              long long burn_in = 1000);

struct SpectralMeasure {
    int order = 0;
    std::vector<spectral::Atom> atoms;
    std::vector<double> rho_ac;  // coefficients k = 0..K of the ac part
};

// (E_pp, E_ac): the atom sum and the quadrature of the windowed density
// against |2 sin(pi xi)|^{2m} |Phi(xi)|^2.
std::pair<double, double> mse_spectral(const SpectralMeasure& measure,
                                       const TransferFunction& transfer, int m,
                                       double x);

// Quadrature of int |2 sin(pi xi)|^{2m} |Sinc^{m+1}_M(xi)|^2 dxi divided by
// binomial(2m, m) M^{-2m-1}; equals 1 up to rounding.
double sin_power_sinc_identity(int m, int M);

struct MsePoint {
    int M;
    double total;
    double pp;
    double ac;
};

struct MseCurve {
    std::vector<MsePoint> points;
    std::string filter_family;
    double fitted_slope = 0.0;
    double fitted_constant = 0.0;
    double fit_residual = 0.0;
};

struct FitResult {
    double slope;
    double constant;
    double residual;  // max |log E - fit| over the points
};

// Least-squares line on (log M, log E_total). Requires >= 5 points spanning
// at least two octaves of M; throws DegenerateError when some E <= 0.
FitResult fit_decay(const MseCurve& curve);

struct Resonance {
    int q;
    long long n_q;       // 2^{q!}
    long long big_m;     // floor(c2 * 2^{q q! - 1})
    double norm_nqx;     // ||n_q x||
    double lower_gate;   // c2 / (4 big_m)
    double upper_gate;   // c2 / big_m
};

struct LiouvilleInput {
    double x = 0.0;
    double x0 = 0.0;
    int l = 0;
    int k_last = 0;        // largest factorial index included
    bool truncated = false;
    double c2 = 0.0;
    std::vector<Resonance> resonances;  // q = l .. k_last - 1
};

// x = x0 + sum_{k >= l} 2^{-k!}, truncated to the factorials representable
// in double precision, plus the resonant (n_q, M_q) pairs used by the
// adversarial MSE probe.
LiouvilleInput liouville_input(double x0, int l, double c2 = 0.5);

}  // namespace sdq::mse
