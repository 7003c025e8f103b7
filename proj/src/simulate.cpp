#include "sdq/simulate.hpp"

#include <cmath>

#include "sdq/arith.hpp"
#include "sdq/tiling.hpp"

namespace sdq {

Trajectory run(const Modulator& mod, const StateVector& u0, long long steps,
               const RunOptions& opts) {
    Trajectory traj;
    traj.mod = mod;
    traj.steps = steps;
    const int m = mod.order;
    traj.states.reserve(static_cast<size_t>(steps + 1) * m);
    traj.symbols.reserve(static_cast<size_t>(steps));

    StateVector start = u0.empty() ? StateVector(static_cast<size_t>(m), 0.0) : u0;
    if (static_cast<int>(start.size()) != m)
        throw ArgumentError("initial state dimension does not match order");
    traj.states.insert(traj.states.end(), start.begin(), start.end());

    run_visit(
        mod, start, steps,
        [&](long long, const double* u, long long q) {
            traj.states.insert(traj.states.end(), u, u + m);
            traj.symbols.push_back(q);
        },
        opts);
    return traj;
}

double check_difference_identity(const Trajectory& traj, int j) {
    const int m = traj.order();
    if (j < 1 || j > m) throw ArgumentError("difference order j must be in [1, m]");
    if (traj.steps < j)
        throw IndexError("trajectory too short for a j-fold difference");

    // Binomial weights of the j-fold backward difference.
    std::vector<double> w(static_cast<size_t>(j) + 1);
    w[0] = 1.0;
    for (int i = 1; i <= j; ++i)
        w[static_cast<size_t>(i)] =
            -w[static_cast<size_t>(i - 1)] * static_cast<double>(j - i + 1) / i;

    const double x = traj.mod.x;
    double worst = 0.0;
    for (long long n = j; n <= traj.steps; ++n) {
        double dju = 0.0;
        for (int i = 0; i <= j; ++i)
            dju += w[static_cast<size_t>(i)] * traj.states[(n - i) * m + (j - 1)];
        double res = std::abs((x - static_cast<double>(traj.symbols[n - 1])) - dju);
        worst = std::max(worst, res);
    }
    return worst;
}

StateVector closed_form_state(const Modulator& mod, const StateVector& u0,
                              const tiling::TorusTile& tile, long long n) {
    mod.validate();
    if (tile.order() != mod.order) throw ArgumentError("tile order does not match modulator");
    if (n < 0) throw ArgumentError("n must be >= 0");
    const int m = mod.order;
    StateVector start = u0.empty() ? StateVector(static_cast<size_t>(m), 0.0) : u0;
    if (n == 0) return start;

    std::vector<double> lnu = apply_l_power(m, n, start);
    std::vector<long long> s = binomial_shift_vector(m, n);
    std::vector<double> torus(static_cast<size_t>(m));
    for (int jj = 0; jj < m; ++jj) {
        long double v = static_cast<long double>(lnu[jj]) +
                        static_cast<long double>(mod.x) * static_cast<long double>(s[jj]);
        long double f = v - std::floor(v);
        torus[jj] = arith::frac(static_cast<double>(f));
    }
    return tile.project(torus);
}

}  // namespace sdq
