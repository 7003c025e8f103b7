#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "sdq/core.hpp"
#include "sdq/errors.hpp"

namespace sdq {

namespace tiling {
class TorusTile;
}

struct RunOptions {
    double blow_up = 1e6;  // sup-norm bound; exceeding it flags divergence
};

// Materialized run of the recursion: states u[0..N] and symbols q[1..N].
struct Trajectory {
    Modulator mod;
    long long steps = 0;
    std::vector<double> states;       // (steps + 1) * order, row-major
    std::vector<long long> symbols;   // symbols[i] is q[i + 1]

    int order() const { return mod.order; }
    std::span<const double> state(long long n) const {
        return {states.data() + n * mod.order, static_cast<size_t>(mod.order)};
    }
    double last_coord(long long n) const { return states[n * mod.order + mod.order - 1]; }
};

// Streams the recursion without storing it. The visitor is called as
// visit(n, u, q) for n = 1..steps, where u points at the state u[n] (order
// entries) and q is the symbol emitted at step n. Throws DivergenceError
// when the state exceeds the blow-up bound.
template <class Visitor>
void run_visit(const Modulator& mod, const StateVector& u0, long long steps,
               Visitor&& visit, const RunOptions& opts = {}) {
    mod.validate();
    if (steps < 0) throw ArgumentError("steps must be >= 0");
    StateVector u = u0.empty() ? StateVector(mod.order, 0.0) : u0;
    if (static_cast<int>(u.size()) != mod.order)
        throw ArgumentError("initial state dimension does not match order");
    const int m = mod.order;
    for (long long n = 1; n <= steps; ++n) {
        long long q = modulator_step(mod, u.data());
        for (int j = 0; j < m; ++j) {
            if (!(std::abs(u[j]) <= opts.blow_up))
                throw DivergenceError("state exceeded blow-up bound at step " +
                                          std::to_string(n),
                                      n);
        }
        visit(n, u.data(), q);
    }
}

Trajectory run(const Modulator& mod, const StateVector& u0, long long steps,
               const RunOptions& opts = {});

// Max over n of |(x - q[n]) - (D^j u_j)[n]|; zero up to rounding on any valid
// trajectory. Throws IndexError if the trajectory is shorter than j steps.
double check_difference_identity(const Trajectory& traj, int j);

// u[n] via the conjugated torus iterate <L^n u[0] + x s[n]>_Gamma, resolved
// through a certified single tile. Throws MultiplicityError if the tile is
// not certified.
StateVector closed_form_state(const Modulator& mod, const StateVector& u0,
                              const tiling::TorusTile& tile, long long n);

}  // namespace sdq
