#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "sdq/errors.hpp"

namespace sdq::arith {

// Fractional part <t> in [0, 1).
inline double frac(double t) {
    double r = t - std::floor(t);
    return r < 1.0 ? r : 0.0;
}

// Centered fractional part <t>_0 = <t + 1/2> - 1/2 in [-1/2, 1/2).
// t - frac0(t) is an exact floating-point integer for |t| < 2^52.
inline double frac0(double t) {
    return t - std::floor(t + 0.5);
}

// Distance to the nearest integer, ||t|| in [0, 1/2].
inline double nearest_int_distance(double t) {
    return std::abs(frac0(t));
}

struct Convergent {
    long long p;
    long long q;
};

// Continued fraction of the exact dyadic rational represented by a double.
// Computed with the Euclidean algorithm in 128-bit integer arithmetic, so
// there is no floating-point drift; quotients and convergents are exact for
// the stored value of x. The expansion of a double always terminates; the
// leading terms agree with those of the underlying real number for all
// convergent denominators q_k below roughly 2^26.
struct ContinuedFraction {
    std::vector<long long> quotients;      // a0; a1, a2, ...
    std::vector<Convergent> convergents;   // p_k / q_k, same indexing
    bool terminated = false;               // expansion exhausted the dyadic value
};

ContinuedFraction continued_fraction(double x, int max_terms = 64,
                                     long long q_limit = 4'000'000'000'000'000'000LL);

// Heuristic irrationality guard used by the spectral pipeline: x is admitted
// only if its expansion shows no exact termination within `max_terms` partial
// quotients, and no giant quotient appears while the denominator is still
// small (which would mean x sits within ~2^-26 of a small-denominator
// rational and behaves rationally at simulation scales).
bool is_spectrally_irrational(double x, int max_terms = 40,
                              long long small_denominator = 1'000'000);

// Exact ||q x|| for the dyadic value of x, via 128-bit integer arithmetic.
// Valid for |q| up to ~2^40.
double exact_norm_qx(double x, long long q);

// Lower-bound estimate of the Diophantine type from convergents with
// q_k <= n_max:  eta_hat = max_k log(1 / ||q_k x||) / log q_k.
// This is an estimate from finite data, never an upper bound on the type.
// Throws RationalError if the guard rejects x.
double diophantine_type_estimate(double x, long long n_max);

// Fits the growth exponent sigma of S(n) = sum_{k<=n} 1 / ||k x|| between
// n_max/4 and n_max on a log-log scale.
double reciprocal_norm_sum_exponent(double x, long long n_max);

}  // namespace sdq::arith
