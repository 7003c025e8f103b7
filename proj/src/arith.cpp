#include "sdq/arith.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

namespace sdq::arith {

namespace {

using i128 = __int128;

// Decompose a double into an exact rational num / 2^shift.
struct Dyadic {
    i128 num;
    int shift;  // denominator is 2^shift, shift >= 0
};

Dyadic to_dyadic(double x) {
    if (!std::isfinite(x))
        throw ArgumentError("continued fraction requires a finite input");
    int e = 0;
    double f = std::frexp(x, &e);  // x = f * 2^e, |f| in [0.5, 1)
    auto mant = static_cast<long long>(std::ldexp(f, 53));  // exact integer
    int shift = 53 - e;
    if (shift < 0) {
        if (e - 53 > 60) throw ArgumentError("input magnitude too large for exact expansion");
        return {static_cast<i128>(mant) << (e - 53), 0};
    }
    if (shift > 120) {
        // Subnormal-scale inputs: indistinguishable from 0 for our purposes.
        return {0, 0};
    }
    return {static_cast<i128>(mant), shift};
}

}  // namespace

ContinuedFraction continued_fraction(double x, int max_terms, long long q_limit) {
    Dyadic d = to_dyadic(x);
    i128 num = d.num;
    i128 den = static_cast<i128>(1) << d.shift;

    ContinuedFraction cf;
    // Euclid with floor division (handles negative x in the first step).
    i128 p_prev2 = 0, q_prev2 = 1;  // p_{-2}, q_{-2}
    i128 p_prev1 = 1, q_prev1 = 0;  // p_{-1}, q_{-1}
    for (int k = 0; k < max_terms; ++k) {
        i128 a = num / den;
        if ((num % den != 0) && ((num < 0) != (den < 0))) --a;  // floor
        i128 rem = num - a * den;

        i128 p = a * p_prev1 + p_prev2;
        i128 q = a * q_prev1 + q_prev2;
        if (q > static_cast<i128>(q_limit)) break;
        if (p > static_cast<i128>(std::numeric_limits<long long>::max()) ||
            p < static_cast<i128>(std::numeric_limits<long long>::min()))
            break;

        long long a_clamped =
            a > static_cast<i128>(std::numeric_limits<long long>::max())
                ? std::numeric_limits<long long>::max()
                : static_cast<long long>(a);
        cf.quotients.push_back(a_clamped);
        cf.convergents.push_back({static_cast<long long>(p), static_cast<long long>(q)});
        p_prev2 = p_prev1; q_prev2 = q_prev1;
        p_prev1 = p; q_prev1 = q;

        if (rem == 0) {
            cf.terminated = true;
            break;
        }
        num = den;
        den = rem;
    }
    return cf;
}

bool is_spectrally_irrational(double x, int max_terms, long long small_denominator) {
    ContinuedFraction cf = continued_fraction(x, max_terms + 1);
    // Every double is a dyadic rational, so its expansion always bottoms out
    // eventually; only termination at a small denominator marks the value as
    // behaving rationally at simulation scales.
    if (cf.terminated && static_cast<int>(cf.quotients.size()) <= max_terms &&
        !cf.convergents.empty() && cf.convergents.back().q <= small_denominator)
        return false;
    // A giant partial quotient with a still-small denominator flags a value
    // sitting essentially on top of a low-denominator rational.
    for (size_t k = 1; k < cf.quotients.size(); ++k) {
        if (cf.quotients[k] >= 10'000'000 && cf.convergents[k - 1].q <= small_denominator)
            return false;
    }
    return true;
}

double exact_norm_qx(double x, long long q) {
    Dyadic d = to_dyadic(x);
    i128 den = static_cast<i128>(1) << d.shift;
    i128 prod = d.num * static_cast<i128>(q);
    i128 r = prod % den;
    if (r < 0) r += den;
    i128 dist = r <= den - r ? r : den - r;
    return static_cast<double>(dist) / static_cast<double>(den);
}

double diophantine_type_estimate(double x, long long n_max) {
    ContinuedFraction cf = continued_fraction(x);
    if (cf.terminated && !cf.convergents.empty() &&
        cf.convergents.back().q <= 1'000'000)
        throw RationalError("input is a rational of small denominator");

    // Least-squares slope of log(1 / ||q_k x||) against log q_k over the
    // convergents with 2 <= q_k <= n_max. The raw per-convergent ratio
    // log(1/||q_k x||)/log q_k overstates the type at every finite scale
    // (the approximation constant is absorbed into the exponent); fitting a
    // line across convergents cancels the constant.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& c : cf.convergents) {
        if (c.q < 2 || c.q > n_max) continue;
        double dist = exact_norm_qx(x, c.q);
        if (dist <= 0.0) break;  // dyadic bottom; later terms are artifacts
        double lx = std::log(static_cast<double>(c.q));
        double ly = std::log(1.0 / dist);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++n;
    }
    if (n < 2)
        throw ArgumentError("not enough convergents below n_max for an estimate");
    double denom = n * sxx - sx * sx;
    if (denom <= 0.0)
        throw ArgumentError("degenerate convergent spread");
    return (n * sxy - sx * sy) / denom;
}

double reciprocal_norm_sum_exponent(double x, long long n_max) {
    if (n_max < 16) throw ArgumentError("n_max too small");
    long long n1 = n_max / 4;
    double s1 = 0.0, s2 = 0.0;
    double acc = 0.0;
    for (long long k = 1; k <= n_max; ++k) {
        double dist = nearest_int_distance(static_cast<double>(k) * x);
        if (dist <= 0.0) throw RationalError("||k x|| vanished; input behaves rationally");
        acc += 1.0 / dist;
        if (k == n1) s1 = acc;
    }
    s2 = acc;
    return (std::log(s2) - std::log(s1)) /
           (std::log(static_cast<double>(n_max)) - std::log(static_cast<double>(n1)));
}

}  // namespace sdq::arith
