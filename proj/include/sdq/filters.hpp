#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sdq/errors.hpp"

namespace sdq {

// Finite averaging kernel with taps stored as exact integer numerators over
// a common power-of-M denominator, so that sum(taps) == 1 holds exactly and
// repeated differencing stays exact.
struct Filter {
    std::string label;
    int support_start = 0;
    std::vector<long long> numer;
    long long denom = 1;

    size_t size() const { return numer.size(); }
    double tap(size_t i) const { return static_cast<double>(numer[i]) / static_cast<double>(denom); }
    std::vector<double> taps() const;
    double sum() const;  // exact integer ratio
};

// Rectangular average r_M[n] = 1/M on [0, M).
Filter rect(int M);

// p-fold self-convolution of rect(M); a discrete B-spline of degree p-1,
// supported on [0, p(M-1)].
Filter sinc_p(int M, int p);

Filter convolve(const Filter& a, const Filter& b);

// j-fold forward difference (D f)[n] = f[n] - f[n-1]; support grows by j.
Filter difference(const Filter& f, int j);

// j-fold difference of a data sequence; output index i corresponds to input
// index i + j.
std::vector<double> difference(std::span<const double> v, int j);

double l1_norm(const Filter& f);

// Phi(xi) = sum_n phi[n] e^{2 pi i n xi}.
std::complex<double> transfer(const Filter& f, double xi);

// |sin(pi M xi) / (M sin(pi xi))|^p with exact handling of xi near integers.
double sinc_pow_abs(int M, int p, double xi);

// CSV dump of the taps: "n,phi" rows over the support.
void export_csv(const Filter& f, std::ostream& out);

struct TransferFunction {
    enum class Kind { Fir, SincClosed, IdealLowpass };
    Kind kind = Kind::Fir;
    Filter fir;     // Kind::Fir
    int M = 0;      // SincClosed / IdealLowpass
    int p = 0;      // SincClosed

    double abs2(double xi) const;
    std::complex<double> eval(double xi) const;

    static TransferFunction from_filter(Filter f);
    static TransferFunction sinc_closed(int M, int p);
    static TransferFunction ideal_lowpass(int M);
};

}  // namespace sdq
