#include "sdq/filters.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "sdq/arith.hpp"

namespace sdq {

namespace {
constexpr double kPi = std::numbers::pi;

long long checked_mul(long long a, long long b) {
    __int128 p = static_cast<__int128>(a) * b;
    if (p > std::numeric_limits<long long>::max() || p < std::numeric_limits<long long>::min())
        throw OverflowError("filter coefficient overflow");
    return static_cast<long long>(p);
}
}  // namespace

std::vector<double> Filter::taps() const {
    std::vector<double> t(numer.size());
    for (size_t i = 0; i < numer.size(); ++i) t[i] = tap(i);
    return t;
}

double Filter::sum() const {
    long long s = 0;
    for (long long n : numer) s += n;
    return static_cast<double>(s) / static_cast<double>(denom);
}

Filter rect(int M) {
    if (M < 1) throw ArgumentError("rect filter needs M >= 1");
    Filter f;
    f.label = "rect" + std::to_string(M);
    f.numer.assign(static_cast<size_t>(M), 1);
    f.denom = M;
    return f;
}

Filter convolve(const Filter& a, const Filter& b) {
    Filter c;
    c.label = a.label + "*" + b.label;
    c.support_start = a.support_start + b.support_start;
    c.denom = checked_mul(a.denom, b.denom);
    c.numer.assign(a.numer.size() + b.numer.size() - 1, 0);
    for (size_t i = 0; i < a.numer.size(); ++i)
        for (size_t j = 0; j < b.numer.size(); ++j)
            c.numer[i + j] += checked_mul(a.numer[i], b.numer[j]);
    return c;
}

Filter sinc_p(int M, int p) {
    if (M < 1 || p < 1) throw ArgumentError("sinc_p needs M >= 1 and p >= 1");
    Filter f = rect(M);
    Filter out = f;
    for (int i = 1; i < p; ++i) out = convolve(out, f);
    out.label = "sinc^" + std::to_string(p) + "_" + std::to_string(M);
    return out;
}

Filter difference(const Filter& f, int j) {
    if (j < 0) throw ArgumentError("difference order must be >= 0");
    Filter d = f;
    for (int r = 0; r < j; ++r) {
        std::vector<long long> out(d.numer.size() + 1, 0);
        for (size_t i = 0; i < d.numer.size(); ++i) {
            out[i] += d.numer[i];
            out[i + 1] -= d.numer[i];
        }
        d.numer = std::move(out);
    }
    if (j > 0) d.label = "D^" + std::to_string(j) + "(" + f.label + ")";
    return d;
}

std::vector<double> difference(std::span<const double> v, int j) {
    if (j < 0) throw ArgumentError("difference order must be >= 0");
    std::vector<double> cur(v.begin(), v.end());
    for (int r = 0; r < j; ++r) {
        if (cur.size() < 2) throw LengthError("sequence too short to difference");
        std::vector<double> next(cur.size() - 1);
        for (size_t i = 0; i + 1 < cur.size(); ++i) next[i] = cur[i + 1] - cur[i];
        cur = std::move(next);
    }
    return cur;
}

double l1_norm(const Filter& f) {
    long long s = 0;
    for (long long n : f.numer) s += std::llabs(n);
    return static_cast<double>(s) / static_cast<double>(f.denom);
}

std::complex<double> transfer(const Filter& f, double xi) {
    std::complex<double> acc = 0.0;
    const std::complex<double> w = std::polar(1.0, 2.0 * kPi * xi);
    // Horner over descending index keeps the sum stable for long filters.
    for (size_t i = f.numer.size(); i-- > 0;)
        acc = acc * w + static_cast<double>(f.numer[i]);
    acc /= static_cast<double>(f.denom);
    acc *= std::polar(1.0, 2.0 * kPi * xi * f.support_start);
    return acc;
}

double sinc_pow_abs(int M, int p, double xi) {
    double d = arith::frac0(xi);  // sin(pi xi) = +-sin(pi d); moduli agree
    if (d == 0.0) return 1.0;
    double num = std::sin(kPi * static_cast<double>(M) * d);
    double den = static_cast<double>(M) * std::sin(kPi * d);
    return std::pow(std::abs(num / den), p);
}

void export_csv(const Filter& f, std::ostream& out) {
    out << "n,phi\n";
    char buf[32];
    for (size_t i = 0; i < f.numer.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", f.tap(i));
        out << f.support_start + static_cast<long long>(i) << "," << buf << "\n";
    }
}

double TransferFunction::abs2(double xi) const {
    switch (kind) {
        case Kind::Fir: {
            double a = std::abs(transfer(fir, xi));
            return a * a;
        }
        case Kind::SincClosed: {
            double a = sinc_pow_abs(M, p, xi);
            return a * a;
        }
        case Kind::IdealLowpass:
            return arith::nearest_int_distance(xi) <= 1.0 / static_cast<double>(M) ? 1.0 : 0.0;
    }
    return 0.0;
}

std::complex<double> TransferFunction::eval(double xi) const {
    switch (kind) {
        case Kind::Fir:
            return transfer(fir, xi);
        case Kind::SincClosed: {
            // Sinc^p_M(xi) = (ratio(xi) e^{i pi (M-1) xi})^p with the sign of
            // the ratio restored from the period of sin(pi xi).
            double d = arith::frac0(xi);
            double ratio;
            if (d == 0.0) {
                ratio = 1.0;
            } else {
                ratio = std::sin(kPi * M * d) / (M * std::sin(kPi * d));
            }
            auto k = static_cast<long long>(std::llround(xi - d));
            if ((k * (M - 1)) % 2 != 0) ratio = -ratio;
            std::complex<double> base = ratio * std::polar(1.0, kPi * (M - 1) * xi);
            std::complex<double> acc = 1.0;
            for (int i = 0; i < p; ++i) acc *= base;
            return acc;
        }
        case Kind::IdealLowpass:
            return abs2(xi) > 0.0 ? 1.0 : 0.0;
    }
    return 0.0;
}

TransferFunction TransferFunction::from_filter(Filter f) {
    TransferFunction t;
    t.kind = Kind::Fir;
    t.fir = std::move(f);
    return t;
}

TransferFunction TransferFunction::sinc_closed(int M, int p) {
    if (M < 1 || p < 1) throw ArgumentError("sinc transfer needs M >= 1, p >= 1");
    TransferFunction t;
    t.kind = Kind::SincClosed;
    t.M = M;
    t.p = p;
    return t;
}

TransferFunction TransferFunction::ideal_lowpass(int M) {
    if (M < 1) throw ArgumentError("ideal low-pass needs M >= 1");
    TransferFunction t;
    t.kind = Kind::IdealLowpass;
    t.M = M;
    return t;
}

}  // namespace sdq
