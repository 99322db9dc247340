#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

// Small deterministic generator for property tests (splitmix64).
struct Gen {
    std::uint64_t s;
    explicit Gen(std::uint64_t seed) : s(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double unit() { return double(next() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * unit(); }
    // Log-uniform on [a, b], a > 0.
    double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }
    int integer(int lo, int hi) { return lo + int(next() % std::uint64_t(hi - lo + 1)); }
    // Nonzero wavenumber in [-kmax, kmax].
    int wavenumber(int kmax) {
        const int k = integer(1, kmax);
        return (next() & 1) ? k : -k;
    }
    std::complex<double> cplx(double r) { return {uniform(-r, r), uniform(-r, r)}; }
};
