#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace conetheta {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr cplx iu{0.0, 1.0};

/// Global evaluation parameters: the modulus tau of the complex torus
/// C / 2*pi*(Z + tau*Z) plus the truncation order and tolerance shared by
/// every series in the library.
struct ModuliParams {
    cplx tau{0.0, 1.0};
    int series_cutoff = 25;
    double tol = 1e-10;

    ModuliParams() = default;
    ModuliParams(cplx tau_, int cutoff = 25, double tol_ = 1e-10)
        : tau(tau_), series_cutoff(cutoff), tol(tol_) {
        validate();
    }

    void validate() const {
        if (!(tau.imag() > 0.0))
            throw std::domain_error("ModuliParams: Im tau must be positive");
        if (series_cutoff <= 0)
            throw std::invalid_argument("ModuliParams: series_cutoff must be positive");
        if (!(tol > 0.0))
            throw std::invalid_argument("ModuliParams: tol must be positive");
    }
};

/// Compensated (Kahan) accumulator for complex sums; summation order is part
/// of the determinism contract, so callers add terms in a fixed order.
class KahanSum {
  public:
    void add(cplx term) {
        const cplx y = term - comp_;
        const cplx t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    cplx value() const { return sum_; }

  private:
    cplx sum_{0.0, 0.0};
    cplx comp_{0.0, 0.0};
};

/// Coefficients (c1, c2) of z in the real basis (1, tau): z = c1 + c2*tau.
inline std::pair<double, double> basis_coords(cplx z, cplx tau) {
    const double c2 = z.imag() / tau.imag();
    const double c1 = z.real() - c2 * tau.real();
    return {c1, c2};
}

/// Reduce z modulo the lattice 2*pi*(Z + tau*Z) so both basis coefficients
/// land in [0, 2*pi).
inline cplx lattice_reduce(cplx z, cplx tau) {
    auto [c1, c2] = basis_coords(z, tau);
    c1 -= two_pi * std::floor(c1 / two_pi);
    c2 -= two_pi * std::floor(c2 / two_pi);
    if (c1 >= two_pi) c1 = 0.0;  // guard against floor roundoff at the seam
    if (c2 >= two_pi) c2 = 0.0;
    return cplx(c1, 0.0) + cplx(c2, 0.0) * tau;
}

/// True when z lies on the lattice 2*pi*(Z + tau*Z) within tol on both
/// basis coefficients.
inline bool is_lattice_point(cplx z, cplx tau, double tol = 1e-9) {
    auto [c1, c2] = basis_coords(z, tau);
    const double r1 = std::abs(c1 / two_pi - std::round(c1 / two_pi));
    const double r2 = std::abs(c2 / two_pi - std::round(c2 / two_pi));
    return r1 * two_pi < tol && r2 * two_pi < tol;
}

inline long long gcd_ll(long long a, long long b) {
    a = std::abs(a);
    b = std::abs(b);
    while (b != 0) {
        const long long r = a % b;
        a = b;
        b = r;
    }
    return a;
}

}  // namespace conetheta
