#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <random>

#include "conetheta/theta.hpp"
#include "oracles.hpp"

using namespace conetheta;

namespace {

const ThetaChar half_half{0.5, 0.5};
const ThetaChar zero_zero{0.0, 0.0};

// Frozen from the fixed-order |l| <= 50 Kahan oracle; re-derived below.
const cplx golden_T00{1.0864348112133080, 0.0};
const cplx golden_D0{-2.8486946039877874, 0.0};
const cplx golden_J0{-2.8486946039877874, 0.0};

ModuliParams params_at(cplx tau) { return ModuliParams(tau, 25, 1e-10); }

}  // namespace

TEST_CASE("golden constants re-derive from the oracle") {
    CHECK(std::abs(oracle::theta_series(0, 0, 0, cplx(0, 1)) - golden_T00) < 1e-13);
    CHECK(std::abs(oracle::theta_series_dz(0.5, 0.5, 0, cplx(0, 1)) - golden_D0) < 1e-13);
    const cplx j = -pi * oracle::theta_series(0, 0, 0, cplx(0, 1)) *
                   oracle::theta_series(0, 0.5, 0, cplx(0, 1)) *
                   oracle::theta_series(0.5, 0, 0, cplx(0, 1));
    CHECK(std::abs(j - golden_J0) < 1e-13);
}

TEST_CASE("theta null with odd characteristics vanishes on the lattice") {
    for (cplx tau : {cplx(0, 1), cplx(0.3, 1.1), cplx(-0.5, 0.8)}) {
        const auto p = params_at(tau);
        CHECK(std::abs(theta(half_half, 0.0, p, tau)) < 1e-12);
        for (int al = -1; al <= 1; ++al)
            for (int be = -1; be <= 1; ++be)
                CHECK(std::abs(theta(half_half, static_cast<double>(al) * tau +
                                                    cplx(static_cast<double>(be), 0.0),
                                     p, tau)) < 1e-10);
    }
}

TEST_CASE("integer shift multiplies by exp(2 pi i alpha)") {
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> ur(-0.4, 0.4);
    for (int rep = 0; rep < 100; ++rep) {
        const cplx tau(ur(rng), 1.0 + 0.5 * ur(rng));
        const cplx z(ur(rng), 0.2 * ur(rng));
        const ThetaChar c{rep % 2 ? 0.5 : 0.25, rep % 3 ? 0.5 : 0.0};
        const auto p = params_at(tau);
        const cplx lhs = theta(c, z + 1.0, p, tau);
        const cplx rhs = std::exp(two_pi * iu * c.alpha) * theta(c, z, p, tau);
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("lattice shift law from reindexing the series") {
    // theta(z + w) = exp(-pi i w - 2 pi i (z + beta)) theta(z), from l -> l-1.
    std::mt19937 rng(77001);
    std::uniform_real_distribution<double> ur(-0.4, 0.4);
    for (int rep = 0; rep < 100; ++rep) {
        const cplx tau(ur(rng), 0.8 + 0.4 * ur(rng));
        const cplx z(ur(rng), 0.1 * ur(rng));
        const ThetaChar c{rep % 2 ? 0.5 : 0.0, rep % 3 ? 0.5 : 0.0};
        const auto p = params_at(tau);
        const cplx factor = std::exp(-pi * iu * tau - two_pi * iu * (z + c.beta));
        CHECK(std::abs(theta(c, z + tau, p, tau) - factor * theta(c, z, p, tau)) < 1e-12);
    }
}

TEST_CASE("theta at the origin matches the frozen golden value") {
    const auto p = params_at(cplx(0, 1));
    CHECK(std::abs(theta(zero_zero, 0.0, p, cplx(0, 1)) - golden_T00) < 1e-13);
}

TEST_CASE("derivative series: alternating form of the odd null derivative") {
    // d/dz theta_{1/2,1/2}(0, -1/tau) = -pi sum (-1)^l (2l+1) e^{pi i (l+1/2)^2 (-1/tau)}
    for (cplx tau : {cplx(0, 1), cplx(0.2, 1.3)}) {
        const cplx w = -1.0 / tau;
        const auto p = params_at(tau);
        const cplx lhs = theta_dz(half_half, 0.0, p, w);
        const cplx rhs = -pi * oracle::symmetric_sum(
                                   [&](int l) {
                                       const double lh = l + 0.5;
                                       return cplx((l & 1) ? -1.0 : 1.0) * (2.0 * l + 1.0) *
                                              std::exp(pi * iu * lh * lh * w);
                                   },
                                   50);
        CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(rhs));
    }
}

TEST_CASE("derivative of the even null vanishes at the origin") {
    const auto p = params_at(cplx(0, 1));
    CHECK(std::abs(theta_dz(zero_zero, 0.0, p, cplx(0, 1))) < 1e-14);
}

TEST_CASE("derivative golden value at tau = i") {
    const auto p = params_at(cplx(0, 1));
    CHECK(std::abs(theta_dz(half_half, 0.0, p, cplx(0, 1)) - golden_D0) < 1e-13);
}

TEST_CASE("derivative matches central finite differences") {
    const cplx tau(0.1, 1.2);
    const auto p = params_at(tau);
    const double h = 1e-6;
    for (cplx z : {cplx(0.3, 0.1), cplx(-0.2, 0.05), cplx(0.7, -0.1)}) {
        for (ThetaChar c : {half_half, zero_zero, ThetaChar{0.0, 0.5}}) {
            const cplx fd = (theta(c, z + h, p, tau) - theta(c, z - h, p, tau)) / (2.0 * h);
            const cplx dz = theta_dz(c, z, p, tau);
            CHECK(std::abs(fd - dz) < 1e-7 * std::max(1.0, std::abs(dz)));
        }
    }
}

TEST_CASE("jacobi null product equals the derivative null") {
    std::mt19937 rng(90210);
    std::uniform_real_distribution<double> ur(-0.5, 0.5);
    for (int rep = 0; rep < 20; ++rep) {
        const cplx w(ur(rng), 0.8 + 0.8 * (ur(rng) + 0.5));
        const auto p = params_at(w);
        const cplx jp = jacobi_null_product(p, w);
        const cplx dz = theta_dz(half_half, 0.0, p, w);
        CHECK(std::abs(jp - dz) < 1e-10 * std::abs(dz));
        CHECK(std::abs(jp) > 0.0);
    }
    const auto p = params_at(cplx(0, 1));
    CHECK(std::abs(jacobi_null_product(p, cplx(0, 1)) - golden_J0) < 1e-13);
}

TEST_CASE("domain and cutoff errors") {
    const auto p = params_at(cplx(0, 1));
    CHECK_THROWS_AS(theta(zero_zero, 0.0, p, cplx(0.5, -1.0)), std::domain_error);
    CHECK_THROWS_AS(theta(zero_zero, 0.0, p, cplx(0.5, 0.0)), std::domain_error);
    CHECK_THROWS_AS(theta(zero_zero, 0.0, p, cplx(0.0, 0.03)), std::domain_error);
    const ModuliParams tight(cplx(0, 1), 2, 1e-14);
    CHECK_THROWS_AS(theta(zero_zero, 0.0, tight, cplx(0.0, 0.06)), std::runtime_error);
    CHECK_THROWS_AS(ModuliParams(cplx(1.0, -0.2)), std::domain_error);
    CHECK_THROWS_AS(ModuliParams(cplx(0, 1), -3), std::invalid_argument);
}

TEST_CASE("cutoff rule helper honors the Gaussian tail bound") {
    const int n = theta_cutoff_for(1.0, 1e-10);
    CHECK(std::exp(-pi * (n - 0.5) * (n - 0.5)) < 1e-11);
    CHECK(std::exp(-pi * (n - 1.5) * (n - 1.5)) >= 1e-11);
}
