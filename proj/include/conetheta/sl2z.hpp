#pragma once

#include <array>
#include <stdexcept>

#include "conetheta/common.hpp"
#include "conetheta/fukaya.hpp"

namespace conetheta {

/// Element of SL(2, Z); all arithmetic in this module stays in integers.
struct LatticeMatrix {
    long long g11 = 1, g12 = 0;
    long long g21 = 0, g22 = 1;

    long long det() const { return g11 * g22 - g12 * g21; }

    LatticeMatrix inverse() const {
        return LatticeMatrix{g22, -g12, -g21, g11};
    }

    std::array<long long, 2> apply(std::array<long long, 2> v) const {
        return {g11 * v[0] + g12 * v[1], g21 * v[0] + g22 * v[1]};
    }

    std::array<double, 2> apply(std::array<double, 2> v) const {
        return {g11 * v[0] + g12 * v[1], g21 * v[0] + g22 * v[1]};
    }

    LatticeMatrix operator*(const LatticeMatrix& o) const {
        return LatticeMatrix{g11 * o.g11 + g12 * o.g21, g11 * o.g12 + g12 * o.g22,
                             g21 * o.g11 + g22 * o.g21, g21 * o.g12 + g22 * o.g22};
    }
};

inline LatticeMatrix make_lattice_matrix(long long g11, long long g12, long long g21,
                                         long long g22) {
    LatticeMatrix g{g11, g12, g21, g22};
    if (g.det() != 1)
        throw std::invalid_argument("LatticeMatrix: determinant must be exactly 1");
    return g;
}

/// The matrix [[n, m-n], [a, b-a]] carrying the slope pair (a/n, b/m) with
/// b*n - a*m = 1 to the fundamental pair (0, 1).
inline LatticeMatrix reduction_matrix(int n, int a, int m, int b) {
    if (n <= 0 || m <= 0)
        throw std::invalid_argument("reduction_matrix: ranks must be positive");
    if (static_cast<long long>(b) * n - static_cast<long long>(a) * m != 1)
        throw std::invalid_argument("reduction_matrix: requires b*n - a*m = 1");
    return make_lattice_matrix(n, m - n, a, b - a);
}

/// Transport of a brane under the symplectomorphism defined by g: the line
/// is pulled back (direction vector maps by g^{-1}) while the position and
/// holonomy moduli are carried unchanged.
inline BraneDescriptor act_on_brane(const LatticeMatrix& g, const BraneDescriptor& brane) {
    if (g.det() != 1) throw std::invalid_argument("act_on_brane: determinant must be 1");
    auto v = g.inverse().apply(std::array<long long, 2>{brane.n, brane.a});
    if (v[0] < 0 || (v[0] == 0 && v[1] < 0)) {
        v[0] = -v[0];
        v[1] = -v[1];
    }
    if (v[0] == 0)
        throw std::domain_error("act_on_brane: transported brane is a fiber line (infinite slope)");
    if (gcd_ll(v[0], v[1]) != 1)
        throw std::logic_error("act_on_brane: unimodular action broke primitivity");
    BraneDescriptor out = brane;
    out.n = static_cast<int>(v[0]);
    out.a = static_cast<int>(v[1]);
    return out;
}

struct TransportedCone {
    cplx eta{0.0, 0.0};  // reduced class parameter
    int rank = 2;
    int degree = 1;
};

/// Class parameter of the transported mapping cone: the reduction carries
/// the moduli (mu, nu) unchanged, so the cone of the general slope pair has
/// class mu + nu + pi + pi*tau and rank/degree (m+n, a+b).
inline TransportedCone transport_cone_class(const LatticeMatrix& g, int n, int a, int m, int b,
                                            cplx mu, cplx nu, const ModuliParams& params) {
    params.validate();
    const LatticeMatrix expected = reduction_matrix(n, a, m, b);
    if (g.g11 != expected.g11 || g.g12 != expected.g12 || g.g21 != expected.g21 ||
        g.g22 != expected.g22)
        throw std::invalid_argument("transport_cone_class: g is not the reduction matrix of (n,a,m,b)");
    TransportedCone out;
    out.eta = lattice_reduce(mu + nu + cplx(pi, 0.0) + pi * params.tau, params.tau);
    out.rank = m + n;
    out.degree = a + b;
    return out;
}

}  // namespace conetheta
