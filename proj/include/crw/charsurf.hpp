#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "crw/network.hpp"

namespace crw {

using cplx = std::complex<double>;

/// Set of constrained coordinates (subset of {2,...,d}); bit j marks coordinate j.
using Labels = std::uint32_t;

inline Labels label_bit(int j) { return Labels(1) << j; }
inline bool has_label(Labels a, int j) { return (a >> j) & 1U; }
/// All constrained coordinates {2,...,d}.
inline Labels all_labels(int d) {
    Labels a = 0;
    for (int j = 2; j <= d; ++j) a |= label_bit(j);
    return a;
}

/// (beta, alpha) with alpha[j-2] the entry for constrained coordinate j.
struct SurfacePoint {
    cplx beta{1.0, 0.0};
    std::vector<cplx> alpha;

    cplx a(int j) const { return alpha[static_cast<std::size_t>(j - 2)]; }
    cplx& a(int j) { return alpha[static_cast<std::size_t>(j - 2)]; }
};

/// Surface point with alpha = all ones.
SurfacePoint unit_point(int d, cplx beta);

/// [(beta,alpha), v] for a Y-increment v (integer powers, rational form).
cplx loglinear_increment(const SurfacePoint& pt, const std::vector<int>& v);

/// p_a(beta,alpha) = sum over increments not blocked on a of p(v)[(beta,alpha),v] + sum_{j in a} mu_j.
cplx char_poly(const JacksonNetwork& net, Labels a, const SurfacePoint& pt);

/// Polynomial form of the 2-D characteristic equation: p(beta,alpha) beta alpha - beta alpha.
cplx char_eq2d(const JacksonNetwork& net, cplx beta, cplx alpha);

/// Discriminant of the 2-D characteristic equation as a quadratic in beta.
cplx discriminant2d(const JacksonNetwork& net, cplx alpha);

/// Roots of the 2-D characteristic equation in beta. beta1 is the root of smaller
/// modulus: the square root of the discriminant is taken on the branch aligned with
/// alpha - p(1,2) alpha^2 - p(2,1). At alpha = 1 this is the principal branch.
/// When alpha p(1,0) + p(2,0) = 0 the equation is affine; both entries hold its root.
std::pair<cplx, cplx> beta_roots2d(const JacksonNetwork& net, cplx alpha);

/// Conjugate of pt in coordinate l: alpha' equals alpha off l and alpha'(l) is the
/// other root of p(beta, .) = 1 in that coordinate.
SurfacePoint conjugator(const JacksonNetwork& net, int l, const SurfacePoint& pt);

/// 2-D shortcut: alpha' = (p(2,0) beta^2 + p(2,1) beta) / ((p(0,2) + beta p(1,2)) alpha).
cplx conjugator2d(const JacksonNetwork& net, cplx beta, cplx alpha);

/// C(j,beta,alpha) = mu_j - sum_{v(j) = -1} p(v)[(beta,alpha),v].
cplx boundary_coeff(const JacksonNetwork& net, int j, const SurfacePoint& pt);
cplx boundary_coeff2d(const JacksonNetwork& net, cplx beta, cplx alpha);

/// Root r1 of the single-term harmonic function and beta(r1) = (mu_2 r1 - p(2,1)) / p(2,0).
std::pair<double, double> single_term_root2d(const JacksonNetwork& net);

/// H_a(q) = -log(sum_{from not in a} p(v) e^{-<v,q>} + sum_{from in a} p(v)) over X-increments,
/// with a the set of empty nodes (bit j = node j).
double hamiltonian(const JacksonNetwork& net, Labels a, const std::vector<double>& q);

/// True when the imaginary part of the 2-D discriminant on the unit circle has its root
/// outside (-1,1); the root labelling of beta1/beta2 is only guaranteed continuous then.
bool simplifying_condition2d(const JacksonNetwork& net);

/// |p_a(beta,alpha) - 1| <= tol.
bool on_surface(const JacksonNetwork& net, Labels a, const SurfacePoint& pt, double tol = 1e-10);

}  // namespace crw
