#include "crw/charsurf.hpp"

#include <cmath>

#include <spdlog/spdlog.h>

#include "crw/loglinear.hpp"

namespace crw {

namespace {

void require_2d(const JacksonNetwork& net) {
    if (net.d() != 2) throw Error(Errc::BadArgument, "two-dimensional network required");
}

void check_nonzero(const SurfacePoint& pt) {
    if (pt.beta == 0.0) throw Error(Errc::ZeroCoordinate, "beta = 0");
    for (const auto& a : pt.alpha)
        if (a == 0.0) throw Error(Errc::ZeroCoordinate, "alpha has a zero coordinate");
}

void check_size(const JacksonNetwork& net, const SurfacePoint& pt) {
    if (static_cast<int>(pt.alpha.size()) != net.d() - 1)
        throw Error(Errc::BadArgument, "alpha must have d-1 entries");
}

}  // namespace

SurfacePoint unit_point(int d, cplx beta) {
    SurfacePoint pt;
    pt.beta = beta;
    pt.alpha.assign(static_cast<std::size_t>(d - 1), cplx(1.0, 0.0));
    return pt;
}

cplx loglinear_increment(const SurfacePoint& pt, const std::vector<int>& v) {
    long bexp = v[0];
    cplx prod(1.0, 0.0);
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (v[k] == 0) continue;
        bexp -= v[k];
        prod *= ipow(pt.alpha[k - 1], v[k]);
    }
    return prod * ipow(pt.beta, bexp);
}

cplx char_poly(const JacksonNetwork& net, Labels a, const SurfacePoint& pt) {
    check_size(net, pt);
    check_nonzero(pt);
    cplx s(0.0, 0.0);
    for (const auto& inc : net.increments()) {
        if (inc.from >= 2 && has_label(a, inc.from)) continue;
        s += inc.prob * loglinear_increment(pt, inc.y);
    }
    for (int j = 2; j <= net.d(); ++j)
        if (has_label(a, j)) s += net.mu(j);
    return s;
}

cplx char_eq2d(const JacksonNetwork& net, cplx beta, cplx alpha) {
    require_2d(net);
    const double p01 = net.p(0, 1), p02 = net.p(0, 2), p10 = net.p(1, 0), p12 = net.p(1, 2),
                 p20 = net.p(2, 0), p21 = net.p(2, 1);
    return (p12 * alpha * alpha + p21 - alpha) * beta + (p10 * alpha + p20) * beta * beta +
           (p02 * alpha * alpha + p01 * alpha);
}

cplx discriminant2d(const JacksonNetwork& net, cplx alpha) {
    require_2d(net);
    const double p01 = net.p(0, 1), p02 = net.p(0, 2), p10 = net.p(1, 0), p12 = net.p(1, 2),
                 p20 = net.p(2, 0), p21 = net.p(2, 1);
    cplx b = p12 * alpha * alpha + p21 - alpha;
    return b * b - 4.0 * (p20 + p10 * alpha) * (p01 * alpha + p02 * alpha * alpha);
}

std::pair<cplx, cplx> beta_roots2d(const JacksonNetwork& net, cplx alpha) {
    require_2d(net);
    const double p01 = net.p(0, 1), p02 = net.p(0, 2), p10 = net.p(1, 0), p12 = net.p(1, 2),
                 p20 = net.p(2, 0), p21 = net.p(2, 1);
    cplx lead = p20 + p10 * alpha;
    cplx num = alpha - p12 * alpha * alpha - p21;
    cplx c0 = p01 * alpha + p02 * alpha * alpha;
    if (std::abs(lead) < 1e-300) {
        // affine: -num beta + c0 = 0
        if (std::abs(num) < 1e-300) throw Error(Errc::DegenerateAffine, "affine beta equation has no root");
        cplx b = c0 / num;
        return {b, b};
    }
    cplx sq = std::sqrt(discriminant2d(net, alpha));
    if ((sq * std::conj(num)).real() < 0.0) sq = -sq;
    cplx b1 = (num - sq) / (2.0 * lead);
    cplx b2 = (num + sq) / (2.0 * lead);
    // cancellation in num - sq: use the product of the roots instead
    if (std::abs(b1) < 0.5 * std::abs(b2) && b2 != 0.0) b1 = c0 / (lead * b2);
    return {b1, b2};
}

SurfacePoint conjugator(const JacksonNetwork& net, int l, const SurfacePoint& pt) {
    check_size(net, pt);
    check_nonzero(pt);
    if (l < 2 || l > net.d()) throw Error(Errc::BadArgument, "conjugation coordinate must be in 2..d");
    // p(beta, .) = A x + B + Cc / x in x = alpha(l)
    cplx A(0.0, 0.0), Cc(0.0, 0.0);
    const cplx al = pt.a(l);
    for (const auto& inc : net.increments()) {
        int vl = inc.y[static_cast<std::size_t>(l - 1)];
        if (vl == 1) A += inc.prob * loglinear_increment(pt, inc.y) / al;
        else if (vl == -1) Cc += inc.prob * loglinear_increment(pt, inc.y) * al;
    }
    if (std::abs(A) < 1e-300) throw Error(Errc::SingularBoundaryPolynomial, "leading coefficient in alpha vanishes");
    SurfacePoint out = pt;
    out.a(l) = Cc / (A * al);
    if (out.a(l) == 0.0) throw Error(Errc::ZeroCoordinate, "conjugate coordinate is zero");
    return out;
}

cplx conjugator2d(const JacksonNetwork& net, cplx beta, cplx alpha) {
    require_2d(net);
    cplx den = (net.p(0, 2) + beta * net.p(1, 2)) * alpha;
    if (std::abs(net.p(0, 2) + beta * net.p(1, 2)) < 1e-300)
        throw Error(Errc::SingularBoundaryPolynomial, "p(0,2) + beta p(1,2) = 0");
    if (alpha == 0.0) throw Error(Errc::ZeroCoordinate, "alpha = 0");
    return (net.p(2, 0) * beta * beta + net.p(2, 1) * beta) / den;
}

cplx boundary_coeff(const JacksonNetwork& net, int j, const SurfacePoint& pt) {
    check_size(net, pt);
    check_nonzero(pt);
    cplx s = net.mu(j);
    for (const auto& inc : net.increments())
        if (inc.from == j) s -= inc.prob * loglinear_increment(pt, inc.y);
    return s;
}

cplx boundary_coeff2d(const JacksonNetwork& net, cplx beta, cplx alpha) {
    require_2d(net);
    if (alpha == 0.0) throw Error(Errc::ZeroCoordinate, "alpha = 0");
    return net.mu(2) - (net.p(2, 0) * beta + net.p(2, 1)) / alpha;
}

std::pair<double, double> single_term_root2d(const JacksonNetwork& net) {
    require_2d(net);
    const double p01 = net.p(0, 1), p10 = net.p(1, 0), p12 = net.p(1, 2), p20 = net.p(2, 0),
                 p21 = net.p(2, 1), mu2 = net.mu(2);
    if (p20 <= 0.0) throw Error(Errc::NoExitAtTwo, "p(2,0) = 0");
    double num = p01 + (p21 / p20) * (1.0 + p10 * p21 / p20 - mu2);
    double den = (mu2 / p20) * (mu2 * p10 / p20 + p12);
    if (den == 0.0) throw Error(Errc::DivisionByZero, "single-term root denominator vanishes");
    double r1 = num / den;
    return {r1, (mu2 * r1 - p21) / p20};
}

double hamiltonian(const JacksonNetwork& net, Labels a, const std::vector<double>& q) {
    if (static_cast<int>(q.size()) != net.d()) throw Error(Errc::BadArgument, "q must have d entries");
    double s = 0.0;
    for (const auto& inc : net.increments()) {
        if (inc.from >= 1 && has_label(a, inc.from)) {
            s += inc.prob;
            continue;
        }
        double dot = 0.0;
        for (int k = 0; k < net.d(); ++k) dot += inc.x[static_cast<std::size_t>(k)] * q[static_cast<std::size_t>(k)];
        s += inc.prob * std::exp(-dot);
    }
    return -std::log(s);
}

bool simplifying_condition2d(const JacksonNetwork& net) {
    require_2d(net);
    const double p01 = net.p(0, 1), p02 = net.p(0, 2), p10 = net.p(1, 0), p12 = net.p(1, 2),
                 p20 = net.p(2, 0), p21 = net.p(2, 1);
    double den = p12 * p12 - p21 * p21;
    double num = 2 * p02 * p10 - 2 * p01 * p20 + p12 - p21;
    if (den == 0.0) return num != 0.0;
    double x = num / den;
    bool ok = !(x > -1.0 && x < 1.0);
    if (!ok) spdlog::warn("discriminant curve may cross the negative real axis; root labels are not continuous");
    return ok;
}

bool on_surface(const JacksonNetwork& net, Labels a, const SurfacePoint& pt, double tol) {
    return std::abs(char_poly(net, a, pt) - 1.0) <= tol;
}

}  // namespace crw
