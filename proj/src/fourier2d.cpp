#include "crw/fourier2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <spdlog/spdlog.h>

namespace crw {

namespace {

void require_2d(const JacksonNetwork& net) {
    if (net.d() != 2) throw Error(Errc::BadArgument, "two-dimensional network required");
}

SurfacePoint sp(cplx beta, cplx alpha) { return {beta, {alpha}}; }

}  // namespace

cplx BasisElement::trace(long y) const {
    if (kind == Kind::SingleTerm) return ipow(alpha, y);
    return ipow(alpha, y) + coef * ipow(alpha_conj, y);
}

BasisElement single_term_element(const JacksonNetwork& net) {
    require_2d(net);
    auto [r1, b] = single_term_root2d(net);
    BasisElement e;
    e.kind = BasisElement::Kind::SingleTerm;
    e.alpha = r1;
    e.beta = b;
    e.alpha_conj = 0.0;
    e.coef = 0.0;
    e.harmonic_form.add(1.0, sp(b, r1));
    e.balayage_determined = std::abs(b) < 1.0 && std::abs(r1) <= 1.0 && r1 != 0.0;
    return e;
}

BasisElement perturbed_basis(const JacksonNetwork& net, cplx alpha) {
    require_2d(net);
    BasisElement e;
    e.kind = BasisElement::Kind::Pair;
    e.alpha = alpha;
    e.beta = beta_roots2d(net, alpha).first;
    e.alpha_conj = conjugator2d(net, e.beta, alpha);
    cplx c = boundary_coeff2d(net, e.beta, alpha), cc = boundary_coeff2d(net, e.beta, e.alpha_conj);
    if (cc == 0.0) throw Error(Errc::NotBalayageDetermined, "C(beta1, alpha') = 0");
    e.coef = -c / cc;
    e.harmonic_form.add(1.0, sp(e.beta, alpha));
    e.harmonic_form.add(e.coef, sp(e.beta, e.alpha_conj));
    e.balayage_determined = std::abs(e.beta) < 1.0 && std::abs(alpha) <= 1.0 + 1e-15 && std::abs(e.alpha_conj) < 1.0;
    if (!e.balayage_determined)
        throw Error(Errc::NotBalayageDetermined,
                    "modulus check failed: |beta1| = " + std::to_string(std::abs(e.beta)) +
                        ", |alpha'| = " + std::to_string(std::abs(e.alpha_conj)));
    return e;
}

FirstOrder first_order(const JacksonNetwork& net) {
    require_2d(net);
    FirstOrder fo;
    fo.r = net.io_ratio();
    const cplx r = fo.r;
    fo.alpha_conj = conjugator2d(net, r, 1.0);
    if (!(std::abs(fo.alpha_conj) < 1.0))
        throw Error(Errc::AssumptionViolated, "|alpha(r,1)| >= 1");
    cplx cc = boundary_coeff2d(net, r, fo.alpha_conj);
    if (std::abs(cc) < 1e-14) throw Error(Errc::AssumptionViolated, "C(r, alpha(r,1)) = 0");
    fo.c7 = -boundary_coeff2d(net, r, 1.0) / cc;
    fo.A0.add(1.0, sp(r, 1.0));
    fo.A0.add(fo.c7, sp(r, fo.alpha_conj));
    fo.element.kind = BasisElement::Kind::Pair;
    fo.element.alpha = 1.0;
    fo.element.beta = r;
    fo.element.alpha_conj = fo.alpha_conj;
    fo.element.coef = fo.c7;
    fo.element.harmonic_form = fo.A0;
    fo.element.balayage_determined = fo.r < 1.0;
    fo.sup_deviation = std::abs(fo.c7);
    // trace 1 + c7 a'^y is monotone (a' >= 0) or alternating (a' < 0): extremes at y = 0, 1 and the limit
    const double c7 = fo.c7.real(), a = fo.alpha_conj.real();
    const double lo = std::min({1.0, 1.0 + c7, 1.0 + c7 * a});
    const double hi = std::max({1.0, 1.0 + c7, 1.0 + c7 * a});
    if (lo > 0.0) {
        fo.has_bracket = true;
        fo.lower_factor = 1.0 / hi;
        fo.upper_factor = 1.0 / lo;
    }
    return fo;
}

BalayageApproximation refine(const JacksonNetwork& net, const BoundaryTarget& target, RefineOptions opt) {
    require_2d(net);
    if (opt.K < 1) throw Error(Errc::BadArgument, "K must be at least 1");
    const int K = opt.K;
    std::vector<BasisElement> basis;
    basis.push_back(single_term_element(net));
    if (!basis[0].balayage_determined)
        throw Error(Errc::NotBalayageDetermined, "single-term element is not determined by its boundary values");
    for (int j = 1; j <= K; ++j) {
        cplx a = std::polar(opt.R, 2.0 * std::numbers::pi * j / (K + 1));
        basis.push_back(perturbed_basis(net, a));
    }
    const int n = K + 1;
    Eigen::MatrixXcd B(n, n);
    Eigen::VectorXcd b(n);
    for (int k = 0; k < n; ++k) {
        b(k) = target.value(k);
        for (int i = 0; i < n; ++i) B(k, i) = basis[static_cast<std::size_t>(i)].trace(k);
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B);
    const auto& sv = svd.singularValues();
    BalayageApproximation out;
    out.condition = sv(n - 1) > 0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();
    if (!(out.condition <= opt.max_condition))
        throw Error(Errc::SingularBasis, "basis matrix condition number " + std::to_string(out.condition));
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(B);
    Eigen::VectorXcd psi = lu.solve(b);
    psi += lu.solve(b - B * psi);
    for (int i = 0; i < n; ++i) {
        out.psi.push_back(psi(i));
        out.combination += basis[static_cast<std::size_t>(i)].harmonic_form.scaled(psi(i));
    }
    // envelope of |approx trace - target| for y > K, nonincreasing since all moduli are <= 1
    std::vector<std::pair<double, double>> env = target.envelope;
    for (int i = 0; i < n; ++i) {
        const auto& e = basis[static_cast<std::size_t>(i)];
        env.emplace_back(std::abs(psi(i)), std::abs(e.alpha));
        if (e.kind == BasisElement::Kind::Pair) env.emplace_back(std::abs(psi(i) * e.coef), std::abs(e.alpha_conj));
    }
    auto envelope = [&](long y) {
        double s = 0.0;
        for (auto [w, z] : env) s += w * ipow(z, y);
        return s;
    };
    auto approx_trace = [&](long y) {
        cplx s(0.0, 0.0);
        for (int i = 0; i < n; ++i) s += psi(i) * basis[static_cast<std::size_t>(i)].trace(y);
        return s;
    };
    double best = 0.0;
    long arg = 0, y = 0;
    for (;; ++y) {
        double err = std::abs(approx_trace(y) - target.value(y));
        out.error_trace.push_back(err);
        if (err > best) {
            best = err;
            arg = y;
        }
        if (y > K && (envelope(y + 1) <= best || y >= opt.search_cap)) break;
    }
    out.search_end = y;
    double tail = envelope(y + 1);
    if (tail > best) spdlog::warn("error search capped at {}; tail bound {:.3g} exceeds the observed maximum", y, tail);
    out.max_error = std::max(best, tail);
    out.argmax = arg;
    out.lower_factor = 1.0 / (1.0 + out.max_error);
    out.upper_factor = out.max_error < 1.0 ? 1.0 / (1.0 - out.max_error) : std::numeric_limits<double>::infinity();
    return out;
}

BalayageApproximation exit_approximation(const JacksonNetwork& net, RefineOptions opt) {
    FirstOrder fo = first_order(net);
    BoundaryTarget t;
    const cplx c7 = fo.c7, a = fo.alpha_conj;
    t.value = [c7, a](long y) { return c7 * ipow(a, y); };
    t.envelope = {{std::abs(c7), std::abs(a)}};
    BalayageApproximation out = refine(net, t, opt);
    LogLinearCombination g = fo.A0;
    g += out.combination.scaled(-1.0);
    out.combination = std::move(g);
    return out;
}

BalayageApproximation balayage_general(const JacksonNetwork& net, const std::vector<double>& f, Tail tail,
                                       RefineOptions opt) {
    if (f.empty()) throw Error(Errc::BadArgument, "boundary data is empty");
    const long K = static_cast<long>(f.size()) - 1;
    const double c = tail == Tail::Constant ? f.back() : 0.0;
    if (tail != Tail::Zero && tail != Tail::Constant) throw Error(Errc::UnsupportedTail, "tail must be zero or constant");
    if (K > opt.K) opt.K = static_cast<int>(K);
    BoundaryTarget t;
    std::vector<double> g(f.begin(), f.end());
    for (auto& v : g) v -= c;
    t.value = [g](long y) { return y < static_cast<long>(g.size()) ? cplx(g[static_cast<std::size_t>(y)], 0.0) : cplx(0.0, 0.0); };
    BalayageApproximation out = refine(net, t, opt);
    if (c != 0.0) {
        BalayageApproximation one = exit_approximation(net, opt);
        out.combination += one.combination.scaled(c);
        out.max_error += std::abs(c) * one.max_error;
        // error traces are not additive pointwise; keep the certified total only
        out.error_trace.clear();
    }
    out.lower_factor = 0.0;
    out.upper_factor = 0.0;
    return out;
}

cplx z_balayage_unit(const JacksonNetwork& net, double theta, const Point& z) {
    require_2d(net);
    const cplx a = std::polar(1.0, theta);
    const cplx b1 = beta_roots2d(net, a).first;
    return ipow(a, z[1]) * ipow(b1, z[0] - z[1]);
}

double combine_corners(long n, const std::function<double(const Point&)>& g1,
                       const std::function<double(const Point&)>& g2, const Point& x) {
    if (x.size() != 2) throw Error(Errc::BadArgument, "two-dimensional point required");
    const Point y1 = transform(n, 1, x);
    const Point y2{n - x[1], x[0]};
    return std::max(g1(y1), g2(y2));
}

}  // namespace crw
