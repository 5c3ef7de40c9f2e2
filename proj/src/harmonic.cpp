#include "crw/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace crw {

bool HarmonicSystemGraph::edge_complete() const {
    for (int k = 0; k < size(); ++k)
        for (int l = 2; l <= d; ++l) {
            int count = has_label(loops[static_cast<std::size_t>(k)], l) ? 1 : 0;
            for (const auto& e : edges)
                if (e.label == l && (e.u == k || e.v == k)) ++count;
            if (count != 1) return false;
        }
    return true;
}

namespace {

void note(ConditionReport& r, double v, double tol, bool bigger_is_bad, const std::string& where) {
    if (bigger_is_bad) {
        if (v > r.worst || r.detail.empty()) {
            r.worst = std::max(r.worst, v);
            if (v > tol) r.detail = where;
        }
        if (v > tol) r.pass = false;
    }
}

}  // namespace

SystemReport verify_system(const JacksonNetwork& net, const HarmonicSystemGraph& g,
                           const SystemSolution& sol, double tol) {
    SystemReport rep;
    const int n = g.size();
    if (static_cast<int>(sol.alpha.size()) != n || static_cast<int>(sol.c.size()) != n)
        throw Error(Errc::BadArgument, "solution size does not match graph");
    if (!g.edge_complete()) throw Error(Errc::BadArgument, "graph is not edge-complete");

    for (int k = 0; k < n; ++k) {
        double v = std::abs(char_poly(net, 0, sol.point(k)) - 1.0);
        note(rep.on_surface, v, tol, true, fmt::format("vertex {}", k));
    }

    rep.distinct.worst = n > 1 ? std::numeric_limits<double>::infinity() : 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double sep = 0.0;
            for (std::size_t t = 0; t < sol.alpha[static_cast<std::size_t>(i)].size(); ++t)
                sep = std::max(sep, std::abs(sol.alpha[static_cast<std::size_t>(i)][t] - sol.alpha[static_cast<std::size_t>(j)][t]));
            rep.distinct.worst = std::min(rep.distinct.worst, sep);
            if (sep <= tol) {
                rep.distinct.pass = false;
                rep.distinct.detail = fmt::format("vertices {} and {}", i, j);
            }
        }

    for (const auto& e : g.edges) {
        SurfacePoint pu = sol.point(e.u), pv = sol.point(e.v);
        SurfacePoint conj = conjugator(net, e.label, pu);
        double v = 0.0;
        for (std::size_t t = 0; t < pv.alpha.size(); ++t) v = std::max(v, std::abs(conj.alpha[t] - pv.alpha[t]));
        note(rep.conjugacy, v, tol, true, fmt::format("edge {}-{} label {}", e.u, e.v, e.label));

        cplx cu = boundary_coeff(net, e.label, pu), cv = boundary_coeff(net, e.label, pv);
        cplx a = sol.c[static_cast<std::size_t>(e.u)] * cu, b = sol.c[static_cast<std::size_t>(e.v)] * cv;
        double scale = std::max({std::abs(a), std::abs(b), 1e-300});
        double m = std::abs(a + b) / scale;
        if (std::abs(a) == 0.0 && std::abs(b) == 0.0) m = 0.0;
        note(rep.multipliers, m, tol, true, fmt::format("edge {}-{} label {}", e.u, e.v, e.label));
    }

    for (int k = 0; k < n; ++k)
        for (int l = 2; l <= g.d; ++l) {
            if (!has_label(g.loops[static_cast<std::size_t>(k)], l)) continue;
            double v = std::abs(boundary_coeff(net, l, sol.point(k)));
            note(rep.loops, v, tol, true, fmt::format("vertex {} loop {}", k, l));
        }
    return rep;
}

LogLinearCombination harmonic_function(const SystemSolution& sol) {
    LogLinearCombination h;
    for (std::size_t k = 0; k < sol.c.size(); ++k) h.add(sol.c[k], {sol.beta, sol.alpha[k]});
    return h;
}

LogLinearCombination two_term(const JacksonNetwork& net, int l, cplx beta, const std::vector<cplx>& alpha1) {
    SurfacePoint p1{beta, alpha1};
    SurfacePoint p2 = conjugator(net, l, p1);
    cplx c1 = boundary_coeff(net, l, p1), c2 = boundary_coeff(net, l, p2);
    LogLinearCombination h;
    h.add(c2, p1);
    h.add(-c1, p2);
    return h;
}

namespace {

std::vector<int> identity_injection(int d) {
    std::vector<int> inj(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) inj[static_cast<std::size_t>(k)] = k + 1;
    return inj;
}

}  // namespace

bool is_simple_extension(const JacksonNetwork& net, const JacksonNetwork& net1,
                         const std::vector<int>& injection, double tol) {
    const int d = net.d(), d1 = net1.d();
    std::vector<int> inj = injection.empty() ? identity_injection(d) : injection;
    if (static_cast<int>(inj.size()) != d || d1 < d || inj[0] != 1) return false;
    // map[k] = node of net1 for node k of net (0 -> 0)
    std::vector<int> map(static_cast<std::size_t>(d + 1), 0);
    std::vector<char> old(static_cast<std::size_t>(d1 + 1), 0);
    old[0] = 1;
    for (int k = 1; k <= d; ++k) {
        int m = inj[static_cast<std::size_t>(k - 1)];
        if (m < 1 || m > d1 || old[static_cast<std::size_t>(m)]) return false;
        map[static_cast<std::size_t>(k)] = m;
        old[static_cast<std::size_t>(m)] = 1;
    }
    // new nodes never feed old non-zero nodes
    for (int i = 1; i <= d1; ++i) {
        if (old[static_cast<std::size_t>(i)]) continue;
        for (int k = 1; k <= d; ++k)
            if (net1.p(i, map[static_cast<std::size_t>(k)]) > 0.0) return false;
    }
    // p' = s p off the (0,0) entry
    Matrix pp(static_cast<std::size_t>(d + 1), std::vector<double>(static_cast<std::size_t>(d + 1), 0.0));
    double s = 0.0;
    for (int i = 0; i <= d; ++i) {
        int mi = map[static_cast<std::size_t>(i)];
        for (int j = 1; j <= d; ++j) pp[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = net1.p(mi, map[static_cast<std::size_t>(j)]);
        double to0 = net1.p(mi, 0);
        for (int j = 1; j <= d1; ++j)
            if (!old[static_cast<std::size_t>(j)]) to0 += net1.p(mi, j);
        if (i > 0) pp[static_cast<std::size_t>(i)][0] = to0;
        for (int j = 0; j <= d; ++j) s += pp[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    if (s <= 0.0) return false;
    for (int i = 0; i <= d; ++i)
        for (int j = 0; j <= d; ++j)
            if (std::abs(pp[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] - s * net.p(i, j)) > tol) return false;
    return true;
}

HarmonicSystemGraph extend_graph(const HarmonicSystemGraph& g, int d1, const std::vector<int>& injection) {
    std::vector<int> inj = injection.empty() ? identity_injection(g.d) : injection;
    HarmonicSystemGraph out;
    out.d = d1;
    out.tags = g.tags;
    for (const auto& e : g.edges) out.edges.push_back({e.u, e.v, inj[static_cast<std::size_t>(e.label - 1)]});
    Labels fresh = all_labels(d1);
    for (int l = 2; l <= g.d; ++l) fresh &= ~label_bit(inj[static_cast<std::size_t>(l - 1)]);
    for (Labels lp : g.loops) {
        Labels m = fresh;
        for (int l = 2; l <= g.d; ++l)
            if (has_label(lp, l)) m |= label_bit(inj[static_cast<std::size_t>(l - 1)]);
        out.loops.push_back(m);
    }
    return out;
}

SystemSolution extend_solution(const JacksonNetwork& net, const JacksonNetwork& net1,
                               const std::vector<int>& injection, const SystemSolution& sol) {
    if (!is_simple_extension(net, net1, injection))
        throw Error(Errc::NotSimpleExtension, "second network is not a simple extension of the first");
    std::vector<int> inj = injection.empty() ? identity_injection(net.d()) : injection;
    SystemSolution out;
    out.beta = sol.beta;
    out.c = sol.c;
    for (const auto& a : sol.alpha) {
        std::vector<cplx> a1(static_cast<std::size_t>(net1.d() - 1), sol.beta);
        for (int l = 2; l <= net.d(); ++l) a1[static_cast<std::size_t>(inj[static_cast<std::size_t>(l - 1)] - 2)] = a[static_cast<std::size_t>(l - 2)];
        out.alpha.push_back(std::move(a1));
    }
    return out;
}

double diffusion_exit_probability(double a, double b, double x1, double x2) {
    if (!(a > 0.0) || !(b > 0.0)) throw Error(Errc::BadArgument, "drifts must be positive");
    if (a == b) throw Error(Errc::EqualDrifts, "a = b");
    const double k = (a + 2 * b) / (a - b);
    const double e1 = std::exp(-3 * (a + 2 * b) * (x1 - x2));
    return e1 + k * (e1 * std::exp(-3 * (2 * a + b) * x2) - std::exp(-3 * (2 * a + b) * x1));
}

}  // namespace crw
