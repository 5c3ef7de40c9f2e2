#include "crw/tandem.hpp"

#include <algorithm>
#include <cmath>

namespace crw {

HarmonicSystemGraph tandem_graph(int m, int d) {
    if (m < 1 || d < m) throw Error(Errc::BadArgument, "tandem graph needs 1 <= m <= d");
    HarmonicSystemGraph g;
    g.d = d;
    const Labels count = Labels(1) << (m - 1);
    for (Labels code = 0; code < count; ++code) g.tags.push_back((code << 1) | label_bit(m));
    auto index_of = [&](Labels set) { return static_cast<int>((set & ~label_bit(m)) >> 1); };
    const Labels labels = all_labels(d);
    for (int k = 0; k < static_cast<int>(count); ++k) {
        Labels a = g.tags[static_cast<std::size_t>(k)];
        g.loops.push_back(labels & ~a);
        for (int j = 2; j <= m; ++j)
            if (has_label(a, j) && !has_label(a, j - 1))
                g.edges.push_back({k, index_of(a | label_bit(j - 1)), j});
    }
    return g;
}

namespace {

void require_tandem(const JacksonNetwork& net) {
    if (!net.is_tandem()) throw Error(Errc::NotTandem, "tandem network required");
}

}  // namespace

SystemSolution tandem_solution(const JacksonNetwork& net, int m) {
    require_tandem(net);
    auto verts = tandem_solution_t<double>(net.lambda(1), net.mus(), m);
    SystemSolution sol;
    sol.beta = net.rho(m);
    for (const auto& v : verts) {
        sol.c.emplace_back(v.c);
        sol.alpha.emplace_back(v.alpha.begin(), v.alpha.end());
    }
    return sol;
}

LogLinearCombination tandem_h(const JacksonNetwork& net, int m) {
    return harmonic_function(tandem_solution(net, m));
}

LogLinearCombination tandem_exit_combination(const JacksonNetwork& net) {
    require_tandem(net);
    LogLinearCombination out;
    for (int m = 1; m <= net.d(); ++m) {
        double w = tandem_weight_t<double>(net.lambda(1), net.mus(), m);
        out += tandem_h(net, m).scaled(w);
    }
    return out;
}

bool has_equal_rates(const JacksonNetwork& net) {
    const auto& mu = net.mus();
    const double top = *std::max_element(mu.begin(), mu.end());
    for (std::size_t i = 0; i < mu.size(); ++i)
        for (std::size_t j = i + 1; j < mu.size(); ++j)
            if (std::abs(mu[i] - mu[j]) < 1e-9 * top) return true;
    return false;
}

namespace {

void require_in_B(const Point& y) {
    if (!in_B(y)) throw Error(Errc::BadArgument, "point is not in B");
}

}  // namespace

double tandem_exit_explicit(const JacksonNetwork& net, const Point& y) {
    require_in_B(y);
    return tandem_exit_combination(net).eval(y).real();
}

double tandem_exit_nested(const JacksonNetwork& net, const Point& y) {
    require_tandem(net);
    require_in_B(y);
    const int d = net.d();
    if (static_cast<int>(y.size()) != d) throw Error(Errc::BadArgument, "point dimension mismatch");
    const double lambda = net.lambda(1);
    const auto& mu = net.mus();
    std::vector<double> F(static_cast<std::size_t>(d + 1), 0.0);
    double total = 0.0;
    long bar = y[0];
    for (int m = 1; m <= d; ++m) {
        if (m >= 2) bar -= y[static_cast<std::size_t>(m - 1)];
        double f = 1.0;
        for (int k = 1; k < m; ++k) {
            const double mk = mu[static_cast<std::size_t>(k - 1)], rk = lambda / mk;
            double g = -1.0;
            for (int l = k + 1; l <= m; ++l) {
                const double ml = mu[static_cast<std::size_t>(l - 1)];
                if (ml == mk) throw Error(Errc::EqualRates, "equal service rates");
                g *= (ml - lambda) / (ml - mk) * ipow(rk, y[static_cast<std::size_t>(l - 1)]);
            }
            f += F[static_cast<std::size_t>(k)] * g;
        }
        F[static_cast<std::size_t>(m)] = f;
        double w = tandem_weight_t<double>(lambda, mu, m);
        total += w * ipow(net.rho(m), bar) * f;
    }
    return total;
}

double tandem_exit_2d(const JacksonNetwork& net, const Point& y) {
    require_tandem(net);
    require_in_B(y);
    if (net.d() != 2 || y.size() != 2) throw Error(Errc::NotTandem2D, "two-dimensional tandem required");
    const double lambda = net.lambda(1), mu1 = net.mu(1), mu2 = net.mu(2);
    if (mu1 == mu2) throw Error(Errc::EqualRates, "mu1 = mu2");
    const double r1 = lambda / mu1, r2 = lambda / mu2, c = (mu2 - lambda) / (mu2 - mu1);
    const double a = ipow(r2, y[0] - y[1]);
    return a + c * (ipow(r1, y[0]) - a * ipow(r1, y[1]));
}

double tandem_exit_equal_rates(const JacksonNetwork& net, const Point& y) {
    require_tandem(net);
    require_in_B(y);
    const int d = net.d();
    const auto& mu = net.mus();
    const double top = *std::max_element(mu.begin(), mu.end());
    for (double m : mu)
        if (std::abs(m - mu[0]) >= 1e-9 * top)
            throw Error(Errc::UnsupportedPattern, "only the all-rates-equal pattern is supported");
    if (d != 2 && d != 3) throw Error(Errc::UnsupportedPattern, "equal-rate limit is available for d = 2 and 3");
    double mu_avg = 0.0;
    for (double m : mu) mu_avg += m;
    mu_avg /= d;
    const double lambda = net.lambda(1), rho = lambda / mu_avg, c0 = (mu_avg - lambda) / mu_avg;
    if (d == 2) {
        const long bar = y[0] - y[1];
        return ipow(rho, bar) + c0 * static_cast<double>(bar) * ipow(rho, y[0]);
    }
    const long bar = y[0] - y[1] - y[2];
    const double b = static_cast<double>(bar), y3 = static_cast<double>(y[2]);
    const double quad = 0.5 * c0 * c0 * b * b * ipow(rho, y[1] + y[2]);
    const double lin = ipow(rho, y[2]) * ((0.5 * c0 * c0 + y3 * c0 * c0) * ipow(rho, y[1]) + c0) * b;
    return ipow(rho, bar) * (quad + lin + 1.0);
}

double tandem_exit_probability(const JacksonNetwork& net, const Point& y) {
    require_tandem(net);
    if (has_equal_rates(net)) return tandem_exit_equal_rates(net, y);
    if (net.d() == 2) return tandem_exit_2d(net, y);
    return tandem_exit_nested(net, y);
}

}  // namespace crw
