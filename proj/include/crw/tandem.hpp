#pragma once

#include <vector>

#include "crw/harmonic.hpp"

namespace crw {

/// G_m: vertices a u {m} for a subset of {1,...,m-1}, ordered by the binary encoding of a;
/// tags hold the vertex set (bit j = node j). Labels range over 2..d (d >= m); labels
/// above m are loops everywhere.
HarmonicSystemGraph tandem_graph(int m, int d);
inline HarmonicSystemGraph tandem_graph(int d) { return tandem_graph(d, d); }

/// Closed-form tandem solution over any ordered field T (double or an exact rational).
/// alpha has entries for coordinates 2..d.
template <class T>
struct TandemVertex {
    Labels set;
    T c;
    std::vector<T> alpha;
};

template <class T>
std::vector<TandemVertex<T>> tandem_solution_t(const T& lambda, const std::vector<T>& mu, int m) {
    const int d = static_cast<int>(mu.size());
    if (m < 1 || m > d) throw Error(Errc::BadArgument, "subsystem index out of range");
    auto rho = [&](int j) { return lambda / mu[static_cast<std::size_t>(j - 1)]; };
    std::vector<TandemVertex<T>> out;
    const Labels count = Labels(1) << (m - 1);
    for (Labels code = 0; code < count; ++code) {
        std::vector<int> a;
        for (int j = 1; j < m; ++j)
            if ((code >> (j - 1)) & 1U) a.push_back(j);
        a.push_back(m);
        TandemVertex<T> v;
        v.set = 0;
        for (int j : a) v.set |= label_bit(j);
        T c = (a.size() % 2 == 1) ? T(1) : T(-1);
        for (std::size_t k = 0; k + 1 < a.size(); ++k)
            for (int l = a[k] + 1; l <= a[k + 1]; ++l) {
                const T& ml = mu[static_cast<std::size_t>(l - 1)];
                const T& mk = mu[static_cast<std::size_t>(a[k] - 1)];
                if (ml == mk) throw Error(Errc::EqualRates, "equal service rates in the tandem solution");
                c *= (ml - lambda) / (ml - mk);
            }
        v.c = c;
        v.alpha.assign(static_cast<std::size_t>(d - 1), T(1));
        for (int l = 2; l <= d; ++l) {
            T val(1);
            if (l > a.back()) {
                val = rho(a.back());
            } else {
                for (std::size_t k = 0; k + 1 < a.size(); ++k)
                    if (a[k] < l && l <= a[k + 1]) val = rho(a[k]);
            }
            v.alpha[static_cast<std::size_t>(l - 2)] = val;
        }
        out.push_back(std::move(v));
    }
    return out;
}

/// Coefficient of h*_m in the exit formula: prod_{l>m} (mu_l - lambda)/(mu_l - mu_m).
template <class T>
T tandem_weight_t(const T& lambda, const std::vector<T>& mu, int m) {
    T w(1);
    for (std::size_t l = static_cast<std::size_t>(m); l < mu.size(); ++l) {
        const T& mm = mu[static_cast<std::size_t>(m - 1)];
        if (mu[l] == mm) throw Error(Errc::EqualRates, "equal service rates in the exit formula");
        w *= (mu[l] - lambda) / (mu[l] - mm);
    }
    return w;
}

/// Solution of the harmonic system of G_m (beta = rho_m) for a tandem network.
SystemSolution tandem_solution(const JacksonNetwork& net, int m);

/// h*_m of the exit formula as a log-linear combination.
LogLinearCombination tandem_h(const JacksonNetwork& net, int m);

/// The full exit formula as an explicit combination (2^d - 1 terms).
LogLinearCombination tandem_exit_combination(const JacksonNetwork& net);

/// True when two service rates differ by less than 1e-9 max mu.
bool has_equal_rates(const JacksonNetwork& net);

/// P_y(tau < infinity) for the tandem walk Y. Uses the two-dimensional closed form for d = 2,
/// the equal-rate limits where rates coincide, and an O(d^2) nested evaluation otherwise.
double tandem_exit_probability(const JacksonNetwork& net, const Point& y);

/// Same quantity as a sum of the explicit combination terms; exponential in d.
double tandem_exit_explicit(const JacksonNetwork& net, const Point& y);

/// O(d^2) evaluation of the exit formula by nesting the sum over vertices.
double tandem_exit_nested(const JacksonNetwork& net, const Point& y);

/// Two-dimensional closed form rho2^{y1-y2} + c (rho1^{y1} - rho2^{y1-y2} rho1^{y2}).
double tandem_exit_2d(const JacksonNetwork& net, const Point& y);

/// Limits of the exit formula when all service rates coincide (d = 2 or 3).
double tandem_exit_equal_rates(const JacksonNetwork& net, const Point& y);

}  // namespace crw
