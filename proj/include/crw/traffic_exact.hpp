#pragma once

#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "crw/error.hpp"

namespace crw {

using Rational = boost::multiprecision::cpp_rational;
using RationalMatrix = std::vector<std::vector<Rational>>;

/// Exact traffic equations nu = lambda + R^T nu over the rationals (Gauss-Jordan).
inline std::vector<Rational> traffic_rates_exact(const RationalMatrix& p) {
    const int d = static_cast<int>(p.size()) - 1;
    if (d < 1) throw Error(Errc::BadShape, "need at least one node");
    std::vector<Rational> mu(d, 0);
    for (int i = 1; i <= d; ++i)
        for (int k = 0; k <= d; ++k) mu[i - 1] += p[i][k];
    // (I - R^T) nu = lambda
    std::vector<std::vector<Rational>> a(d, std::vector<Rational>(d + 1, 0));
    for (int j = 1; j <= d; ++j) {
        for (int k = 1; k <= d; ++k) {
            if (mu[k - 1] == 0) throw Error(Errc::DivisionByZero, "node without service");
            a[j - 1][k - 1] = (j == k ? Rational(1) : Rational(0)) - p[k][j] / mu[k - 1];
        }
        a[j - 1][d] = p[0][j];
    }
    for (int c = 0; c < d; ++c) {
        int piv = -1;
        for (int r = c; r < d; ++r)
            if (a[r][c] != 0) { piv = r; break; }
        if (piv < 0) throw Error(Errc::Reducible, "singular traffic equations");
        std::swap(a[c], a[piv]);
        for (int r = 0; r < d; ++r) {
            if (r == c || a[r][c] == 0) continue;
            Rational f = a[r][c] / a[c][c];
            for (int k = c; k <= d; ++k) a[r][k] -= f * a[c][k];
        }
    }
    std::vector<Rational> nu(d);
    for (int j = 0; j < d; ++j) nu[j] = a[j][d] / a[j][j];
    return nu;
}

}  // namespace crw
