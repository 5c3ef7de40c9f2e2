#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "crw/charsurf.hpp"

namespace crw {

/// z^k for integer k by repeated squaring; 0^0 = 1, 0^k = 0 for k > 0.
cplx ipow(cplx z, long k);
double ipow(double x, long k);

/// Value stored as mant * exp(log_scale); reaches magnitudes far below 1e-300.
struct ScaledComplex {
    cplx mant{0.0, 0.0};
    double log_scale = 0.0;

    cplx value() const { return mant * std::exp(log_scale); }
    /// log10 |value|; -inf for zero.
    double log10_abs() const;
};

struct Term {
    cplx c;
    SurfacePoint pt;
};

/// Finite sum of c_k [(beta_k, alpha_k), y].
class LogLinearCombination {
public:
    LogLinearCombination() = default;
    explicit LogLinearCombination(std::vector<Term> terms);

    /// Appends a term; zero coefficients are dropped.
    void add(cplx c, SurfacePoint pt);
    const std::vector<Term>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

    cplx eval(const Point& y) const;
    /// Log-magnitude evaluation: each term is formed as exp(log|.| + i arg) relative to the largest.
    ScaledComplex eval_scaled(const Point& y) const;

    LogLinearCombination& operator+=(const LogLinearCombination& o);
    LogLinearCombination scaled(cplx s) const;

private:
    std::vector<Term> terms_;
};

/// [(beta,alpha), y] = beta^{y(1) - sum_{j>=2} y(j)} prod_j alpha(j)^{y(j)}.
cplx loglinear(const SurfacePoint& pt, const Point& y);

using LatticeFunction = std::function<cplx(const Point&)>;

/// E_y[V(Y_1)] - V(y): increments leaving node j >= 2 are suppressed when y(j) = 0.
cplx residual(const JacksonNetwork& net, const LatticeFunction& f, const Point& y);
cplx residual(const JacksonNetwork& net, const LogLinearCombination& comb, const Point& y);

}  // namespace crw
