#pragma once

#include <vector>

#include "crw/montecarlo.hpp"

namespace crw {

/// Exit formula of a tandem with distinct rates evaluated in O(d^2) from tables of
/// rho_k^e, e = 0..max_exp. Falls back to the general evaluator for equal rates.
class TandemEvaluator {
public:
    TandemEvaluator(const JacksonNetwork& net, long max_exp);
    /// f(y) for y in B with all exponents <= max_exp.
    double operator()(const Point& y) const;

private:
    const JacksonNetwork* net_;
    int d_;
    bool fallback_;
    long max_exp_;
    std::vector<double> weight_;               ///< weight_[m-1]
    std::vector<std::vector<double>> ratio_;   ///< ratio_[k-1][l-1] = (mu_l - lambda)/(mu_l - mu_k)
    std::vector<std::vector<double>> pow_;     ///< pow_[k-1][e] = rho_k^e
    double pw(int k, long e) const;
};

struct ISResult {
    EstimatorResult estimate;
    /// (samples so far, relative CI half-width) after each chunk of 1000 draws.
    std::vector<std::pair<std::uint64_t, double>> trajectory;
    std::uint64_t degenerate_steps = 0;
};

/// Importance sampling for P_x(tau_n < tau_0) of a tandem: at x the increment v is drawn with
/// probability proportional to p(v) exp(-n (W_n(x + v) - W_n(x))) (blocked moves keep x), and
/// the likelihood ratio p/q is accumulated along the path.
ISResult is_estimate(const JacksonNetwork& net, long n, const Point& start, std::uint64_t samples,
                     std::uint64_t seed, int threads = 1, long step_cap = 0);

}  // namespace crw
