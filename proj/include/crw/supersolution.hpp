#pragma once

#include <optional>
#include <vector>

#include "crw/loglinear.hpp"

namespace crw {

/// phi(y) = theta^{ybar} prod_{j>=2} (1 + B_j eta_j^{y(j)}), ybar = y(1) - sum_{j>=2} y(j).
/// phi >= 1 on dB; when certified it is Y-superharmonic on every boundary pattern, so it
/// dominates P_y(tau < infinity).
struct Supersolution {
    double theta = 1.0;
    std::vector<double> eta;  ///< entries for coordinates 2..d
    std::vector<double> B;

    double operator()(long ybar, const std::vector<long>& w) const;
    LogLinearCombination expand() const;
};

/// Largest value of E_y[phi(Y_1)] / phi(y) - 1 over all boundary patterns, computed exactly
/// from the term structure. Negative means strictly superharmonic everywhere.
double superharmonic_margin(const JacksonNetwork& net, const Supersolution& phi);

/// Grid search for a certified supersolution with the smallest theta; margin <= -1e-12.
std::optional<Supersolution> find_supersolution(const JacksonNetwork& net);

}  // namespace crw
