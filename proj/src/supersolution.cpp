#include "crw/supersolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace crw {

double Supersolution::operator()(long ybar, const std::vector<long>& w) const {
    double v = std::pow(theta, static_cast<double>(ybar));
    for (std::size_t j = 0; j < w.size(); ++j) v *= 1.0 + B[j] * std::pow(eta[j], static_cast<double>(w[j]));
    return v;
}

LogLinearCombination Supersolution::expand() const {
    const int m = static_cast<int>(eta.size());
    LogLinearCombination out;
    for (Labels s = 0; s < (Labels(1) << m); ++s) {
        SurfacePoint pt;
        pt.beta = theta;
        pt.alpha.assign(static_cast<std::size_t>(m), 1.0);
        double c = 1.0;
        for (int j = 0; j < m; ++j)
            if ((s >> j) & 1U) {
                pt.alpha[static_cast<std::size_t>(j)] = eta[static_cast<std::size_t>(j)];
                c *= B[static_cast<std::size_t>(j)];
            }
        out.add(c, std::move(pt));
    }
    return out;
}

double superharmonic_margin(const JacksonNetwork& net, const Supersolution& phi) {
    const int m = net.d() - 1;
    if (static_cast<int>(phi.eta.size()) != m || static_cast<int>(phi.B.size()) != m)
        throw Error(Errc::BadArgument, "supersolution dimension mismatch");
    const Labels full = (Labels(1) << m) - 1;
    double worst = -std::numeric_limits<double>::infinity();
    // terms indexed by s (bit j-2 <-> coordinate j); face a in the same encoding
    std::vector<double> weight(static_cast<std::size_t>(full) + 1);
    std::vector<SurfacePoint> pts(static_cast<std::size_t>(full) + 1);
    for (Labels s = 0; s <= full; ++s) {
        double c = 1.0;
        SurfacePoint pt;
        pt.beta = phi.theta;
        pt.alpha.assign(static_cast<std::size_t>(m), 1.0);
        for (int j = 0; j < m; ++j)
            if ((s >> j) & 1U) {
                c *= phi.B[static_cast<std::size_t>(j)];
                pt.alpha[static_cast<std::size_t>(j)] = phi.eta[static_cast<std::size_t>(j)];
            }
        weight[s] = c;
        pts[s] = std::move(pt);
    }
    for (Labels face = 0; face <= full; ++face) {
        Labels a = face << 2;  // coordinate j sits at bit j
        std::map<Labels, std::pair<double, double>> groups;  // free part -> (sum A(p_a - 1), sum A)
        for (Labels s = 0; s <= full; ++s) {
            double pa = char_poly(net, a, pts[s]).real();
            auto& g = groups[s & ~face];
            g.first += weight[s] * (pa - 1.0);
            g.second += weight[s];
        }
        for (const auto& [key, g] : groups) worst = std::max(worst, g.first / g.second);
    }
    return worst;
}

std::optional<Supersolution> find_supersolution(const JacksonNetwork& net) {
    const int m = net.d() - 1;
    if (m < 1) return std::nullopt;
    std::vector<double> bgrid;
    for (int k = 0; k <= 10; ++k) bgrid.push_back(std::pow(10.0, 0.5 * k));
    const bool per_coord = m <= 2;
    for (int ti = 1; ti < 100; ++ti) {
        const double theta = 0.01 * ti;
        for (int ei = 2; ei <= 19; ++ei) {
            const double eta = 0.05 * ei;
            Supersolution phi;
            phi.theta = theta;
            phi.eta.assign(static_cast<std::size_t>(m), eta);
            phi.B.assign(static_cast<std::size_t>(m), 1.0);
            const std::size_t combos = per_coord ? static_cast<std::size_t>(std::pow(bgrid.size(), m)) : bgrid.size();
            for (std::size_t code = 0; code < combos; ++code) {
                std::size_t c = code;
                for (int j = 0; j < m; ++j) {
                    if (per_coord) {
                        phi.B[static_cast<std::size_t>(j)] = bgrid[c % bgrid.size()];
                        c /= bgrid.size();
                    } else {
                        phi.B[static_cast<std::size_t>(j)] = bgrid[code];
                    }
                }
                if (superharmonic_margin(net, phi) <= -1e-12) return phi;
            }
        }
    }
    return std::nullopt;
}

}  // namespace crw
