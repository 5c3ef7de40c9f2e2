#include "crw/importance.hpp"

#include <atomic>
#include <cmath>

#include <spdlog/spdlog.h>

#include "crw/loglinear.hpp"
#include "crw/tandem.hpp"

namespace crw {

TandemEvaluator::TandemEvaluator(const JacksonNetwork& net, long max_exp)
    : net_(&net), d_(net.d()), fallback_(has_equal_rates(net)), max_exp_(max_exp) {
    if (!net.is_tandem()) throw Error(Errc::NotTandem, "tandem network required");
    if (fallback_) return;
    const double lambda = net.lambda(1);
    const auto& mu = net.mus();
    for (int m = 1; m <= d_; ++m) weight_.push_back(tandem_weight_t<double>(lambda, mu, m));
    ratio_.assign(static_cast<std::size_t>(d_), std::vector<double>(static_cast<std::size_t>(d_), 0.0));
    for (int k = 1; k <= d_; ++k)
        for (int l = k + 1; l <= d_; ++l)
            ratio_[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(l - 1)] =
                (mu[static_cast<std::size_t>(l - 1)] - lambda) / (mu[static_cast<std::size_t>(l - 1)] - mu[static_cast<std::size_t>(k - 1)]);
    pow_.assign(static_cast<std::size_t>(d_), std::vector<double>(static_cast<std::size_t>(max_exp + 1), 1.0));
    for (int k = 1; k <= d_; ++k) {
        const double r = net.rho(k);
        auto& row = pow_[static_cast<std::size_t>(k - 1)];
        for (long e = 1; e <= max_exp; ++e) row[static_cast<std::size_t>(e)] = row[static_cast<std::size_t>(e - 1)] * r;
    }
}

double TandemEvaluator::pw(int k, long e) const {
    if (e >= 0 && e <= max_exp_) return pow_[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(e)];
    return ipow(net_->rho(k), e);
}

double TandemEvaluator::operator()(const Point& y) const {
    if (fallback_) return tandem_exit_probability(*net_, y);
    double F[32], G[32];
    if (d_ > 32) return tandem_exit_nested(*net_, y);
    double total = 0.0;
    long bar = y[0];
    for (int m = 1; m <= d_; ++m) {
        double f = 1.0;
        if (m >= 2) {
            const long ym = y[static_cast<std::size_t>(m - 1)];
            bar -= ym;
            for (int k = 1; k < m; ++k) {
                const double step = ratio_[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(m - 1)] * pw(k, ym);
                G[k] = (k == m - 1) ? -step : G[k] * step;
                f += F[k] * G[k];
            }
        }
        F[m] = f;
        total += weight_[static_cast<std::size_t>(m - 1)] * pw(m, bar) * f;
    }
    return total;
}

ISResult is_estimate(const JacksonNetwork& net, long n, const Point& start, std::uint64_t samples,
                     std::uint64_t seed, int threads, long step_cap) {
    if (!net.is_tandem()) throw Error(Errc::NotTandem, "importance sampling needs a tandem network");
    if (!in_A(n, start)) throw Error(Errc::BadArgument, "start is not in A_n");
    if (samples < 1) throw Error(Errc::BadArgument, "samples must be at least 1");
    const int d = net.d();
    const TandemEvaluator f(net, n + 1);
    const auto& incs = net.increments();
    const std::size_t m = incs.size();
    const long cap = step_cap > 0 ? step_cap : 50L * n * d;
    std::atomic<std::uint64_t> degenerate{0};

    auto draw = [&](CounterRng& rng, Accumulator& acc) {
        Point x = start;
        double L = 1.0;
        std::vector<double> w(m), fz(m);
        Point y(static_cast<std::size_t>(d)), z(static_cast<std::size_t>(d));
        for (long k = 0;; ++k) {
            const long s = coord_sum(x);
            if (s >= n) {
                acc.add(L);
                acc.work += static_cast<std::uint64_t>(k);
                return;
            }
            if (s == 0) {
                acc.add(0.0);
                acc.work += static_cast<std::uint64_t>(k);
                return;
            }
            if (k >= cap) {
                ++acc.censored;
                acc.add(0.0);
                acc.work += static_cast<std::uint64_t>(k);
                return;
            }
            y = x;
            y[0] = n - x[0];
            const double fx = f(y);
            double S = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const auto& inc = incs[i];
                if (inc.from >= 1 && x[static_cast<std::size_t>(inc.from - 1)] == 0) {
                    fz[i] = fx;
                } else {
                    for (int j = 0; j < d; ++j) z[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] + inc.x[static_cast<std::size_t>(j)];
                    z[0] = n - z[0];
                    const long sz = s + (inc.to > 0 ? 1 : 0) - (inc.from > 0 ? 1 : 0);
                    fz[i] = sz >= n ? 1.0 : f(z);
                }
                w[i] = inc.prob * fz[i];
                S += w[i];
            }
            std::size_t pickd = 0;
            const double u = rng.uniform();
            if (!(S > 0.0) || !std::isfinite(S) || !(fx > 0.0)) {
                // untilted step
                double c = 0.0;
                for (pickd = 0; pickd + 1 < m; ++pickd) {
                    c += incs[pickd].prob;
                    if (u < c) break;
                }
                ++degenerate;
            } else {
                double c = 0.0;
                const double target = u * S;
                for (pickd = 0; pickd + 1 < m; ++pickd) {
                    c += w[pickd];
                    if (target < c) break;
                }
                // p/q = p S / (p f(z)) = S / f(z)
                L *= S / fz[pickd];
            }
            const auto& inc = incs[pickd];
            if (!(inc.from >= 1 && x[static_cast<std::size_t>(inc.from - 1)] == 0))
                for (int j = 0; j < d; ++j) x[static_cast<std::size_t>(j)] += inc.x[static_cast<std::size_t>(j)];
        }
    };

    std::vector<Accumulator> parts = run_chunk_parts(samples, seed, threads, draw);
    ISResult res;
    Accumulator total;
    for (const auto& p : parts) {
        total.merge(p);
        EstimatorResult r = total.result();
        res.trajectory.emplace_back(total.n, r.rel_half_width());
    }
    res.estimate = total.result();
    res.degenerate_steps = degenerate.load();
    if (res.degenerate_steps > 0) spdlog::warn("{} importance-sampling steps fell back to the untilted law", res.degenerate_steps);
    return res;
}

}  // namespace crw
