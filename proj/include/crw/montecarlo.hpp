#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "crw/network.hpp"

namespace crw {

/// Counter-based generator: output k of stream (seed, id) is splitmix64(key + k * golden).
/// Streams are independent of how work is split across threads.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);
    std::uint64_t next();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

struct EstimatorResult {
    std::uint64_t samples = 0;
    double mean = 0.0;
    double variance = 0.0;  ///< sample variance of one draw
    double ci_lo = 0.0, ci_hi = 0.0;
    std::uint64_t work = 0;      ///< total steps simulated
    std::uint64_t censored = 0;  ///< paths stopped by the step cap

    double half_width() const { return 0.5 * (ci_hi - ci_lo); }
    double rel_half_width() const { return mean != 0.0 ? half_width() / mean : 0.0; }
};

/// Sufficient statistics merged in a fixed order.
struct Accumulator {
    std::uint64_t n = 0, work = 0, censored = 0;
    long double sum = 0.0L, sum_sq = 0.0L;
    void add(double v) {
        ++n;
        sum += v;
        sum_sq += static_cast<long double>(v) * v;
    }
    void merge(const Accumulator& o) {
        n += o.n;
        work += o.work;
        censored += o.censored;
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
    EstimatorResult result() const;
};

/// Runs `samples` draws in chunks of 1000 on up to `threads` workers; draw i uses stream i.
/// The result depends only on (seed, samples).
Accumulator run_chunks(std::uint64_t samples, std::uint64_t seed, int threads,
                       const std::function<void(CounterRng&, Accumulator&)>& draw);

/// Per-chunk statistics of run_chunks, in chunk order.
std::vector<Accumulator> run_chunk_parts(std::uint64_t samples, std::uint64_t seed, int threads,
                                         const std::function<void(CounterRng&, Accumulator&)>& draw);

/// Default worker count: CRW_THREADS if set, else hardware concurrency.
int default_threads();

enum class Process {
    X,   ///< constrained on every coordinate
    Yn,  ///< T_n X: coordinate 1 constrained at y(1) = n, others at 0
    Y,   ///< constrained on coordinates 2..d only
    Z,   ///< unconstrained
};

enum class Stop { None, TauN, Tau0, Tau, ZetaN, Cap };

struct PathSpec {
    Process process = Process::X;
    Point start;
    long n = 0;              ///< buffer size (X, Yn)
    long N = 0;              ///< zeta_N level for Y and Z; 0 disables
    long step_cap = 0;       ///< 0 means 50 n d (or 50 N d)
    bool tau0_after_first_step = false;
};

struct Outcome {
    Stop stop = Stop::None;
    Point end;
    long steps = 0;
};

/// Simulates one path until a stop fires. X stops at tau_n (|x| = n) or tau_0 (x = 0); Yn at
/// tau (level 0) or its image of the origin; Y and Z at tau (level 0) or zeta_N (level N).
Outcome simulate(const JacksonNetwork& net, const PathSpec& spec, CounterRng& rng);

/// Draws the index of an increment with probability p(v).
std::size_t draw_increment(const JacksonNetwork& net, CounterRng& rng);

/// X from x and Y from T_n x driven by the same increments for `steps` steps; returns the X path
/// and the path of T_n Y (in X coordinates).
struct CoupledPaths {
    std::vector<Point> x, xbar;
};
CoupledPaths simulate_coupled(const JacksonNetwork& net, long n, const Point& x0, long steps, CounterRng& rng);

/// Fraction of paths ending with `event`.
EstimatorResult mc_probability(const JacksonNetwork& net, const PathSpec& spec, Stop event, std::uint64_t samples,
                               std::uint64_t seed, int threads = 1);

/// gamma = -max(log rho_1, log rho_2) for a stable 2-D tandem.
double gamma(const JacksonNetwork& net);
/// V(x) = min(-log rho_1 - gamma x1, -log rho_2 + log rho_2 (x1 + x2)).
double ld_value2d(const JacksonNetwork& net, double x1, double x2);

/// W_n(x) = -(1/n) log f(T_n x) with f the tandem exit formula.
double subsolution_Wn(const JacksonNetwork& net, long n, const Point& x);

/// Root y2 in [0, y1) of (y1 - y2)(1 + c0 y1 / 2) = (y1 / 2) rho^{-y2}, c0 = (mu - lambda)/mu,
/// for a 2-D tandem with equal rates.
double boundary_layer(const JacksonNetwork& net, double y1);
/// Log-form residual of the boundary-layer equation.
double boundary_layer_residual(const JacksonNetwork& net, double y1, double y2);

}  // namespace crw
