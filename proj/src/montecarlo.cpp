#include "crw/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <boost/math/tools/roots.hpp>

#include "crw/tandem.hpp"

namespace crw {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

std::uint64_t CounterRng::next() { return splitmix64(key_ + (counter_++) * 0x9e3779b97f4a7c15ULL); }

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

EstimatorResult Accumulator::result() const {
    EstimatorResult r;
    r.samples = n;
    r.work = work;
    r.censored = censored;
    if (n == 0) return r;
    const long double mean = sum / static_cast<long double>(n);
    long double var = 0.0L;
    if (n > 1) var = (sum_sq - static_cast<long double>(n) * mean * mean) / static_cast<long double>(n - 1);
    if (var < 0) var = 0;
    r.mean = static_cast<double>(mean);
    r.variance = static_cast<double>(var);
    const double hw = 1.96 * std::sqrt(r.variance / static_cast<double>(n));
    r.ci_lo = r.mean - hw;
    r.ci_hi = r.mean + hw;
    return r;
}

int default_threads() {
    if (const char* env = std::getenv("CRW_THREADS")) {
        int t = std::atoi(env);
        if (t > 0) return t;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

std::vector<Accumulator> run_chunk_parts(std::uint64_t samples, std::uint64_t seed, int threads,
                                         const std::function<void(CounterRng&, Accumulator&)>& draw) {
    constexpr std::uint64_t chunk = 1000;
    const std::uint64_t nchunks = (samples + chunk - 1) / chunk;
    std::vector<Accumulator> parts(nchunks);
    auto work = [&](std::uint64_t c) {
        const std::uint64_t lo = c * chunk, hi = std::min(samples, lo + chunk);
        for (std::uint64_t i = lo; i < hi; ++i) {
            CounterRng rng(seed, i);
            draw(rng, parts[c]);
        }
    };
    threads = std::max(1, threads);
    if (threads == 1 || nchunks <= 1) {
        for (std::uint64_t c = 0; c < nchunks; ++c) work(c);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (std::uint64_t c = static_cast<std::uint64_t>(t); c < nchunks; c += static_cast<std::uint64_t>(threads)) work(c);
            });
        for (auto& th : pool) th.join();
    }
    return parts;
}

Accumulator run_chunks(std::uint64_t samples, std::uint64_t seed, int threads,
                       const std::function<void(CounterRng&, Accumulator&)>& draw) {
    Accumulator total;
    for (const auto& p : run_chunk_parts(samples, seed, threads, draw)) total.merge(p);
    return total;
}

namespace {

std::vector<double> cumulative(const JacksonNetwork& net) {
    std::vector<double> cum;
    double s = 0.0;
    for (const auto& inc : net.increments()) cum.push_back(s += inc.prob);
    cum.back() = 1.0 + 1e-12;
    return cum;
}

std::size_t pick(const std::vector<double>& cum, double u) {
    return static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
}

}  // namespace

std::size_t draw_increment(const JacksonNetwork& net, CounterRng& rng) {
    return pick(cumulative(net), rng.uniform() * (1.0 - 1e-16));
}

Outcome simulate(const JacksonNetwork& net, const PathSpec& spec, CounterRng& rng) {
    const int d = net.d();
    if (static_cast<int>(spec.start.size()) != d) throw Error(Errc::BadArgument, "start point dimension mismatch");
    const auto& incs = net.increments();
    const auto cum = cumulative(net);
    Outcome out;
    Point s = spec.start;
    long cap = spec.step_cap;
    if (cap <= 0) cap = 50 * std::max<long>(1, std::max(spec.n, spec.N)) * d;
    const bool xlike = spec.process == Process::X;
    const bool ylike = spec.process != Process::X;

    auto stopped = [&](long k) -> Stop {
        if (xlike) {
            const long sum = coord_sum(s);
            if (spec.n > 0 && sum >= spec.n) return Stop::TauN;
            if (sum == 0 && (k > 0 || !spec.tau0_after_first_step)) return Stop::Tau0;
            return Stop::None;
        }
        const long bar = level(s);
        if (bar <= 0) return Stop::Tau;
        if (spec.process == Process::Yn) {
            bool origin = s[0] == spec.n;
            for (int j = 1; j < d && origin; ++j) origin = s[static_cast<std::size_t>(j)] == 0;
            if (origin && (k > 0 || !spec.tau0_after_first_step)) return Stop::Tau0;
        }
        if (spec.N > 0 && bar >= spec.N) return Stop::ZetaN;
        return Stop::None;
    };

    for (long k = 0;; ++k) {
        Stop st = stopped(k);
        if (st != Stop::None) {
            out.stop = st;
            out.steps = k;
            break;
        }
        if (k >= cap) {
            out.stop = Stop::Cap;
            out.steps = k;
            break;
        }
        const auto& inc = incs[pick(cum, rng.uniform())];
        bool blocked = false;
        switch (spec.process) {
            case Process::X: blocked = inc.from >= 1 && s[static_cast<std::size_t>(inc.from - 1)] == 0; break;
            case Process::Yn:
                blocked = (inc.from >= 2 && s[static_cast<std::size_t>(inc.from - 1)] == 0) ||
                          (inc.from == 1 && s[0] == spec.n);
                break;
            case Process::Y: blocked = inc.from >= 2 && s[static_cast<std::size_t>(inc.from - 1)] == 0; break;
            case Process::Z: blocked = false; break;
        }
        if (blocked) continue;
        const auto& v = ylike ? inc.y : inc.x;
        for (int j = 0; j < d; ++j) s[static_cast<std::size_t>(j)] += v[static_cast<std::size_t>(j)];
    }
    out.end = s;
    return out;
}

CoupledPaths simulate_coupled(const JacksonNetwork& net, long n, const Point& x0, long steps, CounterRng& rng) {
    const int d = net.d();
    const auto& incs = net.increments();
    const auto cum = cumulative(net);
    CoupledPaths out;
    Point x = x0, y = transform(n, 1, x0);
    out.x.push_back(x);
    out.xbar.push_back(transform(n, 1, y));
    for (long k = 0; k < steps; ++k) {
        const auto& inc = incs[pick(cum, rng.uniform())];
        if (!(inc.from >= 1 && x[static_cast<std::size_t>(inc.from - 1)] == 0))
            for (int j = 0; j < d; ++j) x[static_cast<std::size_t>(j)] += inc.x[static_cast<std::size_t>(j)];
        if (!(inc.from >= 2 && y[static_cast<std::size_t>(inc.from - 1)] == 0))
            for (int j = 0; j < d; ++j) y[static_cast<std::size_t>(j)] += inc.y[static_cast<std::size_t>(j)];
        out.x.push_back(x);
        out.xbar.push_back(transform(n, 1, y));
    }
    return out;
}

EstimatorResult mc_probability(const JacksonNetwork& net, const PathSpec& spec, Stop event, std::uint64_t samples,
                               std::uint64_t seed, int threads) {
    if (samples < 1) throw Error(Errc::BadArgument, "samples must be at least 1");
    Accumulator acc = run_chunks(samples, seed, threads, [&](CounterRng& rng, Accumulator& a) {
        Outcome o = simulate(net, spec, rng);
        a.work += static_cast<std::uint64_t>(o.steps);
        if (o.stop == Stop::Cap) ++a.censored;
        a.add(o.stop == event ? 1.0 : 0.0);
    });
    return acc.result();
}

namespace {

void require_tandem2d(const JacksonNetwork& net) {
    if (net.d() != 2 || !net.is_tandem()) throw Error(Errc::NotTandem2D, "two-dimensional tandem required");
}

}  // namespace

double gamma(const JacksonNetwork& net) {
    require_tandem2d(net);
    return -std::max(std::log(net.rho(1)), std::log(net.rho(2)));
}

double ld_value2d(const JacksonNetwork& net, double x1, double x2) {
    const double g = gamma(net);
    const double l1 = std::log(net.rho(1)), l2 = std::log(net.rho(2));
    return std::min(-l1 - g * x1, -l2 + l2 * (x1 + x2));
}

double subsolution_Wn(const JacksonNetwork& net, long n, const Point& x) {
    if (!in_A(n, x)) throw Error(Errc::BadArgument, "point is not in A_n");
    const double f = tandem_exit_probability(net, transform(n, 1, x));
    return -std::log(f) / static_cast<double>(n);
}

double boundary_layer_residual(const JacksonNetwork& net, double y1, double y2) {
    const double mu = net.mu(1), lambda = net.lambda(1), rho = lambda / mu, c0 = (mu - lambda) / mu;
    return std::log((y1 - y2) * (1.0 + 0.5 * c0 * y1)) - std::log(0.5 * y1) + y2 * std::log(rho);
}

double boundary_layer(const JacksonNetwork& net, double y1) {
    require_tandem2d(net);
    if (std::abs(net.mu(1) - net.mu(2)) >= 1e-9 * std::max(net.mu(1), net.mu(2)))
        throw Error(Errc::BadArgument, "boundary layer needs mu1 = mu2");
    if (!(y1 > 0.0)) throw Error(Errc::BadArgument, "y1 must be positive");
    auto h = [&](double y2) { return boundary_layer_residual(net, y1, y2); };
    // h(0) = log(2 + c0 y1) > 0 and h -> -inf as y2 -> y1; h is decreasing
    double lo = 0.0, hi = y1;
    if (!(h(lo) > 0.0)) throw Error(Errc::NoRoot, "boundary-layer equation has no root in [0, y1)");
    boost::uintmax_t iters = 200;
    auto tol = [](double a, double b) { return std::abs(b - a) <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(a)); };
    auto hb = [&](double y2) { return y2 >= y1 ? -std::numeric_limits<double>::max() : h(y2); };
    auto [a, b] = boost::math::tools::bisect(hb, lo, hi, tol, iters);
    double root = std::abs(h(a)) < std::abs(hb(b)) ? a : b;
    return root;
}

}  // namespace crw
