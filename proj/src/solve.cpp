#include "crw/solve.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

namespace crw {

GridSolution GridSolution::simplex(int d, long n) {
    if (d < 1 || n < 1) throw Error(Errc::BadArgument, "simplex needs d >= 1 and n >= 1");
    GridSolution g;
    g.kind_ = Kind::Simplex;
    g.d_ = d;
    g.n_ = n;
    g.binom_.assign(static_cast<std::size_t>(d + 1), std::vector<std::size_t>(static_cast<std::size_t>(n + 1), 1));
    for (int k = 1; k <= d; ++k)
        for (long m = 1; m <= n; ++m) {
            // C(m + k, k) = C(m - 1 + k, k) + C(m + k - 1, k - 1)
            long double v = static_cast<long double>(g.binom_[static_cast<std::size_t>(k)][static_cast<std::size_t>(m - 1)]) +
                            static_cast<long double>(g.binom_[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(m)]);
            if (v > 1e18L) throw Error(Errc::TooLarge, "simplex is too large to index");
            g.binom_[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)] = static_cast<std::size_t>(v);
        }
    return g;
}

GridSolution GridSolution::ybox(int d, long N, long W) {
    if (d < 1 || N < 1 || W < 0) throw Error(Errc::BadArgument, "box needs d >= 1, N >= 1, W >= 0");
    GridSolution g;
    g.kind_ = Kind::YBox;
    g.d_ = d;
    g.n_ = N;
    g.w_ = W;
    return g;
}

bool GridSolution::contains(const Point& p) const {
    if (static_cast<int>(p.size()) != d_) return false;
    if (kind_ == Kind::Simplex) return in_A(n_, p);
    const long bar = level(p);
    if (bar < 0 || bar > n_) return false;
    for (std::size_t j = 1; j < p.size(); ++j)
        if (p[j] < 0 || p[j] > w_) return false;
    return true;
}

std::size_t GridSolution::index(const Point& p) const {
    if (!contains(p)) throw Error(Errc::BadArgument, "point outside the grid");
    if (kind_ == Kind::YBox) {
        std::size_t k = static_cast<std::size_t>(level(p));
        for (std::size_t j = 1; j < p.size(); ++j) k = k * static_cast<std::size_t>(w_ + 1) + static_cast<std::size_t>(p[j]);
        return k;
    }
    std::size_t r = 0;
    long rem = n_;
    for (int i = 0; i < d_; ++i) {
        const auto& row = binom_[static_cast<std::size_t>(d_ - i)];
        r += row[static_cast<std::size_t>(rem)] - row[static_cast<std::size_t>(rem - p[static_cast<std::size_t>(i)])];
        rem -= p[static_cast<std::size_t>(i)];
    }
    return r;
}

Point GridSolution::point(std::size_t k) const {
    Point p(static_cast<std::size_t>(d_), 0);
    if (kind_ == Kind::YBox) {
        long sum = 0;
        for (int j = d_ - 1; j >= 1; --j) {
            p[static_cast<std::size_t>(j)] = static_cast<long>(k % static_cast<std::size_t>(w_ + 1));
            sum += p[static_cast<std::size_t>(j)];
            k /= static_cast<std::size_t>(w_ + 1);
        }
        p[0] = static_cast<long>(k) + sum;
        return p;
    }
    long rem = n_;
    for (int i = 0; i < d_; ++i) {
        const auto& sub = binom_[static_cast<std::size_t>(d_ - i - 1)];
        long v = 0;
        while (k >= sub[static_cast<std::size_t>(rem - v)]) {
            k -= sub[static_cast<std::size_t>(rem - v)];
            ++v;
        }
        p[static_cast<std::size_t>(i)] = v;
        rem -= v;
    }
    return p;
}

namespace {

/// Sparse fixed-point system V_k = (c_k + sum p V_t) / (1 - s_k) on free states.
struct System {
    std::vector<char> pinned;
    std::vector<double> constant, self;
    std::vector<std::size_t> start;
    std::vector<std::size_t> target;
    std::vector<double> prob;
};

void gauss_seidel(const System& sys, std::vector<double>& v, const SolveOptions& opt, long& sweeps, double& change) {
    const std::size_t n = v.size();
    sweeps = 0;
    change = 0.0;
    auto update = [&](std::size_t k) {
        if (sys.pinned[k]) return;
        double s = sys.constant[k];
        for (std::size_t e = sys.start[k]; e < sys.start[k + 1]; ++e) s += sys.prob[e] * v[sys.target[e]];
        const double nv = s / (1.0 - sys.self[k]);
        const double diff = std::abs(nv - v[k]);
        const double rel = std::abs(nv) > 1e-300 ? diff / std::abs(nv) : diff;
        change = std::max(change, rel);
        v[k] = nv;
    };
    // stop when the change, scaled by the observed contraction q/(1 - q), is below tol
    double prev = 0.0;
    while (true) {
        change = 0.0;
        if (sweeps % 2 == 0)
            for (std::size_t k = 0; k < n; ++k) update(k);
        else
            for (std::size_t k = n; k-- > 0;) update(k);
        ++sweeps;
        const double q = prev > 0.0 ? std::min(change / prev, 1.0) : 1.0;
        prev = change;
        if (change == 0.0 || (sweeps >= 2 && q < 1.0 && change * q / (1.0 - q) < opt.tol && change < opt.tol)) break;
        if (sweeps >= opt.max_sweeps)
            throw Error(Errc::NonConvergent, "Gauss-Seidel did not converge; last change " + std::to_string(change));
    }
}

GridSolution solve_simplex(const JacksonNetwork& net, long n, const std::function<double(const Point&)>& f,
                           const SolveOptions& opt) {
    GridSolution g = GridSolution::simplex(net.d(), n);
    // (n,0,...,0) is the last point in lexicographic order
    Point last(static_cast<std::size_t>(net.d()), 0);
    last[0] = n;
    const std::size_t count = g.index(last) + 1;
    if (count > opt.max_states) throw Error(Errc::TooLarge, "A_n has " + std::to_string(count) + " states");
    System sys;
    sys.pinned.assign(count, 0);
    sys.constant.assign(count, 0.0);
    sys.self.assign(count, 0.0);
    sys.start.assign(count + 1, 0);
    g.values.assign(count, 0.0);
    const auto& incs = net.increments();
    Point z;
    for (std::size_t k = 0; k < count; ++k) {
        sys.start[k] = sys.target.size();
        Point x = g.point(k);
        const long s = coord_sum(x);
        if (s == n) {
            sys.pinned[k] = 1;
            g.values[k] = f(x);
            continue;
        }
        if (s == 0) {
            sys.pinned[k] = 1;
            continue;
        }
        for (const auto& inc : incs) {
            if (inc.from >= 1 && x[static_cast<std::size_t>(inc.from - 1)] == 0) {
                sys.self[k] += inc.prob;
                continue;
            }
            z = x;
            for (std::size_t j = 0; j < z.size(); ++j) z[j] += inc.x[j];
            sys.target.push_back(g.index(z));
            sys.prob.push_back(inc.prob);
        }
    }
    sys.start[count] = sys.target.size();
    gauss_seidel(sys, g.values, opt, g.iterations, g.residual);
    return g;
}

}  // namespace

GridSolution exact_exit_grid(const JacksonNetwork& net, long n, SolveOptions opt) {
    return solve_simplex(net, n, [](const Point&) { return 1.0; }, opt);
}

GridSolution balayage_exact(const JacksonNetwork& net, long n, const std::function<double(const Point&)>& f,
                            SolveOptions opt) {
    return solve_simplex(net, n, f, opt);
}

YBracket exact_y_hit_bracket(const JacksonNetwork& net, long N, YBracketOptions opt) {
    const int d = net.d();
    const long W = opt.W < 0 ? N : opt.W;
    GridSolution shape = GridSolution::ybox(d, N, W);
    long double cnt = static_cast<long double>(N + 1);
    for (int j = 2; j <= d; ++j) cnt *= static_cast<long double>(W + 1);
    if (cnt > static_cast<long double>(opt.solve.max_states)) throw Error(Errc::TooLarge, "truncated B is too large");
    const std::size_t count = static_cast<std::size_t>(cnt);
    auto f = opt.f ? opt.f : std::function<double(const Point&)>([](const Point&) { return 1.0; });

    YBracket out;
    if (opt.use_supersolution && d >= 2) {
        out.phi = find_supersolution(net);
        if (!out.phi) spdlog::warn("no certified supersolution found; upper bound pins sup f at the truncation");
    }
    double fmin = 0.0, fmax = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        Point y = shape.point(k);
        if (level(y) != 0) continue;
        const double v = f(y);
        fmin = std::min(fmin, v);
        fmax = std::max(fmax, v);
    }
    auto phi_at = [&](const Point& y) {
        if (!out.phi) return 1.0;
        std::vector<long> w(y.begin() + 1, y.end());
        return (*out.phi)(level(y), w);
    };
    auto pin_lower = [&](const Point& y) { return out.phi ? fmin * phi_at(y) : fmin; };
    auto pin_upper = [&](const Point& y) { return out.phi ? fmax * phi_at(y) : fmax; };

    System base;
    base.pinned.assign(count, 0);
    base.self.assign(count, 0.0);
    base.start.assign(count + 1, 0);
    std::vector<double> lo_const(count, 0.0), hi_const(count, 0.0);
    std::vector<double> lo(count, 0.0), hi(count, 0.0);
    const auto& incs = net.increments();
    Point z;
    for (std::size_t k = 0; k < count; ++k) {
        base.start[k] = base.target.size();
        Point y = shape.point(k);
        const long bar = level(y);
        if (bar == 0) {
            base.pinned[k] = 1;
            lo[k] = hi[k] = f(y);
            continue;
        }
        if (bar == N) {
            base.pinned[k] = 1;
            lo[k] = pin_lower(y);
            hi[k] = pin_upper(y);
            continue;
        }
        lo[k] = pin_lower(y);
        hi[k] = pin_upper(y);
        for (const auto& inc : incs) {
            if (inc.from >= 2 && y[static_cast<std::size_t>(inc.from - 1)] == 0) {
                base.self[k] += inc.prob;
                continue;
            }
            z = y;
            for (std::size_t j = 0; j < z.size(); ++j) z[j] += inc.y[j];
            if (shape.contains(z)) {
                base.target.push_back(shape.index(z));
                base.prob.push_back(inc.prob);
            } else {
                lo_const[k] += inc.prob * pin_lower(z);
                hi_const[k] += inc.prob * pin_upper(z);
            }
        }
    }
    base.start[count] = base.target.size();
    // the lower solve starts from its pins (0 for nonnegative data), the upper from phi
    for (std::size_t k = 0; k < count; ++k)
        if (!base.pinned[k] && fmin == 0.0) lo[k] = 0.0;

    out.lower = shape;
    out.upper = shape;
    base.constant = std::move(lo_const);
    out.lower.values = std::move(lo);
    gauss_seidel(base, out.lower.values, opt.solve, out.lower.iterations, out.lower.residual);
    base.constant = std::move(hi_const);
    out.upper.values = std::move(hi);
    gauss_seidel(base, out.upper.values, opt.solve, out.upper.iterations, out.upper.residual);
    return out;
}

double grid_residual(const JacksonNetwork& net, const GridSolution& g, std::size_t k) {
    const Point p = g.point(k);
    const double v = g.values[k];
    double s = 0.0;
    Point z;
    for (const auto& inc : net.increments()) {
        const bool simplex = g.kind() == GridSolution::Kind::Simplex;
        const int lo_node = simplex ? 1 : 2;
        if (inc.from >= lo_node && p[static_cast<std::size_t>(inc.from - 1)] == 0) {
            s += inc.prob * v;
            continue;
        }
        z = p;
        for (std::size_t j = 0; j < z.size(); ++j) z[j] += simplex ? inc.x[j] : inc.y[j];
        if (!g.contains(z)) throw Error(Errc::BadArgument, "residual needs all neighbours inside the grid");
        s += inc.prob * g.values[g.index(z)];
    }
    return s - v;
}

}  // namespace crw
