#include "crw/loglinear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crw {

cplx ipow(cplx z, long k) {
    if (k == 0) return {1.0, 0.0};
    if (z == 0.0) {
        if (k < 0) throw Error(Errc::ZeroToNegativePower, "zero base with negative exponent");
        return {0.0, 0.0};
    }
    bool inv = k < 0;
    unsigned long e = inv ? static_cast<unsigned long>(-k) : static_cast<unsigned long>(k);
    cplx r(1.0, 0.0), b = z;
    while (e) {
        if (e & 1UL) r *= b;
        e >>= 1;
        if (e) b *= b;
    }
    return inv ? 1.0 / r : r;
}

double ipow(double x, long k) {
    if (k == 0) return 1.0;
    if (x == 0.0) {
        if (k < 0) throw Error(Errc::ZeroToNegativePower, "zero base with negative exponent");
        return 0.0;
    }
    bool inv = k < 0;
    unsigned long e = inv ? static_cast<unsigned long>(-k) : static_cast<unsigned long>(k);
    double r = 1.0, b = x;
    while (e) {
        if (e & 1UL) r *= b;
        e >>= 1;
        if (e) b *= b;
    }
    return inv ? 1.0 / r : r;
}

double ScaledComplex::log10_abs() const {
    double m = std::abs(mant);
    if (m == 0.0) return -std::numeric_limits<double>::infinity();
    return (std::log(m) + log_scale) / std::log(10.0);
}

LogLinearCombination::LogLinearCombination(std::vector<Term> terms) {
    for (auto& t : terms) add(t.c, std::move(t.pt));
}

void LogLinearCombination::add(cplx c, SurfacePoint pt) {
    if (c == 0.0) return;
    terms_.push_back({c, std::move(pt)});
}

namespace {

long bar_exponent(const Point& y) {
    long e = y[0];
    for (std::size_t k = 1; k < y.size(); ++k) e -= y[k];
    return e;
}

}  // namespace

cplx loglinear(const SurfacePoint& pt, const Point& y) {
    if (y.size() != pt.alpha.size() + 1) throw Error(Errc::BadArgument, "point dimension mismatch");
    cplx v = ipow(pt.beta, bar_exponent(y));
    for (std::size_t k = 1; k < y.size(); ++k) v *= ipow(pt.alpha[k - 1], y[k]);
    return v;
}

cplx LogLinearCombination::eval(const Point& y) const {
    cplx s(0.0, 0.0);
    for (const auto& t : terms_) s += t.c * loglinear(t.pt, y);
    return s;
}

ScaledComplex LogLinearCombination::eval_scaled(const Point& y) const {
    const double ninf = -std::numeric_limits<double>::infinity();
    std::vector<double> logs(terms_.size(), ninf), args(terms_.size(), 0.0);
    const long be = bar_exponent(y);
    double top = ninf;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
        const auto& t = terms_[k];
        auto add_pow = [&](cplx base, long e) {
            if (e == 0) return true;
            if (base == 0.0) {
                if (e < 0) throw Error(Errc::ZeroToNegativePower, "zero base with negative exponent");
                return false;
            }
            logs[k] += static_cast<double>(e) * std::log(std::abs(base));
            args[k] += static_cast<double>(e) * std::arg(base);
            return true;
        };
        logs[k] = std::log(std::abs(t.c));
        args[k] = std::arg(t.c);
        bool alive = add_pow(t.pt.beta, be);
        for (std::size_t j = 1; alive && j < y.size(); ++j) alive = add_pow(t.pt.alpha[j - 1], y[j]);
        if (!alive) logs[k] = ninf;
        top = std::max(top, logs[k]);
    }
    ScaledComplex out;
    if (top == ninf) return out;
    out.log_scale = top;
    for (std::size_t k = 0; k < terms_.size(); ++k)
        if (logs[k] != ninf) out.mant += std::polar(std::exp(logs[k] - top), args[k]);
    return out;
}

LogLinearCombination& LogLinearCombination::operator+=(const LogLinearCombination& o) {
    for (const auto& t : o.terms_) add(t.c, t.pt);
    return *this;
}

LogLinearCombination LogLinearCombination::scaled(cplx s) const {
    LogLinearCombination out;
    for (const auto& t : terms_) out.add(s * t.c, t.pt);
    return out;
}

cplx residual(const JacksonNetwork& net, const LatticeFunction& f, const Point& y) {
    const cplx fy = f(y);
    cplx s(0.0, 0.0);
    Point z = y;
    for (const auto& inc : net.increments()) {
        if (inc.from >= 2 && y[static_cast<std::size_t>(inc.from - 1)] == 0) {
            s += inc.prob * fy;
            continue;
        }
        for (std::size_t k = 0; k < y.size(); ++k) z[k] = y[k] + inc.y[k];
        s += inc.prob * f(z);
    }
    return s - fy;
}

cplx residual(const JacksonNetwork& net, const LogLinearCombination& comb, const Point& y) {
    return residual(net, [&comb](const Point& z) { return comb.eval(z); }, y);
}

}  // namespace crw
