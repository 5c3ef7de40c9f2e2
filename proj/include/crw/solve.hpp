#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "crw/network.hpp"
#include "crw/supersolution.hpp"

namespace crw {

/// Values of a first-passage problem on a finite lattice domain.
/// Simplex: A_n = {x >= 0, |x| <= n} in X coordinates.
/// YBox: {0 <= ybar <= N, 0 <= y(j) <= W for j >= 2} in Y coordinates, ybar = y(1) - sum y(j).
class GridSolution {
public:
    enum class Kind { Simplex, YBox };

    GridSolution() = default;
    static GridSolution simplex(int d, long n);
    static GridSolution ybox(int d, long N, long W);

    Kind kind() const { return kind_; }
    int d() const { return d_; }
    long n() const { return n_; }
    long width() const { return w_; }
    std::size_t size() const { return values.size(); }

    bool contains(const Point& p) const;
    std::size_t index(const Point& p) const;
    /// Lattice point of index k (X coordinates for Simplex, Y coordinates for YBox).
    Point point(std::size_t k) const;
    double value(const Point& p) const { return values[index(p)]; }

    std::vector<double> values;
    long iterations = 0;
    double residual = 0.0;  ///< last relative sup-norm change

private:
    Kind kind_ = Kind::Simplex;
    int d_ = 0;
    long n_ = 0;
    long w_ = 0;
    std::vector<std::vector<std::size_t>> binom_;  ///< binom_[k][m] = C(m + k, k)
};

struct SolveOptions {
    double tol = 1e-14;            ///< relative sup-norm change (absolute below 1e-300)
    long max_sweeps = 2000000;
    std::size_t max_states = 100000000;
};

/// P_x(tau_n < tau_0) on A_n: V = 1 on dA_n, V(0) = 0, harmonic elsewhere. Symmetric Gauss-Seidel.
GridSolution exact_exit_grid(const JacksonNetwork& net, long n, SolveOptions opt = {});

/// E_x[f(X_{tau_n}) 1{tau_n < tau_0}] for boundary data f on dA_n.
GridSolution balayage_exact(const JacksonNetwork& net, long n, const std::function<double(const Point&)>& f,
                            SolveOptions opt = {});

struct YBracketOptions {
    long W = -1;  ///< truncation of y(j), j >= 2; -1 means W = N
    /// Boundary data on dB as a function of y (with ybar = 0); empty means f = 1.
    std::function<double(const Point&)> f;
    bool use_supersolution = true;
    SolveOptions solve;
};

struct YBracket {
    GridSolution lower, upper;
    /// Supersolution pinned on the truncation set of the upper solve; absent when the
    /// upper solve fell back to pinning sup|f|.
    std::optional<Supersolution> phi;
};

/// Two-sided bound on E_y[f(Y_tau) 1{tau < infinity}] from truncations at ybar = N and y(j) > W.
/// The lower solve pins 0 (or inf f phi for negative data) there; the upper pins sup f phi
/// for a certified supersolution phi. Both start from their pins and move monotonically.
YBracket exact_y_hit_bracket(const JacksonNetwork& net, long N, YBracketOptions opt = {});

/// E_y[V(Y_1)] - V(y) applied to a grid solution at an interior state (simplex: X dynamics).
double grid_residual(const JacksonNetwork& net, const GridSolution& g, std::size_t k);

}  // namespace crw
