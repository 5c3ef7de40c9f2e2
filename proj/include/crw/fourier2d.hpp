#pragma once

#include <functional>
#include <string>
#include <vector>

#include "crw/loglinear.hpp"

namespace crw {

/// Y-harmonic function on the two-dimensional B whose boundary trace y -> h(y,y) is known.
struct BasisElement {
    enum class Kind { SingleTerm, Pair } kind = Kind::Pair;
    cplx alpha{1.0, 0.0};   ///< boundary frequency
    cplx beta{0.0, 0.0};    ///< beta1(alpha), or beta(r1) for the single-term element
    cplx alpha_conj{0.0, 0.0};
    cplx coef{0.0, 0.0};    ///< trace = alpha^y + coef alpha_conj^y
    LogLinearCombination harmonic_form;
    bool balayage_determined = false;

    cplx trace(long y) const;
};

/// Single-term element [(beta(r1), r1), .] with trace r1^y.
BasisElement single_term_element(const JacksonNetwork& net);

/// alpha^y - C(beta1,alpha)/C(beta1,alpha') alpha'^y lifted to B. Throws NotBalayageDetermined
/// unless |beta1| < 1, |alpha| <= 1 and |alpha'| < 1.
BasisElement perturbed_basis(const JacksonNetwork& net, cplx alpha);

struct BalayageApproximation {
    LogLinearCombination combination;
    std::vector<cplx> psi;         ///< coefficients of the basis elements
    double max_error = 0.0;        ///< sup over the boundary of |trace - target|
    long argmax = 0;               ///< boundary index attaining max_error
    long search_end = 0;           ///< last index examined before the tail bound took over
    double lower_factor = 0.0;     ///< P >= lower_factor * approximation (exit probabilities)
    double upper_factor = 0.0;     ///< P <= upper_factor * approximation
    double condition = 0.0;        ///< 2-norm condition number of the basis matrix
    std::vector<double> error_trace;  ///< |trace - target| at 0..search_end

    double eval(const Point& y) const { return combination.eval(y).real(); }
};

/// Boundary data on the diagonal: trace(y) for y >= 0, plus an envelope sum_k |w_k| |z_k|^y
/// that dominates |trace| and is nonincreasing in y.
struct BoundaryTarget {
    std::function<cplx(long)> value;
    std::vector<std::pair<double, double>> envelope;  ///< (|w_k|, |z_k|) pairs, |z_k| <= 1
};

struct FirstOrder {
    BasisElement element;    ///< kind Pair at alpha = 1, beta = r
    LogLinearCombination A0; ///< [(r,1),.] + c7 [(r,alpha'),.]
    double r = 0.0;
    cplx alpha_conj;         ///< conjugate of (r,1)
    cplx c7;                 ///< -C(r,1)/C(r,alpha')
    double sup_deviation = 0.0;  ///< max over the boundary of |A0 - 1|, at y = 0
    bool has_bracket = false;
    double lower_factor = 0.0, upper_factor = 0.0;  ///< A0 * lower <= P <= A0 * upper
};

/// First-order approximation A0 of P_y(tau < infinity). Throws AssumptionViolated when
/// |alpha(r,1)| >= 1 or C(r,alpha(r,1)) = 0.
FirstOrder first_order(const JacksonNetwork& net);

struct RefineOptions {
    int K = 11;
    double R = 0.7;
    double max_condition = 1e12;
    long search_cap = 100000;
};

/// Interpolates the target at 0..K with the single-term element and K pair elements at
/// alpha_j = R e^{2 pi i j/(K+1)}, then certifies the sup error over all y >= 0.
BalayageApproximation refine(const JacksonNetwork& net, const BoundaryTarget& target, RefineOptions opt = {});

/// Full pipeline for P_y(tau < infinity): A0 - A1 with A1 interpolating c7 alpha'^y. The
/// bracket is g/(1 + e) <= P <= g/(1 - e) with e the certified boundary error.
BalayageApproximation exit_approximation(const JacksonNetwork& net, RefineOptions opt = {});

enum class Tail { Zero, Constant };

/// Approximates y -> E_y[f(Y_tau) 1{tau < infinity}] for boundary data f given at 0..K and
/// equal to 0 or to f(K) afterwards. max_error bounds |approx - true| / P_y(tau < infinity).
BalayageApproximation balayage_general(const JacksonNetwork& net, const std::vector<double>& f, Tail tail,
                                       RefineOptions opt = {});

/// E_z[alpha^{Z(2)} 1{tau < infinity}] for the unconstrained walk with |alpha| = 1:
/// alpha^{z2} beta1(alpha)^{z1 - z2}.
cplx z_balayage_unit(const JacksonNetwork& net, double theta, const Point& z);

/// max(g1(T^1_n x), g2(T^2_n x)) where g2 is expressed in the relabeled network that swaps
/// nodes 1 and 2, so its argument is (n - x2, x1).
double combine_corners(long n, const std::function<double(const Point&)>& g1,
                       const std::function<double(const Point&)>& g2, const Point& x);

}  // namespace crw
