#pragma once

#include <string>
#include <vector>

#include "crw/loglinear.hpp"

namespace crw {

struct GraphEdge {
    int u = 0;
    int v = 0;
    int label = 0;
};

/// Labeled graph describing a Y-harmonic system. Vertex k carries an optional tag
/// (for tandem graphs the subset a, bit j = node j).
struct HarmonicSystemGraph {
    int d = 0;  ///< constrained coordinates are 2..d
    std::vector<Labels> tags;
    std::vector<GraphEdge> edges;
    std::vector<Labels> loops;  ///< loops[k]: labels l with an l-loop at vertex k

    int size() const { return static_cast<int>(loops.size()); }
    /// Every vertex has exactly one l-edge or l-loop for each l in 2..d.
    bool edge_complete() const;
};

struct SystemSolution {
    cplx beta;
    std::vector<std::vector<cplx>> alpha;  ///< per vertex, entries for coordinates 2..d
    std::vector<cplx> c;

    SurfacePoint point(int k) const { return {beta, alpha[static_cast<std::size_t>(k)]}; }
};

struct ConditionReport {
    bool pass = true;
    double worst = 0.0;  ///< worst violation (condition 2: smallest separation)
    std::string detail;
};

struct SystemReport {
    ConditionReport on_surface, distinct, conjugacy, multipliers, loops;
    bool all_pass() const {
        return on_surface.pass && distinct.pass && conjugacy.pass && multipliers.pass && loops.pass;
    }
};

/// Checks the five conditions of a Y-harmonic system solution.
SystemReport verify_system(const JacksonNetwork& net, const HarmonicSystemGraph& g,
                           const SystemSolution& sol, double tol = 1e-10);

/// h_G = sum_k c_k [(beta, alpha_k), .].
LogLinearCombination harmonic_function(const SystemSolution& sol);

/// C(l,beta,alpha2)[(beta,alpha1),.] - C(l,beta,alpha1)[(beta,alpha2),.] with alpha2 the l-conjugate.
LogLinearCombination two_term(const JacksonNetwork& net, int l, cplx beta, const std::vector<cplx>& alpha1);

/// p1 is a simple extension of p; injection[k-1] is the index in net1 of node k of net
/// (empty = identity). Node 1 must map to node 1.
bool is_simple_extension(const JacksonNetwork& net, const JacksonNetwork& net1,
                         const std::vector<int>& injection = {}, double tol = 1e-12);

/// Edge-complete extension: same vertices and edges, loops for every new label.
HarmonicSystemGraph extend_graph(const HarmonicSystemGraph& g, int d1, const std::vector<int>& injection = {});

/// Lifts a solution to a simple extension: old coordinates keep alpha, new ones get beta.
SystemSolution extend_solution(const JacksonNetwork& net, const JacksonNetwork& net1,
                               const std::vector<int>& injection, const SystemSolution& sol);

/// Exit probability of the two-dimensional reflected diffusion with drifts a, b.
double diffusion_exit_probability(double a, double b, double x1, double x2);

}  // namespace crw
