#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "crw/error.hpp"

namespace crw {

/// Integer lattice point; coordinate k of the vector is node k+1.
using Point = std::vector<long>;
using Matrix = std::vector<std::vector<double>>;

/// One possible jump of the walk: a customer moves from node `from` to node `to` (0 = outside).
struct Increment {
    int from = 0;
    int to = 0;
    double prob = 0.0;
    std::vector<int> x;  ///< increment of X: e_to - e_from
    std::vector<int> y;  ///< increment of Y: x with coordinate 1 negated
};

struct MatrixOptions {
    bool renormalize = false;  ///< rescale any nonnegative matrix to total mass 1
    double accept_tol = 1e-9;  ///< sums within this of 1 are accepted and rescaled
};

/// Open Jackson network given by its jump-probability matrix p over nodes {0,...,d}.
/// Immutable after construction.
class JacksonNetwork {
public:
    static JacksonNetwork from_matrix(const Matrix& p, MatrixOptions opts = {});
    /// Tandem: p(0,1) = lambda, p(j,j+1) = mu_j, p(d,0) = mu_d.
    static JacksonNetwork tandem(double lambda, const std::vector<double>& mu,
                                 bool auto_normalize = false);

    int d() const { return d_; }
    double p(int i, int j) const { return p_[i][j]; }
    const Matrix& matrix() const { return p_; }

    // node-indexed accessors, j in 1..d
    double lambda(int j) const { return lambda_[j - 1]; }
    double mu(int j) const { return mu_[j - 1]; }
    double nu(int j) const { return nu_[j - 1]; }
    double rho(int j) const { return nu_[j - 1] / mu_[j - 1]; }
    double routing(int i, int j) const;

    const std::vector<double>& lambdas() const { return lambda_; }
    const std::vector<double>& mus() const { return mu_; }
    const std::vector<double>& nus() const { return nu_; }

    double io_ratio() const;
    bool is_stable() const;
    bool is_tandem() const;

    const std::vector<Increment>& increments() const { return inc_; }

    /// Same network with nodes renamed: new node k+1 is old node perm[k].
    JacksonNetwork relabeled(const std::vector<int>& perm) const;

private:
    JacksonNetwork() = default;
    void derive();

    int d_ = 0;
    Matrix p_;
    std::vector<double> lambda_, mu_, nu_;
    std::vector<Increment> inc_;
};

inline double io_ratio(const JacksonNetwork& net) { return net.io_ratio(); }

/// Solves nu = lambda + R^T nu with R(i,j) = p(i,j)/mu_i.
std::vector<double> traffic_rates(const Matrix& p);

/// T_n with corner i (1-based): y(i) = n - x(i), other coordinates unchanged.
Point transform(long n, int i, const Point& x);

long coord_sum(const Point& x);
bool in_A(long n, const Point& x);
bool on_dA(long n, const Point& x);
/// Constrained coordinates (all but i) nonnegative.
bool in_Omega_Y(const Point& y, int i = 1);
bool in_B(const Point& y, int i = 1);
bool on_dB(const Point& y, int i = 1);
/// y(i) - sum_{j != i} y(j); zeta_n fires when this equals n, tau when it equals 0.
long level(const Point& y, int i = 1);

/// Predicate bundle for a network of dimension d.
struct DomainPredicates {
    int d;
    int corner = 1;
    bool in_A(long n, const Point& x) const { return crw::in_A(n, x); }
    bool on_dA(long n, const Point& x) const { return crw::on_dA(n, x); }
    bool in_B(const Point& y) const { return crw::in_B(y, corner); }
    bool on_dB(const Point& y) const { return crw::on_dB(y, corner); }
    bool on_zeta_level(long n, const Point& y) const { return crw::level(y, corner) == n; }
};
DomainPredicates domain_predicates(const JacksonNetwork& net, int corner = 1);

/// Model file: {"d": int, "p": [[...]]} or {"tandem": {"lambda": x, "mu": [...]}}.
JacksonNetwork load_model(const nlohmann::json& j, MatrixOptions opts = {});
JacksonNetwork load_model_file(const std::string& path, MatrixOptions opts = {});
nlohmann::json model_to_json(const JacksonNetwork& net);

}  // namespace crw
