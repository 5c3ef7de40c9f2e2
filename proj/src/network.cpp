#include "crw/network.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include <Eigen/Dense>
#include <spdlog/spdlog.h>

namespace crw {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::BadShape: return "BadShape";
        case Errc::NotStochastic: return "NotStochastic";
        case Errc::NonzeroDiagonal: return "NonzeroDiagonal";
        case Errc::Reducible: return "Reducible";
        case Errc::NoArrivals: return "NoArrivals";
        case Errc::BadNormalization: return "BadNormalization";
        case Errc::DivisionByZero: return "DivisionByZero";
        case Errc::ZeroCoordinate: return "ZeroCoordinate";
        case Errc::DegenerateAffine: return "DegenerateAffine";
        case Errc::SingularBoundaryPolynomial: return "SingularBoundaryPolynomial";
        case Errc::NoExitAtTwo: return "NoExitAtTwo";
        case Errc::ZeroToNegativePower: return "ZeroToNegativePower";
        case Errc::EqualRates: return "EqualRates";
        case Errc::UnsupportedPattern: return "UnsupportedPattern";
        case Errc::NotSimpleExtension: return "NotSimpleExtension";
        case Errc::NotTandem: return "NotTandem";
        case Errc::EqualDrifts: return "EqualDrifts";
        case Errc::AssumptionViolated: return "AssumptionViolated";
        case Errc::NotBalayageDetermined: return "NotBalayageDetermined";
        case Errc::SingularBasis: return "SingularBasis";
        case Errc::UnsupportedTail: return "UnsupportedTail";
        case Errc::TooLarge: return "TooLarge";
        case Errc::NonConvergent: return "NonConvergent";
        case Errc::NotTandem2D: return "NotTandem2D";
        case Errc::DegenerateTilt: return "DegenerateTilt";
        case Errc::NoRoot: return "NoRoot";
        case Errc::BadArgument: return "BadArgument";
        case Errc::Config: return "Config";
    }
    return "Unknown";
}

namespace {

// Every node reachable from 0 and 0 reachable from every node.
bool strongly_connected(const Matrix& p) {
    const int n = static_cast<int>(p.size());
    auto reach = [&](bool reverse) {
        std::vector<char> seen(n, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v = 0; v < n; ++v) {
                double w = reverse ? p[v][u] : p[u][v];
                if (w > 0 && !seen[v]) {
                    seen[v] = 1;
                    stack.push_back(v);
                }
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
    };
    return reach(false) && reach(true);
}

}  // namespace

std::vector<double> traffic_rates(const Matrix& p) {
    const int d = static_cast<int>(p.size()) - 1;
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd lam(d);
    for (int j = 1; j <= d; ++j) {
        lam(j - 1) = p[0][j];
        for (int k = 1; k <= d; ++k) {
            double muk = std::accumulate(p[k].begin(), p[k].end(), 0.0);
            if (muk <= 0) throw Error(Errc::DivisionByZero, "node " + std::to_string(k) + " has no service");
            a(j - 1, k - 1) -= p[k][j] / muk;
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) throw Error(Errc::Reducible, "traffic equations are singular");
    Eigen::VectorXd nu = lu.solve(lam);
    // one step of iterative refinement
    nu += lu.solve(lam - a * nu);
    return std::vector<double>(nu.data(), nu.data() + d);
}

JacksonNetwork JacksonNetwork::from_matrix(const Matrix& p, MatrixOptions opts) {
    const std::size_t n = p.size();
    if (n < 2) throw Error(Errc::BadShape, "matrix must be (d+1)x(d+1) with d >= 1");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (p[i].size() != n) throw Error(Errc::BadShape, "matrix is not square");
        for (std::size_t j = 0; j < n; ++j) {
            if (!std::isfinite(p[i][j])) throw Error(Errc::BadShape, "entries must be finite");
            if (p[i][j] < 0.0) throw Error(Errc::NotStochastic, "entries must be nonnegative");
            total += p[i][j];
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (p[i][i] != 0.0) throw Error(Errc::NonzeroDiagonal, "p(" + std::to_string(i) + "," + std::to_string(i) + ") != 0");
    if (total <= 0.0) throw Error(Errc::NotStochastic, "matrix is zero");
    JacksonNetwork net;
    net.d_ = static_cast<int>(n) - 1;
    net.p_ = p;
    if (std::abs(total - 1.0) > 1e-12) {
        if (!opts.renormalize && std::abs(total - 1.0) > opts.accept_tol)
            throw Error(Errc::NotStochastic, "entries sum to " + std::to_string(total));
        if (!opts.renormalize)
            spdlog::warn("jump matrix sums to {:.17g}; renormalized", total);
        for (auto& row : net.p_)
            for (auto& v : row) v /= total;
    }
    if (std::all_of(net.p_[0].begin() + 1, net.p_[0].end(), [](double l) { return l == 0.0; }))
        throw Error(Errc::NoArrivals, "all p(0,j) are zero");
    if (!strongly_connected(net.p_)) throw Error(Errc::Reducible, "chain on {0..d} is not irreducible");
    net.derive();
    return net;
}

JacksonNetwork JacksonNetwork::tandem(double lambda, const std::vector<double>& mu, bool auto_normalize) {
    if (mu.empty()) throw Error(Errc::BadArgument, "tandem needs at least one service rate");
    if (!(lambda > 0)) throw Error(Errc::BadArgument, "lambda must be positive");
    double total = lambda;
    for (double m : mu) {
        if (!(m > 0)) throw Error(Errc::BadArgument, "service rates must be positive");
        total += m;
    }
    if (std::abs(total - 1.0) > 1e-12 && !auto_normalize)
        throw Error(Errc::BadNormalization, "lambda + sum(mu) = " + std::to_string(total));
    const int d = static_cast<int>(mu.size());
    Matrix p(d + 1, std::vector<double>(d + 1, 0.0));
    p[0][1] = lambda / total;
    for (int j = 1; j < d; ++j) p[j][j + 1] = mu[j - 1] / total;
    p[d][0] = mu[d - 1] / total;
    return from_matrix(p);
}

void JacksonNetwork::derive() {
    const int d = d_;
    lambda_.assign(d, 0.0);
    mu_.assign(d, 0.0);
    for (int j = 1; j <= d; ++j) {
        lambda_[j - 1] = p_[0][j];
        for (int k = 0; k <= d; ++k) mu_[j - 1] += p_[j][k];
    }
    nu_ = traffic_rates(p_);
    inc_.clear();
    for (int i = 0; i <= d; ++i)
        for (int j = 0; j <= d; ++j) {
            if (i == j || p_[i][j] <= 0.0) continue;
            Increment v;
            v.from = i;
            v.to = j;
            v.prob = p_[i][j];
            v.x.assign(d, 0);
            if (j > 0) v.x[j - 1] += 1;
            if (i > 0) v.x[i - 1] -= 1;
            v.y = v.x;
            v.y[0] = -v.y[0];
            inc_.push_back(std::move(v));
        }
}

double JacksonNetwork::routing(int i, int j) const { return p_[i][j] / mu_[i - 1]; }

double JacksonNetwork::io_ratio() const {
    double in = 0.0, out = 0.0;
    for (int j = 1; j <= d_; ++j) {
        in += p_[0][j];
        out += p_[j][0];
    }
    if (out == 0.0) throw Error(Errc::DivisionByZero, "no exits from the network");
    return in / out;
}

bool JacksonNetwork::is_stable() const {
    for (int j = 1; j <= d_; ++j)
        if (!(rho(j) < 1.0)) return false;
    return true;
}

bool JacksonNetwork::is_tandem() const {
    for (int i = 0; i <= d_; ++i)
        for (int j = 0; j <= d_; ++j) {
            bool allowed = (i == 0 && j == 1) || (i >= 1 && i < d_ && j == i + 1) || (i == d_ && j == 0);
            if (allowed != (p_[i][j] > 0)) return false;
        }
    return true;
}

JacksonNetwork JacksonNetwork::relabeled(const std::vector<int>& perm) const {
    if (static_cast<int>(perm.size()) != d_) throw Error(Errc::BadArgument, "permutation size");
    std::vector<int> map(d_ + 1, 0);  // new index -> old index
    std::vector<char> used(d_ + 1, 0);
    for (int k = 0; k < d_; ++k) {
        int old = perm[k];
        if (old < 1 || old > d_ || used[old]) throw Error(Errc::BadArgument, "not a permutation of 1..d");
        used[old] = 1;
        map[k + 1] = old;
    }
    Matrix q(d_ + 1, std::vector<double>(d_ + 1, 0.0));
    for (int i = 0; i <= d_; ++i)
        for (int j = 0; j <= d_; ++j) q[i][j] = p_[map[i]][map[j]];
    return from_matrix(q);
}

Point transform(long n, int i, const Point& x) {
    if (i < 1 || i > static_cast<int>(x.size())) throw Error(Errc::BadArgument, "corner index out of range");
    Point y = x;
    y[i - 1] = n - x[i - 1];
    return y;
}

long coord_sum(const Point& x) { return std::accumulate(x.begin(), x.end(), 0L); }

bool in_A(long n, const Point& x) {
    return std::all_of(x.begin(), x.end(), [](long v) { return v >= 0; }) && coord_sum(x) <= n;
}

bool on_dA(long n, const Point& x) {
    return std::all_of(x.begin(), x.end(), [](long v) { return v >= 0; }) && coord_sum(x) == n;
}

bool in_Omega_Y(const Point& y, int i) {
    for (std::size_t j = 0; j < y.size(); ++j)
        if (static_cast<int>(j) != i - 1 && y[j] < 0) return false;
    return true;
}

long level(const Point& y, int i) {
    long s = 0;
    for (std::size_t j = 0; j < y.size(); ++j)
        s += (static_cast<int>(j) == i - 1) ? y[j] : -y[j];
    return s;
}

bool in_B(const Point& y, int i) { return in_Omega_Y(y, i) && level(y, i) >= 0; }
bool on_dB(const Point& y, int i) { return in_Omega_Y(y, i) && level(y, i) == 0; }

DomainPredicates domain_predicates(const JacksonNetwork& net, int corner) { return {net.d(), corner}; }

JacksonNetwork load_model(const nlohmann::json& j, MatrixOptions opts) {
    try {
        if (j.contains("tandem")) {
            const auto& t = j.at("tandem");
            bool norm = t.value("normalize", false);
            return JacksonNetwork::tandem(t.at("lambda").get<double>(), t.at("mu").get<std::vector<double>>(), norm);
        }
        auto p = j.at("p").get<Matrix>();
        if (j.contains("d") && j.at("d").get<int>() + 1 != static_cast<int>(p.size()))
            throw Error(Errc::BadShape, "\"d\" does not match the matrix size");
        if (j.value("normalize", false)) opts.renormalize = true;
        return JacksonNetwork::from_matrix(p, opts);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::Config, std::string("model JSON: ") + e.what());
    }
}

JacksonNetwork load_model_file(const std::string& path, MatrixOptions opts) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::Config, "cannot open model file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::Config, std::string("model JSON: ") + e.what());
    }
    return load_model(j, opts);
}

nlohmann::json model_to_json(const JacksonNetwork& net) {
    return nlohmann::json{{"d", net.d()}, {"p", net.matrix()}};
}

}  // namespace crw
