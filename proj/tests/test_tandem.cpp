#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "crw/harmonic.hpp"
#include "crw/tandem.hpp"
#include "crw/traffic_exact.hpp"
#include "oracles.hpp"

using namespace crw;

namespace {

JacksonNetwork tandem8() {
    std::vector<double> mu = {0.05, 0.13, 0.07, 0.12, 0.09, 0.14, 0.11, 0.1};
    double s = 0.06;
    for (double m : mu) s += m;
    for (double& m : mu) m /= s;
    return JacksonNetwork::tandem(0.06 / s, mu);
}

}  // namespace

TEST_CASE("tandem graph shape") {
    auto g = tandem_graph(3);
    CHECK(g.size() == 4);
    CHECK(g.edge_complete());
    auto g1 = tandem_graph(1, 4);
    CHECK(g1.size() == 1);
    CHECK(g1.loops[0] == all_labels(4));
    for (int d = 2; d <= 6; ++d)
        for (int m = 1; m <= d; ++m) CHECK(tandem_graph(m, d).edge_complete());
}

TEST_CASE("tandem solutions verify for several dimensions") {
    for (int d : {2, 3, 4, 8}) {
        std::vector<double> mu;
        double s = 0.05;
        for (int j = 0; j < d; ++j) s += (mu.emplace_back(0.2 + 0.07 * ((j * 5) % d)));
        for (double& m : mu) m /= s;
        auto net = JacksonNetwork::tandem(0.05 / s, mu);
        for (int m = 1; m <= d; ++m) {
            auto rep = verify_system(net, tandem_graph(m, d), tandem_solution(net, m));
            CHECK(rep.all_pass());
        }
    }
}

TEST_CASE("d = 8 closed forms in exact arithmetic") {
    const Rational lambda(1, 20);
    std::vector<Rational> mu = {Rational(1, 10), Rational(3, 25), Rational(2, 25), Rational(11, 100),
                                Rational(13, 100), Rational(9, 100), Rational(7, 50), Rational(3, 20)};
    auto rho = [&](int j) { return lambda / mu[static_cast<std::size_t>(j - 1)]; };
    auto M = [&](int j) { return mu[static_cast<std::size_t>(j - 1)]; };
    auto find = [&](int m, Labels set) {
        for (const auto& v : tandem_solution_t<Rational>(lambda, mu, m))
            if (v.set == set) return v;
        FAIL("vertex not found");
        return TandemVertex<Rational>{};
    };
    const auto v36 = find(6, label_bit(3) | label_bit(6));
    const Rational c36 = -((M(4) - lambda) / (M(4) - M(3))) * ((M(5) - lambda) / (M(5) - M(3))) *
                         ((M(6) - lambda) / (M(6) - M(3)));
    CHECK(v36.c == c36);
    const std::vector<Rational> a36 = {1, 1, rho(3), rho(3), rho(3), rho(6), rho(6)};
    CHECK(v36.alpha == a36);
    const auto v5 = find(5, label_bit(5));
    CHECK(v5.c == 1);
    CHECK(v5.alpha == std::vector<Rational>{1, 1, 1, 1, rho(5), rho(5), rho(5)});
    const auto v8 = find(8, label_bit(8));
    CHECK(v8.alpha == std::vector<Rational>(7, Rational(1)));
    const auto v357 = find(7, label_bit(3) | label_bit(5) | label_bit(7));
    const Rational c357 = ((M(4) - lambda) / (M(4) - M(3))) * ((M(5) - lambda) / (M(5) - M(3))) *
                          ((M(6) - lambda) / (M(6) - M(5))) * ((M(7) - lambda) / (M(7) - M(5)));
    CHECK(v357.c == c357);
}

TEST_CASE("2-D closed form, nested and explicit evaluations agree") {
    auto net = JacksonNetwork::tandem(0.1, {0.4, 0.5});
    for (long y1 = 0; y1 < 30; ++y1)
        for (long y2 = 0; y2 <= y1; ++y2) {
            const Point y{y1, y2};
            const double a = tandem_exit_2d(net, y);
            CHECK(tandem_exit_nested(net, y) == doctest::Approx(a).epsilon(1e-12));
            CHECK(tandem_exit_explicit(net, y) == doctest::Approx(a).epsilon(1e-12));
        }
    auto n8 = tandem8();
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<long> u(0, 6);
    for (int k = 0; k < 50; ++k) {
        Point y(8, 0);
        long s = 0;
        for (int j = 1; j < 8; ++j) s += (y[static_cast<std::size_t>(j)] = u(rng));
        y[0] = s + u(rng);
        CHECK(tandem_exit_nested(n8, y) == doctest::Approx(tandem_exit_explicit(n8, y)).epsilon(1e-10));
    }
}

TEST_CASE("exit formula is one on dB and Y-harmonic") {
    auto net = tandem8();
    const auto p = net.matrix();
    std::mt19937_64 rng(2);
    auto f = [&](const Point& y) { return oracle::cplx(tandem_exit_probability(net, y)); };
    int checked = 0;
    for (long ybar : {1L, 2L, 7L})
        for (const auto& y : oracle::pattern_points(8, ybar, 5, rng)) {
            CHECK(std::abs(oracle::y_residual(p, f, y)) < 1e-12);
            Point b = y;
            b[0] -= ybar;
            CHECK(tandem_exit_probability(net, b) == doctest::Approx(1.0).epsilon(1e-12));
            ++checked;
        }
    CHECK(checked == 3 * 128);
}

TEST_CASE("exit combination has 2^d - 1 terms") {
    CHECK(tandem_exit_combination(JacksonNetwork::tandem(0.1, {0.4, 0.5})).size() == 3);
    CHECK(tandem_exit_combination(tandem8()).size() == 255);
}

TEST_CASE("equal-rate limits") {
    auto eq2 = JacksonNetwork::tandem(0.2, {0.4, 0.4});
    CHECK(has_equal_rates(eq2));
    const double rho = 0.5, c0 = 0.5;
    for (long y1 = 0; y1 < 20; ++y1)
        for (long y2 = 0; y2 <= y1; ++y2) {
            const double expect = std::pow(rho, y1 - y2) + c0 * (y1 - y2) * std::pow(rho, y1);
            CHECK(tandem_exit_probability(eq2, {y1, y2}) == doctest::Approx(expect).epsilon(1e-13));
        }
    // limit of distinct rates
    auto near = JacksonNetwork::tandem(0.2, {0.4 - 1e-6, 0.4 + 1e-6});
    CHECK(tandem_exit_2d(near, {12, 3}) == doctest::Approx(tandem_exit_probability(eq2, {12, 3})).epsilon(1e-5));
    auto eq3 = JacksonNetwork::tandem(0.1, {0.3, 0.3, 0.3});
    auto near3 = JacksonNetwork::tandem(0.1, {0.3 - 2e-5, 0.3, 0.3 + 2e-5});
    for (const Point& y : {Point{9, 2, 3}, Point{5, 0, 0}, Point{14, 1, 6}})
        CHECK(tandem_exit_probability(eq3, y) == doctest::Approx(tandem_exit_nested(near3, y)).epsilon(1e-4));
    // harmonic and one on the boundary
    auto f = [&](const Point& y) { return oracle::cplx(tandem_exit_probability(eq3, y)); };
    std::mt19937_64 rng(4);
    for (const auto& y : oracle::pattern_points(3, 4, 6, rng)) CHECK(std::abs(oracle::y_residual(eq3.matrix(), f, y)) < 1e-13);
    auto partial = JacksonNetwork::tandem(0.1, {0.3, 0.3, 0.3 + 0.1}, true);
    CHECK_THROWS_AS(tandem_exit_equal_rates(partial, {4, 1, 1}), Error);
}

TEST_CASE("tandem_h is the m-th weighted block") {
    auto net = JacksonNetwork::tandem(0.1, {0.3, 0.2, 0.4});
    const Point y{9, 2, 3};
    oracle::cplx sum = 0.0;
    for (int m = 1; m <= 3; ++m) sum += tandem_h(net, m).eval(y) * tandem_weight_t<double>(0.1, net.mus(), m);
    CHECK(std::abs(sum - tandem_exit_explicit(net, y)) < 1e-14);
}

TEST_CASE("non-tandem input is rejected") {
    auto g = JacksonNetwork::from_matrix({{0, .05, .1}, {.35, 0, .12}, {.3, .08, 0}});
    CHECK_THROWS_AS(tandem_solution(g, 1), Error);
    CHECK_THROWS_AS(tandem_exit_probability(g, {3, 1}), Error);
}
