#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>
#include <spdlog/sinks/stdout_sinks.h>

#include "crw/charsurf.hpp"
#include "crw/config.hpp"
#include "crw/fourier2d.hpp"
#include "crw/harmonic.hpp"
#include "crw/importance.hpp"
#include "crw/montecarlo.hpp"
#include "crw/solve.hpp"
#include "crw/tandem.hpp"

namespace {

using crw::ExperimentConfig;
using crw::Point;
using nlohmann::json;

/// Numeric table emitted as CSV (17 significant digits) or JSON.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    json meta = json::object();
};

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", v);
}

double log10_or_nan(double v) { return v > 0.0 ? std::log10(v) : std::numeric_limits<double>::quiet_NaN(); }

json number_json(double v) {
    if (std::isfinite(v)) return v;
    return num(v);
}

void write_table(const Table& t, const ExperimentConfig& cfg, std::ostream& os) {
    if (cfg.format == "json") {
        json j;
        j["meta"] = t.meta;
        j["columns"] = t.header;
        json rows = json::array();
        for (const auto& r : t.rows) {
            json row = json::array();
            for (double v : r) row.push_back(number_json(v));
            rows.push_back(row);
        }
        j["rows"] = rows;
        os << j.dump(2) << '\n';
        return;
    }
    for (const auto& [k, v] : t.meta.items()) os << "# " << k << " = " << v.dump() << '\n';
    for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
    os << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << num(r[i]);
        os << '\n';
    }
}

json estimator_json(const crw::EstimatorResult& r) {
    return {{"samples", r.samples},     {"mean", number_json(r.mean)},   {"variance", number_json(r.variance)},
            {"ci_lo", number_json(r.ci_lo)}, {"ci_hi", number_json(r.ci_hi)}, {"work", r.work},
            {"censored", r.censored},   {"rel_half_width", number_json(r.rel_half_width())}};
}

std::vector<std::string> coord_names(int d, const char* prefix) {
    std::vector<std::string> out;
    for (int j = 1; j <= d; ++j) out.push_back(fmt::format("{}{}", prefix, j));
    return out;
}

/// Expands a start pattern with "i"/"j" placeholders over 0..max into points of A_n.
std::vector<Point> expand_points(const ExperimentConfig& cfg, int d, long max) {
    std::vector<Point> out;
    if (cfg.x.empty()) {
        crw::GridSolution g = crw::GridSolution::simplex(d, cfg.n);
        Point last(static_cast<std::size_t>(d), 0);
        last[0] = cfg.n;
        for (std::size_t k = 0, e = g.index(last); k <= e; ++k) out.push_back(g.point(k));
        return out;
    }
    if (static_cast<int>(cfg.x.size()) != d) throw crw::Error(crw::Errc::Config, "--x has the wrong dimension");
    std::vector<int> slots;
    for (std::size_t k = 0; k < cfg.x.size(); ++k)
        if (cfg.x[k] == "i" || cfg.x[k] == "j") slots.push_back(static_cast<int>(k));
    if (slots.empty()) return {crw::parse_point(cfg.x)};
    std::vector<std::string> fixed = cfg.x;
    for (int s : slots) fixed[static_cast<std::size_t>(s)] = "0";
    const Point base = crw::parse_point(fixed);
    Point p = base;
    const auto slot_i = [&](const char* name) {
        std::vector<int> r;
        for (int s : slots)
            if (cfg.x[static_cast<std::size_t>(s)] == name) r.push_back(s);
        return r;
    };
    const auto is = slot_i("i"), js = slot_i("j");
    for (long i = 0; i <= max; ++i)
        for (long j = 0; j <= (js.empty() ? 0 : max); ++j) {
            for (int s : is) p[static_cast<std::size_t>(s)] = i;
            for (int s : js) p[static_cast<std::size_t>(s)] = j;
            if (crw::in_A(cfg.n, p)) out.push_back(p);
        }
    return out;
}

void require_point_in_A(const ExperimentConfig& cfg, const Point& x, int d) {
    if (static_cast<int>(x.size()) != d) throw crw::Error(crw::Errc::Config, "--x has the wrong dimension");
    if (!crw::in_A(cfg.n, x)) throw crw::Error(crw::Errc::Config, "--x is not in A_n");
}

Table cmd_exact(const ExperimentConfig& cfg, const crw::JacksonNetwork& net) {
    const int d = net.d();
    const auto g = crw::exact_exit_grid(net, cfg.n);
    Table t;
    t.header = coord_names(d, "x");
    t.header.insert(t.header.end(), {"p", "log10_p"});
    t.meta = {{"n", cfg.n}, {"sweeps", g.iterations}, {"last_change", g.residual}};
    for (const auto& x : expand_points(cfg, d, cfg.n)) {
        std::vector<double> row(x.begin(), x.end());
        const double v = g.value(x);
        row.push_back(v);
        row.push_back(log10_or_nan(v));
        t.rows.push_back(row);
    }
    return t;
}

Table cmd_tandem_exit(const ExperimentConfig& cfg, const crw::JacksonNetwork& net, long max) {
    const int d = net.d();
    if (!net.is_tandem()) throw crw::Error(crw::Errc::NotTandem, "tandem-exit needs a tandem network");
    const auto comb = crw::has_equal_rates(net) ? crw::LogLinearCombination{} : crw::tandem_exit_combination(net);
    Table t;
    t.header = coord_names(d, "x");
    t.header.insert(t.header.end(), {"f", "log10_f"});
    t.meta = {{"n", cfg.n}, {"terms", comb.size()}};
    for (const auto& x : expand_points(cfg, d, max < 0 ? cfg.n : max)) {
        const Point y = crw::transform(cfg.n, 1, x);
        std::vector<double> row(x.begin(), x.end());
        double v = 0.0, lg = 0.0;
        if (comb.size() > 0) {
            const auto s = comb.eval_scaled(y);
            v = s.value().real();
            lg = s.log10_abs();
        } else {
            v = crw::tandem_exit_probability(net, y);
            lg = log10_or_nan(v);
        }
        row.push_back(v);
        row.push_back(lg);
        t.rows.push_back(row);
    }
    return t;
}

Table cmd_balayage2d(const ExperimentConfig& cfg, const crw::JacksonNetwork& net) {
    if (net.d() != 2) throw crw::Error(crw::Errc::Config, "balayage2d needs a two-node network");
    const auto fo = crw::first_order(net);
    crw::RefineOptions opt;
    opt.K = cfg.K;
    opt.R = cfg.R;
    const auto ap = crw::exit_approximation(net, opt);
    Table t;
    t.header = {"x1", "x2", "approx", "log10_approx", "lower", "upper", "first_order"};
    t.meta = {{"n", cfg.n},
              {"K", cfg.K},
              {"R", cfg.R},
              {"r", fo.r},
              {"alpha_conj", fo.alpha_conj.real()},
              {"c7", fo.c7.real()},
              {"max_error", ap.max_error},
              {"argmax", ap.argmax},
              {"search_end", ap.search_end},
              {"condition", ap.condition},
              {"lower_factor", ap.lower_factor},
              {"upper_factor", ap.upper_factor}};
    for (const auto& x : expand_points(cfg, 2, cfg.n)) {
        const Point y = crw::transform(cfg.n, 1, x);
        const double g = ap.eval(y);
        t.rows.push_back({static_cast<double>(x[0]), static_cast<double>(x[1]), g, log10_or_nan(g),
                          ap.lower_factor * g, ap.upper_factor * g, fo.A0.eval(y).real()});
    }
    return t;
}

Table cmd_charsurf(const crw::JacksonNetwork& net, int points) {
    if (net.d() != 2) throw crw::Error(crw::Errc::Config, "charsurf needs a two-node network");
    if (points < 1) throw crw::Error(crw::Errc::Config, "--points must be positive");
    Table t;
    t.header = {"theta", "re_alpha", "im_alpha", "re_beta1", "im_beta1", "re_beta2", "im_beta2", "abs_beta1",
                "re_delta", "im_delta"};
    const auto [r1, r1_alpha] = crw::single_term_root2d(net);
    t.meta = {{"io_ratio", net.io_ratio()}, {"single_term_root", r1}, {"single_term_alpha", r1_alpha},
              {"simplifying_condition", crw::simplifying_condition2d(net)}};
    for (int k = 0; k < points; ++k) {
        const double th = 2.0 * std::numbers::pi * k / points;
        const crw::cplx a = std::polar(1.0, th);
        const auto [b1, b2] = crw::beta_roots2d(net, a);
        const crw::cplx D = crw::discriminant2d(net, a);
        t.rows.push_back({th, a.real(), a.imag(), b1.real(), b1.imag(), b2.real(), b2.imag(), std::abs(b1), D.real(), D.imag()});
    }
    return t;
}

Table cmd_verify_system(const crw::JacksonNetwork& net) {
    if (!net.is_tandem()) throw crw::Error(crw::Errc::NotTandem, "verify-system builds the tandem system");
    const int d = net.d();
    Table t;
    t.header = {"m", "vertices", "on_surface", "distinct", "conjugacy", "multipliers", "loops", "pass"};
    bool all = true;
    for (int m = 1; m <= d; ++m) {
        const auto g = crw::tandem_graph(m, d);
        const auto sol = crw::tandem_solution(net, m);
        const auto rep = crw::verify_system(net, g, sol);
        all = all && rep.all_pass();
        t.rows.push_back({static_cast<double>(m), static_cast<double>(g.size()), rep.on_surface.worst, rep.distinct.worst,
                          rep.conjugacy.worst, rep.multipliers.worst, rep.loops.worst, rep.all_pass() ? 1.0 : 0.0});
    }
    t.meta = {{"all_pass", all}};
    if (!all) throw crw::Error(crw::Errc::AssumptionViolated, "a harmonic-system condition failed");
    return t;
}

crw::Process parse_process(const std::string& s) {
    if (s == "X") return crw::Process::X;
    if (s == "Yn") return crw::Process::Yn;
    if (s == "Y") return crw::Process::Y;
    if (s == "Z") return crw::Process::Z;
    throw crw::Error(crw::Errc::Config, "process must be X, Yn, Y or Z");
}

json cmd_mc(const ExperimentConfig& cfg, const crw::JacksonNetwork& net, const std::string& process, bool paired, int threads) {
    crw::PathSpec spec;
    spec.process = parse_process(process);
    spec.start = crw::parse_point(cfg.x);
    spec.n = cfg.n;
    spec.N = cfg.N;
    if (static_cast<int>(spec.start.size()) != net.d()) throw crw::Error(crw::Errc::Config, "--x has the wrong dimension");
    const crw::Stop event = spec.process == crw::Process::X ? crw::Stop::TauN : crw::Stop::Tau;
    const auto r = crw::mc_probability(net, spec, event, cfg.samples, cfg.seed, threads);
    json j = {{"process", process}, {"event", spec.process == crw::Process::X ? "tau_n < tau_0" : "tau < zeta_N"},
              {"naive", estimator_json(r)}};
    if (paired) {
        if (spec.process != crw::Process::X) throw crw::Error(crw::Errc::Config, "--paired needs process X");
        const auto is = crw::is_estimate(net, cfg.n, spec.start, cfg.samples, cfg.seed, threads);
        j["is"] = estimator_json(is.estimate);
        j["variance_ratio"] = number_json(is.estimate.variance > 0 ? r.variance / is.estimate.variance
                                                                   : std::numeric_limits<double>::infinity());
    }
    return j;
}

json cmd_is(const ExperimentConfig& cfg, const crw::JacksonNetwork& net, int threads) {
    const Point x = crw::parse_point(cfg.x);
    require_point_in_A(cfg, x, net.d());
    const auto r = crw::is_estimate(net, cfg.n, x, cfg.samples, cfg.seed, threads);
    const double f = crw::tandem_exit_probability(net, crw::transform(cfg.n, 1, x));
    json traj = json::array();
    for (const auto& [n, rel] : r.trajectory) traj.push_back({n, number_json(rel)});
    return {{"estimate", estimator_json(r.estimate)},
            {"formula", number_json(f)},
            {"formula_in_ci", r.estimate.ci_lo <= f && f <= r.estimate.ci_hi},
            {"degenerate_steps", r.degenerate_steps},
            {"trajectory", traj}};
}

Table cmd_compare(const ExperimentConfig& cfg, const crw::JacksonNetwork& net) {
    const int d = net.d();
    if (!net.is_tandem()) throw crw::Error(crw::Errc::NotTandem, "compare needs a tandem network");
    const auto g = crw::exact_exit_grid(net, cfg.n);
    Table t;
    t.header = coord_names(d, "x");
    t.header.insert(t.header.end(), {"exact", "approx", "rel_error", "V_n", "W_n", "log10_exact", "log10_approx"});
    t.meta = {{"n", cfg.n}, {"sweeps", g.iterations}};
    const double n = static_cast<double>(cfg.n);
    for (const auto& x : expand_points(cfg, d, cfg.n)) {
        if (crw::coord_sum(x) == 0) continue;
        const double e = g.value(x);
        const double a = crw::tandem_exit_probability(net, crw::transform(cfg.n, 1, x));
        std::vector<double> row(x.begin(), x.end());
        row.insert(row.end(), {e, a, (a - e) / e, -std::log(e) / n, -std::log(a) / n, log10_or_nan(e), log10_or_nan(a)});
        t.rows.push_back(row);
    }
    return t;
}

Table cmd_boundary_layer(const ExperimentConfig& cfg, const crw::JacksonNetwork& net) {
    const long n = cfg.n;
    const auto g = crw::exact_exit_grid(net, n);
    const double half = -0.5 * std::log(net.rho(1));
    Table t;
    t.header = {"y1", "layer", "kink"};
    t.meta = {{"n", n}, {"lambda", net.lambda(1)}, {"mu", net.mu(1)}};
    for (long y1 = 1; y1 < n; ++y1) {
        const long x1 = n - y1;
        double kink = std::numeric_limits<double>::quiet_NaN();
        for (long y2 = 0; x1 + y2 + 1 <= n; ++y2) {
            const double step = std::log(g.value({x1, y2 + 1})) - std::log(g.value({x1, y2}));
            if (step >= half) {
                kink = static_cast<double>(y2) + 0.5;
                break;
            }
        }
        t.rows.push_back({static_cast<double>(y1), crw::boundary_layer(net, static_cast<double>(y1)), kink});
    }
    return t;
}

Table cmd_diffusion(double a, double b, int points) {
    if (points < 2) throw crw::Error(crw::Errc::Config, "--points must be at least 2");
    Table t;
    t.header = {"x1", "x2", "p"};
    t.meta = {{"a", a}, {"b", b}};
    for (int i = 0; i < points; ++i)
        for (int k = 0; k <= i; ++k) {
            const double x1 = static_cast<double>(i) / (points - 1), x2 = static_cast<double>(k) / (points - 1);
            t.rows.push_back({x1, x2, crw::diffusion_exit_probability(a, b, x1, x2)});
        }
    return t;
}

bool is_config_error(crw::Errc c) {
    switch (c) {
        case crw::Errc::BadShape:
        case crw::Errc::NotStochastic:
        case crw::Errc::NonzeroDiagonal:
        case crw::Errc::Reducible:
        case crw::Errc::NoArrivals:
        case crw::Errc::BadNormalization:
        case crw::Errc::BadArgument:
        case crw::Errc::Config:
        case crw::Errc::NotTandem:
        case crw::Errc::NotTandem2D: return true;
        default: return false;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exit probabilities of constrained random walks for Jackson networks"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string tandem_text, config_file, process = "X";
    bool dry_run = false, paired = false, print_config = false;
    int points = 720;
    long max = -1;
    double da = 1.0, db = 0.5;

    auto common = [&](CLI::App* s) {
        s->add_option("--config", config_file, "JSON experiment config; flags override it");
        s->add_option("--model", cfg.model_file, "JSON model file");
        s->add_option("--tandem", tandem_text, "tandem rates lambda,mu1,...; fractions allowed");
        s->add_option("--n", cfg.n, "buffer size");
        s->add_option("--x", cfg.x, "start point; entries i, j sweep a slice")->delimiter(',');
        s->add_option("--seed", cfg.seed, "random seed");
        s->add_option("--samples", cfg.samples, "sample count");
        s->add_option("--threads", cfg.threads, "worker threads (default: CRW_THREADS or all cores)");
        s->add_option("--output,-o", cfg.output, "output file (default stdout)");
        s->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        s->add_flag("--dry-run", dry_run, "validate the configuration and exit");
        s->add_flag("--print-config", print_config, "print the canonical configuration");
    };

    auto* exact = app.add_subcommand("exact", "exact P_x(tau_n < tau_0) by the grid solver");
    auto* texit = app.add_subcommand("tandem-exit", "tandem exit formula f(T_n x)");
    texit->add_option("--max", max, "range of slice placeholders (default n)");
    auto* bal = app.add_subcommand("balayage2d", "perturbed Fourier approximation for two nodes");
    bal->add_option("--K", cfg.K, "number of pair elements");
    bal->add_option("--R", cfg.R, "radius of the perturbed frequencies");
    auto* cs = app.add_subcommand("charsurf", "roots of the characteristic equation on |alpha| = 1");
    cs->add_option("--points", points, "theta grid size");
    auto* vs = app.add_subcommand("verify-system", "verify the tandem harmonic systems");
    auto* mc = app.add_subcommand("mc", "naive Monte Carlo");
    mc->add_option("--process", process, "X, Yn, Y or Z");
    mc->add_option("--N", cfg.N, "zeta_N level for Y and Z");
    mc->add_flag("--paired", paired, "also run importance sampling on the same streams");
    auto* is = app.add_subcommand("is", "importance sampling with the W_n tilt");
    auto* cmp = app.add_subcommand("compare", "exact grid against the tandem formula");
    auto* bl = app.add_subcommand("boundary-layer", "boundary layer curve and grid kink locus");
    auto* dif = app.add_subcommand("diffusion", "closed-form diffusion exit probability");
    dif->add_option("--a", da, "drift parameter a");
    dif->add_option("--b", db, "drift parameter b");
    dif->add_option("--points", points, "grid points per axis");
    for (auto* s : {exact, texit, bal, cs, vs, mc, is, cmp, bl, dif}) common(s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    spdlog::set_default_logger(spdlog::stderr_logger_mt("crw"));
    CLI::App* sub = app.get_subcommands().front();
    try {
        if (!config_file.empty()) {
            std::ifstream in(config_file);
            if (!in) throw crw::Error(crw::Errc::Config, "cannot open " + config_file);
            json j;
            try {
                j = json::parse(in);
            } catch (const json::exception& e) {
                throw crw::Error(crw::Errc::Config, e.what());
            }
            ExperimentConfig base = crw::config_from_json(j);
            // flags given on the command line override the file
            auto given = [&](const char* name) { return sub->count(name) > 0; };
            if (!given("--model") && !base.model_file.empty()) cfg.model_file = base.model_file;
            if (!given("--n")) cfg.n = base.n;
            if (!given("--x")) cfg.x = base.x;
            if (!given("--seed")) cfg.seed = base.seed;
            if (!given("--samples")) cfg.samples = base.samples;
            if (!given("--threads")) cfg.threads = base.threads;
            if (!given("--output")) cfg.output = base.output;
            if (!given("--format")) cfg.format = base.format;
            if (sub->get_option_no_throw("--K") && !given("--K")) cfg.K = base.K;
            if (sub->get_option_no_throw("--R") && !given("--R")) cfg.R = base.R;
            if (sub->get_option_no_throw("--N") && !given("--N")) cfg.N = base.N;
            if (tandem_text.empty()) cfg.tandem = base.tandem;
        }
        cfg.command = sub->get_name();
        if (!tandem_text.empty()) cfg.tandem = crw::parse_number_list(tandem_text);
        if (cfg.n < 1) throw crw::Error(crw::Errc::Config, "--n must be positive");
        if (cfg.samples < 1) throw crw::Error(crw::Errc::Config, "--samples must be positive");
        if (cfg.K < 1) throw crw::Error(crw::Errc::Config, "--K must be positive");
        if (!(cfg.R > 0.0 && cfg.R < 1.0)) throw crw::Error(crw::Errc::Config, "--R must be in (0, 1)");
        if (print_config) std::cout << crw::canonical_json(cfg) << '\n';

        const bool needs_model = sub != dif;
        std::optional<crw::JacksonNetwork> net;
        if (needs_model) net = crw::make_network(cfg);
        if ((sub == mc || sub == is) && cfg.x.empty()) throw crw::Error(crw::Errc::Config, "--x is required");
        if (sub == is && !net->is_tandem()) throw crw::Error(crw::Errc::NotTandem, "importance sampling needs a tandem network");
        if (sub == bl && (net->d() != 2 || !net->is_tandem() || !crw::has_equal_rates(*net)))
            throw crw::Error(crw::Errc::Config, "boundary-layer needs a two-node tandem with equal service rates");
        if (dry_run) {
            spdlog::info("configuration is valid");
            return 0;
        }

        const int threads = cfg.threads > 0 ? cfg.threads : crw::default_threads();
        std::ostringstream os;
        if (sub == exact) write_table(cmd_exact(cfg, *net), cfg, os);
        else if (sub == texit) write_table(cmd_tandem_exit(cfg, *net, max), cfg, os);
        else if (sub == bal) write_table(cmd_balayage2d(cfg, *net), cfg, os);
        else if (sub == cs) write_table(cmd_charsurf(*net, points), cfg, os);
        else if (sub == vs) write_table(cmd_verify_system(*net), cfg, os);
        else if (sub == mc) os << cmd_mc(cfg, *net, process, paired, threads).dump(2) << '\n';
        else if (sub == is) os << cmd_is(cfg, *net, threads).dump(2) << '\n';
        else if (sub == cmp) write_table(cmd_compare(cfg, *net), cfg, os);
        else if (sub == bl) write_table(cmd_boundary_layer(cfg, *net), cfg, os);
        else if (sub == dif) write_table(cmd_diffusion(da, db, points), cfg, os);

        if (cfg.output.empty()) {
            std::cout << os.str();
        } else {
            std::ofstream out(cfg.output);
            if (!out) throw crw::Error(crw::Errc::Config, "cannot write " + cfg.output);
            out << os.str();
        }
        return 0;
    } catch (const crw::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return is_config_error(e.code()) ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
