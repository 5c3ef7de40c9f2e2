#include "crw/config.hpp"

#include <charconv>
#include <cmath>

namespace crw {

namespace {

double parse_number(const std::string& s) {
    const auto slash = s.find('/');
    auto num = [&](const std::string& t) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception&) {
            throw Error(Errc::Config, "not a number: '" + s + "'");
        }
        if (used != t.size()) throw Error(Errc::Config, "not a number: '" + s + "'");
        return v;
    };
    if (slash == std::string::npos) return num(s);
    const double q = num(s.substr(slash + 1));
    if (q == 0.0) throw Error(Errc::Config, "zero denominator in '" + s + "'");
    return num(s.substr(0, slash)) / q;
}

}  // namespace

std::vector<double> parse_number_list(const std::string& s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto comma = s.find(',', pos);
        const std::string item = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        out.push_back(parse_number(item));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

Point parse_point(const std::vector<std::string>& x) {
    Point p;
    for (const auto& s : x) {
        long v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) throw Error(Errc::Config, "bad coordinate '" + s + "'");
        p.push_back(v);
    }
    return p;
}

nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["command"] = c.command;
    j["model_file"] = c.model_file;
    j["tandem"] = c.tandem;
    j["n"] = c.n;
    j["K"] = c.K;
    j["R"] = c.R;
    j["N"] = c.N;
    j["samples"] = c.samples;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["x"] = c.x;
    j["output"] = c.output;
    j["format"] = c.format;
    return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(Errc::Config, "config must be a JSON object");
    ExperimentConfig c;
    const nlohmann::json defaults = to_json(c);
    for (const auto& [key, value] : j.items())
        if (!defaults.contains(key)) throw Error(Errc::Config, "unknown config key '" + key + "'");
    try {
        auto get = [&](const char* key, auto& field) {
            if (j.contains(key)) j.at(key).get_to(field);
        };
        get("command", c.command);
        get("model_file", c.model_file);
        get("tandem", c.tandem);
        get("n", c.n);
        get("K", c.K);
        get("R", c.R);
        get("N", c.N);
        get("samples", c.samples);
        get("seed", c.seed);
        get("threads", c.threads);
        get("x", c.x);
        get("output", c.output);
        get("format", c.format);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::Config, e.what());
    }
    if (c.format != "csv" && c.format != "json") throw Error(Errc::Config, "format must be csv or json");
    return c;
}

std::string canonical_json(const ExperimentConfig& c) { return to_json(c).dump(2); }

JacksonNetwork make_network(const ExperimentConfig& c) {
    if (!c.model_file.empty() && !c.tandem.empty()) throw Error(Errc::Config, "give either a model file or a tandem, not both");
    if (!c.model_file.empty()) return load_model_file(c.model_file);
    if (c.tandem.size() < 2) throw Error(Errc::Config, "a model is required (--model or --tandem lambda,mu1,...)");
    return JacksonNetwork::tandem(c.tandem[0], std::vector<double>(c.tandem.begin() + 1, c.tandem.end()), true);
}

}  // namespace crw
