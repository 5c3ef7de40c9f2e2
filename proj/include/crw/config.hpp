#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "crw/network.hpp"

namespace crw {

/// Parameters of one CLI run. Serializes to canonical JSON (sorted keys, fixed layout).
struct ExperimentConfig {
    std::string command;
    std::string model_file;      ///< JSON model; empty when `tandem` is used
    std::vector<double> tandem;  ///< lambda, mu_1, ..., mu_d
    long n = 60;
    int K = 11;
    double R = 0.7;
    long N = 100;
    std::uint64_t samples = 10000;
    std::uint64_t seed = 1;
    int threads = 0;             ///< 0 means default_threads()
    std::vector<std::string> x;  ///< start point; entries may be "i" or "j" for slices
    std::string output;          ///< empty means stdout
    std::string format = "csv";  ///< csv or json

    bool operator==(const ExperimentConfig&) const = default;
};

nlohmann::json to_json(const ExperimentConfig& c);
/// Throws Error(Config) on unknown keys or ill-typed values.
ExperimentConfig config_from_json(const nlohmann::json& j);
std::string canonical_json(const ExperimentConfig& c);

/// Parses "a,b,c" where each entry is a decimal or a fraction p/q.
std::vector<double> parse_number_list(const std::string& s);
/// Parses a start point "1,0,2"; throws Error(Config) on slice placeholders.
Point parse_point(const std::vector<std::string>& x);

/// Network named by the config: the model file if given, else the tandem list.
JacksonNetwork make_network(const ExperimentConfig& c);

}  // namespace crw
