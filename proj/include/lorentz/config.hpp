#pragma once

#include <map>
#include <optional>
#include <string>

#include "lorentz/medium.hpp"

namespace lorentz {

// Flat sectioned text:
//
//   [medium]        eps0 = 1, mu0 = 1
//   [electric.1]    omega = 1, Omega = 1, alpha = 0.1
//   [magnetic.1]    omega = 2, Omega = 1, alpha = 0.2
//   [run]           free-form key = value pairs
//
// '#' and ';' start comments. Oscillators are ordered by their index.
struct RunConfig {
    std::optional<LorentzMedium> medium;
    std::map<std::string, std::string> run;

    bool has(const std::string& key) const { return run.count(key) > 0; }
    double number(const std::string& key, double fallback) const;
    long integer(const std::string& key, long fallback) const;
    std::string text(const std::string& key, const std::string& fallback) const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Inverse of parse_config for the medium part.
std::string medium_to_config(const LorentzMedium& m);

// Strict decimal parse (optional exponent); throws ConfigError.
double parse_number(const std::string& s);

}  // namespace lorentz
