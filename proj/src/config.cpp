#include "lorentz/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "lorentz/errors.hpp"

namespace lorentz {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct OscEntry {
    std::map<std::string, double> values;
    int line = 0;
};

Oscillator make_oscillator(const std::string& section, const OscEntry& e) {
    for (const char* key : {"omega", "Omega"})
        if (!e.values.count(key))
            throw ConfigError("[" + section + "] (line " + std::to_string(e.line) + ") is missing '" + key + "'");
    Oscillator o;
    o.omega = e.values.at("omega");
    o.Omega = e.values.at("Omega");
    o.alpha = e.values.count("alpha") ? e.values.at("alpha") : 0.0;
    return o;
}

}  // namespace

double parse_number(const std::string& s) {
    const std::string t = trim(s);
    double v = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (!t.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v, std::chars_format::general);
    if (t.empty() || ec != std::errc() || ptr != last) throw ConfigError("not a number: '" + s + "'");
    return v;
}

double RunConfig::number(const std::string& key, double fallback) const {
    auto it = run.find(key);
    return it == run.end() ? fallback : parse_number(it->second);
}

long RunConfig::integer(const std::string& key, long fallback) const {
    auto it = run.find(key);
    if (it == run.end()) return fallback;
    const double v = parse_number(it->second);
    if (v != static_cast<double>(static_cast<long>(v))) throw ConfigError("not an integer: '" + key + "'");
    return static_cast<long>(v);
}

std::string RunConfig::text(const std::string& key, const std::string& fallback) const {
    auto it = run.find(key);
    return it == run.end() ? fallback : it->second;
}

RunConfig parse_config(const std::string& text) {
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    std::optional<double> eps0, mu0;
    bool saw_medium = false;
    std::map<int, OscEntry> electric, magnetic;
    OscEntry* osc = nullptr;
    RunConfig cfg;

    while (std::getline(in, line)) {
        ++lineno;
        const auto c = line.find_first_of("#;");
        if (c != std::string::npos) line.erase(c);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = " (line " + std::to_string(lineno) + ")";

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("unterminated section header" + where);
            section = trim(line.substr(1, line.size() - 2));
            osc = nullptr;
            if (section == "medium") {
                saw_medium = true;
            } else if (section == "run") {
            } else if (section.rfind("electric.", 0) == 0 || section.rfind("magnetic.", 0) == 0) {
                const bool el = section[0] == 'e';
                const std::string idx = section.substr(section.find('.') + 1);
                int i = 0;
                auto [p, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), i);
                if (idx.empty() || ec != std::errc() || p != idx.data() + idx.size())
                    throw ConfigError("bad oscillator index in [" + section + "]" + where);
                auto& tab = el ? electric : magnetic;
                if (tab.count(i)) throw ConfigError("duplicate section [" + section + "]" + where);
                osc = &tab[i];
                osc->line = lineno;
            } else {
                throw ConfigError("unknown section [" + section + "]" + where);
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value" + where);
        const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key" + where);
        if (section.empty()) throw ConfigError("key outside any section" + where);

        if (section == "run") {
            if (cfg.run.count(key)) throw ConfigError("duplicate key '" + key + "'" + where);
            cfg.run[key] = val;
        } else if (section == "medium") {
            std::optional<double>* slot = key == "eps0" ? &eps0 : key == "mu0" ? &mu0 : nullptr;
            if (!slot) throw ConfigError("unknown key '" + key + "' in [medium]" + where);
            if (slot->has_value()) throw ConfigError("duplicate key '" + key + "'" + where);
            *slot = parse_number(val);
        } else {
            if (key != "omega" && key != "Omega" && key != "alpha")
                throw ConfigError("unknown key '" + key + "' in [" + section + "]" + where);
            if (osc->values.count(key)) throw ConfigError("duplicate key '" + key + "'" + where);
            osc->values[key] = parse_number(val);
        }
    }

    if (saw_medium || !electric.empty() || !magnetic.empty()) {
        if (!eps0 || !mu0) throw ConfigError("[medium] needs eps0 and mu0");
        std::vector<Oscillator> e, m;
        for (const auto& [i, entry] : electric) e.push_back(make_oscillator("electric." + std::to_string(i), entry));
        for (const auto& [i, entry] : magnetic) m.push_back(make_oscillator("magnetic." + std::to_string(i), entry));
        try {
            cfg.medium.emplace(*eps0, *mu0, std::move(e), std::move(m));
        } catch (const Error& err) {
            throw ConfigError(std::string("invalid medium: ") + err.what());
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string medium_to_config(const LorentzMedium& m) {
    std::ostringstream os;
    os.precision(17);
    os << "[medium]\neps0 = " << m.eps0() << "\nmu0 = " << m.mu0() << "\n";
    auto block = [&](const char* name, const std::vector<Oscillator>& v) {
        for (std::size_t i = 0; i < v.size(); ++i)
            os << "\n[" << name << "." << i + 1 << "]\nomega = " << v[i].omega << "\nOmega = " << v[i].Omega
               << "\nalpha = " << v[i].alpha << "\n";
    };
    block("electric", m.electric());
    block("magnetic", m.magnetic());
    return os.str();
}

}  // namespace lorentz
