#include "covert/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "covert/errors.hpp"

namespace covert {

RunConfig::RunConfig() {
    params.eta_b = 0.97;
    params.eta_w = 0.03;
    params.nbar = 5.0;
    session.n = 320000;
    session.Q = 32;
    session.zeta = 0.0;
    session.rs_n = 31;
    session.rs_k = 15;
}

namespace {

double parse_number(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        while (used < value.size() && std::isspace(static_cast<unsigned char>(value[used]))) {
            ++used;
        }
        if (used != value.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse numeric value '" + value + "'");
    }
}

std::int64_t parse_integer(const std::string& key, const std::string& value) {
    const double v = parse_number(key, value);
    if (std::fabs(v - std::llround(v)) > 1e-9 || std::fabs(v) > 9.2e18) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
    }
    return std::llround(v);
}

void assign(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "eta_b") {
        cfg.params.eta_b = parse_number(key, value);
        cfg.params.eta_w = 1.0 - cfg.params.eta_b;
    } else if (key == "nbar") {
        cfg.params.nbar = parse_number(key, value);
    } else if (key == "nbar_T") {
        cfg.params.nbar_T = parse_number(key, value);
    } else if (key == "lambda_w") {
        cfg.params.lambda_w = parse_number(key, value);
    } else if (key == "p_D_b") {
        cfg.params.p_D_b = parse_number(key, value);
    } else if (key == "p_D_w") {
        cfg.params.p_D_w = parse_number(key, value);
    } else if (key == "nbar_det_b") {
        cfg.params.nbar_det_b = parse_number(key, value);
    } else if (key == "nbar_det_w") {
        cfg.params.nbar_det_w = parse_number(key, value);
    } else if (key == "n") {
        cfg.session.n = parse_integer(key, value);
    } else if (key == "Q") {
        cfg.session.Q = static_cast<int>(parse_integer(key, value));
        cfg.session.rs_n = cfg.session.Q - 1;
    } else if (key == "zeta") {
        cfg.session.zeta = parse_number(key, value);
    } else if (key == "rs_k") {
        cfg.session.rs_k = static_cast<int>(parse_integer(key, value));
    } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(parse_integer(key, value));
    } else if (key == "trials") {
        cfg.trials = parse_integer(key, value);
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

RunConfig parse_config_text(std::string_view text) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::istringstream stream{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key=value, got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        }
        if (!seen.insert(key).second) {
            throw ConfigError("duplicate config key '" + key + "'");
        }
        assign(cfg, key, value);
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

void apply_config_override(RunConfig& config, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("override '" + assignment + "': expected key=value");
    }
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    assign(config, key, value);
}

}  // namespace covert
