#include "multikink_tools/config.hpp"

#include <multikink/errors.hpp>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace mkt {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"potential", {"kind", "coeffs", "cos_coeffs", "sin_coeffs", "search_interval"}},
        {"chain", {"labels", "velocities", "shifts"}},
        {"grid", {"x_min", "x_max", "dx", "dt", "t0", "t_end", "snapshot_every", "profile_dx", "half_width"}},
        {"construct", {"T", "delta", "tol", "max_iter", "T_final", "n0_threshold"}},
        {"boost", {"v", "t0", "x0", "window", "t_prime"}},
        {"spectrum", {"n", "n_prime", "modes", "half_width", "dx"}},
        {"verify", {"coercivity_samples", "drift_t_end", "drift_dx", "drift_dt"}},
        {"output", {"directory", "formats"}},
    };
    return keys;
}

std::string where(const std::string& section, const std::string& key) { return "[" + section + "] " + key; }

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

double to_double(const std::string& text, const std::string& field) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || text.find_first_not_of(" \t", used) != std::string::npos) {
        throw mk::ConfigError("config " + field + ": cannot parse '" + text + "' as a number");
    }
    return v;
}

long long to_integer(const std::string& text, const std::string& field) {
    const double v = to_double(text, field);
    if (v != static_cast<double>(static_cast<long long>(v))) {
        throw mk::ConfigError("config " + field + ": expected an integer, got '" + text + "'");
    }
    return static_cast<long long>(v);
}

class Reader {
public:
    Reader(const pt::ptree& tree, std::string section) : section_(std::move(section)) {
        auto child = tree.get_child_optional(section_);
        if (child) node_ = &*child;
    }
    [[nodiscard]] bool present() const { return node_ != nullptr; }

    void number(const char* key, double& out) const {
        if (auto v = raw(key)) out = to_double(*v, where(section_, key));
    }
    void count(const char* key, std::size_t& out) const {
        if (auto v = raw(key)) {
            const long long n = to_integer(*v, where(section_, key));
            if (n < 0) throw mk::ConfigError("config " + where(section_, key) + ": must be non-negative");
            out = static_cast<std::size_t>(n);
        }
    }
    void integer(const char* key, int& out) const {
        if (auto v = raw(key)) out = static_cast<int>(to_integer(*v, where(section_, key)));
    }
    void text(const char* key, std::string& out) const {
        if (auto v = raw(key)) out = *v;
    }
    void numbers(const char* key, std::vector<double>& out) const {
        if (auto v = raw(key)) {
            out.clear();
            for (const auto& item : split_list(*v)) out.push_back(to_double(item, where(section_, key)));
        }
    }
    void integers(const char* key, std::vector<int>& out) const {
        if (auto v = raw(key)) {
            out.clear();
            for (const auto& item : split_list(*v)) out.push_back(static_cast<int>(to_integer(item, where(section_, key))));
        }
    }
    void words(const char* key, std::vector<std::string>& out) const {
        if (auto v = raw(key)) out = split_list(*v);
    }

private:
    [[nodiscard]] std::optional<std::string> raw(const char* key) const {
        if (!node_) return std::nullopt;
        auto v = node_->get_optional<std::string>(key);
        if (!v) return std::nullopt;
        return *v;
    }

    std::string section_;
    const pt::ptree* node_ = nullptr;
};

void check_keys(const pt::ptree& tree) {
    for (const auto& [name, node] : tree) {
        if (node.empty()) {
            if (name != "seed") throw mk::ConfigError("config: unknown top-level key '" + name + "'");
            continue;
        }
        auto it = known_keys().find(name);
        if (it == known_keys().end()) throw mk::ConfigError("config: unknown section [" + name + "]");
        for (const auto& [key, value] : node) {
            if (!it->second.count(key)) throw mk::ConfigError("config: unknown key " + where(name, key));
        }
    }
}

void check_chain(const ChainSection& c) {
    if (c.labels.empty()) throw mk::ConfigError("config [chain] labels: at least one label required");
    const std::size_t K = c.labels.size() - 1;
    if (c.velocities.size() != K) {
        throw mk::ConfigError("config [chain] velocities: expected " + std::to_string(K) + " values, got " +
                              std::to_string(c.velocities.size()));
    }
    if (c.shifts.size() != K) {
        throw mk::ConfigError("config [chain] shifts: expected " + std::to_string(K) + " values, got " +
                              std::to_string(c.shifts.size()));
    }
    for (std::size_t k = 0; k < K; ++k) {
        if (!(std::abs(c.velocities[k]) < 1.0)) {
            throw mk::ConfigError("config [chain] velocities: |v| < 1 violated at position " + std::to_string(k));
        }
        if (k > 0 && !(c.velocities[k - 1] < c.velocities[k])) {
            throw mk::ConfigError("config [chain] velocities: not strictly increasing at position " +
                                  std::to_string(k));
        }
    }
}

}  // namespace

bool ExperimentConfig::wants(const std::string& format) const {
    return std::find(output.formats.begin(), output.formats.end(), format) != output.formats.end();
}

ExperimentConfig parse_config(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        std::ostringstream msg;
        msg << "config line " << e.line() << ": " << e.message();
        throw mk::ConfigError(msg.str());
    }
    check_keys(tree);

    ExperimentConfig c;
    if (auto seed = tree.get_optional<std::string>("seed")) {
        const long long s = to_integer(*seed, "seed");
        if (s < 0) throw mk::ConfigError("config seed: must be non-negative");
        c.seed = static_cast<std::uint64_t>(s);
    }

    Reader potential(tree, "potential");
    potential.text("kind", c.potential.kind);
    potential.numbers("coeffs", c.potential.coeffs);
    potential.numbers("cos_coeffs", c.potential.cos_coeffs);
    potential.numbers("sin_coeffs", c.potential.sin_coeffs);
    std::vector<double> interval;
    potential.numbers("search_interval", interval);
    if (!interval.empty()) {
        if (interval.size() != 2 || !(interval[0] < interval[1])) {
            throw mk::ConfigError("config [potential] search_interval: expected 'lo, hi' with lo < hi");
        }
        c.potential.search_interval = std::make_pair(interval[0], interval[1]);
    }
    static const std::set<std::string> kinds{"phi4", "phi6", "sine_gordon", "polynomial", "trigonometric"};
    if (!kinds.count(c.potential.kind)) {
        throw mk::ConfigError("config [potential] kind: unknown potential '" + c.potential.kind + "'");
    }
    if (c.potential.kind == "polynomial" && c.potential.coeffs.empty()) {
        throw mk::ConfigError("config [potential] coeffs: required for a polynomial potential");
    }
    if ((c.potential.kind == "polynomial" || c.potential.kind == "trigonometric") && !c.potential.search_interval) {
        throw mk::ConfigError("config [potential] search_interval: required for a custom potential");
    }

    Reader chain(tree, "chain");
    if (chain.present()) {
        ChainSection s;
        chain.integers("labels", s.labels);
        chain.numbers("velocities", s.velocities);
        chain.numbers("shifts", s.shifts);
        check_chain(s);
        c.chain = s;
    }

    Reader grid(tree, "grid");
    grid.number("x_min", c.grid.x_min);
    grid.number("x_max", c.grid.x_max);
    grid.number("dx", c.grid.dx);
    grid.number("dt", c.grid.dt);
    grid.number("t0", c.grid.t0);
    grid.number("t_end", c.grid.t_end);
    grid.count("snapshot_every", c.grid.snapshot_every);
    grid.number("profile_dx", c.grid.profile_dx);
    grid.number("half_width", c.grid.half_width);
    if (!(c.grid.dx > 0.0) || !(c.grid.dt > 0.0) || !(c.grid.profile_dx > 0.0)) {
        throw mk::ConfigError("config [grid]: dx, dt and profile_dx must be positive");
    }
    if (c.grid.x_min > c.grid.x_max) throw mk::ConfigError("config [grid]: x_min exceeds x_max");

    Reader construct(tree, "construct");
    if (construct.present()) {
        ConstructSection s;
        construct.number("T", s.T);
        construct.number("delta", s.delta);
        construct.number("tol", s.tol);
        construct.count("max_iter", s.max_iter);
        construct.number("T_final", s.T_final);
        construct.number("n0_threshold", s.n0_threshold);
        if (!(s.tol > 0.0)) throw mk::ConfigError("config [construct] tol: must be positive");
        if (s.delta < 0.0) throw mk::ConfigError("config [construct] delta: must be positive");
        c.construct = s;
    }

    Reader boost(tree, "boost");
    if (boost.present()) {
        BoostSection s;
        boost.number("v", s.v);
        boost.number("t0", s.t0);
        boost.number("x0", s.x0);
        boost.number("window", s.window);
        boost.number("t_prime", s.t_prime);
        if (!(std::abs(s.v) < 1.0)) throw mk::ConfigError("config [boost] v: |v| < 1 required");
        c.boost = s;
    }

    Reader spectrum(tree, "spectrum");
    spectrum.integer("n", c.spectrum.n);
    spectrum.integer("n_prime", c.spectrum.n_prime);
    spectrum.count("modes", c.spectrum.modes);
    spectrum.number("half_width", c.spectrum.half_width);
    spectrum.number("dx", c.spectrum.dx);

    Reader verify(tree, "verify");
    verify.count("coercivity_samples", c.verify.coercivity_samples);
    verify.number("drift_t_end", c.verify.drift_t_end);
    verify.number("drift_dx", c.verify.drift_dx);
    verify.number("drift_dt", c.verify.drift_dt);

    Reader output(tree, "output");
    output.text("directory", c.output.directory);
    output.words("formats", c.output.formats);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw mk::ConfigError("config: cannot open '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["seed"] = c.seed;
    auto& p = j["potential"];
    p["kind"] = c.potential.kind;
    if (!c.potential.coeffs.empty()) p["coeffs"] = c.potential.coeffs;
    if (!c.potential.cos_coeffs.empty()) p["cos_coeffs"] = c.potential.cos_coeffs;
    if (!c.potential.sin_coeffs.empty()) p["sin_coeffs"] = c.potential.sin_coeffs;
    if (c.potential.search_interval) {
        p["search_interval"] = {c.potential.search_interval->first, c.potential.search_interval->second};
    }
    if (c.chain) {
        j["chain"] = {{"labels", c.chain->labels}, {"velocities", c.chain->velocities}, {"shifts", c.chain->shifts}};
    }
    j["grid"] = {{"x_min", c.grid.x_min},           {"x_max", c.grid.x_max}, {"dx", c.grid.dx},
                 {"dt", c.grid.dt},                 {"t0", c.grid.t0},       {"t_end", c.grid.t_end},
                 {"snapshot_every", c.grid.snapshot_every}, {"profile_dx", c.grid.profile_dx},
                 {"half_width", c.grid.half_width}};
    if (c.construct) {
        j["construct"] = {{"T", c.construct->T},           {"delta", c.construct->delta},
                          {"tol", c.construct->tol},       {"max_iter", c.construct->max_iter},
                          {"T_final", c.construct->T_final}, {"n0_threshold", c.construct->n0_threshold}};
    }
    if (c.boost) {
        j["boost"] = {{"v", c.boost->v},           {"t0", c.boost->t0},          {"x0", c.boost->x0},
                      {"window", c.boost->window}, {"t_prime", c.boost->t_prime}};
    }
    j["spectrum"] = {{"n", c.spectrum.n},
                     {"n_prime", c.spectrum.n_prime},
                     {"modes", c.spectrum.modes},
                     {"half_width", c.spectrum.half_width},
                     {"dx", c.spectrum.dx}};
    j["verify"] = {{"coercivity_samples", c.verify.coercivity_samples},
                   {"drift_t_end", c.verify.drift_t_end},
                   {"drift_dx", c.verify.drift_dx},
                   {"drift_dt", c.verify.drift_dt}};
    j["output"] = {{"directory", c.output.directory}, {"formats", c.output.formats}};
    return j;
}

const ChainSection& require_chain(const ExperimentConfig& config) {
    if (!config.chain) throw mk::ConfigError("config: missing [chain] section");
    return *config.chain;
}

const ConstructSection& require_construct(const ExperimentConfig& config) {
    if (!config.construct) throw mk::ConfigError("config: missing [construct] section");
    return *config.construct;
}

const BoostSection& require_boost(const ExperimentConfig& config) {
    if (!config.boost) throw mk::ConfigError("config: missing [boost] section");
    return *config.boost;
}

mk::Potential make_potential(const PotentialSection& s) {
    if (s.kind == "phi4") return mk::Potential::phi4();
    if (s.kind == "phi6") return mk::Potential::phi6();
    if (s.kind == "sine_gordon") return mk::Potential::sine_gordon();
    if (s.kind == "polynomial") return mk::Potential::polynomial(s.coeffs, *s.search_interval);
    if (s.kind == "trigonometric") return mk::Potential::trigonometric(s.cos_coeffs, s.sin_coeffs, *s.search_interval);
    throw mk::ConfigError("config [potential] kind: unknown potential '" + s.kind + "'");
}

std::pair<double, double> search_interval(const mk::Potential& model, const PotentialSection& section) {
    return section.search_interval ? *section.search_interval : model.search_interval();
}

mk::ProfileOptions profile_options(const ExperimentConfig& config) {
    mk::ProfileOptions o;
    o.dx = config.grid.profile_dx;
    o.half_width = config.grid.half_width;
    return o;
}

mk::ConstructConfig construct_config(const ExperimentConfig& config) {
    const ConstructSection& s = require_construct(config);
    mk::ConstructConfig c;
    c.dx = config.grid.dx;
    c.dt = config.grid.dt;
    c.x_min = config.grid.x_min;
    c.x_max = config.grid.x_max;
    c.T = s.T;
    c.delta = s.delta;
    c.tol = s.tol;
    c.max_iter = s.max_iter;
    c.T_final = s.T_final;
    c.n0_threshold = s.n0_threshold;
    return c;
}

}  // namespace mkt
