#include "sqdati/config.hpp"

#include "sqdati/errors.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace sqdati {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const std::string& key) {
    size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for '" + key + "': " + s);
    }
    if (trim(s.substr(pos)) != "")
        throw ConfigError("trailing characters in value for '" + key + "': " + s);
    return v;
}

int parse_int(const std::string& s, const std::string& key) {
    const double v = parse_double(s, key);
    const int i = static_cast<int>(std::lround(v));
    if (std::abs(v - i) > 1e-9)
        throw ConfigError("expected integer for '" + key + "': " + s);
    return i;
}

// "a,b,c" or "start:stop:count".
std::vector<double> parse_grid(const std::string& s, const std::string& key) {
    std::vector<double> out;
    if (s.find(':') != std::string::npos) {
        std::istringstream is(s);
        std::string a, b, c;
        if (!std::getline(is, a, ':') || !std::getline(is, b, ':') ||
            !std::getline(is, c))
            throw ConfigError("bad linspace grid for '" + key + "': " + s);
        const double lo = parse_double(trim(a), key);
        const double hi = parse_double(trim(b), key);
        const int n = parse_int(trim(c), key);
        if (n < 1) throw ConfigError("grid count must be >= 1 for '" + key + "'");
        for (int i = 0; i < n; ++i)
            out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
        return out;
    }
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(item, key));
    }
    return out;
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    std::set<std::string> epsilon_keys;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("malformed section header at line " +
                                  std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        const std::string qual = section + "." + key;

        if (qual == "experiment.kind") cfg.kind = val;
        else if (qual == "experiment.cutoff") cfg.cutoff = parse_int(val, qual);
        else if (qual == "experiment.threads") cfg.threads = parse_int(val, qual);
        else if (qual == "experiment.out") cfg.out_dir = val;
        else if (qual == "laser.E0") cfg.laser.E0 = parse_double(val, qual);
        else if (qual == "laser.omega") cfg.laser.omega = parse_double(val, qual);
        else if (qual == "laser.g") cfg.laser.g = parse_double(val, qual);
        else if (qual == "laser.Ip") cfg.laser.Ip = parse_double(val, qual);
        else if (qual == "laser.n_cyc") cfg.laser.n_cyc = parse_int(val, qual);
        else if (qual == "squeeze.r") cfg.r = parse_double(val, qual);
        else if (qual == "squeeze.theta") cfg.theta = parse_double(val, qual);
        else if (qual == "squeeze.epsilon") {
            cfg.use_epsilon = true;
            cfg.epsilon = parse_double(val, qual);
        } else if (qual == "grids.v_f") cfg.v_f_grid = parse_grid(val, qual);
        else if (qual == "grids.t1") cfg.t1_grid = parse_grid(val, qual);
        else if (qual == "grids.epsilon") cfg.epsilon_grid = parse_grid(val, qual);
        else if (qual == "grids.epsilon_log10") {
            cfg.epsilon_grid.clear();
            for (const double x : parse_grid(val, qual))
                cfg.epsilon_grid.push_back(std::pow(10.0, x));
        } else if (qual == "grids.n_cyc") {
            cfg.ncyc_grid.clear();
            for (const double x : parse_grid(val, qual))
                cfg.ncyc_grid.push_back(static_cast<int>(std::lround(x)));
        } else if (qual == "tolerances.wigner_step")
            cfg.wigner_step = parse_double(val, qual);
        else if (qual == "tolerances.quad_tol")
            cfg.quad_tol = parse_double(val, qual);
        else
            throw ConfigError("unknown config key '" + qual + "' at line " +
                              std::to_string(lineno));
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

namespace {

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += num(v[i]);
    }
    return s;
}

} // namespace

std::string canonical_config_text(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "[experiment]\n"
       << "kind = " << cfg.kind << "\n"
       << "cutoff = " << cfg.cutoff << "\n"
       << "threads = " << cfg.threads << "\n"
       << "out = " << cfg.out_dir << "\n\n"
       << "[laser]\n"
       << "E0 = " << num(cfg.laser.E0) << "\n"
       << "omega = " << num(cfg.laser.omega) << "\n"
       << "g = " << num(cfg.laser.g) << "\n"
       << "Ip = " << num(cfg.laser.Ip) << "\n"
       << "n_cyc = " << cfg.laser.n_cyc << "\n\n"
       << "[squeeze]\n";
    if (cfg.use_epsilon) os << "epsilon = " << num(cfg.epsilon) << "\n";
    else os << "r = " << num(cfg.r) << "\n";
    os << "theta = " << num(cfg.theta) << "\n\n[grids]\n";
    if (!cfg.v_f_grid.empty()) os << "v_f = " << join(cfg.v_f_grid) << "\n";
    if (!cfg.t1_grid.empty()) os << "t1 = " << join(cfg.t1_grid) << "\n";
    if (!cfg.epsilon_grid.empty()) os << "epsilon = " << join(cfg.epsilon_grid) << "\n";
    if (!cfg.ncyc_grid.empty()) {
        os << "n_cyc = ";
        for (size_t i = 0; i < cfg.ncyc_grid.size(); ++i)
            os << (i ? "," : "") << cfg.ncyc_grid[i];
        os << "\n";
    }
    os << "\n[tolerances]\n"
       << "wigner_step = " << num(cfg.wigner_step) << "\n"
       << "quad_tol = " << num(cfg.quad_tol) << "\n";
    return os.str();
}

void validate_config(const ExperimentConfig& cfg) {
    static const std::set<std::string> kinds = {
        "purity-scan",    "displacement-compare", "ionization-times",
        "negativity-scan", "entropy-scan",        "wigner-dump"};
    if (!kinds.count(cfg.kind))
        throw ConfigError("unknown experiment kind: '" + cfg.kind + "'");
    if (cfg.cutoff < 50 || cfg.cutoff > 400)
        throw ConfigError("cutoff out of range");
    if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
    if (cfg.wigner_step <= 0.0 || cfg.quad_tol <= 0.0)
        throw ConfigError("tolerances must be > 0");
    if (cfg.laser.E0 <= 0 || cfg.laser.omega <= 0 || cfg.laser.Ip <= 0 ||
        cfg.laser.n_cyc < 1 || cfg.laser.g < 0)
        throw ConfigError("invalid laser parameters");
    if (cfg.use_epsilon && cfg.epsilon < 0)
        throw ConfigError("epsilon must be >= 0");
    if (!cfg.use_epsilon && cfg.r < 0) throw ConfigError("r must be >= 0");
    if ((cfg.kind == "negativity-scan" || cfg.kind == "ionization-times" ||
         cfg.kind == "wigner-dump") &&
        cfg.v_f_grid.empty())
        throw ConfigError("experiment '" + cfg.kind + "' requires grids.v_f");
    if (cfg.kind == "entropy-scan" &&
        (cfg.epsilon_grid.empty() || cfg.ncyc_grid.empty()))
        throw ConfigError("entropy-scan requires grids.epsilon and grids.n_cyc");
    if (cfg.kind == "ionization-times" && cfg.epsilon_grid.empty())
        throw ConfigError("ionization-times requires grids.epsilon");
}

} // namespace sqdati
