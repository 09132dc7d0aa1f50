#ifndef SQDATI_CONFIG_HPP
#define SQDATI_CONFIG_HPP

#include "sqdati/field.hpp"

#include <string>
#include <vector>

namespace sqdati {

// Parsed experiment description. The config file is INI-style:
// [section] headers, key = value lines, '#' or ';' comments. Grids accept
// either comma-separated values or start:stop:count linspace shorthand.
struct ExperimentConfig {
    std::string kind; // purity-scan | displacement-compare | ionization-times |
                      // negativity-scan | entropy-scan | wigner-dump
    LaserParams laser;

    // Squeezing: either (r, theta) or (epsilon, theta) with derived r.
    double r = 0.0;
    double theta = 0.0;
    bool use_epsilon = false;
    double epsilon = 0.0;

    std::vector<double> v_f_grid;
    std::vector<double> epsilon_grid;
    std::vector<double> t1_grid;
    std::vector<int> ncyc_grid;

    int cutoff = 200;
    int threads = 1;
    std::string out_dir = ".";
    double wigner_step = 0.1;
    double quad_tol = 1e-10;

    bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Canonical INI emission; parse_config_text(canonical_config_text(c)) == c.
std::string canonical_config_text(const ExperimentConfig& cfg);

// Throws ConfigError on invariant violations (unknown kind, cutoff out of
// range, empty required grids, nonpositive tolerances).
void validate_config(const ExperimentConfig& cfg);

} // namespace sqdati

#endif
