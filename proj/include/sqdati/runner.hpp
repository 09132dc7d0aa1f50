#ifndef SQDATI_RUNNER_HPP
#define SQDATI_RUNNER_HPP

#include "sqdati/config.hpp"

namespace sqdati {

// Executes the configured experiment; writes <out>/<kind>.csv and a
// <out>/<kind>.meta sidecar whose body re-parses to the same config.
// Throws ConfigError / ComputeError.
void run_experiment(const ExperimentConfig& cfg);

// Recomputes a 5-point subsample at cutoff+100 (and halved Wigner step or
// doubled quadrature order, as applicable) and writes <out>/<kind>.check with
// baseline values, refined values and the max absolute deviation.
void convergence_report(const ExperimentConfig& cfg);

} // namespace sqdati

#endif
