#ifndef MODELH_APP_INITIAL_HPP
#define MODELH_APP_INITIAL_HPP

#include <cstdint>

#include "modelh/app/config.hpp"

namespace modelh::app {

/// SplitMix64 output for position `counter` of stream `seed`. Stateless, so
/// cell (i, j) always receives the same number whatever the traversal order.
std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t counter);

/// Uniform double in [-1, 1) from the top 53 bits.
double uniform_pm1(std::uint64_t seed, std::uint64_t counter);

/// Phase field described by cfg.initial (before any truncation).
ScalarField<double> initial_phase(const RunConfig& cfg);

/// Initial velocity, discretely solenoidal.
MacField<double> initial_velocity(const RunConfig& cfg);

/// Mean-zero perturbation with max |.| = 1 for paired runs.
ScalarField<double> perturbation_shape(const RunConfig& cfg);

/// Outcome of the initial-datum step of a simulation.
struct InitialDatum {
    ScalarField<double> phi;
    bool truncated = false;      ///< the truncate-and-resolve solve was applied
    double max_abs_mu_tilde = 0; ///< max |-laplace(phi0) + F'(phi0)| before truncation
    double sep_delta = 0;
};

/// With the exact potential, phi0 is replaced by the truncate-and-resolve
/// datum at level truncation.k whenever |mu~0| exceeds k somewhere; data that
/// already satisfy the bound solve the truncated problem and are kept as is.
InitialDatum prepare_phase(const RunConfig& cfg, const ScalarField<double>& phi0);

} // namespace modelh::app

#endif
