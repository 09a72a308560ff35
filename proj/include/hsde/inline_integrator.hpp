#pragma once

#include "hsde/solver.hpp"

namespace hsde {

/// Independent full-equation Euler integrator used as the agreement oracle.
/// This is deliberately a second implementation on its own conventions, not
/// a wrapper over the interlacing solver: within each grid step it splits at
/// exact event times, spreads the step's Brownian increment proportionally
/// over the sub-intervals with the diffusion re-evaluated at the running
/// state, and applies small and large jumps at their exact arrival times.
/// Both schemes discretize the same equation, so their paths must contract
/// toward each other as the grid refines; that agreement is the evidence the
/// uniqueness and interlacing checks rely on.
PathRecord inline_full_euler(const SolveProblem& prob, const NoiseRealization& noise);

}  // namespace hsde
