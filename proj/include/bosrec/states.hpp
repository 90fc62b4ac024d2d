#pragma once

#include "bosrec/density_matrix.hpp"

namespace bosrec {

// Direct Fock-basis constructions of the standard single-mode states.
// These are built entry-by-entry from the textbook expressions and serve
// as the independent comparison route for everything the reconstruction
// and closed-form paths produce.

DensityMatrix fock_state(int n, int cutoff);

/// |alpha><alpha| truncated: entries exp(-|a|^2) a^n conj(a)^m / sqrt(n!m!).
DensityMatrix coherent_state(Complex alpha, int cutoff);

/// Diagonal Boltzmann mixture (1-e^-beta) e^{-beta n}; beta > 0.
DensityMatrix thermal_state(double beta, int cutoff);

/// Random Hermitian PSD unit-trace matrix with full support on
/// 0..support (dimension support+1), from a seeded Gaussian factor.
DensityMatrix random_density_matrix(int support, unsigned seed, int cutoff = -1);

}  // namespace bosrec
