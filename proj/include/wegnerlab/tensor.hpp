#pragma once

#include "wegnerlab/hamiltonian.hpp"
#include "wegnerlab/spectral.hpp"

#include <span>
#include <vector>

namespace wl {

/// Spectrum of a Kronecker sum H_1 (+) ... (+) H_n: every sum
/// lambda^{(1)}_{j_1} + ... + lambda^{(n)}_{j_n}, with multiplicity.
struct SumsetSpectrum
{
  std::vector<Spectrum> terms;
  Spectrum              sums;
};

/// Throws ArgumentError on an empty sequence.
SumsetSpectrum sumset_spectrum(std::span<Spectrum const> spectra);

/// Spectra of the n single-particle Dirichlet Hamiltonians H^{(1)} on
/// C^{(1)}_L(x_i), all reading the same field.
std::vector<Spectrum> particle_spectra(Cube const &cube, FieldSample const &field);

/// max_k |sumset_k - direct_k| over rank-matched sorted eigenvalues, with the
/// direct h = 0 operator supplied by the caller.
double decomposition_deviation(SymMatrix const &direct, Cube const &cube, FieldSample const &field);

/// Same, with the direct operator assembled here (h = 0).
double verify_decomposition(Cube const &cube, FieldSample const &field);

} // namespace wl
