#include "wegnerlab/tensor.hpp"

#include "wegnerlab/errors.hpp"

namespace wl {

SumsetSpectrum sumset_spectrum(std::span<Spectrum const> spectra)
{
  if (spectra.empty()) { throw ArgumentError("sumset of an empty sequence of spectra"); }
  Eigen::VectorXd sums = spectra.front().eigenvalues();
  for (auto const &term : spectra.subspan(1)) {
    Eigen::VectorXd next(sums.size() * term.dim());
    Eigen::Index    k = 0;
    for (Eigen::Index i = 0; i < sums.size(); ++i) {
      for (Eigen::Index j = 0; j < term.dim(); ++j) {
        next(k++) = sums(i) + term[j];
      }
    }
    sums = std::move(next);
  }
  return {std::vector<Spectrum>(spectra.begin(), spectra.end()), Spectrum(std::move(sums))};
}

std::vector<Spectrum> particle_spectra(Cube const &cube, FieldSample const &field)
{
  std::vector<Spectrum> out;
  out.reserve(static_cast<std::size_t>(cube.n()));
  for (int i = 0; i < cube.n(); ++i) {
    out.push_back(full_spectrum(build_hamiltonian(cube.particle_cube(i), field, NoInteraction{}, 0.0)));
  }
  return out;
}

double decomposition_deviation(SymMatrix const &direct, Cube const &cube, FieldSample const &field)
{
  auto const terms  = particle_spectra(cube, field);
  auto const sumset = sumset_spectrum(terms);
  auto const exact  = full_spectrum(direct);
  if (exact.dim() != sumset.sums.dim()) { throw DimensionError("direct operator does not match the cube"); }
  return (exact.eigenvalues() - sumset.sums.eigenvalues()).cwiseAbs().maxCoeff();
}

double verify_decomposition(Cube const &cube, FieldSample const &field)
{
  return decomposition_deviation(build_hamiltonian(cube, field, NoInteraction{}, 0.0), cube, field);
}

} // namespace wl
