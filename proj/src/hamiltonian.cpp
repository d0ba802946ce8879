#include "wegnerlab/hamiltonian.hpp"

#include "wegnerlab/errors.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace wl {

std::string describe(InteractionSpec const &inter)
{
  if (auto const *pc = std::get_if<PairContact>(&inter)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "pair_contact(range=%d,amplitude=%.17g)", pc->range, pc->amplitude);
    return buf;
  }
  return "none";
}

double interaction_value(Site const &x, InteractionSpec const &inter)
{
  auto const *pc = std::get_if<PairContact>(&inter);
  if (pc == nullptr) { return 0.0; }
  int pairs = 0;
  for (int i = 0; i < x.n(); ++i) {
    for (int j = i + 1; j < x.n(); ++j) {
      int dist = 0;
      for (int k = 0; k < x.d(); ++k) {
        dist = std::max(dist, std::abs(x[i * x.d() + k] - x[j * x.d() + k]));
      }
      if (dist <= pc->range) { ++pairs; }
    }
  }
  return pc->amplitude * pairs;
}

double interaction_sup_norm(Cube const &cube, InteractionSpec const &inter)
{
  if (std::holds_alternative<NoInteraction>(inter) || cube.n() < 2) { return 0.0; }
  double result = 0.0;
  for (auto const &s : enumerate_sites(cube)) {
    result = std::max(result, std::abs(interaction_value(s, inter)));
  }
  return result;
}

SymMatrix::SymMatrix(Dense m)
  : storage_(std::move(m))
{
  if (dense().rows() != dense().cols()) { throw DimensionError("symmetric matrix must be square"); }
}

SymMatrix::SymMatrix(Sparse m)
  : storage_(std::move(m))
{
  if (sparse().rows() != sparse().cols()) { throw DimensionError("symmetric matrix must be square"); }
}

Eigen::Index SymMatrix::dim() const { return is_dense() ? dense().rows() : sparse().rows(); }

double SymMatrix::coeff(Eigen::Index i, Eigen::Index j) const
{
  return is_dense() ? dense()(i, j) : sparse().coeff(i, j);
}

Eigen::VectorXd SymMatrix::diagonal() const
{
  return is_dense() ? Eigen::VectorXd(dense().diagonal()) : Eigen::VectorXd(sparse().diagonal());
}

SymMatrix::Dense SymMatrix::to_dense() const { return is_dense() ? dense() : Dense(sparse()); }

double SymMatrix::inf_norm() const
{
  if (is_dense()) { return dense().cwiseAbs().rowwise().sum().maxCoeff(); }
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(dim());
  for_each_nonzero([&](Eigen::Index i, Eigen::Index, double v) { rows(i) += std::abs(v); });
  return rows.maxCoeff();
}

std::pair<double, double> SymMatrix::gershgorin() const
{
  Eigen::VectorXd radius = Eigen::VectorXd::Zero(dim());
  Eigen::VectorXd diag   = Eigen::VectorXd::Zero(dim());
  for_each_nonzero([&](Eigen::Index i, Eigen::Index j, double v) {
    if (i == j) {
      diag(i) = v;
    } else {
      radius(i) += std::abs(v);
    }
  });
  return {(diag - radius).minCoeff(), (diag + radius).maxCoeff()};
}

Eigen::Index SymMatrix::half_bandwidth() const
{
  Eigen::Index band = 0;
  for_each_nonzero([&](Eigen::Index i, Eigen::Index j, double) { band = std::max(band, std::abs(i - j)); });
  return band;
}

SymMatrix build_hamiltonian(Cube const &cube, FieldSample const &field, InteractionSpec const &inter, double h)
{
  int const          n    = cube.n();
  int const          d    = cube.d();
  int const          nd   = n * d;
  int const          L    = cube.radius();
  Eigen::Index const dim  = static_cast<Eigen::Index>(cube.site_count());
  double const       base = 2.0 * nd;

  // V on each particle's single-particle cube, indexed by local ordinal
  std::vector<Eigen::VectorXd> potential(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Cube const single = cube.particle_cube(i);
    auto const points = enumerate_sites(single);
    potential[static_cast<std::size_t>(i)].resize(static_cast<Eigen::Index>(points.size()));
    for (std::size_t j = 0; j < points.size(); ++j) {
      potential[static_cast<std::size_t>(i)](static_cast<Eigen::Index>(j)) = field.value(points[j]);
    }
  }

  bool const interacting = !std::holds_alternative<NoInteraction>(inter) && h != 0.0;
  auto const sites       = enumerate_sites(cube);

  std::vector<std::int64_t> strides(static_cast<std::size_t>(nd));
  for (int k = 0; k < nd; ++k) {
    strides[static_cast<std::size_t>(k)] = cube.stride(k);
  }

  auto diagonal_at = [&](Site const &s) {
    double value = 0.0;
    for (int i = 0; i < n; ++i) {
      Eigen::Index local = 0;
      for (int k = 0; k < d; ++k) {
        local = local * cube.side() + (s[i * d + k] - cube.center()[i * d + k] + L);
      }
      value += potential[static_cast<std::size_t>(i)](local);
    }
    if (interacting) { value += h * interaction_value(s, inter); }
    return base + value;
  };

  if (dim <= SymMatrix::kDenseThreshold) {
    SymMatrix::Dense m = SymMatrix::Dense::Zero(dim, dim);
    for (Eigen::Index row = 0; row < dim; ++row) {
      Site const &s = sites[static_cast<std::size_t>(row)];
      m(row, row)   = diagonal_at(s);
      for (int k = 0; k < nd; ++k) {
        if (s[k] < cube.center()[k] + L) {
          Eigen::Index const col = row + strides[static_cast<std::size_t>(k)];
          m(row, col)            = -1.0;
          m(col, row)            = -1.0;
        }
      }
    }
    return SymMatrix(std::move(m));
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(dim) * static_cast<std::size_t>(2 * nd + 1));
  for (Eigen::Index row = 0; row < dim; ++row) {
    Site const &s = sites[static_cast<std::size_t>(row)];
    triplets.emplace_back(row, row, diagonal_at(s));
    for (int k = 0; k < nd; ++k) {
      if (s[k] < cube.center()[k] + L) {
        Eigen::Index const col = row + strides[static_cast<std::size_t>(k)];
        triplets.emplace_back(row, col, -1.0);
        triplets.emplace_back(col, row, -1.0);
      }
    }
  }
  SymMatrix::Sparse m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return SymMatrix(std::move(m));
}

void write_matrix(std::ostream &os, SymMatrix const &m)
{
  os << "# wegnerlab matrix v1\n";
  os << "# dim " << m.dim() << "\n";
  char buf[96];
  m.for_each_nonzero([&](Eigen::Index i, Eigen::Index j, double v) {
    std::snprintf(buf, sizeof buf, "%lld %lld %.17g\n", static_cast<long long>(i), static_cast<long long>(j), v);
    os << buf;
  });
}

} // namespace wl
