#pragma once

#include "wegnerlab/lattice.hpp"
#include "wegnerlab/randomfield.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <iosfwd>
#include <utility>
#include <variant>

namespace wl {

struct NoInteraction
{
  bool operator==(NoInteraction const &) const = default;
};

/// U(x) = amplitude * #{(i, j) : i < j, |x_i - x_j| <= range}.
struct PairContact
{
  int    range     = 0;
  double amplitude = 1.0;
  bool operator==(PairContact const &) const = default;
};

using InteractionSpec = std::variant<NoInteraction, PairContact>;

std::string describe(InteractionSpec const &inter);

/// U(x) at an n-particle configuration.
double interaction_value(Site const &x, InteractionSpec const &inter);

/// max_{x in cube} |U(x)|, the operator norm of U restricted to the cube.
double interaction_sup_norm(Cube const &cube, InteractionSpec const &inter);

/// Real symmetric matrix, dense up to kDenseThreshold rows and compressed
/// sparse above.
class SymMatrix
{
public:
  using Dense  = Eigen::MatrixXd;
  using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  static constexpr Eigen::Index kDenseThreshold = 4096;

  explicit SymMatrix(Dense m);
  explicit SymMatrix(Sparse m);

  Eigen::Index dim() const;
  bool is_dense() const { return std::holds_alternative<Dense>(storage_); }
  Dense const &dense() const { return std::get<Dense>(storage_); }
  Sparse const &sparse() const { return std::get<Sparse>(storage_); }

  double coeff(Eigen::Index i, Eigen::Index j) const;
  Eigen::VectorXd diagonal() const;
  Dense to_dense() const;

  /// max row sum of |a_ij|
  double inf_norm() const;
  /// [min_i (a_ii - R_i), max_i (a_ii + R_i)] with R_i the off-diagonal row sum.
  std::pair<double, double> gershgorin() const;
  /// max |i - j| over nonzero entries.
  Eigen::Index half_bandwidth() const;

  /// Visits every stored nonzero as (row, col, value), row-major.
  template <typename F>
  void for_each_nonzero(F &&f) const;

private:
  std::variant<Dense, Sparse> storage_;
};

/// Assembles -Delta + V + hU on the cube with Dirichlet boundary conditions:
/// diagonal 2nd + sum_j V(x_j) + hU(x), hopping -1 between cube sites at
/// one-norm distance 1. Throws CoverageError if the field misses a point.
SymMatrix build_hamiltonian(Cube const &cube, FieldSample const &field, InteractionSpec const &inter, double h);

/// Text dump: two '#' header lines, then one "row col value" line per
/// nonzero (0-based, both triangles, row-major, %.17g values).
void write_matrix(std::ostream &os, SymMatrix const &m);

template <typename F>
void SymMatrix::for_each_nonzero(F &&f) const
{
  if (is_dense()) {
    auto const &m = dense();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (m(i, j) != 0.0) { f(i, j, m(i, j)); }
      }
    }
  } else {
    auto const &m = sparse();
    for (Eigen::Index i = 0; i < m.outerSize(); ++i) {
      for (Sparse::InnerIterator it(m, i); it; ++it) {
        if (it.value() != 0.0) { f(it.row(), it.col(), it.value()); }
      }
    }
  }
}

} // namespace wl
