#pragma once

#include "wegnerlab/hamiltonian.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <optional>

namespace wl {

/// Sorted (non-decreasing) eigenvalues of a finite-volume operator.
class Spectrum
{
public:
  Spectrum() = default;
  /// Sorts its input.
  explicit Spectrum(Eigen::VectorXd eigenvalues);

  Eigen::VectorXd const &eigenvalues() const { return values_; }
  Eigen::Index dim() const { return values_.size(); }
  double operator[](Eigen::Index k) const { return values_(k); }
  double min() const { return values_(0); }
  double max() const { return values_(values_.size() - 1); }

  /// Number of eigenvalues strictly below E.
  Eigen::Index count_below(double E) const;

private:
  Eigen::VectorXd values_;
};

/// Eigenvalues of a dense symmetric matrix (tridiagonalisation + implicit QR).
/// Throws CapacityError above the dense threshold; use count_below there.
Spectrum full_spectrum(SymMatrix const &A);

template <typename Derived>
Spectrum full_spectrum(Eigen::MatrixBase<Derived> const &A)
{
  using Matrix = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(Matrix(A), Eigen::EigenvaluesOnly);
  return Spectrum(solver.eigenvalues().template cast<double>());
}

struct CountResult
{
  Eigen::Index count = 0;
  /// Micro-shift actually applied to E after a near-zero pivot, else 0.
  double shift = 0.0;
};

namespace detail {

/// Lower band of a symmetric matrix, LAPACK layout: band(k, j) = A(j + k, j).
template <typename Scalar>
using Band = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Negative pivots of the unpivoted LDL^T of (A - shift I), or nullopt if a
/// pivot falls below `pivot_floor` in magnitude.
template <typename Scalar>
std::optional<Eigen::Index> band_inertia(Band<Scalar> const &band, Scalar shift, Scalar pivot_floor)
{
  Eigen::Index const n = band.cols();
  Eigen::Index const b = band.rows() - 1;
  Band<Scalar>       w = band;
  w.row(0).array() -= shift;
  Eigen::Index negative = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Scalar const pivot = w(0, j);
    if (!(std::abs(pivot) >= pivot_floor)) { return std::nullopt; }
    if (pivot < 0) { ++negative; }
    Eigen::Index const m = std::min(b, n - 1 - j);
    for (Eigen::Index i = 1; i <= m; ++i) {
      Scalar const l = w(i, j) / pivot;
      if (l == Scalar(0)) { continue; }
      for (Eigen::Index k = 1; k <= i; ++k) {
        w(i - k, j + k) -= l * w(k, j);
      }
    }
  }
  return negative;
}

Band<double> lower_band(SymMatrix const &A);

} // namespace detail

/// Eigenvalues strictly below E from the inertia of A - E I (Sylvester). A
/// pivot with |pivot| < 1e-14 (1 + |A|_inf) triggers a deterministic retry at
/// E + k * 1e-12 (1 + |A|_inf), k = 1, 2, ...
CountResult count_below(SymMatrix const &A, double E);

template <typename Derived>
CountResult count_below(Eigen::MatrixBase<Derived> const &A, double E)
{
  return count_below(SymMatrix(SymMatrix::Dense(A.template cast<double>())), E);
}

/// min |lambda - E|, read off a computed spectrum.
double dist_to_spectrum(Spectrum const &spectrum, double E);

/// Dense spectrum when dim <= kDenseThreshold, otherwise bisection.
double dist_to_spectrum(SymMatrix const &A, double E);

/// Locates the eigenvalues adjacent to E by bisection on count_below, each to
/// width 1e-12 max(1, |x|).
double dist_by_bisection(SymMatrix const &A, double E);

/// |(A - E)^{-1}| = 1 / dist(E, sigma(A)); nullopt when E is on the spectrum.
std::optional<double> resolvent_norm(Spectrum const &spectrum, double E);
std::optional<double> resolvent_norm(SymMatrix const &A, double E);

/// Smallest singular value of A - E I, computed by SVD (independent of the
/// eigenvalue route).
template <typename Derived>
double smallest_singular_value(Eigen::MatrixBase<Derived> const &A, double E)
{
  Eigen::MatrixXd shifted = A.template cast<double>();
  shifted.diagonal().array() -= E;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(shifted);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

double smallest_singular_value(SymMatrix const &A, double E);

} // namespace wl
