#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace wl {

/// A configuration x = (x_1, ..., x_n) of n particles in Z^d, stored flat.
/// Particle i occupies coords[i*d .. (i+1)*d - 1].
class Site
{
public:
  Site(int n, int d);
  Site(int n, int d, std::vector<int> coords);

  int n() const { return n_; }
  int d() const { return d_; }
  int size() const { return n_ * d_; }

  std::span<const int> coords() const { return coords_; }
  std::span<int> coords() { return coords_; }
  int operator[](int k) const { return coords_[static_cast<std::size_t>(k)]; }
  int &operator[](int k) { return coords_[static_cast<std::size_t>(k)]; }

  /// Position of particle i as a single-particle site (n = 1).
  Site particle(int i) const;

  bool operator==(Site const &other) const = default;
  auto operator<=>(Site const &other) const = default;

private:
  int              n_;
  int              d_;
  std::vector<int> coords_;
};

/// Largest coordinate difference |a - b| (sup norm on Z^{nd}).
int sup_norm(Site const &a, Site const &b);
/// Sum of coordinate differences |a - b|_1.
int one_norm(Site const &a, Site const &b);

/// The n-particle cube {y : |y - center| <= radius}. Holds only center and
/// radius; sites are generated on demand.
class Cube
{
public:
  Cube(Site center, int radius);

  Site const &center() const { return center_; }
  int radius() const { return radius_; }
  int n() const { return center_.n(); }
  int d() const { return center_.d(); }

  /// Number of sites per axis, 2L + 1.
  int side() const { return 2 * radius_ + 1; }
  /// (2L+1)^{nd}
  std::int64_t site_count() const;

  bool contains(Site const &s) const;

  /// Lexicographic ordinal of a site of the cube. O(nd).
  std::int64_t index_of(Site const &s) const;
  /// Inverse of index_of.
  Site site_at(std::int64_t index) const;

  /// Offset between ordinals of neighbours along flat coordinate k.
  std::int64_t stride(int k) const;

  /// Single-particle cube C^{(1)}_L(x_i).
  Cube particle_cube(int i) const;

private:
  Site center_;
  int  radius_;
};

/// All sites of the cube in lexicographic order of the flat coordinates.
std::vector<Site> enumerate_sites(Cube const &cube);

} // namespace wl
