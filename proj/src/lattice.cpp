#include "wegnerlab/lattice.hpp"

#include "wegnerlab/errors.hpp"

#include <cstdlib>
#include <string>

namespace wl {

Site::Site(int n, int d)
  : Site(n, d, std::vector<int>(static_cast<std::size_t>(n > 0 && d > 0 ? n * d : 0), 0))
{
}

Site::Site(int n, int d, std::vector<int> coords)
  : n_(n)
  , d_(d)
  , coords_(std::move(coords))
{
  if (n < 1 || d < 1) { throw DimensionError("site needs n >= 1 and d >= 1"); }
  if (coords_.size() != static_cast<std::size_t>(n * d)) {
    throw DimensionError("site has " + std::to_string(coords_.size()) + " coordinates, expected n*d = " +
                         std::to_string(n * d));
  }
}

Site Site::particle(int i) const
{
  if (i < 0 || i >= n_) { throw DimensionError("particle index out of range"); }
  auto first = coords_.begin() + static_cast<std::ptrdiff_t>(i * d_);
  return Site(1, d_, std::vector<int>(first, first + d_));
}

namespace {
void check_same_shape(Site const &a, Site const &b)
{
  if (a.n() != b.n() || a.d() != b.d()) {
    throw DimensionError("sites differ in shape: (n=" + std::to_string(a.n()) + ", d=" + std::to_string(a.d()) +
                         ") vs (n=" + std::to_string(b.n()) + ", d=" + std::to_string(b.d()) + ")");
  }
}
} // namespace

int sup_norm(Site const &a, Site const &b)
{
  check_same_shape(a, b);
  int result = 0;
  for (int k = 0; k < a.size(); ++k) {
    result = std::max(result, std::abs(a[k] - b[k]));
  }
  return result;
}

int one_norm(Site const &a, Site const &b)
{
  check_same_shape(a, b);
  int result = 0;
  for (int k = 0; k < a.size(); ++k) {
    result += std::abs(a[k] - b[k]);
  }
  return result;
}

Cube::Cube(Site center, int radius)
  : center_(std::move(center))
  , radius_(radius)
{
  if (radius < 0) { throw ArgumentError("cube radius must be non-negative"); }
}

std::int64_t Cube::site_count() const
{
  std::int64_t count = 1;
  for (int k = 0; k < center_.size(); ++k) {
    count *= side();
  }
  return count;
}

bool Cube::contains(Site const &s) const
{
  return s.n() == n() && s.d() == d() && sup_norm(s, center_) <= radius_;
}

std::int64_t Cube::index_of(Site const &s) const
{
  if (!contains(s)) { throw ArgumentError("site is not in the cube"); }
  std::int64_t index = 0;
  for (int k = 0; k < s.size(); ++k) {
    index = index * side() + (s[k] - center_[k] + radius_);
  }
  return index;
}

Site Cube::site_at(std::int64_t index) const
{
  if (index < 0 || index >= site_count()) { throw ArgumentError("site ordinal out of range"); }
  Site s = center_;
  for (int k = s.size() - 1; k >= 0; --k) {
    s[k] = center_[k] - radius_ + static_cast<int>(index % side());
    index /= side();
  }
  return s;
}

std::int64_t Cube::stride(int k) const
{
  std::int64_t result = 1;
  for (int j = k + 1; j < center_.size(); ++j) {
    result *= side();
  }
  return result;
}

Cube Cube::particle_cube(int i) const { return Cube(center_.particle(i), radius_); }

std::vector<Site> enumerate_sites(Cube const &cube)
{
  std::vector<Site> sites;
  sites.reserve(static_cast<std::size_t>(cube.site_count()));
  Site s = cube.center();
  for (int k = 0; k < s.size(); ++k) {
    s[k] -= cube.radius();
  }
  // odometer over the flat coordinates, last coordinate fastest
  while (true) {
    sites.push_back(s);
    int k = s.size() - 1;
    while (k >= 0 && s[k] == cube.center()[k] + cube.radius()) {
      s[k] = cube.center()[k] - cube.radius();
      --k;
    }
    if (k < 0) { break; }
    ++s[k];
  }
  return sites;
}

} // namespace wl
