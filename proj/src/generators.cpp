#include "ekcg/harness/generators.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace ekcg::harness {

namespace {

struct Grid {
  Index nx, ny, nz;
  Index size() const { return nx * ny * nz; }
  Index id(Index x, Index y, Index z) const { return x + nx * (y + ny * z); }
};

// Assembles −div(K grad u) with per-face conductivities. face(x,y,z,axis,dir)
// returns the conductivity of the face of cell (x,y,z) in direction dir=±1
// along axis; faces on the boundary couple to a zero Dirichlet value.
Matrix assemble(const Grid& g, const std::function<double(Index, Index, Index, int, int)>& face) {
  std::vector<Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(g.size()) * 7);
  const std::array<Index, 3> dims{g.nx, g.ny, g.nz};
  for (Index z = 0; z < g.nz; ++z)
    for (Index y = 0; y < g.ny; ++y)
      for (Index x = 0; x < g.nx; ++x) {
        const Index row = g.id(x, y, z);
        const std::array<Index, 3> pos{x, y, z};
        double diag = 0.0;
        for (int axis = 0; axis < 3; ++axis) {
          if (dims[static_cast<std::size_t>(axis)] == 1) continue;
          for (int dir : {-1, 1}) {
            const double k = face(x, y, z, axis, dir);
            diag += k;
            std::array<Index, 3> nb = pos;
            nb[static_cast<std::size_t>(axis)] += dir;
            if (nb[static_cast<std::size_t>(axis)] < 0 ||
                nb[static_cast<std::size_t>(axis)] >= dims[static_cast<std::size_t>(axis)])
              continue;
            entries.push_back({row, g.id(nb[0], nb[1], nb[2]), -k});
          }
        }
        entries.push_back({row, row, diag});
      }
  return Matrix::from_triplets(g.size(), entries);
}

void check_dims(Index nx, Index ny, Index nz) {
  if (nx < 2 || ny < 2 || nz < 1) throw InvalidArgument("generator: grid dimensions must be >= 2");
}

double mean(double a, double b) { return 0.5 * (a + b); }

}  // namespace

Matrix gen_poisson2d(Index nx, Index ny) {
  check_dims(nx, ny, 1);
  return assemble({nx, ny, 1}, [](Index, Index, Index, int, int) { return 1.0; });
}

Matrix gen_poisson3d(Index nx, Index ny, Index nz) {
  check_dims(nx, ny, nz);
  if (nz < 2) throw InvalidArgument("gen_poisson3d: nz must be >= 2");
  return assemble({nx, ny, nz}, [](Index, Index, Index, int, int) { return 1.0; });
}

Matrix gen_aniso3d(Index nx, Index ny, Index nz, double contrast) {
  check_dims(nx, ny, nz);
  if (nz < 2) throw InvalidArgument("gen_aniso3d: nz must be >= 2");
  if (!(contrast >= 1.0)) throw InvalidArgument("gen_aniso3d: contrast must be >= 1");
  const std::array<double, 3> layer{1.0, contrast, 1.0 / contrast};
  return assemble({nx, ny, nz}, [&](Index, Index, Index z, int axis, int) {
    return axis == 2 ? 1.0 : layer[static_cast<std::size_t>(z % 3)];
  });
}

Matrix gen_skyscraper(Index nx, Index ny, Index nz, double contrast) {
  check_dims(nx, ny, nz);
  if (!(contrast >= 1.0)) throw InvalidArgument("gen_skyscraper: contrast must be >= 1");
  const Grid g{nx, ny, nz};
  const std::array<Index, 3> dims{nx, ny, nz};
  std::vector<double> kappa(static_cast<std::size_t>(g.size()), 1.0);
  for (Index z = 0; z < nz; ++z)
    for (Index y = 0; y < ny; ++y)
      for (Index x = 0; x < nx; ++x) {
        const std::array<Index, 3> pos{x, y, z};
        bool high = true;
        for (int d = 0; d < 3; ++d) {
          if (dims[static_cast<std::size_t>(d)] == 1) continue;
          const double c = (static_cast<double>(pos[static_cast<std::size_t>(d)]) + 0.5) /
                           static_cast<double>(dims[static_cast<std::size_t>(d)]);
          if (static_cast<long>(std::floor(10.0 * c)) % 2 != 0) high = false;
        }
        if (high) {
          const double yc = (static_cast<double>(y) + 0.5) / static_cast<double>(ny);
          kappa[static_cast<std::size_t>(g.id(x, y, z))] = 1.0 + (contrast - 1.0) * (std::floor(10.0 * yc) + 1.0);
        }
      }
  return assemble(g, [&](Index x, Index y, Index z, int axis, int dir) {
    const double own = kappa[static_cast<std::size_t>(g.id(x, y, z))];
    std::array<Index, 3> nb{x, y, z};
    nb[static_cast<std::size_t>(axis)] += dir;
    if (nb[static_cast<std::size_t>(axis)] < 0 || nb[static_cast<std::size_t>(axis)] >= dims[static_cast<std::size_t>(axis)])
      return own;
    return mean(own, kappa[static_cast<std::size_t>(g.id(nb[0], nb[1], nb[2]))]);
  });
}

}  // namespace ekcg::harness
