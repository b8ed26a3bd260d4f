#include "fissure/topology.hpp"

#include <bit>
#include <vector>

#include "fissure/parallel.hpp"

namespace fissure {

namespace {

bool voxel(const BinaryVolume& q, std::ptrdiff_t x, std::ptrdiff_t y, std::ptrdiff_t z) {
  return q.contains(x, y, z) &&
         q(static_cast<std::size_t>(x), static_cast<std::size_t>(y), static_cast<std::size_t>(z));
}

constexpr int bit(int i, int j, int k) { return i + 2 * j + 4 * k; }

/// 8 x (vertex - edges/2 + faces/4 - cubes/8) for the cell elements incident
/// to the vertex shared by a 2x2x2 block of voxels.
constexpr int local_euler_x8(unsigned config) {
  auto on = [config](int i, int j, int k) { return (config >> bit(i, j, k)) & 1u; };
  int vertex = config != 0 ? 1 : 0;
  int edges = 0;
  for (int side = 0; side < 2; ++side) {
    bool ex = false, ey = false, ez = false;
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        ex = ex || on(side, a, b);
        ey = ey || on(a, side, b);
        ez = ez || on(a, b, side);
      }
    }
    edges += ex + ey + ez;
  }
  int faces = 0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      faces += (on(a, b, 0) || on(a, b, 1));
      faces += (on(a, 0, b) || on(a, 1, b));
      faces += (on(0, a, b) || on(1, a, b));
    }
  }
  const int cubes = std::popcount(config);
  return 8 * vertex - 4 * edges + 2 * faces - cubes;
}

constexpr std::array<int, 256> make_octant_table() {
  std::array<int, 256> t{};
  for (unsigned c = 0; c < 256; ++c) t[c] = local_euler_x8(c);
  return t;
}

constexpr auto kOctantEuler = make_octant_table();

constexpr int nb_index(int dx, int dy, int dz) { return (dx + 1) + 3 * (dy + 1) + 9 * (dz + 1); }

}  // namespace

std::int64_t euler_characteristic(const BinaryVolume& q) {
  const auto nx = static_cast<std::ptrdiff_t>(q.dims().nx);
  const auto ny = static_cast<std::ptrdiff_t>(q.dims().ny);
  const auto nz = static_cast<std::ptrdiff_t>(q.dims().nz);
  std::int64_t v = 0, e = 0, f = 0, t = 0;
  // Lattice point (i, j, k) is the low corner of voxel (i, j, k).
  for (std::ptrdiff_t k = 0; k <= nz; ++k) {
    for (std::ptrdiff_t j = 0; j <= ny; ++j) {
      for (std::ptrdiff_t i = 0; i <= nx; ++i) {
        auto any = [&](std::initializer_list<std::array<std::ptrdiff_t, 3>> cells) {
          for (const auto& c : cells) {
            if (voxel(q, c[0], c[1], c[2])) return true;
          }
          return false;
        };
        v += any({{i - 1, j - 1, k - 1}, {i, j - 1, k - 1}, {i - 1, j, k - 1}, {i, j, k - 1},
                  {i - 1, j - 1, k}, {i, j - 1, k}, {i - 1, j, k}, {i, j, k}});
        e += any({{i, j - 1, k - 1}, {i, j, k - 1}, {i, j - 1, k}, {i, j, k}});
        e += any({{i - 1, j, k - 1}, {i, j, k - 1}, {i - 1, j, k}, {i, j, k}});
        e += any({{i - 1, j - 1, k}, {i, j - 1, k}, {i - 1, j, k}, {i, j, k}});
        f += any({{i, j, k - 1}, {i, j, k}});
        f += any({{i, j - 1, k}, {i, j, k}});
        f += any({{i - 1, j, k}, {i, j, k}});
        t += voxel(q, i, j, k);
      }
    }
  }
  return v - e + f - t;
}

Neighbourhood neighbourhood(const BinaryVolume& q, std::size_t x, std::size_t y, std::size_t z) {
  Neighbourhood n{};
  for (int dz = -1; dz <= 1; ++dz) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        n[static_cast<std::size_t>(nb_index(dx, dy, dz))] =
            voxel(q, static_cast<std::ptrdiff_t>(x) + dx, static_cast<std::ptrdiff_t>(y) + dy,
                  static_cast<std::ptrdiff_t>(z) + dz)
                ? 1
                : 0;
      }
    }
  }
  return n;
}

int euler_change_x8(const Neighbourhood& n) {
  int change = 0;
  for (int sz = -1; sz <= 1; sz += 2) {
    for (int sy = -1; sy <= 1; sy += 2) {
      for (int sx = -1; sx <= 1; sx += 2) {
        unsigned config = 0;
        for (int k = 0; k < 2; ++k) {
          for (int j = 0; j < 2; ++j) {
            for (int i = 0; i < 2; ++i) {
              if (n[static_cast<std::size_t>(nb_index(i * sx, j * sy, k * sz))]) {
                config |= 1u << bit(i, j, k);
              }
            }
          }
        }
        const unsigned without = config & ~1u;
        change += kOctantEuler[config | 1u] - kOctantEuler[without];
      }
    }
  }
  return change;
}

bool single_neighbour_component(const Neighbourhood& n) {
  std::array<std::uint8_t, 27> seen{};
  int components = 0;
  std::array<int, 27> stack{};
  for (int start = 0; start < 27; ++start) {
    if (start == 13 || !n[static_cast<std::size_t>(start)] || seen[static_cast<std::size_t>(start)]) {
      continue;
    }
    if (++components > 1) return false;
    int top = 0;
    stack[static_cast<std::size_t>(top++)] = start;
    seen[static_cast<std::size_t>(start)] = 1;
    while (top > 0) {
      const int cur = stack[static_cast<std::size_t>(--top)];
      const int cx = cur % 3, cy = (cur / 3) % 3, cz = cur / 9;
      for (int dz = -1; dz <= 1; ++dz) {
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int x = cx + dx, y = cy + dy, z = cz + dz;
            if (x < 0 || y < 0 || z < 0 || x > 2 || y > 2 || z > 2) continue;
            const int idx = x + 3 * y + 9 * z;
            if (idx == 13 || !n[static_cast<std::size_t>(idx)] ||
                seen[static_cast<std::size_t>(idx)]) {
              continue;
            }
            seen[static_cast<std::size_t>(idx)] = 1;
            stack[static_cast<std::size_t>(top++)] = idx;
          }
        }
      }
    }
  }
  return components == 1;
}

bool is_simple_point(const Neighbourhood& n) {
  return euler_change_x8(n) == 0 && single_neighbour_component(n);
}

bool is_endpoint(const Neighbourhood& n) {
  int count = 0;
  for (std::size_t i = 0; i < 27; ++i) {
    if (i != 13) count += n[i];
  }
  return count == 1;
}

BinaryVolume thin_3d(const BinaryVolume& q) {
  BinaryVolume img = q;
  const Dims d = q.dims();
  std::vector<std::size_t> objects;
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (img[i]) objects.push_back(i);
  }

  auto coords = [&](std::size_t i) {
    return std::array<std::size_t, 3>{i % d.nx, (i / d.nx) % d.ny, i / (d.nx * d.ny)};
  };
  auto deletable = [&](std::size_t x, std::size_t y, std::size_t z) {
    const Neighbourhood n = neighbourhood(img, x, y, z);
    return !is_endpoint(n) && is_simple_point(n);
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (BorderDirection dir : kBorderOrder) {
      int dx = 0, dy = 0, dz = 0;
      switch (dir) {
        case BorderDirection::up: dz = 1; break;
        case BorderDirection::down: dz = -1; break;
        case BorderDirection::north: dy = -1; break;
        case BorderDirection::south: dy = 1; break;
        case BorderDirection::east: dx = 1; break;
        case BorderDirection::west: dx = -1; break;
      }
      // Candidate detection reads a frozen image; chunks are concatenated in
      // index order so the list is schedule independent.
      const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(64, objects.size()));
      std::vector<std::vector<std::size_t>> found(chunks);
      parallel_for(chunks, [&](std::size_t c) {
        const std::size_t begin = objects.size() * c / chunks;
        const std::size_t end = objects.size() * (c + 1) / chunks;
        for (std::size_t k = begin; k < end; ++k) {
          const auto [x, y, z] = coords(objects[k]);
          if (voxel(img, static_cast<std::ptrdiff_t>(x) + dx, static_cast<std::ptrdiff_t>(y) + dy,
                    static_cast<std::ptrdiff_t>(z) + dz)) {
            continue;
          }
          if (deletable(x, y, z)) found[c].push_back(objects[k]);
        }
      });
      // Sequential re-check: earlier deletions in this pass may have changed
      // the neighbourhood.
      bool removed_any = false;
      for (const auto& chunk : found) {
        for (std::size_t i : chunk) {
          const auto [x, y, z] = coords(i);
          if (deletable(x, y, z)) {
            img[i] = 0;
            removed_any = true;
          }
        }
      }
      if (removed_any) {
        changed = true;
        std::erase_if(objects, [&](std::size_t i) { return img[i] == 0; });
      }
    }
  }
  return img;
}

}  // namespace fissure
