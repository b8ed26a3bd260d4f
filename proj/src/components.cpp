#include "fissure/components.hpp"

#include <numeric>

namespace fissure {

namespace {

class DisjointSet {
 public:
  std::uint32_t make() {
    parent_.push_back(static_cast<std::uint32_t>(parent_.size()));
    return parent_.back();
  }
  std::uint32_t find(std::uint32_t x) {
    std::uint32_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      const std::uint32_t next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) {
      parent_[b] = a;
    } else {
      parent_[a] = b;
    }
  }

 private:
  std::vector<std::uint32_t> parent_;
};

struct Step {
  int dx, dy, dz;
};

/// Neighbours that precede the current voxel in raster order.
std::vector<Step> backward_neighbours(Connectivity3D conn) {
  std::vector<Step> out;
  for (int dz = -1; dz <= 0; ++dz) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dz == 0 && (dy > 0 || (dy == 0 && dx >= 0))) continue;
        const int nonzero = (dx != 0) + (dy != 0) + (dz != 0);
        if (conn == Connectivity3D::c6 && nonzero > 1) continue;
        if (conn == Connectivity3D::c18 && nonzero > 2) continue;
        out.push_back({dx, dy, dz});
      }
    }
  }
  return out;
}

}  // namespace

ComponentTable label_components(const BinaryVolume& mask, Connectivity3D conn) {
  const Dims d = mask.dims();
  const auto steps = backward_neighbours(conn);
  std::vector<std::uint32_t> provisional(mask.size(), 0);
  DisjointSet sets;
  sets.make();  // slot 0 = background

  for (std::size_t z = 0; z < d.nz; ++z) {
    for (std::size_t y = 0; y < d.ny; ++y) {
      for (std::size_t x = 0; x < d.nx; ++x) {
        const std::size_t i = mask.index(x, y, z);
        if (!mask[i]) continue;
        std::uint32_t label = 0;
        for (const auto& s : steps) {
          const auto nx = static_cast<std::ptrdiff_t>(x) + s.dx;
          const auto ny = static_cast<std::ptrdiff_t>(y) + s.dy;
          const auto nz = static_cast<std::ptrdiff_t>(z) + s.dz;
          if (!mask.contains(nx, ny, nz)) continue;
          const std::uint32_t other = provisional[mask.index(static_cast<std::size_t>(nx),
                                                             static_cast<std::size_t>(ny),
                                                             static_cast<std::size_t>(nz))];
          if (other == 0) continue;
          if (label == 0) {
            label = other;
          } else {
            sets.unite(label, other);
          }
        }
        provisional[i] = label != 0 ? label : sets.make();
      }
    }
  }

  ComponentTable table;
  table.labels.assign(mask.size(), 0);
  table.stats.emplace_back();
  std::vector<std::int32_t> final_label;
  for (std::size_t z = 0; z < d.nz; ++z) {
    for (std::size_t y = 0; y < d.ny; ++y) {
      for (std::size_t x = 0; x < d.nx; ++x) {
        const std::size_t i = mask.index(x, y, z);
        if (provisional[i] == 0) continue;
        const std::uint32_t root = sets.find(provisional[i]);
        if (final_label.size() <= root) final_label.resize(root + 1, 0);
        if (final_label[root] == 0) {
          final_label[root] = static_cast<std::int32_t>(table.stats.size());
          ComponentStats s;
          s.min = {x, y, z};
          s.max = {x, y, z};
          table.stats.push_back(s);
        }
        const std::int32_t l = final_label[root];
        table.labels[i] = l;
        auto& s = table.stats[static_cast<std::size_t>(l)];
        ++s.voxel_count;
        const std::array<std::size_t, 3> p{x, y, z};
        for (int a = 0; a < 3; ++a) {
          s.min[a] = std::min(s.min[a], p[a]);
          s.max[a] = std::max(s.max[a], p[a]);
          s.centroid[a] += static_cast<double>(p[a]);
        }
      }
    }
  }
  for (std::size_t l = 1; l < table.stats.size(); ++l) {
    for (auto& c : table.stats[l].centroid) c /= static_cast<double>(table.stats[l].voxel_count);
  }
  return table;
}

ComponentTable2D label_components(const Image2D<std::uint8_t>& mask, Connectivity2D conn) {
  const std::size_t w = mask.width;
  const std::size_t h = mask.height;
  std::vector<std::uint32_t> provisional(w * h, 0);
  DisjointSet sets;
  sets.make();
  static constexpr int k8[4][2] = {{-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
  static constexpr int k4[2][2] = {{-1, 0}, {0, -1}};
  const std::size_t n_steps = conn == Connectivity2D::c8 ? 4 : 2;

  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      if (!mask.at(x, y)) continue;
      std::uint32_t label = 0;
      for (std::size_t k = 0; k < n_steps; ++k) {
        const int* s = conn == Connectivity2D::c8 ? k8[k] : k4[k];
        const auto nx = static_cast<std::ptrdiff_t>(x) + s[0];
        const auto ny = static_cast<std::ptrdiff_t>(y) + s[1];
        if (nx < 0 || ny < 0 || nx >= static_cast<std::ptrdiff_t>(w)) continue;
        const std::uint32_t other =
            provisional[static_cast<std::size_t>(nx) + w * static_cast<std::size_t>(ny)];
        if (other == 0) continue;
        if (label == 0) {
          label = other;
        } else {
          sets.unite(label, other);
        }
      }
      provisional[x + w * y] = label != 0 ? label : sets.make();
    }
  }

  ComponentTable2D table;
  table.labels.assign(w * h, 0);
  table.sizes.push_back(0);
  std::vector<std::int32_t> final_label;
  for (std::size_t i = 0; i < w * h; ++i) {
    if (provisional[i] == 0) continue;
    const std::uint32_t root = sets.find(provisional[i]);
    if (final_label.size() <= root) final_label.resize(root + 1, 0);
    if (final_label[root] == 0) {
      final_label[root] = static_cast<std::int32_t>(table.sizes.size());
      table.sizes.push_back(0);
    }
    table.labels[i] = final_label[root];
    ++table.sizes[static_cast<std::size_t>(final_label[root])];
  }
  return table;
}

BinaryVolume filter_components_by_size(const BinaryVolume& mask, Connectivity3D conn,
                                       std::size_t min_size) {
  const auto table = label_components(mask, conn);
  BinaryVolume out(mask.dims(), mask.spacing());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const auto l = table.labels[i];
    if (l != 0 && table.stats[static_cast<std::size_t>(l)].voxel_count >= min_size) out[i] = 1;
  }
  return out;
}

std::size_t count_components(const BinaryVolume& mask, Connectivity3D conn) {
  return label_components(mask, conn).count();
}

}  // namespace fissure
