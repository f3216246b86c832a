#include "posecal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "posecal/errors.hpp"
#include "posecal/kernels.hpp"

namespace posecal {

void BoneGraph::validate() const {
  for (const auto& [a, b] : edges) {
    if (a == b) {
      throw InvalidInputError("bone graph has self-edge at " + a);
    }
    if (a.empty() || b.empty()) {
      throw InvalidInputError("bone graph has empty joint name");
    }
  }
}

const BoneGraph& default_bone_graph() {
  static const BoneGraph graph = [] {
    BoneGraph g;
    g.edges = {
        {"head", "neck"},
        {"neck", "shoulder_left"},
        {"neck", "shoulder_right"},
        {"shoulder_left", "elbow_left"},
        {"elbow_left", "wrist_left"},
        {"shoulder_right", "elbow_right"},
        {"elbow_right", "wrist_right"},
        {"neck", "spine_mid"},
        {"spine_mid", "hip_center"},
    };
    g.validate();
    return g;
  }();
  return graph;
}

BoneGraph load_bone_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open bone graph file: " + path);
  }
  BoneGraph graph;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string a, b;
    if (!(ss >> a)) continue;
    if (!(ss >> b)) {
      throw ParseError("expected two joint names per bone line", line_no);
    }
    graph.edges.emplace_back(a, b);
  }
  graph.validate();
  return graph;
}

double frame_rmse(const Skeleton& gt, const Skeleton& est) {
  double sum_sq = 0.0;
  int n = 0;
  for (const auto& [name, gt_joint] : gt.joints) {
    const auto it = est.joints.find(name);
    if (it == est.joints.end()) continue;
    sum_sq += (gt_joint.p - it->second.p).squaredNorm();
    ++n;
  }
  if (n == 0) {
    throw InvalidInputError("skeletons share no joint names");
  }
  return std::sqrt(sum_sq / n);
}

double mean_over_valid(std::span<const std::optional<double>> series) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& value : series) {
    if (value) {
      sum += *value;
      ++n;
    }
  }
  if (n == 0) {
    throw InvalidInputError("no valid frames in series");
  }
  return sum / static_cast<double>(n);
}

namespace {

// Largest coordinate magnitude accepted for 2D joints; anything bigger is
// detector garbage and would make the line walk unbounded.
constexpr double kMaxPixelCoord = 1e6;

void plot_segment(SilhouetteMask& mask, long x0, long y0, long x1, long y1) {
  // Bresenham over the generalized octants.
  const long dx = std::abs(x1 - x0);
  const long dy = -std::abs(y1 - y0);
  const long sx = x0 < x1 ? 1 : -1;
  const long sy = y0 < y1 ? 1 : -1;
  long err = dx + dy;
  long x = x0, y = y0;
  while (true) {
    if (x >= 0 && x < mask.width && y >= 0 && y < mask.height) {
      mask.set(static_cast<int>(x), static_cast<int>(y));
    }
    if (x == x1 && y == y1) break;
    const long e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y += sy;
    }
  }
}

/// Half-widths of the dilation disk, one entry per |dy| <= floor(radius).
std::vector<int> disk_extents(double radius) {
  const int r_int = static_cast<int>(std::floor(radius));
  std::vector<int> extents(static_cast<std::size_t>(r_int) + 1, 0);
  const double r_sq = radius * radius;
  for (int dy = 0; dy <= r_int; ++dy) {
    int dx = static_cast<int>(std::floor(std::sqrt(r_sq - dy * dy)));
    // sqrt rounding can be off by one in either direction; fix exactly.
    while (static_cast<double>(dx + 1) * (dx + 1) + static_cast<double>(dy) * dy <=
           r_sq) {
      ++dx;
    }
    while (dx > 0 &&
           static_cast<double>(dx) * dx + static_cast<double>(dy) * dy > r_sq) {
      --dx;
    }
    extents[static_cast<std::size_t>(dy)] = dx;
  }
  return extents;
}

}  // namespace

SilhouetteMask rasterize_skeleton(const Joints2d& joints, const BoneGraph& bones,
                                  double radius, int width, int height) {
  if (radius < 0.0 || !std::isfinite(radius)) {
    throw InvalidInputError("dilation radius must be >= 0");
  }
  bones.validate();
  SilhouetteMask drawn = SilhouetteMask::zeros(width, height);

  auto rounded = [](const Eigen::Vector2d& p) {
    if (std::abs(p.x()) > kMaxPixelCoord || std::abs(p.y()) > kMaxPixelCoord) {
      throw InvalidInputError("2D joint coordinate out of range");
    }
    return std::pair<long, long>{std::lround(p.x()), std::lround(p.y())};
  };

  for (const auto& [name, p] : joints) {
    const auto [x, y] = rounded(p);
    plot_segment(drawn, x, y, x, y);
  }
  for (const auto& [a, b] : bones.edges) {
    const auto it_a = joints.find(a);
    const auto it_b = joints.find(b);
    if (it_a == joints.end() || it_b == joints.end()) continue;
    const auto [x0, y0] = rounded(it_a->second);
    const auto [x1, y1] = rounded(it_b->second);
    plot_segment(drawn, x0, y0, x1, y1);
  }

  if (radius < 1.0) {
    return drawn;  // a disk of radius < 1 contains only its center pixel
  }

  const std::vector<int> extents = disk_extents(radius);
  SilhouetteMask out = SilhouetteMask::zeros(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (!drawn.at(x, y)) continue;
      for (int dy = -static_cast<int>(extents.size()) + 1;
           dy < static_cast<int>(extents.size()); ++dy) {
        const int yy = y + dy;
        if (yy < 0 || yy >= height) continue;
        const int half = extents[static_cast<std::size_t>(std::abs(dy))];
        const int x_begin = std::max(0, x - half);
        const int x_end = std::min(width - 1, x + half);
        if (x_begin > x_end) continue;
        auto* row = out.bits.data() + static_cast<std::size_t>(yy) * width;
        std::fill(row + x_begin, row + x_end + 1, std::uint8_t{1});
      }
    }
  }
  return out;
}

Eigen::Vector2d centroid(const SilhouetteMask& mask) {
  const kernels::CentroidSums sums = kernels::active().centroid_sums(
      mask.bits.data(), static_cast<std::size_t>(mask.width),
      static_cast<std::size_t>(mask.height));
  if (sums.count == 0) {
    throw InvalidInputError("centroid of an empty mask");
  }
  return {static_cast<double>(sums.sum_x) / static_cast<double>(sums.count),
          static_cast<double>(sums.sum_y) / static_cast<double>(sums.count)};
}

SilhouetteMask align_centroids(const SilhouetteMask& est,
                               const SilhouetteMask& ref) {
  const Eigen::Vector2d c_est = centroid(est);
  const Eigen::Vector2d c_ref = centroid(ref);
  const long dx = std::lround(c_ref.x() - c_est.x());
  const long dy = std::lround(c_ref.y() - c_est.y());

  SilhouetteMask out = SilhouetteMask::zeros(est.width, est.height);
  for (int y = 0; y < est.height; ++y) {
    for (int x = 0; x < est.width; ++x) {
      if (!est.at(x, y)) continue;
      const long nx = x + dx;
      const long ny = y + dy;
      if (nx >= 0 && nx < est.width && ny >= 0 && ny < est.height) {
        out.set(static_cast<int>(nx), static_cast<int>(ny));
      }
    }
  }
  return out;
}

double dice(const SilhouetteMask& a, const SilhouetteMask& b) {
  if (a.width != b.width || a.height != b.height) {
    throw DimensionMismatchError("dice requires masks of identical size");
  }
  const auto& k = kernels::active();
  const std::uint64_t size_a = k.count_nonzero(a.bits.data(), a.bits.size());
  const std::uint64_t size_b = k.count_nonzero(b.bits.data(), b.bits.size());
  if (size_a + size_b == 0) {
    return 0.0;  // two empty silhouettes carry no agreement signal
  }
  const std::uint64_t inter =
      k.count_both_nonzero(a.bits.data(), b.bits.data(), a.bits.size());
  return 2.0 * static_cast<double>(inter) /
         static_cast<double>(size_a + size_b);
}

}  // namespace posecal
