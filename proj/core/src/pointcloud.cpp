#include "r2l/pointcloud.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace r2l {

PolarImage threshold_image(const PolarImage& prob, double tau) {
  if (!(tau > 0.0 && tau < 1.0))
    throw std::invalid_argument("threshold_image: tau in (0, 1)");
  PolarImage out(prob.n_range, prob.n_azimuth, prob.max_range, prob.grid,
                 ImageKind::binary);
  const float t = static_cast<float>(tau);
  for (size_t i = 0; i < prob.size(); ++i)
    out.data[i] = prob.data[i] >= t ? 1.0f : 0.0f;
  return out;
}

PointCloud2D polar_to_points(const PolarImage& binary) {
  PointCloud2D cloud;
  for (int r = 0; r < binary.n_range; ++r) {
    for (int a = 0; a < binary.n_azimuth; ++a) {
      if (binary.at(r, a) == 0.0f) continue;
      const double rho = binary.range_m(r);
      const double th = binary.azimuth_rad(a);
      cloud.pts.push_back({rho * std::sin(th), rho * std::cos(th)});
    }
  }
  return cloud;
}

namespace {

// Uniform grid over the bounding box of `to`. Cells are addressed by
// (ix, iy); ring search widens the Chebyshev radius until no closer point
// can exist.
struct BucketGrid {
  Vec2 lo;
  double h = 1.0;
  int nx = 1, ny = 1;
  std::vector<std::vector<int>> cells;

  explicit BucketGrid(const std::vector<Vec2>& pts) {
    Vec2 hi = pts[0];
    lo = pts[0];
    for (const Vec2& p : pts) {
      lo.x = std::min(lo.x, p.x);
      lo.y = std::min(lo.y, p.y);
      hi.x = std::max(hi.x, p.x);
      hi.y = std::max(hi.y, p.y);
    }
    const double w = std::max(hi.x - lo.x, 1e-9), ht = std::max(hi.y - lo.y, 1e-9);
    // Aim for O(1) points per cell.
    const double target = std::sqrt(w * ht / static_cast<double>(pts.size()));
    h = std::max(target, 1e-9);
    nx = std::max(1, static_cast<int>(std::floor(w / h)) + 1);
    ny = std::max(1, static_cast<int>(std::floor(ht / h)) + 1);
    cells.resize(static_cast<size_t>(nx) * ny);
    for (size_t i = 0; i < pts.size(); ++i)
      cells[cell_index(clamp_ix(pts[i].x), clamp_iy(pts[i].y))].push_back(
          static_cast<int>(i));
  }

  int clamp_ix(double x) const {
    return std::clamp(static_cast<int>(std::floor((x - lo.x) / h)), 0, nx - 1);
  }
  int clamp_iy(double y) const {
    return std::clamp(static_cast<int>(std::floor((y - lo.y) / h)), 0, ny - 1);
  }
  size_t cell_index(int ix, int iy) const {
    return static_cast<size_t>(iy) * nx + ix;
  }
};

double sq_dist(Vec2 a, Vec2 b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

}  // namespace

std::vector<double> nn_distances(const PointCloud2D& from, const PointCloud2D& to) {
  if (to.empty()) throw std::invalid_argument("nn_distances: empty target cloud");
  std::vector<double> out(from.size());
  if (from.empty()) return out;

  BucketGrid grid(to.pts);
  const int max_ring = std::max(grid.nx, grid.ny);

  for (size_t qi = 0; qi < from.size(); ++qi) {
    const Vec2 q = from.pts[qi];
    const int cx = grid.clamp_ix(q.x), cy = grid.clamp_iy(q.y);
    double best = std::numeric_limits<double>::infinity();

    for (int ring = 0; ring <= max_ring; ++ring) {
      // Any point in a cell at Chebyshev ring k is at least (k-1)*h away,
      // so once best (squared) is within that bound the search is complete.
      const double bound = static_cast<double>(ring - 1) * grid.h;
      if (ring >= 1 && best <= bound * bound) break;
      const int x0 = cx - ring, x1 = cx + ring;
      const int y0 = cy - ring, y1 = cy + ring;
      auto scan_cell = [&](int ix, int iy) {
        if (ix < 0 || ix >= grid.nx || iy < 0 || iy >= grid.ny) return;
        for (int pi : grid.cells[grid.cell_index(ix, iy)])
          best = std::min(best, sq_dist(q, to.pts[pi]));
      };
      if (ring == 0) {
        scan_cell(cx, cy);
      } else {
        for (int ix = x0; ix <= x1; ++ix) {
          scan_cell(ix, y0);
          scan_cell(ix, y1);
        }
        for (int iy = y0 + 1; iy <= y1 - 1; ++iy) {
          scan_cell(x0, iy);
          scan_cell(x1, iy);
        }
      }
    }
    out[qi] = std::sqrt(best);
  }
  return out;
}

double median_of(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median_of: empty");
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double chamfer(const PointCloud2D& a, const PointCloud2D& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("chamfer: empty cloud");
  const auto da = nn_distances(a, b);
  const auto db = nn_distances(b, a);
  double sum = 0.0;
  for (double d : da) sum += d;
  for (double d : db) sum += d;
  return sum / static_cast<double>(da.size() + db.size());
}

double mod_hausdorff(const PointCloud2D& a, const PointCloud2D& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("mod_hausdorff: empty cloud");
  const double ma = median_of(nn_distances(a, b));
  const double mb = median_of(nn_distances(b, a));
  return std::max(ma, mb);
}

}  // namespace r2l
