#include "r2l/scene.hpp"

#include <stdexcept>
#include <string>

#include "r2l/rng.hpp"

namespace r2l {

const char* scene_kind_name(SceneKind k) {
  switch (k) {
    case SceneKind::same: return "same";
    case SceneKind::similar: return "similar";
    case SceneKind::different: return "different";
  }
  return "?";
}

SceneKind scene_kind_from_name(const std::string& s) {
  if (s == "same") return SceneKind::same;
  if (s == "similar") return SceneKind::similar;
  if (s == "different") return SceneKind::different;
  throw std::invalid_argument("unknown scene kind: " + s);
}

namespace {

double uni(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uni_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

void add_rect(Scene& sc, Vec2 lo, Vec2 hi, double refl, bool specular) {
  Vec2 a{lo.x, lo.y}, b{hi.x, lo.y}, c{hi.x, hi.y}, d{lo.x, hi.y};
  sc.walls.push_back({{a, b}, refl, specular});
  sc.walls.push_back({{b, c}, refl, specular});
  sc.walls.push_back({{c, d}, refl, specular});
  sc.walls.push_back({{d, a}, refl, specular});
}

// Rectangle rotated by `ang` around its center.
void add_rot_rect(Scene& sc, Vec2 center, double half_w, double half_h, double ang,
                  double refl, bool specular) {
  Vec2 ex{std::cos(ang), std::sin(ang)};
  Vec2 ey{-std::sin(ang), std::cos(ang)};
  Vec2 a = center - ex * half_w - ey * half_h;
  Vec2 b = center + ex * half_w - ey * half_h;
  Vec2 c = center + ex * half_w + ey * half_h;
  Vec2 d = center - ex * half_w + ey * half_h;
  sc.walls.push_back({{a, b}, refl, specular});
  sc.walls.push_back({{b, c}, refl, specular});
  sc.walls.push_back({{c, d}, refl, specular});
  sc.walls.push_back({{d, a}, refl, specular});
}

// Horizontal or vertical partition wall with a door gap somewhere along it.
void add_partition(Scene& sc, Vec2 p0, Vec2 p1, double gap_center, double gap_width,
                   double refl, bool specular) {
  Vec2 d = p1 - p0;
  double len = d.norm();
  if (len <= gap_width) return;
  Vec2 u = d.normalized();
  double g0 = std::clamp(gap_center - gap_width / 2.0, 0.0, len - gap_width);
  double g1 = g0 + gap_width;
  if (g0 > 0.02) sc.walls.push_back({{p0, p0 + u * g0}, refl, specular});
  if (g1 < len - 0.02) sc.walls.push_back({{p0 + u * g1, p1}, refl, specular});
}

// Shared office generator for the `same` and `similar` families: a rectangular
// room whose interior holds a grid of cubicle cells with door gaps.
struct OfficeParams {
  double room_w_lo, room_w_hi;
  double room_h_lo, room_h_hi;
  int cells_lo, cells_hi;       // per axis
  double cell_lo, cell_hi;      // cell pitch in meters
  double panel_refl_lo, panel_refl_hi;
  double gap_lo, gap_hi;        // door width
  int scat_lo, scat_hi;
  // Chance that a partition is glass/metal (specular) rather than fabric.
  // Guarded so a zero never consumes a random draw: families with all-matte
  // panels keep their layout stream unchanged.
  double panel_specular_prob = 0.0;
  // Chance that a grid slot has no panel at all.
  double panel_missing_prob = 0.35;
};

Scene gen_office(std::mt19937_64& rng, const OfficeParams& p, SceneKind kind) {
  Scene sc;
  sc.kind = kind;

  double w = uni(rng, p.room_w_lo, p.room_w_hi);
  double h = uni(rng, p.room_h_lo, p.room_h_hi);
  sc.bounds = {{0.0, 0.0}, {w, h}};
  add_rect(sc, {0.0, 0.0}, {w, h}, uni(rng, 0.8, 1.0), true);

  int nx = uni_int(rng, p.cells_lo, p.cells_hi);
  int ny = uni_int(rng, p.cells_lo, p.cells_hi);
  double pitch = uni(rng, p.cell_lo, p.cell_hi);
  double block_w = nx * pitch, block_h = ny * pitch;
  // Center the cubicle block, keep a walkable margin around it.
  double margin_x = (w - block_w) / 2.0, margin_y = (h - block_h) / 2.0;
  if (margin_x < 1.2 || margin_y < 1.2) {
    pitch = std::min((w - 2.4) / nx, (h - 2.4) / ny);
    block_w = nx * pitch;
    block_h = ny * pitch;
    margin_x = (w - block_w) / 2.0;
    margin_y = (h - block_h) / 2.0;
  }
  double x0 = margin_x, y0 = margin_y;
  double refl = uni(rng, p.panel_refl_lo, p.panel_refl_hi);

  // Interior grid lines (the block's outer rim stays open toward the room).
  auto panel_specular = [&]() {
    return p.panel_specular_prob > 0.0 && uni(rng, 0.0, 1.0) < p.panel_specular_prob;
  };
  for (int i = 1; i < nx; ++i) {
    double x = x0 + i * pitch;
    for (int j = 0; j < ny; ++j) {
      double ya = y0 + j * pitch, yb = ya + pitch;
      if (uni(rng, 0.0, 1.0) < p.panel_missing_prob) continue;
      add_partition(sc, {x, ya}, {x, yb}, uni(rng, 0.2, pitch - 0.2),
                    uni(rng, p.gap_lo, p.gap_hi), refl, panel_specular());
    }
  }
  for (int j = 1; j < ny; ++j) {
    double y = y0 + j * pitch;
    for (int i = 0; i < nx; ++i) {
      double xa = x0 + i * pitch, xb = xa + pitch;
      if (uni(rng, 0.0, 1.0) < p.panel_missing_prob) continue;
      add_partition(sc, {xa, y}, {xb, y}, uni(rng, 0.2, pitch - 0.2),
                    uni(rng, p.gap_lo, p.gap_hi), refl, panel_specular());
    }
  }
  sc.cubicle_cells = nx * ny;

  int n_scat = uni_int(rng, p.scat_lo, p.scat_hi);
  for (int i = 0; i < n_scat; ++i) {
    Vec2 pos{uni(rng, 0.5, w - 0.5), uni(rng, 0.5, h - 0.5)};
    sc.scatterers.push_back({pos, uni(rng, 0.1, 1.0)});
  }
  return sc;
}

Scene gen_lobby(std::mt19937_64& rng) {
  Scene sc;
  sc.kind = SceneKind::different;

  double w = uni(rng, 11.0, 15.0);
  double h = uni(rng, 9.0, 13.0);
  sc.bounds = {{0.0, 0.0}, {w, h}};
  double outer = uni(rng, 0.85, 1.0);
  add_rect(sc, {0.0, 0.0}, {w, h}, outer, true);

  // Cut every corner with a diagonal wall: an octagonal atrium shell whose
  // surfaces sit at 45 degrees, unlike anything in the office family.
  double cut[4];
  for (double& c : cut) c = uni(rng, 1.8, 3.2);
  sc.walls.push_back({{{cut[0], 0.0}, {0.0, cut[0]}}, outer, true});
  sc.walls.push_back({{{w - cut[1], 0.0}, {w, cut[1]}}, outer, true});
  sc.walls.push_back({{{w, h - cut[2]}, {w - cut[2], h}}, outer, true});
  sc.walls.push_back({{{cut[3], h}, {0.0, h - cut[3]}}, outer, true});

  // Diamond columns: square piers standing on a vertex.
  int n_cols = uni_int(rng, 3, 5);
  for (int i = 0; i < n_cols; ++i) {
    double r = uni(rng, 0.35, 0.6);
    Vec2 c{uni(rng, 2.5, w - 2.5), uni(rng, 2.5, h - 2.5)};
    add_rot_rect(sc, c, r, r, kPi / 4.0, uni(rng, 0.6, 0.9), false);
  }
  // Rotated kiosks (info desks, planter boxes) well away from axis alignment.
  int n_kiosk = uni_int(rng, 2, 3);
  for (int i = 0; i < n_kiosk; ++i) {
    Vec2 c{uni(rng, 3.0, w - 3.0), uni(rng, 3.0, h - 3.0)};
    double ang = uni(rng, 0.25, kPi / 2.0 - 0.25);
    if (uni(rng, 0.0, 1.0) < 0.5) ang += kPi / 2.0;
    add_rot_rect(sc, c, uni(rng, 0.8, 1.5), uni(rng, 0.4, 0.8), ang,
                 uni(rng, 0.5, 0.9), uni(rng, 0.0, 1.0) < 0.5);
  }
  // Slanted benches and planters.
  int n_feat = uni_int(rng, 3, 5);
  for (int i = 0; i < n_feat; ++i) {
    Vec2 a{uni(rng, 1.5, w - 1.5), uni(rng, 1.5, h - 1.5)};
    double ang = uni(rng, -kPi, kPi);
    double len = uni(rng, 2.0, 4.0);
    Vec2 b = a + Vec2{std::cos(ang), std::sin(ang)} * len;
    b.x = std::clamp(b.x, 0.8, w - 0.8);
    b.y = std::clamp(b.y, 0.8, h - 0.8);
    sc.walls.push_back({{a, b}, uni(rng, 0.5, 0.9), uni(rng, 0.0, 1.0) < 0.5});
  }

  int n_scat = uni_int(rng, 8, 16);
  for (int i = 0; i < n_scat; ++i) {
    Vec2 pos{uni(rng, 0.5, w - 0.5), uni(rng, 0.5, h - 0.5)};
    sc.scatterers.push_back({pos, uni(rng, 0.1, 1.0)});
  }
  sc.cubicle_cells = 0;
  return sc;
}

}  // namespace

Scene gen_scene(uint64_t seed, SceneKind kind) {
  auto rng = make_rng(seed, static_cast<uint64_t>(kind) + 101);
  switch (kind) {
    case SceneKind::same: {
      OfficeParams p{10.0, 14.0, 8.0, 12.0, 2, 3, 2.0, 2.4, 0.4, 0.7, 0.8, 1.0, 5, 12};
      return gen_office(rng, p, kind);
    }
    case SceneKind::similar: {
      // Overlaps the `same` band but slides toward newer fit-outs: slightly
      // larger rooms and a share of glass/metal panels. Specular partitions
      // keep their lidar signature while returning little radar energy at
      // off-normal headings, so fresh draws skew harder than revisited
      // training sites.
      OfficeParams p{10.0, 15.0, 8.0, 13.0, 2, 3, 2.0, 2.5, 0.35, 0.7, 0.8, 1.1, 5, 12,
                     0.35};
      return gen_office(rng, p, kind);
    }
    case SceneKind::different:
      return gen_lobby(rng);
  }
  throw std::logic_error("gen_scene: bad kind");
}

bool position_is_free(const Scene& scene, Vec2 p, double clearance) {
  if (p.x < scene.bounds.lo.x + clearance || p.x > scene.bounds.hi.x - clearance ||
      p.y < scene.bounds.lo.y + clearance || p.y > scene.bounds.hi.y - clearance)
    return false;
  for (const Wall& w : scene.walls)
    if (point_segment_distance(p, w.seg) < clearance) return false;
  return true;
}

std::vector<Pose> gen_trajectory(const Scene& scene, int n_frames, double step,
                                 uint64_t seed) {
  if (n_frames < 1) throw std::invalid_argument("gen_trajectory: n_frames >= 1");
  if (step < 0.0) throw std::invalid_argument("gen_trajectory: step >= 0");
  auto rng = make_rng(seed, 7);

  Pose cur;
  bool found = false;
  for (int attempt = 0; attempt < 4000; ++attempt) {
    Vec2 p{uni(rng, scene.bounds.lo.x, scene.bounds.hi.x),
           uni(rng, scene.bounds.lo.y, scene.bounds.hi.y)};
    if (position_is_free(scene, p, scene.clearance)) {
      cur.pos = p;
      cur.heading = uni(rng, -kPi, kPi);
      found = true;
      break;
    }
  }
  if (!found) throw std::runtime_error("gen_trajectory: no collision-free start pose");

  std::vector<Pose> out;
  out.reserve(n_frames);
  out.push_back(cur);
  for (int i = 1; i < n_frames; ++i) {
    bool moved = false;
    for (int attempt = 0; attempt < 400; ++attempt) {
      double dh = (attempt < 200) ? uni(rng, -0.35, 0.35) : uni(rng, -kPi, kPi);
      double h = wrap_angle(cur.heading + dh);
      double speed = uni(rng, 0.4, 1.0) * step;
      Vec2 p = cur.pos + Vec2{std::cos(h), std::sin(h)} * speed;
      if (position_is_free(scene, p, scene.clearance)) {
        cur = {p, h};
        moved = true;
        break;
      }
    }
    if (!moved) {
      if (step == 0.0) {
        // Static sensor: stay put (always collision free since the start was).
        moved = true;
      } else {
        throw std::runtime_error("gen_trajectory: stuck at frame " + std::to_string(i));
      }
    }
    out.push_back(cur);
  }
  return out;
}

}  // namespace r2l
