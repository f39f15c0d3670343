#pragma once

#include <cstdint>
#include <vector>

#include "r2l/geometry.hpp"

namespace r2l {

struct Wall {
  Segment seg;
  double reflectivity = 1.0;  // > 0
  bool specular = false;
};

struct Scatterer {
  Vec2 pos;
  double rcs = 1.0;  // > 0
};

// Which structural generator family a scene was drawn from. `same` and
// `similar` share the cubicle-office generator (similar perturbs its layout
// parameters); `different` is an open lobby with no cubicles.
enum class SceneKind : uint8_t { same = 0, similar = 1, different = 2 };

const char* scene_kind_name(SceneKind k);
SceneKind scene_kind_from_name(const std::string& s);

struct Scene {
  SceneKind kind = SceneKind::same;
  Aabb bounds;
  std::vector<Wall> walls;
  std::vector<Scatterer> scatterers;
  int cubicle_cells = 0;   // grid cells in the cubicle block; 0 for lobby scenes
  double clearance = 0.35; // minimum sensor distance to any wall
};

// Deterministic per (seed, kind).
Scene gen_scene(uint64_t seed, SceneKind kind);

bool position_is_free(const Scene& scene, Vec2 p, double clearance);

// Collision-free random walk of n_frames poses. Consecutive positions differ
// by at most `step`. Throws std::runtime_error if no valid pose can be found
// after bounded retries.
std::vector<Pose> gen_trajectory(const Scene& scene, int n_frames, double step,
                                 uint64_t seed);

}  // namespace r2l
