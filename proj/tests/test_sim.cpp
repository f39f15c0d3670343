#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "r2l/dsp.hpp"
#include "r2l/rng.hpp"
#include "r2l/scene.hpp"
#include "r2l/sim.hpp"

using namespace r2l;

namespace {

SimConfig quiet_fullscale() {
  SimConfig cfg;
  cfg.noise_sigma = 0.0;
  cfg.ghost_order = 0;
  return cfg;
}

Scene one_scatterer(Vec2 pos, double rcs = 1.0) {
  Scene sc;
  sc.bounds = {{-20.0, -20.0}, {20.0, 20.0}};
  sc.scatterers.push_back({pos, rcs});
  return sc;
}

Pose free_pose(const Scene& sc, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(sc.bounds.lo.x, sc.bounds.hi.x);
  std::uniform_real_distribution<double> uy(sc.bounds.lo.y, sc.bounds.hi.y);
  std::uniform_real_distribution<double> uh(-kPi, kPi);
  for (int i = 0; i < 10000; ++i) {
    Vec2 p{ux(rng), uy(rng)};
    if (position_is_free(sc, p, sc.clearance)) return {p, uh(rng)};
  }
  throw std::runtime_error("no free pose found");
}

}  // namespace

TEST_CASE("scene generation is deterministic per (seed, kind)") {
  for (auto kind : {SceneKind::same, SceneKind::similar, SceneKind::different}) {
    Scene a = gen_scene(1234, kind);
    Scene b = gen_scene(1234, kind);
    REQUIRE(a.walls.size() == b.walls.size());
    REQUIRE(a.scatterers.size() == b.scatterers.size());
    for (size_t i = 0; i < a.walls.size(); ++i) {
      CHECK(a.walls[i].seg.p0.x == b.walls[i].seg.p0.x);
      CHECK(a.walls[i].seg.p1.y == b.walls[i].seg.p1.y);
      CHECK(a.walls[i].reflectivity == b.walls[i].reflectivity);
      CHECK(a.walls[i].specular == b.walls[i].specular);
    }
    CHECK(a.kind == kind);
  }
  // Different seeds give different layouts.
  CHECK(gen_scene(1, SceneKind::same).walls.size() !=
        gen_scene(2, SceneKind::same).walls.size());
}

TEST_CASE("scene families have the promised structure") {
  int lobby_oblique = 0;
  for (uint64_t s = 0; s < 10; ++s) {
    Scene office = gen_scene(mix_seed(7, s), SceneKind::same);
    CHECK(office.cubicle_cells > 0);
    for (const Wall& w : office.walls) {
      const Vec2 d = w.seg.dir();
      CHECK((std::abs(d.x) < 1e-9 || std::abs(d.y) < 1e-9));  // axis aligned
    }
    Scene lobby = gen_scene(mix_seed(7, s), SceneKind::different);
    CHECK(lobby.cubicle_cells == 0);
    for (const Wall& w : lobby.walls) {
      const Vec2 d = w.seg.dir();
      if (std::abs(d.x) > 1e-9 && std::abs(d.y) > 1e-9) ++lobby_oblique;
    }
  }
  CHECK(lobby_oblique > 50);  // the lobby family is dominated by oblique surfaces

  CHECK(scene_kind_from_name("same") == SceneKind::same);
  CHECK(scene_kind_from_name("similar") == SceneKind::similar);
  CHECK(scene_kind_from_name("different") == SceneKind::different);
  CHECK_THROWS_AS(scene_kind_from_name("atrium"), std::invalid_argument);
  CHECK(std::string(scene_kind_name(SceneKind::similar)) == "similar");
}

TEST_CASE("trajectories stay collision free and step bounded") {
  for (uint64_t s = 0; s < 20; ++s) {
    Scene sc = gen_scene(mix_seed(9, s), s % 2 ? SceneKind::same : SceneKind::different);
    const double step = 0.05;
    auto traj = gen_trajectory(sc, 60, step, mix_seed(9, 100 + s));
    REQUIRE(traj.size() == 60);
    for (size_t i = 0; i < traj.size(); ++i) {
      CHECK(position_is_free(sc, traj[i].pos, sc.clearance * 0.999));
      if (i > 0) {
        CHECK((traj[i].pos - traj[i - 1].pos).norm() <= step + 1e-12);
        CHECK(std::abs(traj[i].heading) <= kPi + 1e-12);
      }
    }
    // Determinism.
    auto again = gen_trajectory(sc, 60, step, mix_seed(9, 100 + s));
    for (size_t i = 0; i < traj.size(); ++i) {
      CHECK(traj[i].pos.x == again[i].pos.x);
      CHECK(traj[i].heading == again[i].heading);
    }
  }
  Scene sc = gen_scene(3, SceneKind::same);
  CHECK_THROWS_AS(gen_trajectory(sc, 0, 0.05, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_trajectory(sc, 5, -0.1, 1), std::invalid_argument);
  // Zero step: the sensor never moves.
  auto still = gen_trajectory(sc, 5, 0.0, 2);
  for (const Pose& p : still) CHECK(p.pos.x == still[0].pos.x);
}

TEST_CASE("radar snapshot is deterministic and smoke invariant") {
  Scene sc = gen_scene(17, SceneKind::same);
  auto rng = make_rng(17, 5);
  SimConfig cfg;  // defaults include receiver noise
  Pose pose = free_pose(sc, rng);

  ArraySnapshot a = radar_snapshot(sc, pose, cfg, 99);
  ArraySnapshot b = radar_snapshot(sc, pose, cfg, 99);
  REQUIRE(a.samples.size() == b.samples.size());
  for (size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i] == b.samples[i]);

  ArraySnapshot c = radar_snapshot(sc, pose, cfg, 100);
  bool differs = false;
  for (size_t i = 0; i < a.samples.size(); ++i)
    if (a.samples[i] != c.samples[i]) differs = true;
  CHECK(differs);

  // Smoke gates only the lidar channel.
  SimConfig smoke = cfg;
  smoke.smoke = true;
  ArraySnapshot d = radar_snapshot(sc, pose, smoke, 99);
  for (size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i] == d.samples[i]);

  PolarImage lidar = lidar_scan(sc, pose, cfg);
  CHECK(lidar.count_nonzero() > 0);
  PolarImage blank = lidar_scan(sc, pose, smoke);
  CHECK(blank.count_nonzero() == 0);
  CHECK(blank.n_range == cfg.n_range_bins);
  CHECK(blank.n_azimuth == cfg.n_lidar_az_bins);

  CHECK(a.n_antennas == cfg.n_antennas);
  CHECK(a.n_fast_time == cfg.n_fast_time);
  CHECK(a.spacing == cfg.wavelength / 2.0);
}

TEST_CASE("snapshot superposition is exact without noise") {
  SimConfig cfg = quiet_fullscale();
  Pose pose{{0.0, 0.0}, 0.0};
  Scene s1 = one_scatterer({4.0, 1.0}, 2.0);
  Scene s2 = one_scatterer({6.0, -2.0}, 0.5);
  Scene both = s1;
  both.scatterers.push_back(s2.scatterers[0]);

  ArraySnapshot a = radar_snapshot(s1, pose, cfg, 0);
  ArraySnapshot b = radar_snapshot(s2, pose, cfg, 0);
  ArraySnapshot ab = radar_snapshot(both, pose, cfg, 0);
  for (size_t i = 0; i < ab.samples.size(); ++i)
    CHECK(ab.samples[i] == a.samples[i] + b.samples[i]);
}

TEST_CASE("visible reflectors respect field of view, range cut, and occlusion") {
  SimConfig cfg = quiet_fullscale();
  Pose pose{{0.0, 0.0}, 0.0};  // boresight along +x

  // Behind the sensor: no reflector.
  CHECK(visible_reflectors(one_scatterer({-3.0, 0.0}), pose, cfg).empty());
  // Beyond 1.5x max_range: dropped.
  CHECK(visible_reflectors(one_scatterer({16.0, 0.0}), pose, cfg).empty());
  // In front: exactly one, range and azimuth as constructed.
  auto refl = visible_reflectors(one_scatterer({3.0, 3.0}, 4.0), pose, cfg);
  REQUIRE(refl.size() == 1);
  CHECK(refl[0].range == doctest::Approx(std::sqrt(18.0)).epsilon(1e-12));
  CHECK(refl[0].sin_azimuth == doctest::Approx(std::sin(kPi / 4.0)).epsilon(1e-12));
  CHECK(refl[0].amplitude == doctest::Approx(2.0 / std::sqrt(18.0)).epsilon(1e-12));

  // A wall between sensor and scatterer occludes it.
  Scene blocked = one_scatterer({5.0, 0.0});
  blocked.walls.push_back({{{2.0, -1.0}, {2.0, 1.0}}, 1.0, false});
  bool scatterer_seen = false;
  for (const auto& r : visible_reflectors(blocked, pose, cfg))
    if (std::abs(r.range - 5.0) < 1e-6) scatterer_seen = true;
  CHECK(!scatterer_seen);
  blocked.walls.clear();
  scatterer_seen = false;
  for (const auto& r : visible_reflectors(blocked, pose, cfg))
    if (std::abs(r.range - 5.0) < 1e-6) scatterer_seen = true;
  CHECK(scatterer_seen);

  // Bounds on every reflector over a generated scene.
  Scene sc = gen_scene(23, SceneKind::different);
  auto rng = make_rng(23, 1);
  Pose p2 = free_pose(sc, rng);
  SimConfig noisy;
  for (const auto& r : visible_reflectors(sc, p2, noisy)) {
    CHECK(r.range >= 0.05);
    CHECK(r.range <= 1.5 * noisy.max_range);
    CHECK(std::abs(r.sin_azimuth) <= 1.0);
    CHECK(r.amplitude > 0.0);
  }
}

TEST_CASE("specular walls attenuate 20x outside the cone") {
  SimConfig cfg = quiet_fullscale();
  Pose pose{{0.0, 0.0}, 0.0};
  // Wall shorter than the sample spacing -> a single sample at its midpoint,
  // so rotating it about the midpoint changes only the cone factor.
  auto wall_scene = [&](double tilt, bool specular) {
    Scene sc;
    sc.bounds = {{-20.0, -20.0}, {20.0, 20.0}};
    const Vec2 mid{5.0, 0.0};
    const Vec2 half = Vec2{std::cos(kPi / 2.0 + tilt), std::sin(kPi / 2.0 + tilt)} * 0.02;
    sc.walls.push_back({{mid - half, mid + half}, 0.9, specular});
    return sc;
  };

  auto head_on = visible_reflectors(wall_scene(0.0, true), pose, cfg);
  auto tilted = visible_reflectors(wall_scene(deg2rad(50.0), true), pose, cfg);
  REQUIRE(head_on.size() == 1);
  REQUIRE(tilted.size() == 1);
  CHECK(tilted[0].range == doctest::Approx(head_on[0].range).epsilon(1e-12));
  CHECK(tilted[0].amplitude / head_on[0].amplitude == doctest::Approx(0.05).epsilon(1e-12));

  // Just inside the 25 degree cone: no attenuation.
  auto inside = visible_reflectors(wall_scene(deg2rad(24.0), true), pose, cfg);
  REQUIRE(inside.size() == 1);
  CHECK(inside[0].amplitude == doctest::Approx(head_on[0].amplitude).epsilon(1e-12));

  // Matte walls never get the cone factor.
  auto matte = visible_reflectors(wall_scene(deg2rad(50.0), false), pose, cfg);
  REQUIRE(matte.size() == 1);
  CHECK(matte[0].amplitude == doctest::Approx(head_on[0].amplitude).epsilon(1e-12));
}

TEST_CASE("first-order ghosts appear behind specular walls") {
  SimConfig cfg = quiet_fullscale();
  cfg.ghost_order = 1;
  Pose pose{{0.0, 0.0}, 0.0};

  Scene sc;
  sc.bounds = {{-20.0, -20.0}, {20.0, 20.0}};
  // Large specular wall at x = 6, scatterer in front of it.
  sc.walls.push_back({{{6.0, -8.0}, {6.0, 8.0}}, 1.0, true});
  sc.scatterers.push_back({{4.0, 0.5}, 1.0});

  SimConfig no_ghost = cfg;
  no_ghost.ghost_order = 0;
  const auto with = visible_reflectors(sc, pose, cfg);
  const auto without = visible_reflectors(sc, pose, no_ghost);
  CHECK(with.size() > without.size());

  // The mirror image of the scatterer sits at (8, 0.5): range 8.0156...,
  // strictly beyond the wall plane.
  const double ghost_range = std::sqrt(8.0 * 8.0 + 0.5 * 0.5);
  bool found = false;
  for (const auto& r : with)
    if (std::abs(r.range - ghost_range) < 1e-9) found = true;
  CHECK(found);
}

TEST_CASE("azimuth cut through a point reflector matches the Dirichlet kernel") {
  SimConfig cfg = quiet_fullscale();
  // Scatterer on an exact range bin and an exact sine-grid column.
  const double s0 = 0.5;  // column 48 of 64
  const double range = 5.0;
  const double az = std::asin(s0);
  Scene sc = one_scatterer({range * std::cos(az), range * std::sin(az)});
  Pose pose{{0.0, 0.0}, 0.0};

  ArraySnapshot snap = radar_snapshot(sc, pose, cfg, 0);
  PolarImage img = radar_image(snap, cfg);
  REQUIRE(img.n_range == 256);
  REQUIRE(img.n_azimuth == 64);

  const int peak_row = 128;  // 5 m of 10 m across 256 bins
  const int peak_col = 48;
  // The peak must be the global maximum.
  float best = 0.0f;
  int best_r = -1, best_c = -1;
  for (int r = 0; r < img.n_range; ++r)
    for (int c = 0; c < img.n_azimuth; ++c)
      if (img.at(r, c) > best) {
        best = img.at(r, c);
        best_r = r;
        best_c = c;
      }
  CHECK(best_r == peak_row);
  CHECK(best_c == peak_col);

  // Analytic aperture response |D_8(pi*(s0 - s_m))|, normalized at the peak.
  const double A = static_cast<double>(img.at(peak_row, peak_col)) / 8.0;
  double max_err = 0.0, max_pred = 0.0;
  for (int m = 0; m < 64; ++m) {
    const double sm = 2.0 * (m - 32) / 64.0;
    const double phi = kPi * (s0 - sm);
    const double num = std::sin(8.0 * phi / 2.0), den = std::sin(phi / 2.0);
    const double d8 = std::abs(den) < 1e-12 ? 8.0 : std::abs(num / den);
    const double pred = A * d8;
    max_err = std::max(max_err, std::abs(static_cast<double>(img.at(peak_row, m)) - pred));
    max_pred = std::max(max_pred, pred);
  }
  CHECK(max_err / max_pred < 1e-6);
}

TEST_CASE("lidar scan matches an independent ray intersection oracle") {
  SimConfig cfg;  // full-scale grid
  auto rng = make_rng(31, 0);
  const SceneKind kinds[3] = {SceneKind::same, SceneKind::similar,
                              SceneKind::different};
  int columns_with_hits = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Scene sc = gen_scene(mix_seed(31, trial), kinds[trial % 3]);
    Pose pose = free_pose(sc, rng);
    PolarImage img = lidar_scan(sc, pose, cfg);

    const double bin = cfg.max_range / cfg.n_range_bins;
    for (int a = 0; a < cfg.n_lidar_az_bins; ++a) {
      const double th =
          pose.heading - kPi / 2.0 + (a + 0.5) * kPi / cfg.n_lidar_az_bins;
      const Vec2 dir{std::cos(th), std::sin(th)};
      // Independent 2x2 solve for the nearest wall hit along the ray.
      double best = std::numeric_limits<double>::infinity();
      for (const Wall& w : sc.walls) {
        const double a11 = dir.x, a12 = w.seg.p0.x - w.seg.p1.x;
        const double a21 = dir.y, a22 = w.seg.p0.y - w.seg.p1.y;
        const double b1 = w.seg.p0.x - pose.pos.x, b2 = w.seg.p0.y - pose.pos.y;
        const double det = a11 * a22 - a12 * a21;
        if (std::abs(det) < 1e-14) continue;
        const double t = (b1 * a22 - a12 * b2) / det;
        const double u = (a11 * b2 - b1 * a21) / det;
        if (t > 1e-9 && u >= 0.0 && u <= 1.0) best = std::min(best, t);
      }

      int occupied = -1, count = 0;
      for (int r = 0; r < cfg.n_range_bins; ++r)
        if (img.at(r, a) != 0.0f) occupied = r, ++count;

      if (std::abs(best - cfg.max_range) < 1e-6) continue;  // boundary race
      if (best < cfg.max_range) {
        REQUIRE(count == 1);
        CHECK(std::abs((occupied + 0.5) * bin - best) <= 0.5 * bin + 1e-9);
        ++columns_with_hits;
      } else {
        CHECK(count == 0);
      }
    }
  }
  CHECK(columns_with_hits > 10000);  // closed rooms: the oracle saw plenty of walls
}

TEST_CASE("sim config validation") {
  SimConfig bad;
  bad.n_fast_time = 100;  // not a power of two
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = SimConfig{};
  bad.n_range_bins = 512;  // > n_fast_time / 2
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = SimConfig{};
  bad.n_lidar_az_bins = 100;  // not a multiple of radar az bins
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = SimConfig{};
  bad.ghost_order = 2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = SimConfig{};
  bad.noise_sigma = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_NOTHROW(SimConfig{}.validate());
}
