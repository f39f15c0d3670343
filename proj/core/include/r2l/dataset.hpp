#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "r2l/dsp.hpp"
#include "r2l/scene.hpp"
#include "r2l/serialize.hpp"
#include "r2l/sim.hpp"

namespace r2l {

// One stored frame: the network input source image and its label.
struct FrameRecord {
  PolarImage radar;  // normalized-sparse, n_range x n_radar_az_bins
  PolarImage lidar;  // binary, n_range x n_lidar_az_bins
  Pose pose;
  int index = 0;
};

struct FrameInfo {
  uint64_t radar_offset = 0;
  uint64_t lidar_offset = 0;
  Pose pose;
  int index = 0;
};

struct TrajectoryEntry {
  int id = 0;
  SceneKind kind = SceneKind::same;
  std::string split;  // train | test_same | test_similar | test_different
  uint64_t scene_seed = 0;
  uint64_t traj_seed = 0;
  int n_frames = 0;
  std::string file;  // relative to the dataset directory
  std::vector<FrameInfo> frames;
};

struct Dataset {
  std::filesystem::path dir;
  int version = 1;
  SimConfig sim;
  double keep_fraction = kDefaultKeepFraction;
  double traj_step = 0.05;
  std::vector<TrajectoryEntry> trajectories;

  std::vector<const TrajectoryEntry*> split_entries(const std::string& split) const;
};

struct DatasetCounts {
  int train = 0;
  int test_same = 0;
  int test_similar = 0;
  int test_different = 0;
  int frames_per_traj = 0;
};

// Generates scenes, trajectories, and per-frame radar/lidar pairs, writing
// one binary file per trajectory plus manifest.json. Fully deterministic in
// (cfg, seed). Training and test trajectories are disjoint; test_same
// trajectories revisit training scenes (new paths), test_similar uses fresh
// scenes from the same generator family, test_different uses the lobby
// family.
Dataset make_dataset(const std::filesystem::path& out_dir, const DatasetCounts& counts,
                     const SimConfig& cfg, uint64_t seed,
                     double keep_fraction = kDefaultKeepFraction,
                     double traj_step = 0.05);

Dataset load_dataset(const std::filesystem::path& dir);  // throws DataError

FrameRecord load_frame(const Dataset& ds, const TrajectoryEntry& traj, int i);
std::vector<FrameRecord> load_trajectory_frames(const Dataset& ds,
                                                const TrajectoryEntry& traj);

// The processed input image for one frame: range FFT -> azimuth FFT ->
// log normalize -> low threshold. Shared by generation and by tests.
PolarImage process_radar_frame(const Scene& scene, const Pose& pose,
                               const SimConfig& cfg, uint64_t frame_seed,
                               double keep_fraction);

// Per-frame simulation seed within a trajectory.
uint64_t frame_seed(uint64_t traj_seed, int frame_index);

}  // namespace r2l
