#include "r2l/dataset.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "r2l/rng.hpp"

namespace r2l {

using nlohmann::json;

uint64_t frame_seed(uint64_t traj_seed, int frame_index) {
  return mix_seed(traj_seed, static_cast<uint64_t>(frame_index) + 0xf0);
}

PolarImage process_radar_frame(const Scene& scene, const Pose& pose,
                               const SimConfig& cfg, uint64_t seed,
                               double keep_fraction) {
  ArraySnapshot snap = radar_snapshot(scene, pose, cfg, seed);
  PolarImage mag = radar_image(snap, cfg);
  return low_threshold(log_normalize(mag), keep_fraction);
}

std::vector<const TrajectoryEntry*> Dataset::split_entries(
    const std::string& split) const {
  std::vector<const TrajectoryEntry*> out;
  for (const auto& t : trajectories)
    if (t.split == split) out.push_back(&t);
  return out;
}

namespace {

Blob image_blob(const PolarImage& img) {
  const auto dims = std::vector<uint32_t>{static_cast<uint32_t>(img.n_range),
                                          static_cast<uint32_t>(img.n_azimuth)};
  if (img.kind == ImageKind::binary) {
    std::vector<uint8_t> u8(img.size());
    for (size_t i = 0; i < img.size(); ++i) u8[i] = img.data[i] != 0.0f ? 1 : 0;
    return blob_from_u8(dims, u8.data());
  }
  return blob_from_f32(dims, img.data.data());
}

PolarImage blob_image(const Blob& b, double max_range, AzimuthGrid grid,
                      ImageKind kind) {
  if (b.dims.size() != 2) throw DataError("frame blob: want 2 dims");
  PolarImage img(static_cast<int>(b.dims[0]), static_cast<int>(b.dims[1]), max_range,
                 grid, kind);
  if (b.kind == kBlobU8) {
    const auto u8 = blob_as_u8(b);
    for (size_t i = 0; i < u8.size(); ++i) img.data[i] = u8[i] ? 1.0f : 0.0f;
  } else {
    img.data = blob_as_f32(b);
  }
  return img;
}

struct TrajPlan {
  std::string split;
  SceneKind kind;
  uint64_t scene_seed;
};

}  // namespace

Dataset make_dataset(const std::filesystem::path& out_dir, const DatasetCounts& counts,
                     const SimConfig& cfg, uint64_t seed, double keep_fraction,
                     double traj_step) {
  cfg.validate();
  if (counts.frames_per_traj < 1)
    throw std::invalid_argument("make_dataset: frames_per_traj >= 1");
  if (counts.train < 0 || counts.test_same < 0 || counts.test_similar < 0 ||
      counts.test_different < 0)
    throw std::invalid_argument("make_dataset: negative trajectory count");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("make_dataset: cannot create " + out_dir.string());

  Dataset ds;
  ds.dir = out_dir;
  ds.sim = cfg;
  ds.keep_fraction = keep_fraction;
  ds.traj_step = traj_step;

  // Training scenes come first; test_same revisits them (fresh trajectories),
  // the other splits get fresh scenes.
  std::vector<TrajPlan> plans;
  std::vector<uint64_t> train_scene_seeds;
  for (int i = 0; i < counts.train; ++i) {
    const uint64_t ss = mix_seed(seed, 1000 + static_cast<uint64_t>(i));
    train_scene_seeds.push_back(ss);
    plans.push_back({"train", SceneKind::same, ss});
  }
  for (int i = 0; i < counts.test_same; ++i) {
    const uint64_t ss = train_scene_seeds.empty()
                            ? mix_seed(seed, 3000 + static_cast<uint64_t>(i))
                            : train_scene_seeds[i % train_scene_seeds.size()];
    plans.push_back({"test_same", SceneKind::same, ss});
  }
  for (int i = 0; i < counts.test_similar; ++i)
    plans.push_back({"test_similar", SceneKind::similar,
                     mix_seed(seed, 4000 + static_cast<uint64_t>(i))});
  for (int i = 0; i < counts.test_different; ++i)
    plans.push_back({"test_different", SceneKind::different,
                     mix_seed(seed, 5000 + static_cast<uint64_t>(i))});

  json jtrajs = json::array();
  for (size_t id = 0; id < plans.size(); ++id) {
    const TrajPlan& plan = plans[id];
    TrajectoryEntry entry;
    entry.id = static_cast<int>(id);
    entry.kind = plan.kind;
    entry.split = plan.split;
    entry.scene_seed = plan.scene_seed;
    entry.traj_seed = mix_seed(seed, 2000 + static_cast<uint64_t>(id));
    entry.n_frames = counts.frames_per_traj;
    char name[32];
    std::snprintf(name, sizeof name, "traj_%03d.bin", entry.id);
    entry.file = name;

    Scene scene = gen_scene(entry.scene_seed, entry.kind);
    std::vector<Pose> poses;
    try {
      poses = gen_trajectory(scene, entry.n_frames, traj_step, entry.traj_seed);
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("make_dataset: trajectory " + std::to_string(id) +
                               ": " + e.what());
    }

    std::ofstream os(out_dir / entry.file, std::ios::binary);
    if (!os)
      throw std::runtime_error("make_dataset: cannot write " +
                               (out_dir / entry.file).string());
    for (int f = 0; f < entry.n_frames; ++f) {
      FrameInfo info;
      info.index = f;
      info.pose = poses[f];
      const uint64_t fs = frame_seed(entry.traj_seed, f);
      PolarImage radar = process_radar_frame(scene, poses[f], cfg, fs, keep_fraction);
      PolarImage lidar = lidar_scan(scene, poses[f], cfg);
      info.radar_offset = static_cast<uint64_t>(os.tellp());
      write_blob(os, image_blob(radar));
      info.lidar_offset = static_cast<uint64_t>(os.tellp());
      write_blob(os, image_blob(lidar));
      entry.frames.push_back(info);
    }
    os.close();

    json jframes = json::array();
    for (const FrameInfo& fi : entry.frames)
      jframes.push_back(json{{"radar_offset", fi.radar_offset},
                             {"lidar_offset", fi.lidar_offset},
                             {"x", fi.pose.pos.x},
                             {"y", fi.pose.pos.y},
                             {"heading", fi.pose.heading},
                             {"index", fi.index}});
    jtrajs.push_back(json{{"id", entry.id},
                          {"kind", scene_kind_name(entry.kind)},
                          {"split", entry.split},
                          {"scene_seed", entry.scene_seed},
                          {"traj_seed", entry.traj_seed},
                          {"n_frames", entry.n_frames},
                          {"file", entry.file},
                          {"frames", jframes}});
    ds.trajectories.push_back(std::move(entry));
  }

  json manifest{{"version", ds.version},
                {"keep_fraction", ds.keep_fraction},
                {"traj_step", ds.traj_step},
                {"trajectories", jtrajs}};
  manifest["sim"] = {{"max_range", cfg.max_range},
                     {"n_range_bins", cfg.n_range_bins},
                     {"n_radar_az_bins", cfg.n_radar_az_bins},
                     {"n_lidar_az_bins", cfg.n_lidar_az_bins},
                     {"specular_halfangle", cfg.specular_halfangle},
                     {"ghost_order", cfg.ghost_order},
                     {"smoke", cfg.smoke},
                     {"rng_seed", cfg.rng_seed},
                     {"n_antennas", cfg.n_antennas},
                     {"n_fast_time", cfg.n_fast_time},
                     {"wavelength", cfg.wavelength},
                     {"noise_sigma", cfg.noise_sigma},
                     {"wall_sample_spacing", cfg.wall_sample_spacing},
                     {"ghost_gain", cfg.ghost_gain}};
  std::ofstream mf(out_dir / "manifest.json");
  if (!mf) throw std::runtime_error("make_dataset: cannot write manifest");
  mf << manifest.dump(2) << "\n";
  if (!mf) throw std::runtime_error("make_dataset: manifest write failed");
  return ds;
}

Dataset load_dataset(const std::filesystem::path& dir) {
  std::ifstream mf(dir / "manifest.json");
  if (!mf) throw DataError("load_dataset: cannot open " + (dir / "manifest.json").string());
  json manifest;
  try {
    mf >> manifest;
  } catch (const json::exception& e) {
    throw DataError(std::string("load_dataset: manifest parse error: ") + e.what());
  }

  Dataset ds;
  ds.dir = dir;
  try {
    ds.version = manifest.at("version").get<int>();
    const auto& s = manifest.at("sim");
    ds.sim.max_range = s.at("max_range").get<double>();
    ds.sim.n_range_bins = s.at("n_range_bins").get<int>();
    ds.sim.n_radar_az_bins = s.at("n_radar_az_bins").get<int>();
    ds.sim.n_lidar_az_bins = s.at("n_lidar_az_bins").get<int>();
    ds.sim.specular_halfangle = s.at("specular_halfangle").get<double>();
    ds.sim.ghost_order = s.at("ghost_order").get<int>();
    ds.sim.smoke = s.at("smoke").get<bool>();
    ds.sim.rng_seed = s.at("rng_seed").get<uint64_t>();
    ds.sim.n_antennas = s.at("n_antennas").get<int>();
    ds.sim.n_fast_time = s.at("n_fast_time").get<int>();
    ds.sim.wavelength = s.at("wavelength").get<double>();
    ds.sim.noise_sigma = s.at("noise_sigma").get<double>();
    ds.sim.wall_sample_spacing = s.at("wall_sample_spacing").get<double>();
    ds.sim.ghost_gain = s.at("ghost_gain").get<double>();
    ds.keep_fraction = manifest.at("keep_fraction").get<double>();
    ds.traj_step = manifest.at("traj_step").get<double>();
    for (const auto& jt : manifest.at("trajectories")) {
      TrajectoryEntry e;
      e.id = jt.at("id").get<int>();
      e.kind = scene_kind_from_name(jt.at("kind").get<std::string>());
      e.split = jt.at("split").get<std::string>();
      e.scene_seed = jt.at("scene_seed").get<uint64_t>();
      e.traj_seed = jt.at("traj_seed").get<uint64_t>();
      e.n_frames = jt.at("n_frames").get<int>();
      e.file = jt.at("file").get<std::string>();
      for (const auto& jf : jt.at("frames")) {
        FrameInfo fi;
        fi.radar_offset = jf.at("radar_offset").get<uint64_t>();
        fi.lidar_offset = jf.at("lidar_offset").get<uint64_t>();
        fi.pose.pos.x = jf.at("x").get<double>();
        fi.pose.pos.y = jf.at("y").get<double>();
        fi.pose.heading = jf.at("heading").get<double>();
        fi.index = jf.at("index").get<int>();
        e.frames.push_back(fi);
      }
      if (static_cast<int>(e.frames.size()) != e.n_frames)
        throw DataError("load_dataset: frame count mismatch in trajectory " +
                        std::to_string(e.id));
      ds.trajectories.push_back(std::move(e));
    }
  } catch (const json::exception& err) {
    throw DataError(std::string("load_dataset: bad manifest field: ") + err.what());
  }
  ds.sim.validate();

  // Trajectory ids must be unique (train/test disjointness), files must exist.
  std::set<int> ids;
  for (const auto& t : ds.trajectories) {
    if (!ids.insert(t.id).second)
      throw DataError("load_dataset: duplicate trajectory id " + std::to_string(t.id));
    if (!std::filesystem::exists(dir / t.file))
      throw DataError("load_dataset: missing trajectory file " + t.file);
  }
  return ds;
}

FrameRecord load_frame(const Dataset& ds, const TrajectoryEntry& traj, int i) {
  if (i < 0 || i >= traj.n_frames)
    throw std::invalid_argument("load_frame: index out of range");
  std::ifstream is(ds.dir / traj.file, std::ios::binary);
  if (!is) throw DataError("load_frame: cannot open " + traj.file);
  const FrameInfo& fi = traj.frames[i];

  FrameRecord rec;
  rec.pose = fi.pose;
  rec.index = fi.index;
  is.seekg(static_cast<std::streamoff>(fi.radar_offset));
  rec.radar = blob_image(read_blob(is), ds.sim.max_range, AzimuthGrid::sine_uniform,
                         ImageKind::normalized);
  is.seekg(static_cast<std::streamoff>(fi.lidar_offset));
  rec.lidar = blob_image(read_blob(is), ds.sim.max_range, AzimuthGrid::angle_uniform,
                         ImageKind::binary);
  if (rec.radar.n_range != ds.sim.n_range_bins ||
      rec.radar.n_azimuth != ds.sim.n_radar_az_bins ||
      rec.lidar.n_range != ds.sim.n_range_bins ||
      rec.lidar.n_azimuth != ds.sim.n_lidar_az_bins)
    throw DataError("load_frame: image dims do not match manifest sim config");
  return rec;
}

std::vector<FrameRecord> load_trajectory_frames(const Dataset& ds,
                                                const TrajectoryEntry& traj) {
  std::vector<FrameRecord> out;
  out.reserve(traj.n_frames);
  std::ifstream is(ds.dir / traj.file, std::ios::binary);
  if (!is) throw DataError("load_trajectory_frames: cannot open " + traj.file);
  for (int i = 0; i < traj.n_frames; ++i) {
    const FrameInfo& fi = traj.frames[i];
    FrameRecord rec;
    rec.pose = fi.pose;
    rec.index = fi.index;
    is.seekg(static_cast<std::streamoff>(fi.radar_offset));
    rec.radar = blob_image(read_blob(is), ds.sim.max_range, AzimuthGrid::sine_uniform,
                           ImageKind::normalized);
    is.seekg(static_cast<std::streamoff>(fi.lidar_offset));
    rec.lidar = blob_image(read_blob(is), ds.sim.max_range, AzimuthGrid::angle_uniform,
                           ImageKind::binary);
    out.push_back(std::move(rec));
  }
  if (!out.empty() &&
      (out[0].radar.n_range != ds.sim.n_range_bins ||
       out[0].radar.n_azimuth != ds.sim.n_radar_az_bins ||
       out[0].lidar.n_azimuth != ds.sim.n_lidar_az_bins))
    throw DataError("load_trajectory_frames: image dims do not match manifest");
  return out;
}

}  // namespace r2l
