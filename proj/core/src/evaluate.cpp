#include "r2l/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "r2l/frame_stack.hpp"
#include "r2l/pgm.hpp"

namespace r2l {

void EvalSettings::validate() const {
  if (!(tau > 0.0 && tau < 1.0))
    throw std::invalid_argument("EvalSettings: tau must be in (0, 1)");
  for (double db : cfar_thresholds_db)
    if (!std::isfinite(db))
      throw std::invalid_argument("EvalSettings: non-finite CFAR threshold");
  if (!cfar_thresholds_db.empty())
    CfarConfig{cfar_guard_cells, cfar_train_cells, 8.0}.validate();
}

double MethodStats::median_chamfer() const {
  if (chamfer_m.empty()) return std::numeric_limits<double>::quiet_NaN();
  return median_of(chamfer_m);
}

double MethodStats::median_mod_hausdorff() const {
  if (mod_hausdorff_m.empty()) return std::numeric_limits<double>::quiet_NaN();
  return median_of(mod_hausdorff_m);
}

std::vector<double> MethodStats::cdf(const std::vector<double>& samples) const {
  if (samples.empty()) return {};
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  const auto n = static_cast<double>(sorted.size());
  for (int p = 5; p <= 95; p += 5) {
    // Nearest-rank percentile.
    auto idx = static_cast<long long>(std::ceil(p / 100.0 * n)) - 1;
    idx = std::clamp<long long>(idx, 0, sorted.size() - 1);
    out.push_back(sorted[static_cast<size_t>(idx)]);
  }
  return out;
}

const MethodStats* EvalReport::find(const std::string& name) const {
  for (const auto& m : methods)
    if (m.name == name) return &m;
  return nullptr;
}

namespace {

std::string cfar_method_name(double db) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "cfar_%gdB", db);
  return buf;
}

void score_frame(MethodStats& m, const PointCloud2D& det, const PointCloud2D& gt) {
  if (det.empty()) {
    ++m.n_empty;
    return;
  }
  m.chamfer_m.push_back(chamfer(det, gt));
  m.mod_hausdorff_m.push_back(mod_hausdorff(det, gt));
  ++m.n_scored;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

EvalReport evaluate_split(const Dataset& ds, const std::string& split,
                          const UNet<float>& net, const EvalSettings& settings,
                          const std::filesystem::path& report_dir,
                          const Dataset* labels_from) {
  settings.validate();
  net.cfg.validate();
  if (net.cfg.n_range != ds.sim.n_range_bins ||
      net.cfg.n_az_in != ds.sim.n_radar_az_bins ||
      net.cfg.n_az_out() != ds.sim.n_lidar_az_bins)
    throw DataError("evaluate_split: network dims do not match dataset");

  const auto entries = ds.split_entries(split);
  if (entries.empty()) throw DataError("evaluate_split: no trajectories in split " + split);

  EvalReport report;
  report.split = split;
  report.methods.push_back(MethodStats{});
  report.methods.back().name = "model";
  for (double db : settings.cfar_thresholds_db) {
    report.methods.push_back(MethodStats{});
    report.methods.back().name = cfar_method_name(db);
  }

  const bool want_images = !report_dir.empty() && settings.write_images;
  if (!report_dir.empty()) {
    std::filesystem::create_directories(report_dir);
    if (want_images) std::filesystem::create_directories(report_dir / "images");
  }

  for (const TrajectoryEntry* entry : entries) {
    const std::vector<FrameRecord> frames = load_trajectory_frames(ds, *entry);

    // Optional external label source (e.g. the clear-air twin of a smoke
    // dataset); must have a trajectory of the same id and length.
    const TrajectoryEntry* label_entry = entry;
    const Dataset* label_ds = &ds;
    if (labels_from) {
      label_ds = labels_from;
      label_entry = nullptr;
      for (const auto& t : labels_from->trajectories)
        if (t.id == entry->id) label_entry = &t;
      if (!label_entry || label_entry->n_frames != entry->n_frames ||
          label_entry->split != entry->split)
        throw DataError("evaluate_split: label dataset layout mismatch at trajectory " +
                        std::to_string(entry->id));
    }
    const std::vector<FrameRecord> labels =
        labels_from ? load_trajectory_frames(*label_ds, *label_entry) : frames;

    // CFAR baselines run on the raw magnitude image, which is not stored;
    // regenerate it from the recorded seeds.
    const Scene scene = gen_scene(entry->scene_seed, entry->kind);

    FrameStack stack(net.cfg.history, net.cfg.n_range, net.cfg.n_az_in,
                     ds.sim.max_range);
    for (int f = 0; f < entry->n_frames; ++f) {
      stack.push(frames[f].radar);
      const PointCloud2D gt = polar_to_points(labels[f].lidar);
      if (gt.empty()) {
        ++report.n_gt_empty;
        continue;
      }
      ++report.n_frames;

      const Tensor<float> input = stack.as_tensor();
      const PolarImage prob = unet_infer(net, input, ds.sim.max_range);
      const PolarImage pred = threshold_image(prob, settings.tau);
      score_frame(report.methods[0], polar_to_points(pred), gt);

      if (!settings.cfar_thresholds_db.empty() || want_images) {
        const ArraySnapshot snap = radar_snapshot(
            scene, frames[f].pose, ds.sim, frame_seed(entry->traj_seed, f));
        const PolarImage mag = radar_image(snap, ds.sim);
        for (size_t ti = 0; ti < settings.cfar_thresholds_db.size(); ++ti) {
          CfarConfig cc{settings.cfar_guard_cells, settings.cfar_train_cells,
                        settings.cfar_thresholds_db[ti]};
          score_frame(report.methods[1 + ti], polar_to_points(ca_cfar(mag, cc)), gt);
        }
      }

      if (want_images) {
        char name[96];
        std::snprintf(name, sizeof name, "%s_t%03d_f%04d.pgm", split.c_str(),
                      entry->id, f);
        write_pgm_panels(report_dir / "images" / name,
                         {&frames[f].radar, &prob, &labels[f].lidar});
      }
    }
  }

  if (!report_dir.empty()) write_report_csv(report, report_dir);
  return report;
}

void write_report_csv(const EvalReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream os(dir / ("metrics_" + report.split + ".csv"));
    if (!os) throw std::runtime_error("write_report_csv: cannot write metrics csv");
    os << "method,n_scored,n_empty,mean_chamfer_m,median_chamfer_m,"
          "mean_mod_hausdorff_m,median_mod_hausdorff_m\n";
    char buf[256];
    for (const auto& m : report.methods) {
      std::snprintf(buf, sizeof buf, "%s,%d,%d,%.17g,%.17g,%.17g,%.17g\n",
                    m.name.c_str(), m.n_scored, m.n_empty, mean_of(m.chamfer_m),
                    m.median_chamfer(), mean_of(m.mod_hausdorff_m),
                    m.median_mod_hausdorff());
      os << buf;
    }
  }
  {
    std::ofstream os(dir / ("cdf_" + report.split + ".csv"));
    if (!os) throw std::runtime_error("write_report_csv: cannot write cdf csv");
    os << "method,percentile,chamfer_m,mod_hausdorff_m\n";
    char buf[256];
    for (const auto& m : report.methods) {
      const auto cc = m.cdf(m.chamfer_m);
      const auto hc = m.cdf(m.mod_hausdorff_m);
      if (cc.empty()) continue;
      for (size_t i = 0; i < cc.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g\n", m.name.c_str(),
                      static_cast<int>(5 * (i + 1)), cc[i], hc[i]);
        os << buf;
      }
    }
  }
}

}  // namespace r2l
