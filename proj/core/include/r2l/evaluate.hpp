#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "r2l/dataset.hpp"
#include "r2l/pointcloud.hpp"
#include "r2l/unet.hpp"

namespace r2l {

struct EvalSettings {
  std::vector<double> cfar_thresholds_db = {1.0, 2.0, 4.0, 8.0};
  double tau = 0.5;        // probability threshold on model output
  int cfar_guard_cells = 2;
  int cfar_train_cells = 8;
  bool write_images = true;  // per-frame PGM triptychs
  void validate() const;
};

// Per-method metric samples over one split.
struct MethodStats {
  std::string name;
  std::vector<double> chamfer_m;        // scored frames only
  std::vector<double> mod_hausdorff_m;  // scored frames only
  int n_empty = 0;   // frames whose detection cloud was empty (excluded)
  int n_scored = 0;

  double median_chamfer() const;
  double median_mod_hausdorff() const;
  // Distance value at each percentile {5, 10, ..., 95}.
  std::vector<double> cdf(const std::vector<double>& samples) const;
};

struct EvalReport {
  std::string split;
  int n_frames = 0;       // frames with a nonempty ground-truth cloud
  int n_gt_empty = 0;     // frames skipped because the label cloud was empty
  std::vector<MethodStats> methods;  // model first, then cfar_<t>dB

  const MethodStats* find(const std::string& name) const;
};

// Scores the model (thresholded at tau) and each CFAR baseline against the
// lidar labels of `split`. CFAR runs on radar magnitude images regenerated
// from the recorded seeds. If `labels_from` is non-null, ground-truth labels
// are read from that dataset instead (same layout required). When report_dir
// is nonempty, writes metrics CSVs and per-frame PGM triptychs
// (input | prediction | label).
EvalReport evaluate_split(const Dataset& ds, const std::string& split,
                          const UNet<float>& net, const EvalSettings& settings,
                          const std::filesystem::path& report_dir = {},
                          const Dataset* labels_from = nullptr);

void write_report_csv(const EvalReport& report, const std::filesystem::path& dir);

}  // namespace r2l
