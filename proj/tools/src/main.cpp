#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "r2l/config.hpp"
#include "r2l/dataset.hpp"
#include "r2l/evaluate.hpp"
#include "r2l/frame_stack.hpp"
#include "r2l/gradcheck.hpp"
#include "r2l/pgm.hpp"
#include "r2l/train.hpp"

namespace {

using namespace r2l;

// 0 success, 1 usage error, 2 data error, 3 numeric failure.
enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

std::vector<Blob> read_all_blobs(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open " + path.string());
  std::vector<Blob> blobs;
  while (is.peek() != std::ifstream::traits_type::eof())
    blobs.push_back(read_blob(is));
  if (blobs.empty()) throw DataError("no records in " + path.string());
  return blobs;
}

PolarImage blob_to_radar(const Blob& b, const UNetConfig& cfg) {
  if (b.dims.size() != 2 || b.kind != kBlobF32)
    throw DataError("frame record: want a 2-d f32 image");
  if (static_cast<int>(b.dims[0]) != cfg.n_range ||
      static_cast<int>(b.dims[1]) != cfg.n_az_in)
    throw DataError("frame record dims do not match the checkpoint network");
  PolarImage img(cfg.n_range, cfg.n_az_in, 10.0, AzimuthGrid::sine_uniform,
                 ImageKind::normalized);
  img.data = blob_as_f32(b);
  return img;
}

// Builds the network input for record `index` of a frame file. Trajectory
// files alternate radar/lidar records; preceding radar frames fill the
// history channels. A single-record file is treated as one radar frame, and
// a single 3-d record as a prebuilt input stack.
Tensor<float> build_input(const std::filesystem::path& frame_file, int index,
                          const UNetConfig& cfg) {
  const std::vector<Blob> blobs = read_all_blobs(frame_file);
  if (blobs.size() == 1 && blobs[0].dims.size() == 3) {
    const Blob& b = blobs[0];
    if (b.kind != kBlobF32 || static_cast<int>(b.dims[0]) != cfg.in_channels() ||
        static_cast<int>(b.dims[1]) != cfg.n_range ||
        static_cast<int>(b.dims[2]) != cfg.n_az_in)
      throw DataError("input stack dims do not match the checkpoint network");
    Tensor<float> t({cfg.in_channels(), cfg.n_range, cfg.n_az_in});
    t.v = blob_as_f32(b);
    return t;
  }

  const int stride = blobs.size() == 1 ? 1 : 2;  // radar-only vs radar+lidar
  const int n_frames = static_cast<int>(blobs.size()) / stride;
  if (index < 0 || index >= n_frames)
    throw DataError("frame index " + std::to_string(index) + " out of range (file has " +
                    std::to_string(n_frames) + " records)");
  FrameStack stack(cfg.history, cfg.n_range, cfg.n_az_in, 10.0);
  for (int f = std::max(0, index - cfg.history); f <= index; ++f)
    stack.push(blob_to_radar(blobs[static_cast<size_t>(f) * stride], cfg));
  return stack.as_tensor();
}

int cmd_simulate(const std::string& out_dir, uint64_t seed, const DatasetCounts& counts,
                 bool smoke, const std::string& config_file) {
  AppConfig cfg;
  if (!config_file.empty()) cfg = load_app_config(config_file);
  if (smoke) cfg.sim.smoke = true;
  Dataset ds = make_dataset(out_dir, counts, cfg.sim, seed, cfg.keep_fraction,
                            cfg.traj_step);
  int frames = 0;
  for (const auto& t : ds.trajectories) frames += t.n_frames;
  std::printf("wrote %zu trajectories (%d frames) to %s\n", ds.trajectories.size(),
              frames, out_dir.c_str());
  return kOk;
}

int cmd_train(const std::string& data_dir, const std::string& config_file, int epochs,
              const std::string& out_ckpt) {
  AppConfig cfg = load_app_config(config_file);
  Dataset ds = load_dataset(data_dir);
  const UNetConfig& u = cfg.unet;
  if (u.n_range != ds.sim.n_range_bins || u.n_az_in != ds.sim.n_radar_az_bins ||
      u.n_az_out() != ds.sim.n_lidar_az_bins)
    throw DataError("network dims in config do not match the dataset");

  std::vector<TrainSample> samples;
  for (const auto* tr : ds.split_entries("train")) {
    auto frames = load_trajectory_frames(ds, *tr);
    FrameStack stack(u.history, u.n_range, u.n_az_in, ds.sim.max_range);
    for (const auto& f : frames) {
      stack.push(f.radar);
      TrainSample s{stack.as_tensor(), Tensor<float>({1, u.n_range, u.n_az_out()})};
      for (size_t i = 0; i < f.lidar.size(); ++i) s.target[i] = f.lidar.data[i];
      samples.push_back(std::move(s));
    }
  }
  if (samples.empty()) throw DataError("dataset has no train split");
  std::printf("training on %zu frames\n", samples.size());

  UNet<float> net = UNet<float>::init(u, cfg.train.shuffle_seed);
  AdamState<float> adam;
  TrainConfig tc = cfg.train;
  tc.epochs = epochs;
  const auto losses = train_unet(net, samples, cfg.loss, cfg.adam, adam, tc);
  for (size_t e = 0; e < losses.size(); ++e)
    std::printf("epoch %zu/%d loss %.6f\n", e + 1, epochs, losses[e]);

  Checkpoint ck;
  ck.net = net;
  ck.adam = adam;
  ck.adam_cfg = cfg.adam;
  ck.loss_cfg = cfg.loss;
  ck.epochs_done = tc.start_epoch + tc.epochs;
  ck.batch_size = tc.batch_size;
  ck.shuffle_seed = tc.shuffle_seed;
  save_checkpoint(out_ckpt, ck);
  std::printf("saved %s (%lld parameters)\n", out_ckpt.c_str(), net.n_params());
  return kOk;
}

int cmd_eval(const std::string& data_dir, const std::string& split,
             const std::string& ckpt, const std::vector<double>& cfar_db, double tau,
             const std::string& report_dir, int guard, int train) {
  Dataset ds = load_dataset(data_dir);
  Checkpoint ck = load_checkpoint(ckpt);
  EvalSettings es;
  es.cfar_thresholds_db = cfar_db;
  es.tau = tau;
  es.cfar_guard_cells = guard;
  es.cfar_train_cells = train;
  EvalReport rep = evaluate_split(ds, split, ck.net, es, report_dir);
  std::printf("%s: %d frames scored, %d empty ground truth\n", split.c_str(),
              rep.n_frames, rep.n_gt_empty);
  for (const auto& m : rep.methods)
    std::printf("%-12s scored=%-4d empty=%-4d median_chamfer=%.4f median_mod_hausdorff=%.4f\n",
                m.name.c_str(), m.n_scored, m.n_empty, m.median_chamfer(),
                m.median_mod_hausdorff());
  if (!report_dir.empty()) std::printf("report written to %s\n", report_dir.c_str());
  return kOk;
}

int cmd_infer(const std::string& ckpt, const std::string& frame_file, int index,
              const std::string& out_pgm) {
  Checkpoint ck = load_checkpoint(ckpt);
  Tensor<float> input = build_input(frame_file, index, ck.net.cfg);
  PolarImage prob = unet_infer(ck.net, input, 10.0);
  write_pgm(out_pgm, prob);
  int above = 0;
  for (float v : prob.data)
    if (v >= 0.5f) ++above;
  std::printf("wrote %s (%d of %zu pixels >= 0.5)\n", out_pgm.c_str(), above,
              prob.size());
  return kOk;
}

int cmd_saliency(const std::string& ckpt, const std::string& frame_file, int index,
                 const std::string& pixel, const std::string& out_dir) {
  int row = -1, col = -1;
  if (std::sscanf(pixel.c_str(), "%d,%d", &row, &col) != 2)
    throw std::invalid_argument("--pixel expects R,C");
  Checkpoint ck = load_checkpoint(ckpt);
  Tensor<float> input = build_input(frame_file, index, ck.net.cfg);
  Tensor<float> sal = saliency_map(ck.net, input, row, col);

  std::filesystem::create_directories(out_dir);
  const UNetConfig& cfg = ck.net.cfg;
  for (int c = 0; c < cfg.in_channels(); ++c) {
    PolarImage img(cfg.n_range, cfg.n_az_in, 10.0, AzimuthGrid::sine_uniform,
                   ImageKind::magnitude);
    for (int r = 0; r < cfg.n_range; ++r)
      for (int a = 0; a < cfg.n_az_in; ++a) img.at(r, a) = sal.at3(c, r, a);
    char name[32];
    std::snprintf(name, sizeof name, "saliency_c%d.pgm", c);
    write_pgm(std::filesystem::path(out_dir) / name, img);
  }
  PolarImage prob = unet_infer(ck.net, input, 10.0);
  write_pgm(std::filesystem::path(out_dir) / "prob.pgm", prob);
  std::printf("wrote %d saliency channels for pixel (%d,%d) to %s\n",
              cfg.in_channels(), row, col, out_dir.c_str());
  return kOk;
}

int cmd_gradcheck() {
  GradCheckReport report = run_gradcheck_suite();
  for (const auto& c : report.checks)
    std::printf("%-18s coords=%-4d max_rel_err=%.3e tol=%.0e %s\n", c.name.c_str(),
                c.n_coords, c.max_rel_err, c.tolerance, c.pass() ? "PASS" : "FAIL");
  if (!report.all_pass()) {
    std::fprintf(stderr, "gradient check failed\n");
    return kNumeric;
  }
  std::printf("all %zu checks passed\n", report.checks.size());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radar-to-lidar point cloud upsampling pipeline"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset");
  std::string sim_out, sim_config;
  uint64_t sim_seed = 1;
  DatasetCounts counts;
  counts.frames_per_traj = 50;
  bool smoke = false;
  sim->add_option("--out", sim_out, "output dataset directory")->required();
  sim->add_option("--seed", sim_seed, "master seed");
  sim->add_option("--train", counts.train, "training trajectories");
  sim->add_option("--test-same", counts.test_same, "test trajectories in training scenes");
  sim->add_option("--test-similar", counts.test_similar, "test trajectories in fresh same-family scenes");
  sim->add_option("--test-different", counts.test_different, "test trajectories in lobby scenes");
  sim->add_option("--frames", counts.frames_per_traj, "frames per trajectory");
  sim->add_flag("--smoke", smoke, "suppress lidar returns (radar unaffected)");
  sim->add_option("--config", sim_config, "JSON config overriding sim defaults");

  auto* trn = app.add_subcommand("train", "train the upsampling network");
  std::string trn_data, trn_config, trn_out;
  int trn_epochs = 10;
  trn->add_option("--data", trn_data, "dataset directory")->required();
  trn->add_option("--config", trn_config, "JSON config file")->required();
  trn->add_option("--epochs", trn_epochs, "epochs to run")->required();
  trn->add_option("--out", trn_out, "checkpoint output path")->required();

  auto* evl = app.add_subcommand("eval", "score a checkpoint against baselines");
  std::string evl_data, evl_split, evl_ckpt, evl_report;
  std::vector<double> evl_cfar = {1.0, 2.0, 4.0, 8.0};
  double evl_tau = 0.5;
  int evl_guard = 2, evl_train = 8;
  evl->add_option("--data", evl_data, "dataset directory")->required();
  evl->add_option("--split", evl_split, "split name")->required();
  evl->add_option("--ckpt", evl_ckpt, "checkpoint path")->required();
  evl->add_option("--cfar", evl_cfar, "CFAR thresholds in dB")->delimiter(',');
  evl->add_option("--tau", evl_tau, "probability threshold");
  evl->add_option("--report", evl_report, "report output directory");
  evl->add_option("--cfar-guard", evl_guard, "CFAR guard cells per side");
  evl->add_option("--cfar-train", evl_train, "CFAR training cells per side");

  auto* inf = app.add_subcommand("infer", "run the network on one stored frame");
  std::string inf_ckpt, inf_frame, inf_out;
  int inf_index = 0;
  inf->add_option("--ckpt", inf_ckpt, "checkpoint path")->required();
  inf->add_option("--frame", inf_frame, "frame or trajectory file")->required();
  inf->add_option("--index", inf_index, "record index within the file");
  inf->add_option("--out", inf_out, "output PGM path")->required();

  auto* sal = app.add_subcommand("saliency", "input sensitivity of one output pixel");
  std::string sal_ckpt, sal_frame, sal_pixel, sal_out;
  int sal_index = 0;
  sal->add_option("--ckpt", sal_ckpt, "checkpoint path")->required();
  sal->add_option("--frame", sal_frame, "frame or trajectory file")->required();
  sal->add_option("--index", sal_index, "record index within the file");
  sal->add_option("--pixel", sal_pixel, "output pixel as R,C")->required();
  sal->add_option("--out", sal_out, "output directory")->required();

  app.add_subcommand("gradcheck", "run the autodiff verification suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (sim->parsed())
      return cmd_simulate(sim_out, sim_seed, counts, smoke, sim_config);
    if (trn->parsed()) return cmd_train(trn_data, trn_config, trn_epochs, trn_out);
    if (evl->parsed())
      return cmd_eval(evl_data, evl_split, evl_ckpt, evl_cfar, evl_tau, evl_report,
                      evl_guard, evl_train);
    if (inf->parsed()) return cmd_infer(inf_ckpt, inf_frame, inf_index, inf_out);
    if (sal->parsed())
      return cmd_saliency(sal_ckpt, sal_frame, sal_index, sal_pixel, sal_out);
    return cmd_gradcheck();
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kNumeric;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kData;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kData;
  }
}
