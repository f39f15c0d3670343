#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "r2l/dataset.hpp"

using namespace r2l;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(R2L_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("r2l_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void check_dirs_byte_identical(const fs::path& a, const fs::path& b) {
  std::vector<fs::path> fa, fb;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) fa.push_back(fs::relative(e.path(), a));
  for (const auto& e : fs::recursive_directory_iterator(b))
    if (e.is_regular_file()) fb.push_back(fs::relative(e.path(), b));
  std::sort(fa.begin(), fa.end());
  std::sort(fb.begin(), fb.end());
  REQUIRE(fa == fb);
  for (const auto& rel : fa) CHECK(read_bytes(a / rel) == read_bytes(b / rel));
}

// Desk-scale dimensions so the whole pipeline runs in seconds.
const char* kTinyConfig = R"({
  "sim": {
    "n_range_bins": 32,
    "n_radar_az_bins": 8,
    "n_lidar_az_bins": 64,
    "n_antennas": 4,
    "n_fast_time": 64
  },
  "unet": {
    "levels": 2,
    "encoder_filters": [4, 8],
    "history": 1,
    "n_range": 32,
    "n_az_in": 8,
    "az_upsample_factor": 8
  },
  "train": {"batch_size": 4, "shuffle_seed": 1},
  "adam": {"lr": 0.002}
})";

struct PipelineDirs {
  fs::path root, data, config_file, ckpt, report;
};

// One shared simulate+train run; built on first use.
const PipelineDirs& pipeline() {
  static PipelineDirs p = [] {
    PipelineDirs d;
    d.root = fresh_dir("pipeline");
    d.data = d.root / "ds";
    d.config_file = d.root / "cfg.json";
    d.ckpt = d.root / "model.ckpt";
    d.report = d.root / "report";
    std::ofstream(d.config_file) << kTinyConfig;
    REQUIRE(run_cli("simulate --out " + d.data.string() +
                    " --seed 5 --train 2 --test-same 1 --test-similar 1"
                    " --test-different 1 --frames 6 --config " +
                    d.config_file.string()) == 0);
    REQUIRE(run_cli("train --data " + d.data.string() + " --config " +
                    d.config_file.string() + " --epochs 2 --out " + d.ckpt.string()) == 0);
    return d;
  }();
  return p;
}

}  // namespace

TEST_CASE("simulate and train produce the expected artifacts") {
  const PipelineDirs& p = pipeline();
  CHECK(fs::exists(p.data / "manifest.json"));
  CHECK(fs::exists(p.ckpt));
  Dataset ds = load_dataset(p.data);
  CHECK(ds.trajectories.size() == 5);
  CHECK(ds.split_entries("train").size() == 2);
  CHECK(ds.sim.n_range_bins == 32);

  // Same seed, second directory: byte-identical dataset.
  fs::path again = fresh_dir("pipeline_again") / "ds";
  REQUIRE(run_cli("simulate --out " + again.string() +
                  " --seed 5 --train 2 --test-same 1 --test-similar 1"
                  " --test-different 1 --frames 6 --config " +
                  pipeline().config_file.string()) == 0);
  check_dirs_byte_identical(p.data, again);
}

TEST_CASE("eval writes split reports") {
  const PipelineDirs& p = pipeline();
  // The tiny dataset is only 8 azimuth columns wide, so shrink the CFAR
  // window to fit.
  REQUIRE(run_cli("eval --data " + p.data.string() + " --split test_same --ckpt " +
                  p.ckpt.string() + " --cfar 1,2,4,8 --tau 0.5 --cfar-guard 1"
                  " --cfar-train 2 --report " +
                  p.report.string()) == 0);
  CHECK(fs::exists(p.report / "metrics_test_same.csv"));
  CHECK(fs::exists(p.report / "cdf_test_same.csv"));
  const std::string metrics = read_bytes(p.report / "metrics_test_same.csv");
  CHECK(metrics.find("model") != std::string::npos);
  CHECK(metrics.find("cfar_1dB") != std::string::npos);
  CHECK(metrics.find("cfar_8dB") != std::string::npos);
}

TEST_CASE("infer and saliency write images") {
  const PipelineDirs& p = pipeline();
  Dataset ds = load_dataset(p.data);
  const fs::path traj = p.data / ds.trajectories[0].file;

  const fs::path pgm = p.root / "pred.pgm";
  REQUIRE(run_cli("infer --ckpt " + p.ckpt.string() + " --frame " + traj.string() +
                  " --index 1 --out " + pgm.string()) == 0);
  REQUIRE(fs::exists(pgm));
  CHECK(read_bytes(pgm).substr(0, 2) == "P2");

  const fs::path sal = p.root / "sal";
  REQUIRE(run_cli("saliency --ckpt " + p.ckpt.string() + " --frame " + traj.string() +
                  " --index 0 --pixel 3,5 --out " + sal.string()) == 0);
  CHECK(fs::exists(sal / "saliency_c0.pgm"));  // history=1: channels 0 and 1
  CHECK(fs::exists(sal / "saliency_c1.pgm"));
  CHECK(fs::exists(sal / "prob.pgm"));
}

TEST_CASE("smoke flag blanks labels without touching radar") {
  const PipelineDirs& p = pipeline();
  fs::path smoked = fresh_dir("smoke") / "ds";
  REQUIRE(run_cli("simulate --out " + smoked.string() +
                  " --seed 5 --train 2 --test-same 1 --test-similar 1"
                  " --test-different 1 --frames 6 --smoke --config " +
                  p.config_file.string()) == 0);
  Dataset normal = load_dataset(p.data);
  Dataset fogged = load_dataset(smoked);
  REQUIRE(normal.trajectories.size() == fogged.trajectories.size());
  for (size_t t = 0; t < normal.trajectories.size(); ++t) {
    for (int i = 0; i < normal.trajectories[t].n_frames; ++i) {
      FrameRecord fn = load_frame(normal, normal.trajectories[t], i);
      FrameRecord fsm = load_frame(fogged, fogged.trajectories[t], i);
      CHECK(fn.radar.data == fsm.radar.data);
      CHECK(fsm.lidar.count_nonzero() == 0);
    }
  }
}

TEST_CASE("usage errors exit with code 1") {
  CHECK(run_cli("") == 1);
  CHECK(run_cli("bogus") == 1);
  CHECK(run_cli("train --data /tmp") == 1);  // missing required flags
  CHECK(run_cli("simulate") == 1);           // missing --out
  const PipelineDirs& p = pipeline();
  Dataset ds = load_dataset(p.data);
  const fs::path traj = p.data / ds.trajectories[0].file;
  CHECK(run_cli("saliency --ckpt " + p.ckpt.string() + " --frame " + traj.string() +
                " --pixel nonsense --out /tmp/r2l_cli_nopix") == 1);
  CHECK(run_cli("--help") == 0);
}

TEST_CASE("data errors exit with code 2") {
  const PipelineDirs& p = pipeline();
  fs::path empty = fresh_dir("no_dataset");
  CHECK(run_cli("train --data " + empty.string() + " --config " +
                p.config_file.string() + " --epochs 1 --out /tmp/r2l_cli_x.ckpt") == 2);
  CHECK(run_cli("train --data " + p.data.string() +
                " --config /tmp/r2l_cli_missing.json --epochs 1 --out /tmp/r2l_cli_x.ckpt") == 2);
  CHECK(run_cli("eval --data " + p.data.string() + " --split nonexistent --ckpt " +
                p.ckpt.string()) == 2);
  const fs::path garbage = p.root / "garbage.bin";
  std::ofstream(garbage) << "this is not a frame file";
  CHECK(run_cli("infer --ckpt " + p.ckpt.string() + " --frame " + garbage.string() +
                " --out /tmp/r2l_cli_y.pgm") == 2);
  // Valid file, out-of-range record index.
  Dataset ds = load_dataset(p.data);
  const fs::path traj = p.data / ds.trajectories[0].file;
  CHECK(run_cli("infer --ckpt " + p.ckpt.string() + " --frame " + traj.string() +
                " --index 99 --out /tmp/r2l_cli_y.pgm") == 2);
}

TEST_CASE("non-finite inputs exit with code 3") {
  const PipelineDirs& p = pipeline();
  Dataset ds = load_dataset(p.data);
  const fs::path src = p.data / ds.trajectories[0].file;

  // Overwrite the first payload float of the frame-0 radar blob with a NaN.
  // Header: 4 magic + 4 version + 4 kind + 4 ndims + 2x4 dims = 24 bytes.
  std::string bytes = read_bytes(src);
  REQUIRE(bytes.size() > 28);
  const unsigned char nan_le[4] = {0x00, 0x00, 0xC0, 0x7F};
  for (int i = 0; i < 4; ++i) bytes[24 + i] = static_cast<char>(nan_le[i]);
  const fs::path poisoned = p.root / "poisoned.bin";
  {
    std::ofstream os(poisoned, std::ios::binary);
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  CHECK(run_cli("infer --ckpt " + p.ckpt.string() + " --frame " + poisoned.string() +
                " --index 0 --out /tmp/r2l_cli_z.pgm") == 3);
}
