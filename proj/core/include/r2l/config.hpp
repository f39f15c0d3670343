#pragma once

#include <filesystem>

#include "r2l/adam.hpp"
#include "r2l/evaluate.hpp"
#include "r2l/loss.hpp"
#include "r2l/sim.hpp"
#include "r2l/train.hpp"
#include "r2l/unet.hpp"

namespace r2l {

// Everything a pipeline run can configure, combined from defaults and an
// optional JSON file whose sections ("sim", "unet", "loss", "adam", "train",
// "eval") mirror the struct field names. Absent sections/fields keep their
// defaults.
struct AppConfig {
  SimConfig sim;
  UNetConfig unet;
  LossConfig loss;
  AdamConfig adam;
  TrainConfig train;
  EvalSettings eval;
  double keep_fraction = kDefaultKeepFraction;
  double traj_step = 0.05;
};

AppConfig load_app_config(const std::filesystem::path& file);  // throws DataError
void save_app_config(const std::filesystem::path& file, const AppConfig& cfg);

// Matched sim/unet dimensions for desk-scale experiments:
// 64 range x 16 azimuth input -> 64 x 128 output, 4 frames of history.
AppConfig toy_config();

// JSON text round-trip used by checkpoint metadata.
std::string app_config_to_json(const AppConfig& cfg);
AppConfig app_config_from_json(const std::string& text);

}  // namespace r2l
