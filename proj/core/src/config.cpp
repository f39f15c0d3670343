#include "r2l/config.hpp"

#include <fstream>

#include <json.hpp>

#include "r2l/errors.hpp"

namespace r2l {

namespace {

using nlohmann::json;

template <class T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void parse_sim(const json& j, SimConfig& c) {
  maybe(j, "max_range", c.max_range);
  maybe(j, "n_range_bins", c.n_range_bins);
  maybe(j, "n_radar_az_bins", c.n_radar_az_bins);
  maybe(j, "n_lidar_az_bins", c.n_lidar_az_bins);
  maybe(j, "specular_halfangle", c.specular_halfangle);
  maybe(j, "ghost_order", c.ghost_order);
  maybe(j, "smoke", c.smoke);
  maybe(j, "rng_seed", c.rng_seed);
  maybe(j, "n_antennas", c.n_antennas);
  maybe(j, "n_fast_time", c.n_fast_time);
  maybe(j, "wavelength", c.wavelength);
  maybe(j, "noise_sigma", c.noise_sigma);
  maybe(j, "wall_sample_spacing", c.wall_sample_spacing);
  maybe(j, "ghost_gain", c.ghost_gain);
}

json dump_sim(const SimConfig& c) {
  return json{{"max_range", c.max_range},
              {"n_range_bins", c.n_range_bins},
              {"n_radar_az_bins", c.n_radar_az_bins},
              {"n_lidar_az_bins", c.n_lidar_az_bins},
              {"specular_halfangle", c.specular_halfangle},
              {"ghost_order", c.ghost_order},
              {"smoke", c.smoke},
              {"rng_seed", c.rng_seed},
              {"n_antennas", c.n_antennas},
              {"n_fast_time", c.n_fast_time},
              {"wavelength", c.wavelength},
              {"noise_sigma", c.noise_sigma},
              {"wall_sample_spacing", c.wall_sample_spacing},
              {"ghost_gain", c.ghost_gain}};
}

void parse_unet(const json& j, UNetConfig& c) {
  maybe(j, "levels", c.levels);
  maybe(j, "encoder_filters", c.encoder_filters);
  maybe(j, "history", c.history);
  maybe(j, "n_range", c.n_range);
  maybe(j, "n_az_in", c.n_az_in);
  maybe(j, "az_upsample_factor", c.az_upsample_factor);
}

json dump_unet(const UNetConfig& c) {
  return json{{"levels", c.levels},           {"encoder_filters", c.encoder_filters},
              {"history", c.history},         {"n_range", c.n_range},
              {"n_az_in", c.n_az_in},         {"az_upsample_factor", c.az_upsample_factor}};
}

void parse_loss(const json& j, LossConfig& c) {
  maybe(j, "bce_weight", c.bce_weight);
  maybe(j, "dice_weight", c.dice_weight);
  maybe(j, "dice_epsilon", c.dice_epsilon);
}

json dump_loss(const LossConfig& c) {
  return json{{"bce_weight", c.bce_weight},
              {"dice_weight", c.dice_weight},
              {"dice_epsilon", c.dice_epsilon}};
}

void parse_adam(const json& j, AdamConfig& c) {
  maybe(j, "lr", c.lr);
  maybe(j, "beta1", c.beta1);
  maybe(j, "beta2", c.beta2);
  maybe(j, "eps", c.eps);
  maybe(j, "seed", c.seed);
}

json dump_adam(const AdamConfig& c) {
  return json{{"lr", c.lr}, {"beta1", c.beta1}, {"beta2", c.beta2},
              {"eps", c.eps}, {"seed", c.seed}};
}

void parse_train(const json& j, TrainConfig& c) {
  maybe(j, "epochs", c.epochs);
  maybe(j, "batch_size", c.batch_size);
  maybe(j, "shuffle_seed", c.shuffle_seed);
}

json dump_train(const TrainConfig& c) {
  return json{{"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"shuffle_seed", c.shuffle_seed}};
}

void parse_eval(const json& j, EvalSettings& c) {
  maybe(j, "cfar_thresholds_db", c.cfar_thresholds_db);
  maybe(j, "tau", c.tau);
  maybe(j, "cfar_guard_cells", c.cfar_guard_cells);
  maybe(j, "cfar_train_cells", c.cfar_train_cells);
  maybe(j, "write_images", c.write_images);
}

json dump_eval(const EvalSettings& c) {
  return json{{"cfar_thresholds_db", c.cfar_thresholds_db},
              {"tau", c.tau},
              {"cfar_guard_cells", c.cfar_guard_cells},
              {"cfar_train_cells", c.cfar_train_cells},
              {"write_images", c.write_images}};
}

AppConfig from_json_obj(const json& j) {
  AppConfig cfg;
  if (j.contains("sim")) parse_sim(j.at("sim"), cfg.sim);
  if (j.contains("unet")) parse_unet(j.at("unet"), cfg.unet);
  if (j.contains("loss")) parse_loss(j.at("loss"), cfg.loss);
  if (j.contains("adam")) parse_adam(j.at("adam"), cfg.adam);
  if (j.contains("train")) parse_train(j.at("train"), cfg.train);
  if (j.contains("eval")) parse_eval(j.at("eval"), cfg.eval);
  maybe(j, "keep_fraction", cfg.keep_fraction);
  maybe(j, "traj_step", cfg.traj_step);
  return cfg;
}

json to_json_obj(const AppConfig& cfg) {
  return json{{"sim", dump_sim(cfg.sim)},     {"unet", dump_unet(cfg.unet)},
              {"loss", dump_loss(cfg.loss)},  {"adam", dump_adam(cfg.adam)},
              {"train", dump_train(cfg.train)}, {"eval", dump_eval(cfg.eval)},
              {"keep_fraction", cfg.keep_fraction},
              {"traj_step", cfg.traj_step}};
}

}  // namespace

AppConfig load_app_config(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw DataError("config: cannot open " + file.string());
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw DataError("config: parse error in " + file.string() + ": " + e.what());
  }
  try {
    return from_json_obj(j);
  } catch (const json::exception& e) {
    throw DataError("config: bad field in " + file.string() + ": " + e.what());
  }
}

void save_app_config(const std::filesystem::path& file, const AppConfig& cfg) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("config: cannot write " + file.string());
  os << to_json_obj(cfg).dump(2) << "\n";
}

std::string app_config_to_json(const AppConfig& cfg) { return to_json_obj(cfg).dump(); }

AppConfig app_config_from_json(const std::string& text) {
  try {
    return from_json_obj(json::parse(text));
  } catch (const json::exception& e) {
    throw DataError(std::string("config: bad JSON: ") + e.what());
  }
}

AppConfig toy_config() {
  AppConfig cfg;
  cfg.sim.n_range_bins = 64;
  cfg.sim.n_radar_az_bins = 16;
  cfg.sim.n_lidar_az_bins = 128;
  cfg.sim.n_fast_time = 128;
  cfg.unet.levels = 3;
  cfg.unet.encoder_filters = {8, 16, 32};
  cfg.unet.history = 4;
  cfg.unet.n_range = 64;
  cfg.unet.n_az_in = 16;
  cfg.unet.az_upsample_factor = 8;
  // Small batches at a raised rate converge furthest within a 10-epoch budget
  // at this scale.
  cfg.adam.lr = 2e-3;
  cfg.train.batch_size = 4;
  // The default CFAR window does not fit a 16-column image; use a compact one.
  cfg.eval.cfar_guard_cells = 1;
  cfg.eval.cfar_train_cells = 4;
  return cfg;
}

}  // namespace r2l
