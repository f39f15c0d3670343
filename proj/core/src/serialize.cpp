#include "r2l/serialize.hpp"

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace r2l {

namespace {

constexpr char kMagic[4] = {'R', 'H', 'D', '1'};

void put_u32(std::ostream& os, uint32_t v) {
  uint8_t b[4] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8),
                  static_cast<uint8_t>(v >> 16), static_cast<uint8_t>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::istream& is) {
  uint8_t b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw DataError("blob: truncated header");
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

size_t elem_size(uint32_t kind) {
  switch (kind) {
    case kBlobF32: return 4;
    case kBlobU8: return 1;
  }
  throw DataError("blob: unknown kind tag " + std::to_string(kind));
}

}  // namespace

void write_blob(std::ostream& os, const Blob& b) {
  if (b.bytes.size() != b.count() * elem_size(b.kind))
    throw std::invalid_argument("write_blob: payload size mismatch");
  os.write(kMagic, 4);
  put_u32(os, kBlobVersion);
  put_u32(os, b.kind);
  put_u32(os, static_cast<uint32_t>(b.dims.size()));
  for (uint32_t d : b.dims) put_u32(os, d);
  os.write(reinterpret_cast<const char*>(b.bytes.data()),
           static_cast<std::streamsize>(b.bytes.size()));
  if (!os) throw std::runtime_error("write_blob: stream write failed");
}

Blob read_blob(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4)) throw DataError("blob: truncated magic");
  if (std::memcmp(magic, kMagic, 4) != 0) throw DataError("blob: bad magic");
  const uint32_t version = get_u32(is);
  if (version != kBlobVersion)
    throw DataError("blob: unsupported version " + std::to_string(version));
  Blob b;
  b.kind = get_u32(is);
  const uint32_t nd = get_u32(is);
  if (nd > 8) throw DataError("blob: implausible dim count");
  b.dims.resize(nd);
  for (uint32_t i = 0; i < nd; ++i) {
    b.dims[i] = get_u32(is);
    if (b.dims[i] == 0) throw DataError("blob: zero dim");
  }
  const size_t nbytes = b.count() * elem_size(b.kind);
  if (nbytes > (1u << 30)) throw DataError("blob: payload too large");
  b.bytes.resize(nbytes);
  if (!is.read(reinterpret_cast<char*>(b.bytes.data()),
               static_cast<std::streamsize>(nbytes)))
    throw DataError("blob: truncated payload");
  return b;
}

Blob blob_from_f32(std::vector<uint32_t> dims, const float* data) {
  Blob b;
  b.kind = kBlobF32;
  b.dims = std::move(dims);
  b.bytes.resize(b.count() * 4);
  static_assert(sizeof(float) == 4);
  std::memcpy(b.bytes.data(), data, b.bytes.size());
  return b;
}

Blob blob_from_u8(std::vector<uint32_t> dims, const uint8_t* data) {
  Blob b;
  b.kind = kBlobU8;
  b.dims = std::move(dims);
  b.bytes.assign(data, data + b.count());
  return b;
}

std::vector<float> blob_as_f32(const Blob& b) {
  if (b.kind != kBlobF32) throw DataError("blob: expected f32 payload");
  std::vector<float> out(b.count());
  std::memcpy(out.data(), b.bytes.data(), b.bytes.size());
  return out;
}

std::vector<uint8_t> blob_as_u8(const Blob& b) {
  if (b.kind != kBlobU8) throw DataError("blob: expected u8 payload");
  return b.bytes;
}

namespace {

Blob tensor_blob(const Tensor<float>& t) {
  std::vector<uint32_t> dims;
  for (int d : t.shape) dims.push_back(static_cast<uint32_t>(d));
  return blob_from_f32(std::move(dims), t.data());
}

Tensor<float> blob_tensor(const Blob& b) {
  std::vector<int> shape;
  for (uint32_t d : b.dims) shape.push_back(static_cast<int>(d));
  return Tensor<float>(std::move(shape), blob_as_f32(b));
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  nlohmann::json meta;
  meta["format"] = "checkpoint";
  meta["unet"] = {{"levels", ckpt.net.cfg.levels},
                  {"encoder_filters", ckpt.net.cfg.encoder_filters},
                  {"history", ckpt.net.cfg.history},
                  {"n_range", ckpt.net.cfg.n_range},
                  {"n_az_in", ckpt.net.cfg.n_az_in},
                  {"az_upsample_factor", ckpt.net.cfg.az_upsample_factor}};
  meta["loss"] = {{"bce_weight", ckpt.loss_cfg.bce_weight},
                  {"dice_weight", ckpt.loss_cfg.dice_weight},
                  {"dice_epsilon", ckpt.loss_cfg.dice_epsilon}};
  meta["adam"] = {{"lr", ckpt.adam_cfg.lr},
                  {"beta1", ckpt.adam_cfg.beta1},
                  {"beta2", ckpt.adam_cfg.beta2},
                  {"eps", ckpt.adam_cfg.eps},
                  {"seed", ckpt.adam_cfg.seed}};
  meta["epochs_done"] = ckpt.epochs_done;
  meta["batch_size"] = ckpt.batch_size;
  meta["shuffle_seed"] = ckpt.shuffle_seed;
  meta["adam_step"] = ckpt.adam.step;
  meta["has_adam_state"] = !ckpt.adam.m.empty();
  meta["n_layers"] = ckpt.net.layers.size();
  nlohmann::json names = nlohmann::json::array();
  for (const auto& l : ckpt.net.layers) names.push_back(l.name);
  meta["layer_names"] = names;

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_checkpoint: cannot open " + path.string());
  const std::string meta_text = meta.dump();
  write_blob(os, blob_from_u8({static_cast<uint32_t>(meta_text.size())},
                              reinterpret_cast<const uint8_t*>(meta_text.data())));
  for (const auto& l : ckpt.net.layers) {
    write_blob(os, tensor_blob(l.w));
    write_blob(os, tensor_blob(l.b));
  }
  if (!ckpt.adam.m.empty()) {
    for (const auto& t : ckpt.adam.m) write_blob(os, tensor_blob(t));
    for (const auto& t : ckpt.adam.v) write_blob(os, tensor_blob(t));
  }
  if (!os) throw std::runtime_error("save_checkpoint: write failed");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("load_checkpoint: cannot open " + path.string());
  const Blob meta_blob = read_blob(is);
  const auto meta_bytes = blob_as_u8(meta_blob);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(meta_bytes.begin(), meta_bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("load_checkpoint: bad metadata: ") + e.what());
  }
  if (meta.value("format", "") != "checkpoint")
    throw DataError("load_checkpoint: not a checkpoint file");

  Checkpoint ckpt;
  try {
    const auto& u = meta.at("unet");
    ckpt.net.cfg.levels = u.at("levels").get<int>();
    ckpt.net.cfg.encoder_filters = u.at("encoder_filters").get<std::vector<int>>();
    ckpt.net.cfg.history = u.at("history").get<int>();
    ckpt.net.cfg.n_range = u.at("n_range").get<int>();
    ckpt.net.cfg.n_az_in = u.at("n_az_in").get<int>();
    ckpt.net.cfg.az_upsample_factor = u.at("az_upsample_factor").get<int>();
    const auto& lo = meta.at("loss");
    ckpt.loss_cfg.bce_weight = lo.at("bce_weight").get<double>();
    ckpt.loss_cfg.dice_weight = lo.at("dice_weight").get<double>();
    ckpt.loss_cfg.dice_epsilon = lo.at("dice_epsilon").get<double>();
    const auto& a = meta.at("adam");
    ckpt.adam_cfg.lr = a.at("lr").get<double>();
    ckpt.adam_cfg.beta1 = a.at("beta1").get<double>();
    ckpt.adam_cfg.beta2 = a.at("beta2").get<double>();
    ckpt.adam_cfg.eps = a.at("eps").get<double>();
    ckpt.adam_cfg.seed = a.at("seed").get<uint64_t>();
    ckpt.epochs_done = meta.at("epochs_done").get<int>();
    ckpt.batch_size = meta.value("batch_size", 8);
    ckpt.shuffle_seed = meta.at("shuffle_seed").get<uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("load_checkpoint: missing metadata field: ") + e.what());
  }
  ckpt.net.cfg.validate();

  const auto names = meta.at("layer_names").get<std::vector<std::string>>();
  const auto specs = unet_layer_specs(ckpt.net.cfg);
  if (names.size() != specs.size())
    throw DataError("load_checkpoint: layer count does not match config");
  for (size_t i = 0; i < specs.size(); ++i) {
    if (names[i] != specs[i].name)
      throw DataError("load_checkpoint: unexpected layer " + names[i]);
    typename UNet<float>::ConvLayer l;
    l.name = names[i];
    l.w = blob_tensor(read_blob(is));
    l.b = blob_tensor(read_blob(is));
    if (l.w.shape != std::vector<int>{specs[i].out_ch, specs[i].in_ch, specs[i].kh,
                                      specs[i].kw} ||
        l.b.shape != std::vector<int>{specs[i].out_ch})
      throw DataError("load_checkpoint: layer shape mismatch at " + names[i]);
    ckpt.net.layers.push_back(std::move(l));
  }
  if (meta.value("has_adam_state", false)) {
    for (size_t i = 0; i < specs.size(); ++i) {
      ckpt.adam.m.push_back(blob_tensor(read_blob(is)));
      ckpt.adam.m.push_back(blob_tensor(read_blob(is)));
    }
    for (size_t i = 0; i < specs.size(); ++i) {
      ckpt.adam.v.push_back(blob_tensor(read_blob(is)));
      ckpt.adam.v.push_back(blob_tensor(read_blob(is)));
    }
    ckpt.adam.step = meta.at("adam_step").get<int64_t>();
  }
  return ckpt;
}

}  // namespace r2l
