#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "r2l/adam.hpp"
#include "r2l/errors.hpp"
#include "r2l/loss.hpp"
#include "r2l/unet.hpp"

namespace r2l {

// Binary container: magic "RHD1", u32 LE version, u32 kind tag, u32 n_dims,
// n_dims x u32 dims, payload row-major little-endian.
inline constexpr uint32_t kBlobVersion = 1;
inline constexpr uint32_t kBlobF32 = 1;
inline constexpr uint32_t kBlobU8 = 2;

struct Blob {
  uint32_t kind = kBlobF32;
  std::vector<uint32_t> dims;
  std::vector<uint8_t> bytes;  // payload, already little-endian

  size_t count() const {
    size_t n = 1;
    for (uint32_t d : dims) n *= d;
    return n;
  }
};

void write_blob(std::ostream& os, const Blob& b);
Blob read_blob(std::istream& is);  // throws DataError on malformed input

Blob blob_from_f32(std::vector<uint32_t> dims, const float* data);
Blob blob_from_u8(std::vector<uint32_t> dims, const uint8_t* data);
std::vector<float> blob_as_f32(const Blob& b);
std::vector<uint8_t> blob_as_u8(const Blob& b);

// Model checkpoint: one RHD1 stream holding a JSON meta blob (u8) followed by
// per-layer weight/bias blobs and the optimizer moment blobs, so training can
// resume bit-exactly.
struct Checkpoint {
  UNet<float> net;
  AdamState<float> adam;  // empty m/v when never trained
  AdamConfig adam_cfg;
  LossConfig loss_cfg;
  int epochs_done = 0;
  int batch_size = 8;
  uint64_t shuffle_seed = 1;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace r2l
