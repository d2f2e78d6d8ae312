#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "codesum/config.hpp"
#include "codesum/model.hpp"
#include "codesum/vocabulary.hpp"

// Single-file model container:
//
//   offset 0   8 bytes   magic "CODESUM1"
//   offset 8   u32 LE    format version (1)
//   offset 12  u64 LE    manifest length in bytes
//   offset 20  manifest  UTF-8 JSON {config, vocabulary, tensors: [{name, shape, dtype, byte_offset}]}
//   then       payload   row-major little-endian tensor data; byte_offset is relative to payload start
namespace codesum::checkpoint {

inline constexpr std::string_view kMagic = "CODESUM1";
inline constexpr std::uint32_t kVersion = 1;

enum class DType { kF32, kF64 };

struct Checkpoint {
  ModelParams params;
  Vocabulary vocab;
  TrainConfig config;
};

std::string serialize(const ModelParams& params, const Vocabulary& vocab, const TrainConfig& cfg,
                      DType dtype = DType::kF64);

// Throws Error with kBadMagic, kUnsupportedVersion, kCorruptManifest or kTruncatedPayload.
Checkpoint deserialize(std::string_view bytes);

// Writes to a sibling temporary file and renames it into place.
void save(const ModelParams& params, const Vocabulary& vocab, const TrainConfig& cfg,
          const std::filesystem::path& path, DType dtype = DType::kF64);
Checkpoint load(const std::filesystem::path& path);

}  // namespace codesum::checkpoint
