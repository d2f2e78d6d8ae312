#include "codesum/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "codesum/errors.hpp"

namespace codesum::checkpoint {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <typename T>
void append_raw(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T read_raw(std::string_view bytes, std::size_t offset) {
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  return value;
}

std::size_t dtype_size(DType d) { return d == DType::kF32 ? 4 : 8; }
const char* dtype_name(DType d) { return d == DType::kF32 ? "f32" : "f64"; }

constexpr std::size_t kHeaderSize = 8 + 4 + 8;

[[noreturn]] void corrupt(const std::string& what) {
  throw Error(ErrorCode::kCorruptManifest, what);
}

}  // namespace

std::string serialize(const ModelParams& params, const Vocabulary& vocab, const TrainConfig& cfg,
                      DType dtype) {
  if (vocab.size() != params.vocab_size()) {
    throw Error(ErrorCode::kDimensionMismatch, "vocabulary does not match the model");
  }
  std::string payload;
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& [name, tensor] : params.named_tensors()) {
    if (!tensor->all_finite()) {
      throw Error(ErrorCode::kNonFinite, "tensor " + name + " has non-finite values");
    }
    tensors.push_back({{"name", name},
                       {"shape", tensor->shape()},
                       {"dtype", dtype_name(dtype)},
                       {"byte_offset", payload.size()}});
    for (double v : tensor->values()) {
      if (dtype == DType::kF32) {
        append_raw(payload, static_cast<float>(v));
      } else {
        append_raw(payload, v);
      }
    }
  }
  nlohmann::json config = to_json(cfg);
  // The model's own layout is authoritative over the training config.
  config["model_kind"] = to_string(params.kind);
  config["state_kind"] = to_string(params.state_kind);
  const nlohmann::json manifest = {
      {"config", config}, {"vocabulary", vocab.to_json()}, {"tensors", tensors}};
  const std::string manifest_text = manifest.dump();

  std::string out(kMagic);
  append_raw<std::uint32_t>(out, kVersion);
  append_raw<std::uint64_t>(out, manifest_text.size());
  out += manifest_text;
  out += payload;
  return out;
}

Checkpoint deserialize(std::string_view bytes) {
  if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
    throw Error(ErrorCode::kBadMagic, "not a checkpoint file");
  }
  if (bytes.size() < kHeaderSize) throw Error(ErrorCode::kTruncatedPayload, "header truncated");
  const auto version = read_raw<std::uint32_t>(bytes, 8);
  if (version != kVersion) {
    throw Error(ErrorCode::kUnsupportedVersion, "checkpoint version " + std::to_string(version));
  }
  const auto manifest_len = read_raw<std::uint64_t>(bytes, 12);
  if (manifest_len > bytes.size() - kHeaderSize) {
    throw Error(ErrorCode::kTruncatedPayload, "manifest extends past end of file");
  }
  const std::string_view manifest_text = bytes.substr(kHeaderSize, manifest_len);
  const std::string_view payload = bytes.substr(kHeaderSize + manifest_len);

  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(manifest_text);
  } catch (const nlohmann::json::exception& e) {
    corrupt(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!manifest.is_object() || !manifest.contains("config") || !manifest.contains("vocabulary") ||
      !manifest.contains("tensors") || !manifest["tensors"].is_array()) {
    corrupt("manifest is missing config, vocabulary or tensors");
  }

  Checkpoint ck;
  try {
    ck.config = config_from_json(manifest["config"]);
    ck.vocab = Vocabulary::from_json(manifest["vocabulary"]);
  } catch (const Error& e) {
    corrupt(e.what());
  } catch (const nlohmann::json::exception& e) {
    corrupt(e.what());
  }
  ck.params = ModelParams::zeros(ck.config.model_kind, ck.config.state_kind, ck.config.dims,
                                 ck.vocab.size());

  std::map<std::string, Tensor*> slots;
  for (auto& [name, tensor] : ck.params.named_tensors()) slots.emplace(name, tensor);

  std::size_t previous_end = 0;
  std::size_t filled = 0;
  for (const auto& entry : manifest["tensors"]) {
    std::string name;
    std::vector<std::size_t> shape;
    std::string dtype_text;
    std::size_t offset = 0;
    try {
      name = entry.at("name").get<std::string>();
      shape = entry.at("shape").get<std::vector<std::size_t>>();
      dtype_text = entry.at("dtype").get<std::string>();
      offset = entry.at("byte_offset").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
      corrupt(std::string("tensor entry: ") + e.what());
    }
    const auto slot = slots.find(name);
    if (slot == slots.end() || slot->second == nullptr) corrupt("unexpected or repeated tensor " + name);
    Tensor& tensor = *slot->second;
    slot->second = nullptr;
    if (shape != tensor.shape()) corrupt("tensor " + name + " has the wrong shape");
    if (dtype_text != "f32" && dtype_text != "f64") corrupt("tensor " + name + " dtype " + dtype_text);
    const DType dtype = dtype_text == "f32" ? DType::kF32 : DType::kF64;
    if (offset < previous_end) corrupt("tensor " + name + " overlaps its predecessor");
    const std::size_t nbytes = tensor.size() * dtype_size(dtype);
    if (offset > payload.size() || nbytes > payload.size() - offset) {
      throw Error(ErrorCode::kTruncatedPayload, "payload ends inside tensor " + name);
    }
    for (std::size_t i = 0; i < tensor.size(); ++i) {
      const std::size_t at = offset + i * dtype_size(dtype);
      tensor[i] = dtype == DType::kF32 ? static_cast<double>(read_raw<float>(payload, at))
                                       : read_raw<double>(payload, at);
    }
    previous_end = offset + nbytes;
    ++filled;
  }
  if (filled != slots.size()) corrupt("manifest is missing model tensors");
  return ck;
}

void save(const ModelParams& params, const Vocabulary& vocab, const TrainConfig& cfg,
          const std::filesystem::path& path, DType dtype) {
  const std::string bytes = serialize(params, vocab, cfg, dtype);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot rename into " + path.string() + ": " + ec.message());
}

Checkpoint load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open checkpoint " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

}  // namespace codesum::checkpoint
