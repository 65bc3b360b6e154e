#include "turbuq/checkpoint.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "json.hpp"

namespace turbuq {

namespace {

using nlohmann::json;

const char* kind_name(ml::LayerKind kind) {
  switch (kind) {
    case ml::LayerKind::Conv1D: return "conv1d";
    case ml::LayerKind::BatchNorm: return "batchnorm";
    case ml::LayerKind::Relu: return "relu";
    case ml::LayerKind::MaxPool: return "maxpool";
    case ml::LayerKind::Flatten: return "flatten";
    case ml::LayerKind::Dense: return "dense";
  }
  throw CheckpointError("unknown layer kind");
}

json layer_to_json(const ml::LayerSpec& l) {
  json j{{"kind", kind_name(l.kind)}};
  switch (l.kind) {
    case ml::LayerKind::Conv1D:
      j["in_ch"] = l.in_ch;
      j["out_ch"] = l.out_ch;
      j["kernel"] = l.kernel;
      break;
    case ml::LayerKind::BatchNorm:
      j["channels"] = l.channels;
      break;
    case ml::LayerKind::MaxPool:
      j["window"] = l.window;
      j["stride"] = l.stride;
      break;
    case ml::LayerKind::Dense:
      j["in"] = l.in;
      j["out"] = l.out;
      break;
    default:
      break;
  }
  return j;
}

int require_int(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw CheckpointError("layer is missing integer field '" + std::string(key) + "'");
  return j[key].get<int>();
}

ml::LayerSpec layer_from_json(const json& j) {
  if (!j.contains("kind") || !j["kind"].is_string())
    throw CheckpointError("layer entry has no kind");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "conv1d")
    return ml::LayerSpec::conv1d(require_int(j, "in_ch"), require_int(j, "out_ch"),
                                 require_int(j, "kernel"));
  if (kind == "batchnorm") return ml::LayerSpec::batchnorm(require_int(j, "channels"));
  if (kind == "relu") return ml::LayerSpec::relu();
  if (kind == "maxpool") return ml::LayerSpec::maxpool(require_int(j, "window"),
                                                       require_int(j, "stride"));
  if (kind == "flatten") return ml::LayerSpec::flatten();
  if (kind == "dense") return ml::LayerSpec::dense(require_int(j, "in"), require_int(j, "out"));
  throw CheckpointError("unknown layer kind '" + kind + "'");
}

std::vector<double> require_array(const json& j, const char* key, std::size_t expected) {
  if (!j.contains(key) || !j[key].is_array())
    throw CheckpointError("checkpoint is missing array '" + std::string(key) + "'");
  std::vector<double> out;
  out.reserve(j[key].size());
  for (const auto& v : j[key]) {
    if (!v.is_number())
      throw CheckpointError("array '" + std::string(key) + "' holds a non-numeric entry");
    out.push_back(v.get<double>());
  }
  if (out.size() != expected)
    throw CheckpointError("array '" + std::string(key) + "' has " + std::to_string(out.size()) +
                          " entries, expected " + std::to_string(expected));
  return out;
}

json stats_to_json(const data::StreamStats& s) { return json{{"mean", s.mean}, {"std", s.std}}; }

data::StreamStats stats_from_json(const json& j, const char* what) {
  if (!j.is_object() || !j.contains("mean") || !j.contains("std") || !j["mean"].is_number() ||
      !j["std"].is_number())
    throw CheckpointError("bad standardization block '" + std::string(what) + "'");
  return {j["mean"].get<double>(), j["std"].get<double>()};
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  for (double p : ckpt.model.params)
    if (!std::isfinite(p)) throw CheckpointError("refusing to save non-finite parameters");
  for (double s : ckpt.model.running_mean)
    if (!std::isfinite(s)) throw CheckpointError("refusing to save non-finite running stats");
  for (double s : ckpt.model.running_var)
    if (!std::isfinite(s)) throw CheckpointError("refusing to save non-finite running stats");
  for (double s : {ckpt.standardization.input.mean, ckpt.standardization.input.std,
                   ckpt.standardization.target.mean, ckpt.standardization.target.std})
    if (!std::isfinite(s)) throw CheckpointError("refusing to save non-finite standardization");

  json arch{{"input_channels", ckpt.model.arch.input_channels},
            {"input_len", ckpt.model.arch.input_len},
            {"layers", json::array()}};
  for (const ml::LayerSpec& l : ckpt.model.arch.layers) arch["layers"].push_back(layer_to_json(l));

  const json j{{"format_version", kCheckpointVersion},
               {"architecture", arch},
               {"params", ckpt.model.params},
               {"running_mean", ckpt.model.running_mean},
               {"running_var", ckpt.model.running_var},
               {"standardization",
                json{{"input", stats_to_json(ckpt.standardization.input)},
                     {"target", stats_to_json(ckpt.standardization.target)}}},
               {"seed", ckpt.seed},
               {"param_count", ckpt.model.arch.param_count()}};

  std::ofstream out(path);
  if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw CheckpointError("failed while writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError("checkpoint " + path.string() + ": " + e.what());
  }

  if (!j.contains("format_version") || !j["format_version"].is_number_integer())
    throw CheckpointError("checkpoint has no format_version");
  const int version = j["format_version"].get<int>();
  if (version != kCheckpointVersion)
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));

  if (!j.contains("architecture") || !j["architecture"].is_object())
    throw CheckpointError("checkpoint has no architecture block");
  const json& arch = j["architecture"];
  if (!arch.contains("layers") || !arch["layers"].is_array())
    throw CheckpointError("architecture block has no layer list");

  Checkpoint ckpt;
  ckpt.model.arch.input_channels = require_int(arch, "input_channels");
  ckpt.model.arch.input_len = require_int(arch, "input_len");
  for (const json& lj : arch["layers"]) ckpt.model.arch.layers.push_back(layer_from_json(lj));
  ckpt.model.arch.assign_offsets();

  const std::size_t n_params = static_cast<std::size_t>(ckpt.model.arch.param_count());
  const std::size_t n_stats = static_cast<std::size_t>(ckpt.model.arch.stat_count());
  ckpt.model.params = require_array(j, "params", n_params);
  ckpt.model.running_mean = require_array(j, "running_mean", n_stats);
  ckpt.model.running_var = require_array(j, "running_var", n_stats);
  ckpt.model.mode = ml::Mode::Inference;

  if (j.contains("param_count") && j["param_count"].is_number_integer() &&
      j["param_count"].get<int>() != ckpt.model.arch.param_count())
    throw CheckpointError("stored param_count disagrees with the architecture");

  if (!j.contains("standardization") || !j["standardization"].is_object())
    throw CheckpointError("checkpoint has no standardization block");
  ckpt.standardization.input = stats_from_json(j["standardization"]["input"], "input");
  ckpt.standardization.target = stats_from_json(j["standardization"]["target"], "target");

  if (j.contains("seed") && j["seed"].is_number_unsigned())
    ckpt.seed = j["seed"].get<std::uint64_t>();
  else if (j.contains("seed") && j["seed"].is_number_integer())
    ckpt.seed = static_cast<std::uint64_t>(j["seed"].get<std::int64_t>());
  else
    throw CheckpointError("checkpoint has no seed");

  return ckpt;
}

}  // namespace turbuq
