#include "fewshot/model/checkpoint.hpp"

#include <fstream>

#include "fewshot/core/errors.hpp"
#include "fewshot/core/serialize.hpp"

namespace fewshot::model {

namespace {
constexpr char kMagic[9] = "FSI2ICKP";
constexpr std::uint32_t kVersion = 1;
}  // namespace

void Checkpoint::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + tmp.string());
    os.write(kMagic, 8);
    io::write_u32(os, kVersion);

    std::map<std::string, std::string> kv = gen_config.to_kv("gen.");
    kv.merge(disc_config.to_kv("disc."));
    for (const auto& [k, v] : extra) kv["extra." + k] = v;
    io::write_string(os, io::format_kv(kv));

    io::write_u32(os, static_cast<std::uint32_t>(class_names.size()));
    for (const auto& name : class_names) io::write_string(os, name);

    io::write_u64(os, iteration);
    io::write_u32(os, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& [name, tensor] : tensors) {
      io::write_string(os, name);
      io::write_tensor(os, tensor);
    }
    if (!os) throw std::runtime_error("checkpoint write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open checkpoint: " + path.string());
  char magic[8];
  is.read(magic, 8);
  if (!is || std::string(magic, 8) != kMagic) {
    throw InputError("not a checkpoint file: " + path.string());
  }
  const std::uint32_t version = io::read_u32(is);
  if (version != kVersion) {
    throw InputError("unsupported checkpoint version " + std::to_string(version));
  }

  Checkpoint ckpt;
  const auto kv = io::parse_kv(io::read_string(is));
  ckpt.gen_config = GeneratorConfig::from_kv(kv, "gen.");
  ckpt.disc_config = DiscriminatorConfig::from_kv(kv, "disc.");
  for (const auto& [k, v] : kv) {
    if (k.rfind("extra.", 0) == 0) ckpt.extra[k.substr(6)] = v;
  }

  const std::uint32_t n_names = io::read_u32(is);
  ckpt.class_names.reserve(n_names);
  for (std::uint32_t i = 0; i < n_names; ++i) ckpt.class_names.push_back(io::read_string(is));

  ckpt.iteration = io::read_u64(is);
  const std::uint32_t n_tensors = io::read_u32(is);
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    std::string name = io::read_string(is);
    ckpt.tensors.emplace(std::move(name), io::read_tensor(is));
  }
  return ckpt;
}

void restore_params(const Checkpoint& ckpt, Generator& gen, Discriminator& disc) {
  if (!(ckpt.gen_config == gen.config())) {
    throw InputError("checkpoint generator config does not match the model");
  }
  if (!(ckpt.disc_config == disc.config())) {
    throw InputError("checkpoint discriminator config does not match the model");
  }
  auto restore = [&](std::vector<nn::Param*> params) {
    for (nn::Param* p : params) {
      const auto it = ckpt.tensors.find(p->name);
      if (it == ckpt.tensors.end()) throw InputError("checkpoint is missing tensor " + p->name);
      if (!it->second.same_shape(p->value)) {
        throw InputError("checkpoint tensor " + p->name + " has shape " +
                         it->second.shape_string() + ", expected " + p->value.shape_string());
      }
      p->value = it->second;
    }
  };
  restore(gen.params());
  restore(disc.params());
}

void capture_params(Generator& gen, Discriminator& disc, std::map<std::string, Tensor>& out) {
  for (nn::Param* p : gen.params()) out[p->name] = p->value;
  for (nn::Param* p : disc.params()) out[p->name] = p->value;
}

}  // namespace fewshot::model
