#include "dkgm/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace dkgm {

namespace {

void put_u32(std::ofstream& out, std::uint32_t v) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes, 4);
}

void put_f64(std::ofstream& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  out.write(bytes, 8);
}

std::uint32_t get_u32(std::ifstream& in) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  return v;
}

double get_f64(std::ifstream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors,
                     std::uint32_t version) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path.string());
  out.write("DKGM", 4);
  put_u32(out, version);
  for (const NamedTensor& nt : tensors) {
    put_u32(out, static_cast<std::uint32_t>(nt.name.size()));
    out.write(nt.name.data(), static_cast<std::streamsize>(nt.name.size()));
    put_u32(out, static_cast<std::uint32_t>(nt.tensor.rank()));
    for (std::size_t d : nt.tensor.dims()) put_u32(out, static_cast<std::uint32_t>(d));
    for (std::size_t i = 0; i < nt.tensor.size(); ++i) put_f64(out, nt.tensor[i]);
  }
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path.string());
}

std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "DKGM", 4) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path.string());
  std::uint32_t version = get_u32(in);
  if (version != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));

  std::vector<NamedTensor> tensors;
  while (true) {
    int probe = in.peek();
    if (probe == std::char_traits<char>::eof()) break;
    std::uint32_t name_len = get_u32(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    std::uint32_t rank = get_u32(in);
    std::vector<std::size_t> dims(rank);
    std::size_t count = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
      dims[i] = get_u32(in);
      count *= dims[i];
    }
    Vec data(count);
    for (std::size_t i = 0; i < count; ++i) data[i] = get_f64(in);
    if (!in) throw std::runtime_error("checkpoint: truncated tensor " + name);
    tensors.push_back({std::move(name), Tensor(std::move(dims), std::move(data))});
  }
  return tensors;
}

std::vector<NamedTensor> net_to_tensors(const TimeConditionedNet& net, const std::string& prefix) {
  net.spec.validate();
  std::vector<NamedTensor> out;
  Vec widths;
  for (std::size_t w : net.spec.layer_widths) widths.push_back(static_cast<double>(w));
  out.push_back({prefix + ".spec.layer_widths", Tensor::vector(std::move(widths))});
  out.push_back({prefix + ".spec.activation",
                 Tensor::scalar(net.spec.activation == Activation::Tanh ? 0.0 : 1.0)});
  out.push_back({prefix + ".spec.skip_connection",
                 Tensor::scalar(net.spec.skip_connection ? 1.0 : 0.0)});
  out.push_back({prefix + ".spec.time_embed_dim",
                 Tensor::scalar(static_cast<double>(net.spec.time_embed_dim))});

  std::size_t offset = 0;
  for (std::size_t l = 0; l < net.spec.layer_count(); ++l) {
    std::size_t in_w = net.spec.layer_input_width(l);
    std::size_t out_w = net.spec.layer_widths[l + 1];
    Vec w(net.params.begin() + static_cast<long>(offset),
          net.params.begin() + static_cast<long>(offset + out_w * in_w));
    out.push_back({prefix + ".layer" + std::to_string(l) + ".weight",
                   Tensor({out_w, in_w}, std::move(w))});
    offset += out_w * in_w;
    Vec b(net.params.begin() + static_cast<long>(offset),
          net.params.begin() + static_cast<long>(offset + out_w));
    out.push_back({prefix + ".layer" + std::to_string(l) + ".bias", Tensor::vector(std::move(b))});
    offset += out_w;
  }
  return out;
}

namespace {

const Tensor& find_tensor(const std::vector<NamedTensor>& tensors, const std::string& name) {
  for (const NamedTensor& nt : tensors)
    if (nt.name == name) return nt.tensor;
  throw std::runtime_error("checkpoint: missing tensor " + name);
}

}  // namespace

TimeConditionedNet net_from_tensors(const std::vector<NamedTensor>& tensors,
                                    const std::string& prefix) {
  MlpSpec spec;
  const Tensor& widths = find_tensor(tensors, prefix + ".spec.layer_widths");
  for (std::size_t i = 0; i < widths.size(); ++i)
    spec.layer_widths.push_back(static_cast<std::size_t>(widths[i]));
  spec.activation = find_tensor(tensors, prefix + ".spec.activation")[0] == 0.0
                        ? Activation::Tanh
                        : Activation::Relu;
  spec.skip_connection = find_tensor(tensors, prefix + ".spec.skip_connection")[0] != 0.0;
  spec.time_embed_dim =
      static_cast<std::size_t>(find_tensor(tensors, prefix + ".spec.time_embed_dim")[0]);
  spec.validate();

  TimeConditionedNet net{spec, {}};
  net.params.reserve(spec.param_count());
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const Tensor& w = find_tensor(tensors, prefix + ".layer" + std::to_string(l) + ".weight");
    const Tensor& b = find_tensor(tensors, prefix + ".layer" + std::to_string(l) + ".bias");
    if (w.rank() != 2 || w.dims()[0] != spec.layer_widths[l + 1] ||
        w.dims()[1] != spec.layer_input_width(l) || b.size() != spec.layer_widths[l + 1])
      throw std::runtime_error("checkpoint: tensor shape mismatch at layer " + std::to_string(l));
    net.params.insert(net.params.end(), w.values().begin(), w.values().end());
    net.params.insert(net.params.end(), b.values().begin(), b.values().end());
  }
  return net;
}

void save_stage_checkpoint(const std::filesystem::path& path, const TimeConditionedNet& net,
                           const ModelMeta& meta) {
  std::vector<NamedTensor> tensors = net_to_tensors(net, "net");
  tensors.push_back({"meta.stage", Tensor::scalar(static_cast<double>(meta.stage))});
  tensors.push_back({"meta.noise_level", Tensor::scalar(meta.noise_level)});
  tensors.push_back({"meta.n_steps", Tensor::scalar(static_cast<double>(meta.n_steps))});
  tensors.push_back({"meta.b_lo", Tensor::scalar(meta.b_lo)});
  tensors.push_back({"meta.b_hi", Tensor::scalar(meta.b_hi)});
  save_checkpoint(path, tensors);
}

std::pair<TimeConditionedNet, ModelMeta> load_stage_checkpoint(const std::filesystem::path& path) {
  std::vector<NamedTensor> tensors = load_checkpoint(path);
  TimeConditionedNet net = net_from_tensors(tensors, "net");
  ModelMeta meta;
  meta.stage = static_cast<int>(find_tensor(tensors, "meta.stage")[0]);
  meta.noise_level = find_tensor(tensors, "meta.noise_level")[0];
  meta.n_steps = static_cast<std::size_t>(find_tensor(tensors, "meta.n_steps")[0]);
  meta.b_lo = find_tensor(tensors, "meta.b_lo")[0];
  meta.b_hi = find_tensor(tensors, "meta.b_hi")[0];
  return {std::move(net), meta};
}

}  // namespace dkgm
