// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
//
// Binary layout, little-endian:
//   "SGN1" | u32 C, node_dim, hidden, T, variant | u64 vocab hash
//   then records until EOF: u32 name length, name bytes, u32 rank,
//   u32 dims[rank], f64 values.
// The distance-weight constants travel as the record "config.dist_weights".
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

#include "model/layout.hpp"
#include "sgnet/model.hpp"

namespace sgnet {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'S', 'G', 'N', '1'};
constexpr const char* kDistRecord = "config.dist_weights";

class Writer {
 public:
  template <typename T>
  void put(T v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    out.insert(out.end(), p, p + sizeof(T));
  }
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out.insert(out.end(), p, p + n);
  }
  void record(const std::string& name, const std::vector<std::size_t>& shape, std::span<const double> values) {
    put(static_cast<std::uint32_t>(name.size()));
    bytes(name.data(), name.size());
    put(static_cast<std::uint32_t>(shape.size()));
    for (std::size_t d : shape) put(static_cast<std::uint32_t>(d));
    bytes(values.data(), values.size() * sizeof(double));
  }
  std::vector<std::uint8_t> out;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : buf(b) {}
  template <typename T>
  T get() {
    T v;
    take(&v, sizeof(T));
    return v;
  }
  void take(void* dst, std::size_t n) {
    if (buf.size() - pos < n) throw CheckpointError("checkpoint truncated at byte " + std::to_string(pos));
    std::memcpy(dst, buf.data() + pos, n);
    pos += n;
  }
  bool done() const { return pos == buf.size(); }

  std::span<const std::uint8_t> buf;
  std::size_t pos = 0;
};

}  // namespace

std::vector<std::uint8_t> checkpoint_bytes(const Model& model) {
  Writer w;
  w.bytes(kMagic, 4);
  const ModelConfig& c = model.config;
  w.put(static_cast<std::uint32_t>(c.categories));
  w.put(static_cast<std::uint32_t>(c.node_dim));
  w.put(static_cast<std::uint32_t>(c.hidden));
  w.put(static_cast<std::uint32_t>(c.iterations));
  w.put(static_cast<std::uint32_t>(c.variant));
  w.put(static_cast<std::uint64_t>(model.vocab_hash));
  const double dist[2] = {c.dist_c, c.dist_b};
  w.record(kDistRecord, {2}, dist);
  for (const auto& p : model.params.all()) w.record(p.name, p.value.shape(), p.value.values());
  return std::move(w.out);
}

void save_checkpoint(const Model& model, const std::string& path) {
  const auto bytes = checkpoint_bytes(model);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw CheckpointError("cannot open '" + path + "' for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw CheckpointError("failed writing '" + path + "'");
}

Model checkpoint_from_bytes(std::span<const std::uint8_t> bytes, std::optional<std::uint64_t> expected_vocab_hash) {
  Reader r(bytes);
  char magic[4];
  r.take(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw CheckpointError("not a checkpoint (bad magic)");
  ModelConfig cfg;
  cfg.categories = static_cast<int>(r.get<std::uint32_t>());
  cfg.node_dim = static_cast<int>(r.get<std::uint32_t>());
  cfg.hidden = static_cast<int>(r.get<std::uint32_t>());
  cfg.iterations = static_cast<int>(r.get<std::uint32_t>());
  const auto variant = r.get<std::uint32_t>();
  if (variant >= kAllVariants.size()) throw CheckpointError("unknown variant code " + std::to_string(variant));
  cfg.variant = static_cast<Variant>(variant);
  const auto hash = r.get<std::uint64_t>();
  if (expected_vocab_hash && *expected_vocab_hash != hash) {
    throw CheckpointError("checkpoint was trained with a different category vocabulary");
  }

  Model m;
  m.vocab_hash = hash;
  std::set<std::string> seen;
  std::vector<std::pair<std::string, ad::Tensor>> records;
  while (!r.done()) {
    const auto len = r.get<std::uint32_t>();
    if (len > 4096) throw CheckpointError("record name too long");
    std::string name(len, '\0');
    r.take(name.data(), len);
    const auto rank = r.get<std::uint32_t>();
    if (rank > 2) throw CheckpointError("record '" + name + "' has rank " + std::to_string(rank));
    std::vector<std::size_t> shape(rank);
    std::size_t count = 1;
    for (auto& d : shape) {
      d = r.get<std::uint32_t>();
      count *= d;
    }
    if (count > (bytes.size() - r.pos) / sizeof(double)) throw CheckpointError("record '" + name + "' truncated");
    std::vector<double> values(count);
    r.take(values.data(), count * sizeof(double));
    if (!seen.insert(name).second) throw CheckpointError("duplicate record '" + name + "'");
    records.emplace_back(std::move(name), ad::Tensor(std::move(shape), std::move(values)));
  }
  for (const auto& [name, t] : records) {
    if (name == kDistRecord) {
      if (t.size() != 2) throw CheckpointError("malformed distance-weight record");
      cfg.dist_c = t[0];
      cfg.dist_b = t[1];
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("invalid configuration: ") + e.what());
  }
  m.config = cfg;
  detail::build_params(m.params, cfg);
  std::size_t matched = 0;
  for (auto& [name, t] : records) {
    if (name == kDistRecord) continue;
    if (!m.params.contains(name)) throw CheckpointError("unexpected tensor '" + name + "'");
    ad::Parameter& p = m.params.get(name);
    if (p.value.shape() != t.shape()) throw CheckpointError("tensor '" + name + "' has the wrong shape");
    const bool grad_flag = p.value.requires_grad;
    p.value = std::move(t);
    p.value.requires_grad = grad_flag;
    ++matched;
  }
  if (matched != m.params.all().size()) throw CheckpointError("checkpoint is missing parameter tensors");
  return m;
}

Model load_checkpoint(const std::string& path, std::optional<std::uint64_t> expected_vocab_hash) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CheckpointError("cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return checkpoint_from_bytes(bytes, expected_vocab_hash);
}

}  // namespace sgnet
