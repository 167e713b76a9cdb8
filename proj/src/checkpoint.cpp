#include "gbgcn/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <sstream>

namespace gbgcn {

namespace {

constexpr char kMagic[4] = {'G', 'B', 'G', 'C'};

std::uint32_t model_tag(ModelKind k) { return static_cast<std::uint32_t>(k); }

class Writer {
 public:
  void raw(const char* p, std::size_t n) { out_.append(p, n); }
  template <typename T>
  void uint(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void f32(float x) { uint(std::bit_cast<std::uint32_t>(x)); }
  void matrix(Index rows, Index cols, std::span<const float> data) {
    uint<std::uint64_t>(static_cast<std::uint64_t>(rows));
    uint<std::uint64_t>(static_cast<std::uint64_t>(cols));
    for (float x : data) f32(x);
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw Error("checkpoint is truncated");
  }
  std::string_view raw(std::size_t n) {
    need(n);
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  template <typename T>
  T uint() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return v;
  }
  float f32() { return std::bit_cast<float>(uint<std::uint32_t>()); }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
};

// Shapes each tensor must have, in checkpoint order.
std::vector<std::pair<Index, Index>> expected_shapes(const Checkpoint& c, bool transforms) {
  std::vector<std::pair<Index, Index>> s{{c.users, c.dim}, {c.items, c.dim}};
  if (transforms) {
    const Index w = static_cast<Index>(c.layers + 1) * c.dim;
    for (int t = 0; t < kTransforms; ++t) s.emplace_back(w, w);
    for (int t = 0; t < kTransforms; ++t) s.emplace_back(w, 1);
  }
  return s;
}

void write_tensors(Writer& w, const ModelParams<float>& p) {
  const auto put = [&w](const auto& m) {
    w.matrix(m.rows(), m.cols(), std::span<const float>(m.data(), static_cast<std::size_t>(m.size())));
  };
  put(p.users);
  put(p.items);
  if (!p.has_transforms()) return;
  for (const auto& m : p.weights) put(m);
  for (const auto& b : p.biases) put(b);
}

ModelParams<float> read_tensors(Reader& r, const Checkpoint& c, bool transforms) {
  auto p = ModelParams<float>::zeros(c.users, c.items, c.dim, c.layers, transforms);
  const auto shapes = expected_shapes(c, transforms);
  std::size_t k = 0;
  p.for_each_tensor([&](std::span<float> t) {
    const auto rows = r.uint<std::uint64_t>();
    const auto cols = r.uint<std::uint64_t>();
    if (static_cast<Index>(rows) != shapes[k].first || static_cast<Index>(cols) != shapes[k].second) {
      throw Error("checkpoint tensor " + std::to_string(k) + " has shape " + std::to_string(rows) + "x" +
                  std::to_string(cols) + ", expected " + std::to_string(shapes[k].first) + "x" +
                  std::to_string(shapes[k].second));
    }
    r.need(t.size() * 4);
    for (float& x : t) x = r.f32();
    ++k;
  });
  return p;
}

}  // namespace

Hyperparams Checkpoint::settings() const {
  std::vector<std::string> errors;
  Hyperparams hp = apply_config(Hyperparams{}, hyperparams, errors);
  if (!errors.empty()) throw Error("checkpoint hyperparameters are invalid: " + errors.front());
  return hp;
}

Checkpoint make_checkpoint(const Hyperparams& hp, ModelParams<float> params,
                           std::optional<AdamState<float>> adam) {
  Checkpoint c;
  c.model = hp.model;
  c.users = params.user_count();
  c.items = params.item_count();
  c.dim = params.dim();
  c.layers = params.has_transforms() ? params.layers() : 0;
  c.hyperparams = hp.to_map();
  c.params = std::move(params);
  c.adam = std::move(adam);
  return c;
}

std::string serialize(const Checkpoint& c) {
  Writer w;
  w.raw(kMagic, 4);
  w.uint<std::uint32_t>(Checkpoint::kVersion);
  w.uint<std::uint32_t>(model_tag(c.model));
  w.uint<std::uint64_t>(static_cast<std::uint64_t>(c.users));
  w.uint<std::uint64_t>(static_cast<std::uint64_t>(c.items));
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(c.dim));
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(c.layers));
  std::string blob;
  for (const auto& [k, v] : c.hyperparams) blob += k + "=" + v + "\n";
  w.uint<std::uint64_t>(blob.size());
  w.raw(blob.data(), blob.size());
  w.uint<std::uint32_t>(c.params.has_transforms() ? 2 + 2 * kTransforms : 2);
  write_tensors(w, c.params);
  w.uint<std::uint8_t>(c.adam ? 1 : 0);
  if (c.adam) {
    w.uint<std::uint64_t>(static_cast<std::uint64_t>(c.adam->step));
    write_tensors(w, c.adam->m);
    write_tensors(w, c.adam->v);
  }
  return w.take();
}

Checkpoint deserialize(std::string_view bytes) {
  Reader r(bytes);
  if (bytes.size() < 4 || bytes.substr(0, 4) != std::string_view(kMagic, 4)) {
    throw Error("not a checkpoint (bad magic bytes)");
  }
  r.raw(4);
  if (const auto v = r.uint<std::uint32_t>(); v != Checkpoint::kVersion) {
    throw Error("unsupported checkpoint version " + std::to_string(v) + " (expected " +
                std::to_string(Checkpoint::kVersion) + ")");
  }
  Checkpoint c;
  const auto tag = r.uint<std::uint32_t>();
  if (tag > model_tag(ModelKind::mf)) throw Error("unknown model tag " + std::to_string(tag));
  c.model = static_cast<ModelKind>(tag);
  c.users = static_cast<Index>(r.uint<std::uint64_t>());
  c.items = static_cast<Index>(r.uint<std::uint64_t>());
  c.dim = static_cast<int>(r.uint<std::uint32_t>());
  c.layers = static_cast<int>(r.uint<std::uint32_t>());
  if (c.dim <= 0 || c.users <= 0 || c.items <= 0) throw Error("checkpoint has empty dimensions");

  const auto blob_size = r.uint<std::uint64_t>();
  std::istringstream blob{std::string(r.raw(blob_size))};
  for (std::string line; std::getline(blob, line);) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("malformed hyperparameter entry in checkpoint");
    c.hyperparams[line.substr(0, eq)] = line.substr(eq + 1);
  }

  const auto count = r.uint<std::uint32_t>();
  const bool transforms = count == 2 + 2 * kTransforms;
  if (!transforms && count != 2) throw Error("checkpoint has " + std::to_string(count) + " tensors");
  c.params = read_tensors(r, c, transforms);
  if (r.uint<std::uint8_t>() != 0) {
    AdamState<float> s;
    s.step = static_cast<std::int64_t>(r.uint<std::uint64_t>());
    s.m = read_tensors(r, c, transforms);
    s.v = read_tensors(r, c, transforms);
    c.adam = std::move(s);
  }
  if (!r.done()) throw Error("trailing bytes after checkpoint");
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const std::string bytes = serialize(ckpt);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return deserialize(buf.str());
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void check_dimensions(const Checkpoint& ckpt, Index users, Index items) {
  if (ckpt.users != users || ckpt.items != items) {
    throw Error("checkpoint was trained on " + std::to_string(ckpt.users) + " users x " +
                std::to_string(ckpt.items) + " items, dataset has " + std::to_string(users) + " x " +
                std::to_string(items));
  }
  const Hyperparams hp = ckpt.settings();
  if (hp.dim != ckpt.dim) throw Error("checkpoint dimension does not match its settings");
}

void check_settings(const Checkpoint& ckpt, const Hyperparams& expected) {
  if (ckpt.model != expected.model) {
    throw Error("checkpoint holds a " + to_string(ckpt.model) + " model, expected " +
                to_string(expected.model));
  }
  if (ckpt.dim != expected.dim) {
    throw Error("checkpoint dimension " + std::to_string(ckpt.dim) + " does not match dim=" +
                std::to_string(expected.dim));
  }
  if (expected.model == ModelKind::gbgcn && ckpt.layers != expected.layers) {
    throw Error("checkpoint has " + std::to_string(ckpt.layers) + " layers, expected " +
                std::to_string(expected.layers));
  }
}

}  // namespace gbgcn
