#include <algorithm>
#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "eges/error.hpp"
#include "eges/model.hpp"

namespace eges {
namespace {

constexpr char kMagic[8] = {'E', 'G', 'E', 'S', '0', '0', '0', '1'};

template <class U>
U to_little(U value) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(U)>>(value);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<U>(bytes);
  }
  return value;
}

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void bytes(const void* data, std::size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u32(std::uint32_t v) {
    v = to_little(v);
    bytes(&v, 4);
  }
  void u64(std::uint64_t v) {
    v = to_little(v);
    bytes(&v, 8);
  }
  void floats(const std::vector<float>& xs) {
    if constexpr (std::endian::native == std::endian::little) {
      bytes(xs.data(), xs.size() * sizeof(float));
    } else {
      for (float x : xs) u32(std::bit_cast<std::uint32_t>(x));
    }
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw FormatError("model file truncated");
    }
  }
  std::uint8_t u8() {
    std::uint8_t v = 0;
    bytes(&v, 1);
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    bytes(&v, 4);
    return to_little(v);
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    bytes(&v, 8);
    return to_little(v);
  }
  void floats(std::vector<float>& xs) {
    bytes(xs.data(), xs.size() * sizeof(float));
    if constexpr (std::endian::native == std::endian::big) {
      for (float& x : xs) {
        x = std::bit_cast<float>(to_little(std::bit_cast<std::uint32_t>(x)));
      }
    }
  }
  std::string str() {
    const std::uint32_t n = u32();
    if (n > (1u << 20)) throw FormatError("model file: implausible string length");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::istream& in_;
};

}  // namespace

void save_model(const Model& m, std::ostream& out) {
  Writer w(out);
  const std::size_t n = m.num_types();
  w.bytes(kMagic, sizeof(kMagic));
  w.u8(static_cast<std::uint8_t>(m.regime()));
  w.u32(static_cast<std::uint32_t>(m.dim()));
  w.u32(static_cast<std::uint32_t>(n));
  w.u32(static_cast<std::uint32_t>(m.num_items()));
  for (std::size_t s = 0; s < n; ++s) w.u32(m.catalog().vocab_size(s));
  w.floats(m.context());
  for (std::size_t s = 0; s <= n; ++s) w.floats(m.embedding(s));
  w.floats(m.weights());

  w.u64(m.seed());
  for (const auto& id : m.item_ids()) w.str(id);
  for (const auto& name : m.catalog().type_names()) w.str(name);
  for (std::size_t s = 0; s < n; ++s) {
    for (const auto& value : m.catalog().vocabulary(s)) w.str(value);
  }
  for (std::uint32_t v : m.catalog().values()) w.u32(v);
  if (!out) throw IoError("failed writing model");
}

Model load_model(std::istream& in) {
  Reader r(in);
  char magic[8];
  r.bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("not a model file (bad magic or version)");
  }
  const std::uint8_t regime_byte = r.u8();
  if (regime_byte > static_cast<std::uint8_t>(Regime::kEges)) {
    throw FormatError("model file: unknown regime");
  }
  const auto regime = static_cast<Regime>(regime_byte);
  const std::uint32_t dim = r.u32();
  const std::uint32_t n = r.u32();
  const std::uint32_t items = r.u32();
  if (dim == 0) throw FormatError("model file: zero dimension");
  if (regime == Regime::kBge && n != 0) {
    throw FormatError("model file: regime and type count disagree");
  }
  std::vector<std::uint32_t> vocab_sizes(n);
  for (auto& size : vocab_sizes) {
    size = r.u32();
    if (size == 0) throw FormatError("model file: empty vocabulary");
  }

  std::vector<float> context(std::size_t{items} * dim);
  r.floats(context);
  std::vector<std::vector<float>> embeddings;
  embeddings.emplace_back(std::size_t{items} * dim);
  r.floats(embeddings.back());
  for (std::uint32_t s = 0; s < n; ++s) {
    embeddings.emplace_back(std::size_t{vocab_sizes[s]} * dim);
    r.floats(embeddings.back());
  }
  std::vector<float> weights(std::size_t{items} * (n + 1));
  r.floats(weights);

  const std::uint64_t seed = r.u64();
  std::vector<std::string> item_ids(items);
  for (auto& id : item_ids) id = r.str();
  std::vector<std::string> type_names(n);
  for (auto& name : type_names) name = r.str();
  std::vector<std::vector<std::string>> vocab(n);
  for (std::uint32_t s = 0; s < n; ++s) {
    vocab[s].resize(vocab_sizes[s]);
    for (auto& value : vocab[s]) value = r.str();
  }
  std::vector<std::uint32_t> values(std::size_t{items} * n);
  for (auto& v : values) v = r.u32();
  if (!r.at_end()) throw FormatError("model file: trailing bytes");

  SideInfoCatalog catalog;
  try {
    catalog = SideInfoCatalog(items, std::move(type_names), std::move(vocab),
                              std::move(values));
  } catch (const ConfigError& e) {
    throw FormatError(std::string("model file: ") + e.what());
  }
  Model m(regime, dim, std::move(item_ids), std::move(catalog));
  m.set_seed(seed);
  m.context() = std::move(context);
  for (std::uint32_t s = 0; s <= n; ++s) m.embedding(s) = std::move(embeddings[s]);
  m.weights() = std::move(weights);
  return m;
}

void save_model(const Model& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  save_model(m, out);
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return load_model(in);
}

void write_embeddings(const Model& m, std::ostream& out) {
  out << "# eges regime=" << to_string(m.regime()) << " dim=" << m.dim()
      << " seed=" << m.seed() << '\n';
  char buf[32];
  for (NodeId v = 0; v < m.num_items(); ++v) {
    const auto h = aggregate_hidden(m, v);
    out << m.item_ids()[v] << '\t';
    for (std::size_t i = 0; i < h.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(h[i]));
      if (i > 0) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace eges
