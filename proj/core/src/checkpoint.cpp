#include "molforge/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "molforge/error.hpp"

namespace molforge {
namespace {

constexpr std::array<char, 8> kMagic{'M', 'O', 'L', 'F', 'C', 'K', 'P', 'T'};

class Writer {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    buf_.insert(buf_.end(), p, p + n);
  }
  template <class T>
  void little(T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) buf_.push_back(static_cast<unsigned char>(value >> (8 * i)));
  }
  void f64(double value) { little(std::bit_cast<std::uint64_t>(value)); }
  std::vector<unsigned char>& buffer() { return buf_; }

 private:
  std::vector<unsigned char> buf_;
};

class Reader {
 public:
  Reader(const std::vector<unsigned char>& buf, std::size_t pos) : buf_(buf), pos_(pos) {}
  template <class T>
  T little() {
    need(sizeof(T));
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(static_cast<T>(buf_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return value;
  }
  double f64() { return std::bit_cast<double>(little<std::uint64_t>()); }
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return buf_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (buf_.size() - pos_ < n) throw CorruptCheckpoint("checkpoint is truncated");
  }
  const std::vector<unsigned char>& buf_;
  std::size_t pos_;
};

std::uint64_t fnv1a(const unsigned char* data, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

void save_checkpoint(const ValueNetwork& net, const Adam& optimizer, const std::filesystem::path& path) {
  Writer payload;
  for (const LayerBlocks* blocks : {&net.params(), &optimizer.first_moment(), &optimizer.second_moment()}) {
    const std::vector<double> flat = blocks->flatten();
    if (flat.size() != net.parameter_count()) throw ArchitectureMismatch("optimizer state does not match network");
    for (double x : flat) payload.f64(x);
  }

  Writer header;
  header.bytes(kMagic.data(), kMagic.size());
  header.little<std::uint32_t>(kCheckpointVersion);
  header.little<std::uint32_t>(static_cast<std::uint32_t>(net.layer_dims().size()));
  for (int d : net.layer_dims()) header.little<std::uint32_t>(static_cast<std::uint32_t>(d));
  header.little<std::uint32_t>(static_cast<std::uint32_t>(net.heads()));
  header.little<std::uint64_t>(net.parameter_count());
  header.little<std::uint64_t>(optimizer.steps());
  header.little<std::uint64_t>(fnv1a(payload.buffer().data(), payload.buffer().size()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(header.buffer().data()), static_cast<std::streamsize>(header.buffer().size()));
  out.write(reinterpret_cast<const char*>(payload.buffer().data()),
            static_cast<std::streamsize>(payload.buffer().size()));
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading " + path.string());

  if (buf.size() < kMagic.size() || std::memcmp(buf.data(), kMagic.data(), kMagic.size()) != 0) {
    throw CorruptCheckpoint(path.string() + " is not a checkpoint");
  }
  Reader r(buf, kMagic.size());
  const auto version = r.little<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw VersionMismatch("checkpoint format version " + std::to_string(version) + ", expected " +
                          std::to_string(kCheckpointVersion));
  }
  const auto layers = r.little<std::uint32_t>();
  if (layers == 0 || layers > 64) throw CorruptCheckpoint("implausible layer count");
  std::vector<int> dims;
  for (std::uint32_t i = 0; i < layers; ++i) dims.push_back(static_cast<int>(r.little<std::uint32_t>()));
  const auto heads = static_cast<int>(r.little<std::uint32_t>());
  const auto count = r.little<std::uint64_t>();
  const auto steps = r.little<std::uint64_t>();
  const auto checksum = r.little<std::uint64_t>();

  if (r.remaining() != 3 * 8 * count) throw CorruptCheckpoint("checkpoint payload has the wrong size");
  if (fnv1a(buf.data() + r.position(), r.remaining()) != checksum) {
    throw CorruptCheckpoint("checkpoint checksum mismatch");
  }
  ValueNetwork net;
  try {
    net = ValueNetwork(dims, heads);
  } catch (const ConfigError& e) {
    throw CorruptCheckpoint(std::string("bad architecture: ") + e.what());
  }
  if (net.parameter_count() != count) throw CorruptCheckpoint("parameter count does not match layer sizes");

  std::vector<double> params(count), m(count), v(count);
  for (auto* block : {&params, &m, &v}) {
    for (auto& x : *block) x = r.f64();
  }
  net.set_parameters(params);
  Adam adam(net, AdamConfig{});
  adam.restore(steps, m, v);
  return Checkpoint{std::move(net), std::move(adam)};
}

}  // namespace molforge
