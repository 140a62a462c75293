#include "privesc/nn/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace privesc::nn {

namespace {

constexpr std::array<char, 8> kMagic = {'P', 'V', 'N', 'C', 'K', 'P', 'T', '\0'};

template <typename U>
void put_le(std::ostream& os, U v) {
  std::array<char, sizeof(U)> buf{};
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(buf.data(), buf.size());
}

template <typename U>
U get_le(std::istream& is) {
  std::array<unsigned char, sizeof(U)> buf{};
  if (!is.read(reinterpret_cast<char*>(buf.data()), buf.size())) throw CheckpointError("checkpoint truncated");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf[i]) << (8 * i);
  return v;
}

std::string get_bytes(std::istream& is, std::uint64_t n) {
  if (n > (1ULL << 32)) throw CheckpointError("checkpoint field too large");
  std::string s(static_cast<std::size_t>(n), '\0');
  if (n && !is.read(s.data(), static_cast<std::streamsize>(n))) throw CheckpointError("checkpoint truncated");
  return s;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ParamStore& params, const nlohmann::json& meta) {
  std::ostringstream os(std::ios::binary);
  os.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(os, kCheckpointVersion);
  const std::string m = meta.dump();
  put_le<std::uint64_t>(os, m.size());
  os.write(m.data(), static_cast<std::streamsize>(m.size()));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(params.tensors().size()));
  for (const auto& t : params.tensors()) {
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(t.name.size()));
    os.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(t.ref.rows));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(t.ref.cols));
    for (double v : params.view(t.ref)) put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(v));
  }

  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw CheckpointError("cannot write checkpoint: " + tmp.string());
    const std::string bytes = os.str();
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw CheckpointError("cannot write checkpoint: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw CheckpointError("cannot move checkpoint into place: " + ec.message());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CheckpointError("cannot open checkpoint: " + path.string());
  std::array<char, 8> magic{};
  if (!f.read(magic.data(), magic.size()) || magic != kMagic) throw CheckpointError("not a checkpoint file: " + path.string());
  const auto version = get_le<std::uint32_t>(f);
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint version " + std::to_string(version) + " unsupported (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  }
  Checkpoint ck;
  const std::string meta = get_bytes(f, get_le<std::uint64_t>(f));
  try {
    ck.meta = nlohmann::json::parse(meta);
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("checkpoint metadata is not valid JSON: ") + e.what());
  }
  const auto n = get_le<std::uint32_t>(f);
  for (std::uint32_t k = 0; k < n; ++k) {
    const std::string name = get_bytes(f, get_le<std::uint32_t>(f));
    const auto rows = get_le<std::uint32_t>(f);
    const auto cols = get_le<std::uint32_t>(f);
    if (rows == 0 || cols == 0 || rows > (1u << 20) || cols > (1u << 20)) throw CheckpointError("bad tensor shape: " + name);
    TensorRef ref;
    try {
      ref = ck.params.add(name, static_cast<int>(rows), static_cast<int>(cols));
    } catch (const std::invalid_argument& e) {
      throw CheckpointError(e.what());
    }
    for (double& v : ck.params.view(ref)) v = std::bit_cast<double>(get_le<std::uint64_t>(f));
  }
  return ck;
}

void assign_params(ParamStore& dst, const ParamStore& src) {
  if (dst.tensors().size() != src.tensors().size()) throw CheckpointError("checkpoint tensor count mismatch");
  for (const auto& t : dst.tensors()) {
    const TensorInfo* s = src.find(t.name);
    if (!s) throw CheckpointError("checkpoint lacks tensor " + t.name);
    if (s->ref.rows != t.ref.rows || s->ref.cols != t.ref.cols) throw CheckpointError("shape mismatch for " + t.name);
    const auto from = src.view(s->ref);
    std::copy(from.begin(), from.end(), dst.view(t.ref).begin());
  }
}

}  // namespace privesc::nn
