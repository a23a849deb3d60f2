#include "cervix_cad/binary_io.hpp"
#include "cervix_cad/descriptors.hpp"
#include "cervix_cad/error.hpp"

namespace cervix {

namespace {
constexpr std::string_view kMagic = "CDC1";
}

std::vector<std::uint8_t> encode_cache(const DescriptorCache& cache) {
  if (cache.values.size() != static_cast<std::size_t>(cache.n) * cache.d || cache.ids.size() != cache.n)
    throw std::invalid_argument("descriptor cache dimensions are inconsistent");
  io::ByteWriter w;
  w.put_bytes(kMagic);
  w.put_u8(static_cast<std::uint8_t>(cache.variant));
  w.put_u32(cache.n);
  w.put_u32(cache.d);
  for (float v : cache.values) w.put_f32(v);
  for (const auto& id : cache.ids) {
    w.put_u32(static_cast<std::uint32_t>(id.size()));
    w.put_bytes(id);
  }
  return w.bytes();
}

DescriptorCache decode_cache(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes);
  DescriptorCache cache;
  try {
    if (r.get_bytes(4) != kMagic) throw CacheInvalidError("bad magic (expected CDC1)");
    const auto code = r.get_u8();
    if (code > 3) throw CacheInvalidError("unknown variant code " + std::to_string(code));
    cache.variant = static_cast<BackboneVariant>(code);
    cache.n = r.get_u32();
    cache.d = r.get_u32();
    const std::uint64_t count = static_cast<std::uint64_t>(cache.n) * cache.d;
    if (count * 4 > r.remaining()) throw CacheInvalidError("header declares more data than the file holds");
    cache.values.resize(count);
    for (auto& v : cache.values) v = r.get_f32();
    cache.ids.reserve(cache.n);
    for (std::uint32_t i = 0; i < cache.n; ++i) {
      const auto len = r.get_u32();
      cache.ids.push_back(r.get_bytes(len));
    }
  } catch (const CacheInvalidError&) {
    throw;
  } catch (const DataError& e) {
    throw CacheInvalidError(std::string("truncated cache: ") + e.what());
  }
  if (r.remaining() != 0) throw CacheInvalidError("trailing bytes after id index");
  return cache;
}

void write_cache(const std::filesystem::path& path, const DescriptorCache& cache) {
  io::write_file_atomic(path, encode_cache(cache));
}

DescriptorCache read_cache(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  try {
    return decode_cache(bytes);
  } catch (const CacheInvalidError& e) {
    throw CacheInvalidError(path.string() + ": " + e.what());
  }
}

}  // namespace cervix
