// CRC-32, reflected polynomial 0xEDB88320, init/final XOR 0xFFFFFFFF
// (the IEEE 802.3 convention). Used for payload integrity checks and for
// config hashing in run manifests.

#ifndef MEGI_CRC32_HPP
#define MEGI_CRC32_HPP

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace megi {

std::uint32_t crc32(const void* data, std::size_t len);

inline std::uint32_t crc32(std::string_view s) {
  return crc32(s.data(), s.size());
}

}  // namespace megi

#endif  // MEGI_CRC32_HPP
