#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pairlens {

// FIPS 180-4 SHA-256, used for the run manifest's content addressing.
class Sha256 {
 public:
  Sha256();
  void update(const void* data, std::size_t len);
  void update(std::string_view s) { update(s.data(), s.size()); }
  // Finalizes and returns the lowercase hex digest. The object must not be
  // updated afterwards.
  std::string hex_digest();

  static std::string of(std::string_view data);

 private:
  void process_block(const std::uint8_t* block);

  std::uint32_t h_[8];
  std::uint8_t buffer_[64];
  std::size_t buffer_len_ = 0;
  std::uint64_t total_len_ = 0;
};

std::string sha256_file(const std::string& path);

}  // namespace pairlens
