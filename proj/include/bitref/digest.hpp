#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace bitref {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> data);
Digest sha256_file(const std::filesystem::path& path);

// Incremental SHA-256 for streaming large inputs.
class Sha256 {
  public:
    Sha256();
    ~Sha256();
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(std::span<const std::uint8_t> data);
    Digest finish();

  private:
    void* ctx_;
};

std::string to_hex(const Digest& d);
Digest digest_from_hex(std::string_view hex);

}  // namespace bitref
