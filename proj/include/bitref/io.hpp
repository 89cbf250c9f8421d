#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace bitref {

// Read-only memory mapping; empty files map to a null span.
class MappedFile {
  public:
    MappedFile() = default;
    ~MappedFile();
    MappedFile(MappedFile&& other) noexcept;
    MappedFile& operator=(MappedFile&& other) noexcept;
    MappedFile(const MappedFile&) = delete;
    MappedFile& operator=(const MappedFile&) = delete;

    static MappedFile open_readonly(const std::filesystem::path& path);

    std::span<const std::uint8_t> bytes() const {
        return {static_cast<const std::uint8_t*>(addr_), size_};
    }
    std::uint64_t size() const { return size_; }

  private:
    void* addr_ = nullptr;
    std::size_t size_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data);

}  // namespace bitref
