#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bitref/bitbuf.hpp"
#include "bitref/digest.hpp"
#include "bitref/io.hpp"

namespace bitref {

// Read-only handle to a reference image: the immutable bit string that
// references point into. File-backed images are memory-mapped.
class CorpusImage {
  public:
    // Opens and fully hashes the file. Throws IoError when unreadable and
    // ValidationError when empty.
    static CorpusImage from_file(const std::filesystem::path& path);
    static CorpusImage from_bytes(std::vector<std::uint8_t> bytes);

    BitView view() const { return {data_, bit_len_}; }
    const Digest& digest() const { return digest_; }
    std::uint64_t bit_len() const { return bit_len_; }
    // Empty for in-memory images.
    const std::filesystem::path& path() const { return path_; }

  private:
    friend class CorpusCatalog;

    // Opens without hashing; the caller vouches for the digest.
    static CorpusImage open_trusted(const std::filesystem::path& path, const Digest& digest);

    CorpusImage() = default;

    MappedFile map_;
    std::vector<std::uint8_t> owned_;
    const std::uint8_t* data_ = nullptr;
    std::uint64_t bit_len_ = 0;
    Digest digest_{};
    std::filesystem::path path_;
};

struct CatalogEntry {
    Digest digest{};
    std::uint64_t bit_len = 0;
    std::filesystem::path path;
    std::string label;
    std::int64_t registered_at = 0;  // seconds since the Unix epoch

    bool operator==(const CatalogEntry&) const = default;
};

enum class VerifyMode { sampled, full };

// Persistent content-addressed catalog of registered images. Images stay
// where they are; the catalog records digest, bit length, path, and label in
// a line-oriented file under data_dir, guarded by an advisory lock.
class CorpusCatalog {
  public:
    explicit CorpusCatalog(std::filesystem::path data_dir);

    // Hashes the file and inserts it, or confirms the existing entry when the
    // content is already registered (the first-seen path wins). Returns the
    // content digest either way.
    Digest register_image(const std::filesystem::path& path, const std::string& label = "");

    // Opens a registered image read-only after re-verifying it against the
    // catalog. sampled checks the size plus digests of three 64 KiB regions;
    // full re-hashes the whole file. Throws NotFoundError for an unknown
    // digest and TamperError when the file no longer matches.
    CorpusImage resolve(const Digest& digest, VerifyMode mode = VerifyMode::sampled) const;

    // Resolves a lowercase-hex digest prefix to the unique matching entry.
    // Throws NotFoundError when nothing matches and ValidationError when the
    // prefix is ambiguous or not valid hex.
    Digest resolve_prefix(const std::string& hex_prefix) const;

    // All entries, sorted by digest.
    std::vector<CatalogEntry> entries() const;

    const std::filesystem::path& data_dir() const { return data_dir_; }

  private:
    struct Meta {
        std::int64_t registered_at = 0;
        Digest sample_digest{};
        bool has_sample = false;
    };

    std::vector<CatalogEntry> load_locked() const;
    std::vector<Meta> load_meta_locked(const std::vector<CatalogEntry>& entries) const;
    void save_locked(const std::vector<CatalogEntry>& entries,
                     const std::vector<Meta>& meta) const;
    const CatalogEntry* find(const std::vector<CatalogEntry>& entries,
                             const Digest& digest) const;

    std::filesystem::path data_dir_;
    std::filesystem::path catalog_path_;
    std::filesystem::path meta_path_;
    std::filesystem::path lock_path_;
};

// Digest over the file size and three spot-check regions (head, middle,
// tail); cheap drift detection for multi-gigabyte images.
Digest sample_digest_of_file(const std::filesystem::path& path, std::uint64_t file_size);

}  // namespace bitref
