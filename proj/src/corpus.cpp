#include "bitref/corpus.hpp"

#include <sys/file.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <chrono>
#include <cstring>
#include <fcntl.h>
#include <fstream>
#include <sstream>
#include <string_view>
#include <unistd.h>
#include <unordered_map>

#include "bitref/errors.hpp"

namespace bitref {

namespace {

constexpr std::string_view kCatalogHeader = "# bitref-catalog v1";
constexpr std::string_view kMetaHeader = "# bitref-catalog-meta v1";
constexpr std::uint64_t kSampleRegionBytes = 64 * 1024;

// Advisory lock on a dedicated lock file; exclusive for writers, shared for
// readers. Released on destruction.
class FileLock {
  public:
    FileLock(const std::filesystem::path& path, bool exclusive) {
        fd_ = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
        if (fd_ < 0) {
            throw IoError("cannot open lock file " + path.string() + ": " +
                          std::strerror(errno));
        }
        if (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
            int err = errno;
            ::close(fd_);
            throw IoError("cannot lock " + path.string() + ": " + std::strerror(err));
        }
    }

    ~FileLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }

    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

  private:
    int fd_ = -1;
};

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t tab = line.find('\t', pos);
        if (tab == std::string_view::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, tab - pos));
        pos = tab + 1;
    }
}

std::uint64_t parse_u64(std::string_view text, const std::string& what) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ParseError("invalid " + what + " '" + std::string(text) + "'");
    }
    return value;
}

std::int64_t parse_i64(std::string_view text) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        return 0;
    }
    return value;
}

std::int64_t now_epoch_seconds() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out.flush()) {
            throw IoError("write to " + tmp.string() + " failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw IoError("cannot replace " + path.string() + ": " + ec.message());
    }
}

}  // namespace

CorpusImage CorpusImage::from_file(const std::filesystem::path& path) {
    CorpusImage img = open_trusted(path, Digest{});
    img.digest_ = sha256(img.map_.bytes());
    return img;
}

CorpusImage CorpusImage::from_bytes(std::vector<std::uint8_t> bytes) {
    if (bytes.empty()) {
        throw ValidationError("an empty byte string cannot serve as a reference image");
    }
    CorpusImage img;
    img.owned_ = std::move(bytes);
    img.data_ = img.owned_.data();
    img.bit_len_ = 8 * static_cast<std::uint64_t>(img.owned_.size());
    img.digest_ = sha256(img.owned_);
    return img;
}

CorpusImage CorpusImage::open_trusted(const std::filesystem::path& path, const Digest& digest) {
    CorpusImage img;
    img.map_ = MappedFile::open_readonly(path);
    if (img.map_.size() == 0) {
        throw ValidationError("empty file cannot serve as a reference image: " + path.string());
    }
    img.data_ = img.map_.bytes().data();
    img.bit_len_ = 8 * img.map_.size();
    img.digest_ = digest;
    img.path_ = path;
    return img;
}

Digest sample_digest_of_file(const std::filesystem::path& path, std::uint64_t file_size) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string() + " for sampling");
    }
    Sha256 hash;
    std::uint8_t size_le[8];
    for (int i = 0; i < 8; ++i) {
        size_le[i] = static_cast<std::uint8_t>(file_size >> (8 * i));
    }
    hash.update(size_le);

    const std::uint64_t head = 0;
    const std::uint64_t mid = file_size / 2 > kSampleRegionBytes / 2
                                  ? file_size / 2 - kSampleRegionBytes / 2
                                  : 0;
    const std::uint64_t tail = file_size > kSampleRegionBytes ? file_size - kSampleRegionBytes : 0;
    std::vector<char> buf(kSampleRegionBytes);
    for (std::uint64_t offset : {head, mid, tail}) {
        std::uint64_t len = std::min<std::uint64_t>(kSampleRegionBytes, file_size - offset);
        in.seekg(static_cast<std::streamoff>(offset));
        in.read(buf.data(), static_cast<std::streamsize>(len));
        if (static_cast<std::uint64_t>(in.gcount()) != len) {
            throw IoError("short read while sampling " + path.string());
        }
        hash.update({reinterpret_cast<const std::uint8_t*>(buf.data()), len});
    }
    return hash.finish();
}

CorpusCatalog::CorpusCatalog(std::filesystem::path data_dir) : data_dir_(std::move(data_dir)) {
    std::error_code ec;
    std::filesystem::create_directories(data_dir_, ec);
    if (ec) {
        throw IoError("cannot create data directory " + data_dir_.string() + ": " + ec.message());
    }
    catalog_path_ = data_dir_ / "catalog.tsv";
    meta_path_ = data_dir_ / "catalog.meta";
    lock_path_ = data_dir_ / "catalog.lock";
}

Digest CorpusCatalog::register_image(const std::filesystem::path& path,
                                     const std::string& label) {
    std::string text = path.string();
    if (text.find('\t') != std::string::npos || text.find('\n') != std::string::npos ||
        label.find('\t') != std::string::npos || label.find('\n') != std::string::npos) {
        throw ValidationError("image path and label must not contain tabs or newlines");
    }
    std::error_code ec;
    std::uint64_t size = std::filesystem::file_size(path, ec);
    if (ec) {
        throw IoError("cannot stat " + path.string() + ": " + ec.message());
    }
    if (size == 0) {
        throw ValidationError("empty file cannot serve as a reference image: " + path.string());
    }
    Digest digest = sha256_file(path);
    Digest sample = sample_digest_of_file(path, size);

    FileLock lock(lock_path_, /*exclusive=*/true);
    auto entries = load_locked();
    auto meta = load_meta_locked(entries);
    if (find(entries, digest) != nullptr) {
        return digest;  // content already registered; first path wins
    }
    CatalogEntry entry;
    entry.digest = digest;
    entry.bit_len = 8 * size;
    entry.path = std::filesystem::absolute(path);
    entry.label = label;
    entry.registered_at = now_epoch_seconds();
    entries.push_back(entry);
    meta.push_back(Meta{entry.registered_at, sample, true});
    save_locked(entries, meta);
    return digest;
}

CorpusImage CorpusCatalog::resolve(const Digest& digest, VerifyMode mode) const {
    FileLock lock(lock_path_, /*exclusive=*/false);
    auto entries = load_locked();
    auto meta = load_meta_locked(entries);
    const CatalogEntry* entry = find(entries, digest);
    if (entry == nullptr) {
        throw NotFoundError("no registered image with digest " + to_hex(digest));
    }
    const Meta& m = meta[static_cast<std::size_t>(entry - entries.data())];

    CorpusImage img = CorpusImage::open_trusted(entry->path, digest);
    if (img.bit_len() != entry->bit_len) {
        throw TamperError("image " + entry->path.string() + " changed size since registration (" +
                          std::to_string(entry->bit_len) + " bits registered, " +
                          std::to_string(img.bit_len()) + " bits on disk)");
    }
    if (mode == VerifyMode::full || !m.has_sample) {
        if (sha256(img.map_.bytes()) != digest) {
            throw TamperError("image " + entry->path.string() +
                              " no longer matches its registered digest " + to_hex(digest));
        }
    } else {
        if (sample_digest_of_file(entry->path, img.map_.size()) != m.sample_digest) {
            throw TamperError("image " + entry->path.string() +
                              " failed the sampled content check; it changed since registration");
        }
    }
    return img;
}

Digest CorpusCatalog::resolve_prefix(const std::string& hex_prefix) const {
    if (hex_prefix.empty() || hex_prefix.size() > 64) {
        throw ValidationError("digest prefix must be 1..64 hex characters");
    }
    std::string prefix;
    prefix.reserve(hex_prefix.size());
    for (char c : hex_prefix) {
        if (c >= 'A' && c <= 'F') {
            c = static_cast<char>(c - 'A' + 'a');
        }
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) {
            throw ValidationError("digest prefix contains non-hex character");
        }
        prefix.push_back(c);
    }
    const std::vector<CatalogEntry> all = entries();
    const CatalogEntry* match = nullptr;
    for (const auto& entry : all) {
        if (to_hex(entry.digest).starts_with(prefix)) {
            if (match != nullptr) {
                throw ValidationError("digest prefix '" + hex_prefix + "' is ambiguous");
            }
            match = &entry;
        }
    }
    if (match == nullptr) {
        throw NotFoundError("no registered image matches digest prefix '" + hex_prefix + "'");
    }
    return match->digest;
}

std::vector<CatalogEntry> CorpusCatalog::entries() const {
    FileLock lock(lock_path_, /*exclusive=*/false);
    auto entries = load_locked();
    auto meta = load_meta_locked(entries);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        entries[i].registered_at = meta[i].registered_at;
    }
    return entries;
}

std::vector<CatalogEntry> CorpusCatalog::load_locked() const {
    std::vector<CatalogEntry> out;
    std::ifstream in(catalog_path_, std::ios::binary);
    if (!in) {
        return out;  // no catalog yet
    }
    std::string line;
    if (!std::getline(in, line) || line != kCatalogHeader) {
        throw ParseError("catalog file " + catalog_path_.string() +
                         " has an unrecognized header");
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        auto fields = split_tabs(line);
        if (fields.size() != 4) {
            throw ParseError("catalog file " + catalog_path_.string() + " line " +
                             std::to_string(line_no) + ": expected 4 tab-separated fields");
        }
        CatalogEntry entry;
        entry.digest = digest_from_hex(fields[0]);
        entry.bit_len = parse_u64(fields[1], "bit length");
        entry.path = std::string(fields[2]);
        entry.label = std::string(fields[3]);
        if (entry.path.empty()) {
            throw ParseError("catalog file " + catalog_path_.string() + " line " +
                             std::to_string(line_no) + ": empty path");
        }
        out.push_back(std::move(entry));
    }
    std::sort(out.begin(), out.end(),
              [](const CatalogEntry& a, const CatalogEntry& b) { return a.digest < b.digest; });
    return out;
}

std::vector<CorpusCatalog::Meta> CorpusCatalog::load_meta_locked(
    const std::vector<CatalogEntry>& entries) const {
    std::vector<Meta> out(entries.size());
    std::ifstream in(meta_path_, std::ios::binary);
    if (!in) {
        return out;
    }
    std::string line;
    if (!std::getline(in, line) || line != kMetaHeader) {
        return out;  // advisory cache; ignore unrecognized content
    }
    std::unordered_map<std::string, Meta> by_hex;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        auto fields = split_tabs(line);
        if (fields.size() != 3 || fields[0].size() != 64 || fields[2].size() != 64) {
            continue;
        }
        try {
            Meta m;
            m.registered_at = parse_i64(fields[1]);
            m.sample_digest = digest_from_hex(fields[2]);
            m.has_sample = true;
            by_hex.emplace(std::string(fields[0]), m);
        } catch (const Error&) {
            continue;
        }
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
        auto it = by_hex.find(to_hex(entries[i].digest));
        if (it != by_hex.end()) {
            out[i] = it->second;
        }
    }
    return out;
}

void CorpusCatalog::save_locked(const std::vector<CatalogEntry>& entries,
                                const std::vector<Meta>& meta) const {
    std::vector<std::size_t> order(entries.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return entries[a].digest < entries[b].digest;
    });

    std::ostringstream catalog;
    catalog << kCatalogHeader << '\n';
    std::ostringstream sidecar;
    sidecar << kMetaHeader << '\n';
    for (std::size_t i : order) {
        const CatalogEntry& e = entries[i];
        catalog << to_hex(e.digest) << '\t' << e.bit_len << '\t' << e.path.string() << '\t'
                << e.label << '\n';
        if (meta[i].has_sample) {
            sidecar << to_hex(e.digest) << '\t' << meta[i].registered_at << '\t'
                    << to_hex(meta[i].sample_digest) << '\n';
        }
    }
    write_atomically(catalog_path_, catalog.str());
    write_atomically(meta_path_, sidecar.str());
}

const CatalogEntry* CorpusCatalog::find(const std::vector<CatalogEntry>& entries,
                                        const Digest& digest) const {
    for (const auto& entry : entries) {
        if (entry.digest == digest) {
            return &entry;
        }
    }
    return nullptr;
}

}  // namespace bitref
