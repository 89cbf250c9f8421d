// Command-line front end: every subcommand is a thin shell over the library.
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "bitref/analyzer.hpp"
#include "bitref/codec.hpp"
#include "bitref/corpus.hpp"
#include "bitref/digest.hpp"
#include "bitref/errors.hpp"
#include "bitref/index_format.hpp"
#include "bitref/io.hpp"
#include "bitref/plant.hpp"

namespace {

namespace fs = std::filesystem;
using namespace bitref;

std::string format_ratio(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

fs::path default_data_dir(const std::string& flag_value) {
    if (!flag_value.empty()) {
        return flag_value;
    }
    if (const char* home = std::getenv("HOME"); home != nullptr && *home != '\0') {
        return fs::path(home) / ".bitref";
    }
    return fs::path(".bitref");
}

struct GlobalOptions {
    std::string data_dir;
    unsigned workers = 1;
    std::string verify = "sampled";

    CorpusCatalog catalog() const { return CorpusCatalog(default_data_dir(data_dir)); }
    VerifyMode verify_mode() const {
        return verify == "full" ? VerifyMode::full : VerifyMode::sampled;
    }
};

void run_corpus_add(const GlobalOptions& g, const std::string& path, const std::string& label) {
    CorpusCatalog catalog = g.catalog();
    Digest digest = catalog.register_image(path, label);
    for (const auto& entry : catalog.entries()) {
        if (entry.digest == digest) {
            fs::path given = fs::absolute(path);
            if (entry.path != given) {
                std::cerr << "note: identical content already registered from "
                          << entry.path.string() << "; keeping that path\n";
            }
            std::cout << "digest=" << to_hex(digest) << '\n'
                      << "bit_len=" << entry.bit_len << '\n'
                      << "path=" << entry.path.string() << '\n';
            return;
        }
    }
}

void run_corpus_list(const GlobalOptions& g) {
    for (const auto& entry : g.catalog().entries()) {
        std::cout << to_hex(entry.digest) << '\t' << entry.bit_len << '\t'
                  << entry.path.string() << '\t' << entry.label << '\n';
    }
}

void run_encode(const GlobalOptions& g, const std::string& input, const std::string& corpus,
                std::optional<std::uint64_t> chunk_bits, const std::string& on_miss,
                bool paper32, const std::string& out) {
    CorpusCatalog catalog = g.catalog();
    Digest digest = catalog.resolve_prefix(corpus);
    CorpusImage image = catalog.resolve(digest, g.verify_mode());
    Payload payload = Payload::from_file(input);
    EncodeOptions opts{g.workers};

    EncodeReport report;
    if (chunk_bits) {
        ChunkPolicy policy{*chunk_bits,
                           on_miss == "fail" ? OnMiss::fail : OnMiss::literal};
        report = encode_chunked(payload, image, policy, opts);
    } else {
        report = encode_single(payload, image, opts);
    }

    std::vector<std::uint8_t> bytes;
    if (paper32) {
        if (report.index.records.size() != 1 ||
            !std::holds_alternative<ReferenceRecord>(report.index.records[0])) {
            throw ValidationError(
                "the paper32 format holds exactly one reference record; this encode produced " +
                std::to_string(report.reference_records) + " reference and " +
                std::to_string(report.literal_records) + " literal records");
        }
        auto fixed = write_paper32(std::get<ReferenceRecord>(report.index.records[0]).span);
        bytes.assign(fixed.begin(), fixed.end());
    } else {
        bytes = write_native(report.index);
    }
    write_file(out, bytes);

    if (report.index.records.size() == 1) {
        if (const auto* ref = std::get_if<ReferenceRecord>(&report.index.records[0])) {
            std::cout << "offset_bit=" << ref->span.start_bit << '\n';
        }
    }
    std::cout << "reference_records=" << report.reference_records << '\n'
              << "literal_records=" << report.literal_records << '\n'
              << "payload_size_bits=" << report.payload_size_bits << '\n'
              << "index_size_bits=" << report.index_size_bits << '\n'
              << "out_bits=" << 8 * bytes.size() << '\n'
              << "savings_ratio=" << format_ratio(report.savings_ratio) << '\n'
              << "out=" << out << '\n';
}

// Loads the index and opens the image it needs. An 8-byte file is the
// paper32 format, which carries no digests, so it requires --corpus-path;
// anything else is parsed as the native format and resolved through the
// catalog unless --corpus-path overrides it.
struct LoadedIndex {
    IndexFile index;
    CorpusImage image;
    bool paper32 = false;
};

LoadedIndex load_index(const GlobalOptions& g, const std::string& index_path,
                       const std::string& corpus_path, const Digest& paper32_payload_digest) {
    std::vector<std::uint8_t> bytes = read_file(index_path);
    if (bytes.size() == kPaper32Bytes) {
        if (corpus_path.empty()) {
            throw ValidationError(
                "an 8-byte index is the paper32 format and names no image; pass --corpus-path");
        }
        CorpusImage image = CorpusImage::from_file(corpus_path);
        IndexFile idx = read_paper32(bytes, paper32_payload_digest, image.digest());
        return LoadedIndex{std::move(idx), std::move(image), true};
    }
    IndexFile idx = read_native(bytes);
    CorpusImage image = corpus_path.empty()
                            ? g.catalog().resolve(idx.corpus_digest, g.verify_mode())
                            : CorpusImage::from_file(corpus_path);
    return LoadedIndex{std::move(idx), std::move(image), false};
}

void run_decode(const GlobalOptions& g, const std::string& index_path,
                const std::string& corpus_path, const std::string& out) {
    LoadedIndex loaded = load_index(g, index_path, corpus_path, Digest{});
    DecodeOptions opts;
    opts.require_payload_digest = !loaded.paper32;
    Payload payload = decode(loaded.index, loaded.image, opts);
    write_file(out, payload.bits.bytes());
    std::cout << "payload_bits=" << payload.bits.bit_len() << '\n'
              << "payload_digest=" << to_hex(payload.digest) << '\n'
              << "out=" << out << '\n';
}

void run_verify_then_delete(const GlobalOptions& g, const std::string& input,
                            const std::string& index_path, const std::string& corpus_path) {
    // For paper32, bind the recorded digest to the file under verification;
    // decode's digest check plus the byte comparison keep deletion safe.
    Digest input_digest = sha256_file(input);
    LoadedIndex loaded = load_index(g, index_path, corpus_path, input_digest);
    DeleteOutcome outcome = verify_then_delete(input, loaded.index, loaded.image);
    std::cout << "deleted=" << (outcome.deleted ? "true" : "false") << '\n'
              << "freed_bits=" << outcome.freed_bits << '\n';
}

void run_analyze(std::uint64_t corpus_bits, std::uint64_t chunk_bits,
                 std::optional<std::uint64_t> payload_bits, std::uint64_t record_cost_bits,
                 std::optional<unsigned> trials, std::uint64_t seed) {
    if (payload_bits) {
        FeasibilityReport report =
            feasibility_report(*payload_bits, corpus_bits, chunk_bits, record_cost_bits);
        std::cout << report.to_kv();
    } else {
        std::cout << "corpus_bits=" << corpus_bits << '\n'
                  << "chunk_bits=" << chunk_bits << '\n'
                  << "expected_occurrences=" << expected_occurrences(corpus_bits, chunk_bits)
                  << '\n'
                  << "match_probability=" << match_probability(corpus_bits, chunk_bits) << '\n'
                  << "record_cost_bits=" << record_cost_bits << '\n'
                  << "break_even_bits=" << break_even_length(record_cost_bits) << '\n';
    }
    if (trials) {
        std::cout << "trials=" << *trials << '\n'
                  << "mc_occurrence_mean=" << mc_occurrence_mean(corpus_bits, chunk_bits, *trials, seed)
                  << '\n'
                  << "mc_match_frequency="
                  << mc_match_frequency(corpus_bits, chunk_bits, *trials, seed) << '\n';
    }
}

void run_plant(const std::string& payload_path, std::uint64_t corpus_bits,
               std::optional<std::uint64_t> offset, std::uint64_t seed,
               const std::string& out) {
    std::vector<std::uint8_t> payload_bytes = read_file(payload_path);
    BitBuffer payload = BitBuffer::from_bytes(std::move(payload_bytes));
    PlantResult result = plant_corpus(payload.view(), corpus_bits, offset, seed, out);
    std::cout << "offset_bit=" << result.offset_bit << '\n'
              << "corpus_bits=" << result.corpus_bits << '\n'
              << "corpus_digest=" << to_hex(result.corpus_digest) << '\n'
              << "out=" << out << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Encode files as bit-offset references into registered reference images"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--data-dir", g.data_dir, "Catalog directory (default: ~/.bitref)")
        ->envname("BITREF_DATA_DIR");
    app.add_option("--workers", g.workers, "Shards per search")->check(CLI::PositiveNumber);
    app.add_option("--verify", g.verify, "Image re-verification on resolve")
        ->check(CLI::IsMember({"sampled", "full"}));

    auto* corpus = app.add_subcommand("corpus", "Manage the catalog of reference images");
    corpus->require_subcommand(1);

    std::string add_path, add_label;
    auto* corpus_add = corpus->add_subcommand("add", "Register an image by content digest");
    corpus_add->fallthrough();
    corpus_add->add_option("path", add_path, "Image file")->required()->check(CLI::ExistingFile);
    corpus_add->add_option("--label", add_label, "Free-form note");

    auto* corpus_list = corpus->add_subcommand("list", "List registered images");
    corpus_list->fallthrough();

    std::string enc_input, enc_corpus, enc_on_miss = "literal", enc_out;
    std::optional<std::uint64_t> enc_chunk_bits;
    bool enc_paper32 = false;
    auto* encode_cmd = app.add_subcommand("encode", "Encode a file as references into an image");
    encode_cmd->fallthrough();
    encode_cmd->add_option("--input", enc_input, "File to encode")
        ->required()
        ->check(CLI::ExistingFile);
    encode_cmd->add_option("--corpus", enc_corpus, "Image digest (or unique prefix)")->required();
    encode_cmd->add_option("--chunk-bits", enc_chunk_bits,
                           "Split the payload into chunks of this many bits");
    encode_cmd->add_option("--on-miss", enc_on_miss, "When a chunk is not found")
        ->check(CLI::IsMember({"literal", "fail"}));
    encode_cmd->add_flag("--paper32", enc_paper32,
                         "Write the 8-byte two-ordinal format instead of the native format");
    encode_cmd->add_option("--out", enc_out, "Index file to write")->required();

    std::string dec_index, dec_corpus_path, dec_out;
    auto* decode_cmd = app.add_subcommand("decode", "Reconstruct a file from an index");
    decode_cmd->fallthrough();
    decode_cmd->add_option("--index", dec_index, "Index file")
        ->required()
        ->check(CLI::ExistingFile);
    decode_cmd->add_option("--corpus-path", dec_corpus_path,
                           "Image file to use instead of the catalog");
    decode_cmd->add_option("--out", dec_out, "Output file")->required();

    std::string vtd_input, vtd_index, vtd_corpus_path;
    auto* vtd_cmd = app.add_subcommand(
        "verify-then-delete", "Delete the original only after its index decodes to it exactly");
    vtd_cmd->fallthrough();
    vtd_cmd->add_option("--input", vtd_input, "Original file to verify and delete")
        ->required()
        ->check(CLI::ExistingFile);
    vtd_cmd->add_option("--index", vtd_index, "Index file")
        ->required()
        ->check(CLI::ExistingFile);
    vtd_cmd->add_option("--corpus-path", vtd_corpus_path,
                        "Image file to use instead of the catalog");

    std::uint64_t ana_corpus_bits = 0, ana_chunk_bits = 0, ana_seed = 0;
    std::uint64_t ana_record_cost = kNativeReferenceCostBits;
    std::optional<std::uint64_t> ana_payload_bits;
    std::optional<unsigned> ana_trials;
    auto* analyze_cmd =
        app.add_subcommand("analyze", "Feasibility math for a corpus/chunk size combination");
    analyze_cmd->fallthrough();
    analyze_cmd->add_option("--corpus-bits", ana_corpus_bits, "Image size in bits")
        ->required()
        ->check(CLI::PositiveNumber);
    analyze_cmd->add_option("--chunk-bits", ana_chunk_bits, "Chunk size in bits")
        ->required()
        ->check(CLI::PositiveNumber);
    analyze_cmd->add_option("--payload-bits", ana_payload_bits,
                            "Project the index size for a payload of this many bits");
    analyze_cmd->add_option("--record-cost-bits", ana_record_cost,
                            "Reference record cost (native 136, paper32 64)")
        ->check(CLI::PositiveNumber);
    analyze_cmd->add_option("--trials", ana_trials, "Monte Carlo trials to run");
    analyze_cmd->add_option("--seed", ana_seed, "Monte Carlo seed");

    std::string plant_payload, plant_out;
    std::uint64_t plant_corpus_bits = 0, plant_seed = 0;
    std::optional<std::uint64_t> plant_offset;
    auto* plant_cmd = app.add_subcommand(
        "plant", "Write a synthetic random image containing a payload at a known bit offset");
    plant_cmd->fallthrough();
    plant_cmd->add_option("--payload", plant_payload, "Payload file")
        ->required()
        ->check(CLI::ExistingFile);
    plant_cmd->add_option("--corpus-bits", plant_corpus_bits, "Image size in bits (multiple of 8)")
        ->required()
        ->check(CLI::PositiveNumber);
    plant_cmd->add_option("--offset", plant_offset, "Bit offset (default: drawn from the seed)");
    plant_cmd->add_option("--seed", plant_seed, "Random fill seed")->required();
    plant_cmd->add_option("--out", plant_out, "Image file to write")->required();

    corpus_add->callback([&] { run_corpus_add(g, add_path, add_label); });
    corpus_list->callback([&] { run_corpus_list(g); });
    encode_cmd->callback([&] {
        run_encode(g, enc_input, enc_corpus, enc_chunk_bits, enc_on_miss, enc_paper32, enc_out);
    });
    decode_cmd->callback([&] { run_decode(g, dec_index, dec_corpus_path, dec_out); });
    vtd_cmd->callback([&] { run_verify_then_delete(g, vtd_input, vtd_index, vtd_corpus_path); });
    analyze_cmd->callback([&] {
        run_analyze(ana_corpus_bits, ana_chunk_bits, ana_payload_bits, ana_record_cost,
                    ana_trials, ana_seed);
    });
    plant_cmd->callback([&] {
        run_plant(plant_payload, plant_corpus_bits, plant_offset, plant_seed, plant_out);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ExitCode::parse);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
