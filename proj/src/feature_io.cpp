#include "tnr/feature_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include "tnr/errors.hpp"

namespace tnr {

namespace {

static_assert(std::numeric_limits<float>::is_iec559, "float32 must be IEEE-754");

class ByteWriter {
public:
    explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}

    void u16(std::uint16_t v) { uint(v, 2); }
    void u32(std::uint32_t v) { uint(v, 4); }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void raw(const char* s, std::size_t n) { out_.insert(out_.end(), s, s + n); }

private:
    void uint(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t>& out_;
};

class ByteReader {
public:
    ByteReader(std::span<const std::uint8_t> bytes, const std::string& source)
        : bytes_(bytes), source_(source) {}

    std::uint16_t u16(const char* what) { return static_cast<std::uint16_t>(uint(2, what)); }
    std::uint32_t u32(const char* what) { return static_cast<std::uint32_t>(uint(4, what)); }
    float f32(const char* what) { return std::bit_cast<float>(u32(what)); }

    void expect(const char* literal, std::size_t n) {
        need(n, "magic");
        if (std::memcmp(bytes_.data() + pos_, literal, n) != 0) fail("bad magic, expected TRFV");
        pos_ += n;
    }

    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, pos_, what); }
    [[noreturn]] void fail_at(std::size_t offset, const std::string& what) const {
        throw ParseError(source_, offset, what);
    }

private:
    void need(std::size_t n, const char* what) {
        if (remaining() < n) fail(std::string("truncated while reading ") + what);
    }
    std::uint64_t uint(int n, const char* what) {
        need(static_cast<std::size_t>(n), what);
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += static_cast<std::size_t>(n);
        return v;
    }

    std::span<const std::uint8_t> bytes_;
    const std::string& source_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_feature_file(const FeatureSet& set, std::uint16_t flags) {
    const int local_dim = set.local_dim();
    const int global_dim = set.global_dim();
    if (local_dim > std::numeric_limits<std::uint16_t>::max() ||
        global_dim > std::numeric_limits<std::uint16_t>::max())
        throw ConfigError("descriptor dimension does not fit the feature file header");
    for (const Feature& f : set.features)
        if (f.descriptor.size() != local_dim) throw ConfigError("mixed descriptor dimensions");

    std::vector<std::uint8_t> out;
    out.reserve(kFeatureHeaderSize + 4 * (static_cast<std::size_t>(global_dim) +
                                          set.size() * (3 + static_cast<std::size_t>(local_dim))));
    ByteWriter w(out);
    w.raw("TRFV", 4);
    w.u16(kFeatureFileVersion);
    w.u16(flags);
    w.u32(set.image_size.width);
    w.u32(set.image_size.height);
    w.u32(static_cast<std::uint32_t>(set.size()));
    w.u16(static_cast<std::uint16_t>(local_dim));
    w.u16(static_cast<std::uint16_t>(global_dim));
    for (int i = 0; i < global_dim; ++i) w.f32(set.global_descriptor[i]);
    for (const Feature& f : set.features) {
        w.f32(f.position.x());
        w.f32(f.position.y());
        w.f32(f.score);
        for (int i = 0; i < local_dim; ++i) w.f32(f.descriptor[i]);
    }
    return out;
}

FeatureFile decode_feature_file(std::span<const std::uint8_t> bytes, const std::string& source) {
    ByteReader r(bytes, source);
    r.expect("TRFV", 4);
    const std::size_t version_at = r.position();
    const std::uint16_t version = r.u16("version");
    if (version != kFeatureFileVersion)
        r.fail_at(version_at, "unsupported version " + std::to_string(version));
    FeatureFile file;
    file.flags = r.u16("flags");
    file.set.image_size.width = r.u32("image width");
    file.set.image_size.height = r.u32("image height");
    const std::uint32_t count = r.u32("feature count");
    const std::uint16_t local_dim = r.u16("local dim");
    const std::uint16_t global_dim = r.u16("global dim");

    // Reject impossible counts before allocating.
    const std::uint64_t payload = 4ull * global_dim + 4ull * count * (3ull + local_dim);
    if (payload > r.remaining())
        r.fail_at(bytes.size(), "truncated: header declares " + std::to_string(payload) +
                                    " payload bytes, " + std::to_string(r.remaining()) + " present");

    file.set.global_descriptor.resize(global_dim);
    for (int i = 0; i < global_dim; ++i) file.set.global_descriptor[i] = r.f32("global descriptor");
    file.set.features.resize(count);
    for (Feature& f : file.set.features) {
        f.position.x() = r.f32("u");
        f.position.y() = r.f32("v");
        f.score = r.f32("score");
        f.descriptor.resize(local_dim);
        for (int i = 0; i < local_dim; ++i) f.descriptor[i] = r.f32("descriptor");
    }
    if (r.remaining() != 0) r.fail(std::to_string(r.remaining()) + " trailing bytes");
    return file;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed for " + path.string());
}

void write_feature_file(const std::filesystem::path& path, const FeatureSet& set, std::uint16_t flags) {
    write_file_bytes(path, encode_feature_file(set, flags));
}

FeatureFile read_feature_file(const std::filesystem::path& path) {
    return decode_feature_file(read_file_bytes(path), path.string());
}

}  // namespace tnr
