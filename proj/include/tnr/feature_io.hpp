#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tnr/features.hpp"

namespace tnr {

// Feature file layout, all integers and floats little-endian:
//   offset  0  magic "TRFV"
//           4  u16 version (= 1)
//           6  u16 flags
//           8  u32 image width
//          12  u32 image height
//          16  u32 feature count
//          20  u16 local descriptor dim
//          22  u16 global descriptor dim
//          24  global descriptor, global_dim x f32
//              then per feature: f32 u, f32 v, f32 score, local_dim x f32
inline constexpr std::uint16_t kFeatureFileVersion = 1;
inline constexpr std::size_t kFeatureHeaderSize = 24;

struct FeatureFile {
    FeatureSet set;
    std::uint16_t flags = 0;
};

std::vector<std::uint8_t> encode_feature_file(const FeatureSet& set, std::uint16_t flags = 0);

/// Throws ParseError (with byte offset) on bad magic, unknown version, truncation or trailing bytes.
FeatureFile decode_feature_file(std::span<const std::uint8_t> bytes, const std::string& source = "<memory>");

void write_feature_file(const std::filesystem::path& path, const FeatureSet& set, std::uint16_t flags = 0);
FeatureFile read_feature_file(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace tnr
