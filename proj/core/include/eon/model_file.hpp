#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "eon/network.hpp"

namespace eon {

/// Binary layer snapshot, all integers little-endian:
///
///   "EON1"            magic
///   u16               format version (kModelFormatVersion)
///   u16 D, u16 K_S, u16 F, u32 N, u16 W, u16 T_learn[0], u16 clusters
///   N x { u16 T_learn, u16 T_fire (0xFFFF = inactive), u32 learned_count,
///         ceil(D^2 / 2) bytes of 4-bit weights, even pixel in the low nibble }
///   u32               CRC-32 of every preceding byte
inline constexpr std::uint16_t kModelFormatVersion = 1;
inline constexpr std::uint16_t kInactiveFire = 0xFFFF;

std::vector<std::uint8_t> encode_model(const Layer& layer);

/// Throws TruncatedPayload, BadMagic, UnsupportedVersion, ChecksumMismatch,
/// ConfigMismatch (when `expected` is given and differs) or FormatError.
Layer decode_model(std::span<const std::uint8_t> bytes, const std::optional<ModelConfig>& expected = std::nullopt);

void save_model(const Layer& layer, const std::filesystem::path& path);
Layer load_model(const std::filesystem::path& path, const std::optional<ModelConfig>& expected = std::nullopt);

/// CRC-32 of the encoded layer; cheap identity check for "weights unchanged" audits.
std::uint32_t layer_fingerprint(const Layer& layer);

std::uint32_t crc32(std::span<const std::uint8_t> bytes) noexcept;

} // namespace eon
