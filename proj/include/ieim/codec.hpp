#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ieim/core.hpp"

namespace ieim {

// .ievt layout. 32-byte header, 16-byte records, little-endian throughout.
//   header: "IEVT" | u16 version=1 | u16 width | u16 height | u32 tick_ns
//           | u64 event_count | 10 reserved zero bytes
//   record: u64 t | u16 x | u16 y | s8 polarity | 3 zero pad bytes
inline constexpr std::size_t kIevtHeaderSize = 32;
inline constexpr std::size_t kIevtRecordSize = 16;

/// Serializes a valid stream; identical input gives identical bytes.
/// Throws ValidationError if the stream breaks its invariants.
std::vector<std::uint8_t> encode_events(const EventStream& stream);

/// Inverse of encode_events on its image. Throws DecodeError naming the
/// first bad byte offset on any malformed input.
EventStream decode_events(const std::uint8_t* data, std::size_t size);
EventStream decode_events(const std::vector<std::uint8_t>& bytes);

/// Parses "t,x,y,p" rows (optional header row, LF or CRLF) and sorts into
/// canonical order. Throws ParseError with a 1-based line number.
EventStream read_csv_events(const std::string& text, std::uint16_t width,
                            std::uint16_t height, std::uint32_t tick_ns);

/// Binary PGM ("P5"), maxval 255 or 65535; 16-bit samples big-endian.
std::vector<std::uint8_t> write_pgm(const Grid& grid, int maxval);
Grid read_pgm(const std::uint8_t* data, std::size_t size, int* maxval_out = nullptr);
Grid read_pgm(const std::vector<std::uint8_t>& bytes, int* maxval_out = nullptr);

// File helpers (thin wrappers; throw std::runtime_error on I/O failure).
std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes);
void write_file(const std::string& path, const std::string& text);

/// Stores a non-negative density grid as 16-bit PGM plus a JSON sidecar
/// {"scale": s, "offset": o}; value = offset + scale * raw / 65535.
void store_density_pgm(const Grid& grid, const std::string& pgm_path);

/// Loads a PGM as densities. Uses the sidecar when present, otherwise
/// rescales raw samples to [0, 1].
Grid load_density_pgm(const std::string& pgm_path);

}  // namespace ieim
