#pragma once

#include <filesystem>
#include <string>

#include "photostat/detector.hpp"
#include "photostat/field.hpp"
#include "photostat/interferometer.hpp"

namespace photostat {

// Little-endian binary containers. Every reader checks the magic, the
// version and that the payload length matches the header.
//   PSFT: "PSFT" u32 version, f64 dt, f64 flux, u64 n, n x (f64 re, f64 im)
//   PSIT: "PSIT" u32 version, f64 dt, f64 flux, u64 n, n x f64
//   PSTG: "PSTG" u32 version, f64 duration, u64 n, u32 channel, n x f64

inline constexpr std::uint32_t kBinaryFormatVersion = 1;

void write_field_trace(const std::filesystem::path& path, const FieldTrace& trace);
FieldTrace read_field_trace(const std::filesystem::path& path);

void write_intensity_trace(const std::filesystem::path& path, const IntensityTrace& trace,
                           double flux = 1.0);
IntensityTrace read_intensity_trace(const std::filesystem::path& path, double* flux = nullptr);

void write_tag_stream(const std::filesystem::path& path, const TagStream& stream);
TagStream read_tag_stream(const std::filesystem::path& path);

void write_field_csv(const std::filesystem::path& path, const FieldTrace& trace);
void write_tags_csv(const std::filesystem::path& path, const TagStream& stream);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace photostat
