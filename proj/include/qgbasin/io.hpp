#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgbasin/spectral_field.hpp"
#include "qgbasin/timestepper.hpp"

namespace qgbasin {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A QGFIELD checkpoint with a version other than 1.
class VersionError : public FormatError {
public:
    using FormatError::FormatError;
};

/// CSV with header t,enstrophy,energy,forcing_norm2,envelope; 17 significant
/// digits; an absent envelope is an empty cell.
void write_diagnostics(const std::vector<DiagnosticsRecord>& records, const std::filesystem::path& path);
std::vector<DiagnosticsRecord> read_diagnostics(const std::filesystem::path& path);

/// Binary checkpoint: "QGFIELD1", int32 Mx, My, float64 Lx, Ly, then Mx * My
/// float64 coefficients with m outer, all little-endian.
void write_field(const SpectralField& field, const std::filesystem::path& path);
/// The returned field lives on the default-padded domain for the stored geometry.
SpectralField read_field(const std::filesystem::path& path);

/// Writes through a temporary sibling file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

}  // namespace qgbasin
