#include "qgbasin/io.hpp"

#include <bit>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

namespace qgbasin {

namespace {

constexpr char kMagic[] = "QGFIELD1";
constexpr std::size_t kMagicSize = 8;
constexpr std::size_t kHeaderSize = kMagicSize + 2 * 4 + 2 * 8;
constexpr const char* kHeader = "t,enstrophy,energy,forcing_norm2,envelope";

std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void put_u32(std::string& out, std::uint32_t v)
{
    for (int b = 0; b < 4; ++b) {
        out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
    }
}

void put_f64(std::string& out, double v)
{
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
        out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
    }
}

std::uint32_t get_u32(const std::string& in, std::size_t pos)
{
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) {
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + b])) << (8 * b);
    }
    return v;
}

double get_f64(const std::string& in, std::size_t pos)
{
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) {
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + b])) << (8 * b);
    }
    return std::bit_cast<double>(v);
}

std::string read_all(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

double parse_cell(const std::string& cell, std::size_t row, const char* column)
{
    const char* begin = cell.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (cell.empty() || end != begin + cell.size() || (errno == ERANGE && std::isinf(v))) {
        throw FormatError("diagnostics row " + std::to_string(row) + ": malformed " + column + " '" + cell + "'");
    }
    return v;
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + path.string());
        }
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            throw std::runtime_error("write failed for " + path.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot replace " + path.string() + ": " + ec.message());
    }
}

void write_diagnostics(const std::vector<DiagnosticsRecord>& records, const std::filesystem::path& path)
{
    std::string text = kHeader;
    text += '\n';
    for (const DiagnosticsRecord& r : records) {
        text += format_double(r.t) + ',' + format_double(r.enstrophy) + ',' + format_double(r.energy) + ','
                + format_double(r.forcing_norm2) + ',';
        if (r.envelope) {
            text += format_double(*r.envelope);
        }
        text += '\n';
    }
    write_file_atomic(path, text);
}

std::vector<DiagnosticsRecord> read_diagnostics(const std::filesystem::path& path)
{
    std::istringstream in(read_all(path));
    std::string line;
    if (!std::getline(in, line) || line != kHeader) {
        throw FormatError("diagnostics: missing or wrong header in " + path.string());
    }
    std::vector<DiagnosticsRecord> records;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cells;
        std::size_t start = 0;
        for (;;) {
            const std::size_t comma = line.find(',', start);
            cells.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        if (cells.size() != 5) {
            throw FormatError("diagnostics row " + std::to_string(row) + ": expected 5 columns, got "
                              + std::to_string(cells.size()));
        }
        DiagnosticsRecord r;
        r.t = parse_cell(cells[0], row, "t");
        r.enstrophy = parse_cell(cells[1], row, "enstrophy");
        r.energy = parse_cell(cells[2], row, "energy");
        r.forcing_norm2 = parse_cell(cells[3], row, "forcing_norm2");
        if (!cells[4].empty()) {
            r.envelope = parse_cell(cells[4], row, "envelope");
        }
        records.push_back(r);
    }
    return records;
}

void write_field(const SpectralField& field, const std::filesystem::path& path)
{
    const Domain& d = field.domain();
    std::string bytes(kMagic, kMagicSize);
    put_u32(bytes, static_cast<std::uint32_t>(d.mx()));
    put_u32(bytes, static_cast<std::uint32_t>(d.my()));
    put_f64(bytes, d.lx());
    put_f64(bytes, d.ly());
    for (double c : field.coeffs()) {
        put_f64(bytes, c);
    }
    write_file_atomic(path, bytes);
}

SpectralField read_field(const std::filesystem::path& path)
{
    const std::string bytes = read_all(path);
    if (bytes.size() < kMagicSize) {
        throw FormatError("checkpoint truncated: " + path.string());
    }
    if (bytes.compare(0, kMagicSize, kMagic, kMagicSize) != 0) {
        if (bytes.compare(0, kMagicSize - 1, kMagic, kMagicSize - 1) == 0) {
            throw VersionError("checkpoint version '" + bytes.substr(0, kMagicSize) + "' is not supported (expected "
                               + kMagic + ")");
        }
        throw FormatError("not a QGFIELD checkpoint: " + path.string());
    }
    if (bytes.size() < kHeaderSize) {
        throw FormatError("checkpoint truncated in header: " + path.string());
    }
    const auto mx = static_cast<std::int32_t>(get_u32(bytes, 8));
    const auto my = static_cast<std::int32_t>(get_u32(bytes, 12));
    const double lx = get_f64(bytes, 16);
    const double ly = get_f64(bytes, 24);
    if (mx < 1 || my < 1) {
        throw FormatError("checkpoint has invalid dimensions");
    }
    const std::uint64_t count = static_cast<std::uint64_t>(mx) * static_cast<std::uint64_t>(my);
    if (count > (std::numeric_limits<std::uint64_t>::max() - kHeaderSize) / 8
        || count > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
        throw FormatError("checkpoint dimensions overflow");
    }
    const std::uint64_t expected = kHeaderSize + 8 * count;
    if (bytes.size() < expected) {
        throw FormatError("checkpoint truncated: expected " + std::to_string(expected) + " bytes, found "
                          + std::to_string(bytes.size()));
    }
    if (bytes.size() > expected) {
        throw FormatError("checkpoint has trailing bytes");
    }
    std::vector<double> coeffs(count);
    for (std::uint64_t k = 0; k < count; ++k) {
        coeffs[k] = get_f64(bytes, kHeaderSize + 8 * k);
    }
    try {
        return SpectralField(Domain(lx, ly, mx, my), std::move(coeffs));
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("checkpoint geometry invalid: ") + e.what());
    }
}

}  // namespace qgbasin
