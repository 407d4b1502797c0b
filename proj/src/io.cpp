#include "lakevort/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace lakevort {

static_assert(std::endian::native == std::endian::little,
              "field containers assume a little-endian host");

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t state) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    for (std::size_t k = 0; k < n; ++k) {
        state ^= p[k];
        state *= 0x100000001b3ULL;
    }
    return state;
}

std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::uint64_t file_fnv1a64(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for checksum: " + path);
    std::uint64_t state = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0)
        state = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), state);
    return state;
}

std::string to_hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_row(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (cells[k].find_first_of(",\"\n\r") != std::string::npos)
            throw std::invalid_argument("csv cell contains a delimiter: " + cells[k]);
        if (k) out += ',';
        out += cells[k];
    }
    out += '\n';
    return out;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return s;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw std::runtime_error("rename failed for " + path + ": " + ec.message());
}

namespace {

template <typename T>
void put(std::vector<std::uint8_t>& out, const T& v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T get(const std::vector<std::uint8_t>& in, std::size_t& off) {
    T v;
    std::memcpy(&v, in.data() + off, sizeof(T));
    off += sizeof(T);
    return v;
}

} // namespace

std::vector<std::uint8_t> field_lvf_bytes(const ScalarField& f) {
    const Grid& g = f.grid;
    if (g.nx <= 0 || g.ny <= 0 || g.nx > 0xffff || g.ny > 0xffff)
        throw std::invalid_argument("field dimensions outside the u16 container range");
    if (static_cast<int>(f.values.size()) != g.cells())
        throw std::invalid_argument("field value count does not match its grid");
    std::vector<std::uint8_t> out;
    out.reserve(32 + f.values.size() * sizeof(double));
    out.insert(out.end(), {'L', 'V', 'F', '1'});
    put(out, static_cast<std::uint16_t>(g.nx));
    put(out, static_cast<std::uint16_t>(g.ny));
    put(out, g.h);
    put(out, g.origin.x);
    put(out, g.origin.y);
    for (double v : f.values) put(out, v);
    return out;
}

void write_field_lvf(const std::string& path, const ScalarField& f) {
    const std::vector<std::uint8_t> bytes = field_lvf_bytes(f);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw std::runtime_error("rename failed for " + path + ": " + ec.message());
}

ScalarField read_field_lvf(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (bytes.size() < 32 || std::memcmp(bytes.data(), "LVF1", 4) != 0)
        throw std::runtime_error("not a field container: " + path);
    std::size_t off = 4;
    Grid g;
    g.nx = get<std::uint16_t>(bytes, off);
    g.ny = get<std::uint16_t>(bytes, off);
    g.h = get<double>(bytes, off);
    g.origin.x = get<double>(bytes, off);
    g.origin.y = get<double>(bytes, off);
    const std::size_t want = 32 + static_cast<std::size_t>(g.nx) * g.ny * sizeof(double);
    if (bytes.size() != want)
        throw std::runtime_error("truncated field container: " + path);
    ScalarField f(g);
    for (double& v : f.values) v = get<double>(bytes, off);
    return f;
}

} // namespace lakevort
