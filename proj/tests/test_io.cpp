#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lakevort/io.hpp"
#include "lakevort/grid.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

using namespace lakevort;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("lv_io_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

} // namespace

// Published reference vectors for the 64-bit FNV-1a hash.
TEST_CASE("checksum matches the published FNV-1a 64-bit vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("checksum chaining equals hashing the concatenation") {
    std::string a = "foo", b = "bar";
    std::uint64_t chained = fnv1a64(b.data(), b.size(), fnv1a64(a));
    CHECK(chained == fnv1a64("foobar"));
}

TEST_CASE("hex rendering is 16 lowercase digits") {
    CHECK(to_hex16(0xcbf29ce484222325ULL) == "cbf29ce484222325");
    CHECK(to_hex16(0x0ULL) == "0000000000000000");
    CHECK(to_hex16(0xffffffffffffffffULL) == "ffffffffffffffff");
}

TEST_CASE("shortest-exact double formatting round-trips bit patterns") {
    // %.17g is guaranteed to round-trip any finite double through strtod.
    std::mt19937_64 rng(20260822u);
    int tested = 0;
    while (tested < 2000) {
        std::uint64_t bits = rng();
        double v;
        std::memcpy(&v, &bits, sizeof v);
        if (!std::isfinite(v)) continue;
        ++tested;
        std::string s = format_g17(v);
        double back = std::strtod(s.c_str(), nullptr);
        std::uint64_t back_bits;
        std::memcpy(&back_bits, &back, sizeof back);
        CHECK(back_bits == bits);
    }

    for (double v : {0.1, 1e-8, -0.0, std::numeric_limits<double>::max(),
                     std::numeric_limits<double>::min(),
                     std::numeric_limits<double>::denorm_min(), 0.0, 2.0 / 3.0}) {
        std::string s = format_g17(v);
        double back = std::strtod(s.c_str(), nullptr);
        std::uint64_t a, b;
        std::memcpy(&a, &v, sizeof a);
        std::memcpy(&b, &back, sizeof b);
        CHECK(a == b);
    }
}

TEST_CASE("csv rows join with commas and reject embedded delimiters") {
    CHECK(csv_row({"a", "b", "c"}) == "a,b,c\n");
    CHECK(csv_row({"only"}) == "only\n");
    CHECK_THROWS_AS(csv_row({"a,b"}), std::invalid_argument);
    CHECK_THROWS_AS(csv_row({"a\nb"}), std::invalid_argument);
    CHECK_THROWS_AS(csv_row({"a\"b"}), std::invalid_argument);
    CHECK_THROWS_AS(csv_row({"a\rb"}), std::invalid_argument);
}

TEST_CASE("atomic text write leaves exactly the target file") {
    fs::path dir = fresh_dir("atomic");
    fs::path target = dir / "note.txt";
    std::string content = "line one\nline two\n";
    write_text_atomic(target, content);
    CHECK(read_text(target) == content);
    CHECK(file_fnv1a64(target) == fnv1a64(content));

    // Overwrite works and no temporary siblings survive.
    write_text_atomic(target, "replaced\n");
    CHECK(read_text(target) == "replaced\n");
    int entries = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        (void)e;
        ++entries;
    }
    CHECK(entries == 1);
}

TEST_CASE("reading a missing text file throws") {
    CHECK_THROWS_AS(read_text(fs::temp_directory_path() / "lv_io_no_such_file"),
                    std::runtime_error);
}

TEST_CASE("field container round-trips grids and payload bitwise") {
    Grid g;
    g.nx = 7;
    g.ny = 5;
    g.h = 0.25;
    g.origin = {-1.0, 2.0};
    ScalarField f(g);
    std::mt19937_64 rng(7u);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            std::uint64_t bits = rng();
            double v;
            std::memcpy(&v, &bits, sizeof v);
            f(i, j) = v; // arbitrary bit patterns, NaNs and infinities included
        }
    f(0, 0) = std::numeric_limits<double>::quiet_NaN();
    f(1, 0) = std::numeric_limits<double>::infinity();
    f(2, 0) = -std::numeric_limits<double>::infinity();

    fs::path dir = fresh_dir("field");
    fs::path path = dir / "field.lvf";
    write_field_lvf(path, f);

    ScalarField back = read_field_lvf(path);
    CHECK(back.grid.nx == g.nx);
    CHECK(back.grid.ny == g.ny);
    CHECK(back.grid.h == g.h);
    CHECK(back.grid.origin.x == g.origin.x);
    CHECK(back.grid.origin.y == g.origin.y);
    REQUIRE(back.values.size() == f.values.size());
    CHECK(std::memcmp(back.values.data(), f.values.data(),
                      f.values.size() * sizeof(double)) == 0);

    // Serialized bytes are a pure function of the field.
    CHECK(field_lvf_bytes(back) == field_lvf_bytes(f));
}

TEST_CASE("field container rejects corrupt inputs") {
    fs::path dir = fresh_dir("corrupt");

    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_field_lvf(dir / "absent.lvf"), std::runtime_error);
    }

    SUBCASE("bad magic") {
        fs::path p = dir / "bad.lvf";
        write_text_atomic(p, "XXXX this is not a field file");
        CHECK_THROWS_AS(read_field_lvf(p), std::runtime_error);
    }

    SUBCASE("truncated payload") {
        Grid g;
        g.nx = 4;
        g.ny = 4;
        g.h = 0.5;
        g.origin = {0.0, 0.0};
        ScalarField f(g);
        auto bytes = field_lvf_bytes(f);
        bytes.resize(bytes.size() - 8);
        fs::path p = dir / "short.lvf";
        write_text_atomic(p, std::string(bytes.begin(), bytes.end()));
        CHECK_THROWS_AS(read_field_lvf(p), std::runtime_error);
    }

    SUBCASE("trailing garbage") {
        Grid g;
        g.nx = 4;
        g.ny = 4;
        g.h = 0.5;
        g.origin = {0.0, 0.0};
        ScalarField f(g);
        auto bytes = field_lvf_bytes(f);
        std::string text(bytes.begin(), bytes.end());
        text += "extra";
        fs::path p = dir / "long.lvf";
        write_text_atomic(p, text);
        CHECK_THROWS_AS(read_field_lvf(p), std::runtime_error);
    }
}

TEST_CASE("field container rejects dimensions outside the header range") {
    Grid g;
    g.nx = 70000; // exceeds the 16-bit header field
    g.ny = 1;
    g.h = 0.1;
    g.origin = {0.0, 0.0};
    ScalarField f(g);
    CHECK_THROWS_AS(field_lvf_bytes(f), std::invalid_argument);
}
