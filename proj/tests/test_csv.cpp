#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "dmsim/csv.hpp"
#include "dmsim/random.hpp"

using namespace dmsim;

TEST_CASE("csv_double reloads bit-exactly") {
    Rng rng(1);
    for (int i = 0; i < 2'000; ++i) {
        const double x = (uniform01(rng) - 0.5) * std::pow(10.0, (uniform01(rng) - 0.5) * 60.0);
        const std::string text = csv_double(x);
        const double back = std::strtod(text.c_str(), nullptr);
        CHECK(back == x);
    }
    CHECK(csv_double(0.1) == "0.10000000000000001");
}

TEST_CASE("fnv1a64 is stable") {
    CHECK(fnv1a64("") == 0xCBF29CE484222325ull);
    CHECK(fnv1a64("a") == 0xAF63DC4C8601EC8Cull);  // known FNV-1a vector
    CHECK(checksum_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("ArtifactWriter writes files and records checksums") {
    const auto dir = std::filesystem::temp_directory_path() / "dmsim_csv_test";
    std::filesystem::remove_all(dir);
    ArtifactWriter writer(dir);
    writer.write("a.csv", "x,y\n1,2\n");
    writer.write("b.csv", "z\n3\n");

    REQUIRE(writer.checksums().size() == 2);
    for (const auto& [name, sum] : writer.checksums()) {
        const auto path = dir / name;
        REQUIRE(std::filesystem::exists(path));
        std::ifstream in(path, std::ios::binary);
        std::string content((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
        CHECK(checksum_hex(content) == sum);
    }
    std::filesystem::remove_all(dir);
}
