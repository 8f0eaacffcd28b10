#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dmsim {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 17 significant digits: enough to reload any double bit-exactly.
[[nodiscard]] inline std::string csv_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// FNV-1a 64-bit; the artifact checksum recorded in run_meta.
[[nodiscard]] inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

[[nodiscard]] inline std::string checksum_hex(std::string_view bytes) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

/// Writes run artifacts into one directory and remembers their checksums
/// for run_meta.
class ArtifactWriter {
public:
    explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create output directory '" + dir_.string() + "'");
    }

    void write(const std::string& name, std::string_view content) {
        const std::filesystem::path path = dir_ / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("failed writing '" + path.string() + "'");
        checksums_[name] = checksum_hex(content);
    }

    [[nodiscard]] const std::map<std::string, std::string>& checksums() const {
        return checksums_;
    }
    [[nodiscard]] const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    std::map<std::string, std::string> checksums_;
};

}  // namespace dmsim
