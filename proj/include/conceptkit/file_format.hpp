#pragma once

// Shared machinery for the on-disk formats: a UTF-8 "key: value" manifest
// terminated by a blank line, followed by a little-endian float32 payload.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace conceptkit::io {

class Manifest {
public:
    void set(std::string key, std::string value);
    [[nodiscard]] bool contains(std::string_view key) const;
    [[nodiscard]] std::optional<std::string> find(std::string_view key) const;
    // Throws FormatError naming the key when absent.
    [[nodiscard]] const std::string& require(std::string_view key) const;

    [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& entries() const {
        return entries_;
    }

    // Rejects any key outside required ∪ optional and any missing required key.
    void check_keys(std::span<const std::string_view> required,
                    std::span<const std::string_view> optional,
                    std::string_view what) const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

// A parsed file: manifest plus the raw bytes that follow the blank line.
struct RawFile {
    Manifest manifest;
    std::string payload;
};

[[nodiscard]] RawFile parse_file(std::string bytes, std::string_view what);
[[nodiscard]] std::string serialize(const Manifest& manifest, std::string_view payload);

[[nodiscard]] std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temp file and renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

void append_f32(std::string& out, float value);
void append_f32(std::string& out, std::span<const float> values);
[[nodiscard]] float read_f32(std::string_view bytes, std::size_t index);

// Shortest decimal text that parses back to the same double.
[[nodiscard]] std::string format_double(double value);
[[nodiscard]] double parse_double(std::string_view text, std::string_view key);
[[nodiscard]] std::int64_t parse_int(std::string_view text, std::string_view key);

} // namespace conceptkit::io
