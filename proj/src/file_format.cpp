#include "conceptkit/file_format.hpp"

#include "conceptkit/errors.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>
#include <system_error>

namespace conceptkit::io {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace

void Manifest::set(std::string key, std::string value) {
    for (auto& [k, v] : entries_) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    entries_.emplace_back(std::move(key), std::move(value));
}

bool Manifest::contains(std::string_view key) const {
    return find(key).has_value();
}

std::optional<std::string> Manifest::find(std::string_view key) const {
    for (const auto& [k, v] : entries_) {
        if (k == key) return v;
    }
    return std::nullopt;
}

const std::string& Manifest::require(std::string_view key) const {
    for (const auto& [k, v] : entries_) {
        if (k == key) return v;
    }
    throw FormatError("malformed header: missing key '" + std::string(key) + "'");
}

void Manifest::check_keys(std::span<const std::string_view> required,
                          std::span<const std::string_view> optional,
                          std::string_view what) const {
    for (const auto& [k, v] : entries_) {
        const bool known = std::find(required.begin(), required.end(), k) != required.end() ||
                           std::find(optional.begin(), optional.end(), k) != optional.end();
        if (!known) {
            throw FormatError("malformed header: unknown key '" + k + "' in " + std::string(what));
        }
    }
    for (auto key : required) {
        if (!contains(key)) {
            throw FormatError("malformed header: missing key '" + std::string(key) + "' in " +
                              std::string(what));
        }
    }
}

RawFile parse_file(std::string bytes, std::string_view what) {
    RawFile file;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool terminated = false;
    while (pos < bytes.size()) {
        const auto eol = bytes.find('\n', pos);
        if (eol == std::string::npos) break;
        std::string_view line(bytes.data() + pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) {
            terminated = true;
            break;
        }
        const auto colon = line.find(':');
        if (colon == std::string_view::npos) {
            throw FormatError("malformed header: line " + std::to_string(line_no) + " of " +
                              std::string(what) + " is not 'key: value'");
        }
        const auto key = trim(line.substr(0, colon));
        const auto value = trim(line.substr(colon + 1));
        if (key.empty()) {
            throw FormatError("malformed header: empty key on line " + std::to_string(line_no));
        }
        if (file.manifest.contains(key)) {
            throw FormatError("malformed header: duplicate key '" + std::string(key) + "'");
        }
        file.manifest.set(std::string(key), std::string(value));
    }
    if (!terminated) {
        throw FormatError("malformed header: " + std::string(what) +
                          " manifest is not terminated by a blank line");
    }
    file.payload = bytes.substr(pos);
    return file;
}

std::string serialize(const Manifest& manifest, std::string_view payload) {
    std::string out;
    for (const auto& [k, v] : manifest.entries()) {
        out += k;
        out += ": ";
        out += v;
        out += '\n';
    }
    out += '\n';
    out.append(payload);
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
    return bytes;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("write failure on '" + path.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move output into place at '" + path.string() + "'");
    }
}

void append_f32(std::string& out, float value) {
    const auto bits = std::bit_cast<std::uint32_t>(value);
    for (int shift = 0; shift < 32; shift += 8) {
        out.push_back(static_cast<char>((bits >> shift) & 0xFFu));
    }
}

void append_f32(std::string& out, std::span<const float> values) {
    out.reserve(out.size() + 4 * values.size());
    for (float v : values) append_f32(out, v);
}

float read_f32(std::string_view bytes, std::size_t index) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) {
        bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 * index + b])) << (8 * b);
    }
    return std::bit_cast<float>(bits);
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, std::string_view key) {
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw FormatError("malformed header: key '" + std::string(key) + "' expects a real, got '" +
                          std::string(text) + "'");
    }
    return value;
}

std::int64_t parse_int(std::string_view text, std::string_view key) {
    std::int64_t value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw FormatError("malformed header: key '" + std::string(key) +
                          "' expects an integer, got '" + std::string(text) + "'");
    }
    return value;
}

} // namespace conceptkit::io
