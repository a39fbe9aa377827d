#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace trouter {

/// Error type thrown by all modules for contract violations and bad inputs.
class RouterError : public std::runtime_error {
public:
    explicit RouterError(const std::string& what) : std::runtime_error(what) {}
};

/// Recoverable parse failure of a model response; callers may retry.
class ParseError : public RouterError {
public:
    explicit ParseError(const std::string& what) : RouterError(what) {}
};

// FNV-1a, 64 bit. Used for stable identifiers (profile ids, transcript keys,
// snapshot hashes) that must not change across runs or platforms.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ull) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= static_cast<std::uint64_t>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string to_hex(std::uint64_t value);

/// fnv1a64 over `data`, rendered as a fixed-width lowercase hex string.
inline std::string stable_hash(std::string_view data) { return to_hex(fnv1a64(data)); }

std::string trim(std::string_view s);
std::vector<std::string> split_lines(std::string_view text);

/// Replaces every occurrence of `needle` in `text`. Replacement text is not
/// rescanned, so substituting a value that itself contains the needle is safe.
std::string replace_all(std::string text, std::string_view needle, std::string_view replacement);

bool starts_with(std::string_view s, std::string_view prefix);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace trouter
