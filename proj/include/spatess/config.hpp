#pragma once
// INI-style run configs: strict parsing (unknown sections/keys rejected with
// key-path diagnostics), typed getters, FNV-1a hashing, atomic file writes.
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace spatess {

struct IniSection {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;  // in file order
};

struct IniDoc {
    std::vector<IniSection> sections;

    bool has(const std::string& section, const std::string& key) const;
    std::optional<std::string> get(const std::string& section, const std::string& key) const;
};

// `origin` names the file in diagnostics ("<origin>:<line>: message").
// Grammar: [section] headers, key = value entries, blank lines, and full-line
// # or ; comments. Duplicate sections or keys are errors.
IniDoc parse_ini(const std::string& text, const std::string& origin);
IniDoc parse_ini_file(const std::string& path);

struct SchemaSection {
    std::string name;
    std::vector<std::string> keys;
};

// Rejects unknown sections/keys, naming the offending key path.
void check_schema(const IniDoc& doc, const std::vector<SchemaSection>& schema);

// Typed getters; errors name the full key path and the expected type.
double ini_double(const IniDoc& doc, const std::string& section, const std::string& key,
                  double fallback);
int ini_int(const IniDoc& doc, const std::string& section, const std::string& key, int fallback);
std::uint64_t ini_u64(const IniDoc& doc, const std::string& section, const std::string& key,
                      std::uint64_t fallback);
std::string ini_string(const IniDoc& doc, const std::string& section, const std::string& key,
                       const std::string& fallback);
std::vector<int> ini_int_list(const IniDoc& doc, const std::string& section,
                              const std::string& key, const std::vector<int>& fallback);

double parse_double(const std::string& text, const std::string& what);
int parse_int(const std::string& text, const std::string& what);
std::uint64_t parse_u64(const std::string& text, const std::string& what);
std::vector<int> parse_int_list(const std::string& text, const std::string& what);

std::uint64_t fnv1a64(const std::string& text);
std::string hash_hex(std::uint64_t h);

// Writes via a temp file in the same directory, then renames into place.
void write_text_atomic(const std::string& path, const std::string& content);

} // namespace spatess
