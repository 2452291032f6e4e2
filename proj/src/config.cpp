// Strict INI parsing and small I/O utilities.
#include "spatess/config.hpp"

#include <cerrno>
#include <climits>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "spatess/errors.hpp"

namespace spatess {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail_at(const std::string& origin, int line, const std::string& msg) {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

} // namespace

bool IniDoc::has(const std::string& section, const std::string& key) const {
    return get(section, key).has_value();
}

std::optional<std::string> IniDoc::get(const std::string& section, const std::string& key) const {
    for (const auto& sec : sections) {
        if (sec.name != section) continue;
        for (const auto& kv : sec.entries)
            if (kv.first == key) return kv.second;
    }
    return std::nullopt;
}

IniDoc parse_ini(const std::string& text, const std::string& origin) {
    IniDoc doc;
    IniSection* cur = nullptr;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail_at(origin, lineno, "unterminated section header");
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (name.empty()) fail_at(origin, lineno, "empty section name");
            for (const auto& sec : doc.sections)
                if (sec.name == name) fail_at(origin, lineno, "duplicate section [" + name + "]");
            doc.sections.push_back({name, {}});
            cur = &doc.sections.back();
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail_at(origin, lineno, "expected key = value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail_at(origin, lineno, "empty key");
        if (cur == nullptr)
            fail_at(origin, lineno, "key '" + key + "' appears before any [section]");
        for (const auto& kv : cur->entries)
            if (kv.first == key)
                fail_at(origin, lineno, "duplicate key '" + cur->name + "." + key + "'");
        cur->entries.emplace_back(key, value);
    }
    return doc;
}

IniDoc parse_ini_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_ini(buf.str(), path);
}

void check_schema(const IniDoc& doc, const std::vector<SchemaSection>& schema) {
    for (const auto& sec : doc.sections) {
        const SchemaSection* match = nullptr;
        for (const auto& s : schema)
            if (s.name == sec.name) {
                match = &s;
                break;
            }
        if (match == nullptr) {
            std::string known;
            for (const auto& s : schema) known += (known.empty() ? "[" : ", [") + s.name + "]";
            throw ConfigError("unknown section [" + sec.name + "] (known: " + known + ")");
        }
        for (const auto& kv : sec.entries) {
            bool ok = false;
            for (const auto& k : match->keys)
                if (k == kv.first) {
                    ok = true;
                    break;
                }
            if (!ok) {
                std::string keys;
                for (const auto& k : match->keys) keys += (keys.empty() ? "" : ", ") + k;
                throw ConfigError("unknown key '" + sec.name + "." + kv.first +
                                  "' (allowed: " + keys + ")");
            }
        }
    }
}

double parse_double(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
        throw ConfigError(what + ": expected a number, got '" + text + "'");
    return v;
}

int parse_int(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || v < INT_MIN || v > INT_MAX)
        throw ConfigError(what + ": expected an integer, got '" + text + "'");
    return static_cast<int>(v);
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || t[0] == '-')
        throw ConfigError(what + ": expected an unsigned integer, got '" + text + "'");
    return static_cast<std::uint64_t>(v);
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
    std::vector<int> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) out.push_back(parse_int(item, what));
    if (out.empty()) throw ConfigError(what + ": expected a comma-separated integer list");
    return out;
}

double ini_double(const IniDoc& doc, const std::string& section, const std::string& key,
                  double fallback) {
    const auto v = doc.get(section, key);
    return v ? parse_double(*v, section + "." + key) : fallback;
}

int ini_int(const IniDoc& doc, const std::string& section, const std::string& key, int fallback) {
    const auto v = doc.get(section, key);
    return v ? parse_int(*v, section + "." + key) : fallback;
}

std::uint64_t ini_u64(const IniDoc& doc, const std::string& section, const std::string& key,
                      std::uint64_t fallback) {
    const auto v = doc.get(section, key);
    return v ? parse_u64(*v, section + "." + key) : fallback;
}

std::string ini_string(const IniDoc& doc, const std::string& section, const std::string& key,
                       const std::string& fallback) {
    const auto v = doc.get(section, key);
    return v ? *v : fallback;
}

std::vector<int> ini_int_list(const IniDoc& doc, const std::string& section,
                              const std::string& key, const std::vector<int>& fallback) {
    const auto v = doc.get(section, key);
    return v ? parse_int_list(*v, section + "." + key) : fallback;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ComputeError("cannot open '" + tmp + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw ComputeError("short write to '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw ComputeError("cannot rename '" + tmp + "' to '" + path + "': " +
                           std::strerror(errno));
    }
}

} // namespace spatess
