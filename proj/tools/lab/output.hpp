#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"

namespace lab {

std::string fmt(double v); // %.17g
std::string sha256_hex(const std::string& bytes);

// Collects run artifacts in one directory; the manifest goes last.
class OutputSet {
  public:
    explicit OutputSet(std::filesystem::path dir);

    const std::filesystem::path& dir() const { return dir_; }
    void write(const std::string& name, const std::string& content);
    void write_json(const std::string& name, const Json& j);
    const std::vector<std::string>& files() const { return files_; }

    void write_manifest(const std::string& command, const ScenarioConfig& cfg, std::uint64_t seed);

  private:
    std::filesystem::path dir_;
    std::vector<std::string> files_;
    std::vector<std::string> digests_;
    std::vector<std::size_t> sizes_;
};

// Line-buffered CSV with a header row and LF endings.
class Csv {
  public:
    explicit Csv(std::initializer_list<const char*> header);
    Csv& operator<<(double v);
    Csv& operator<<(long long v);
    Csv& operator<<(std::size_t v) { return *this << static_cast<long long>(v); }
    Csv& operator<<(int v) { return *this << static_cast<long long>(v); }
    Csv& operator<<(const std::string& s);
    Csv& operator<<(std::string_view s) { return *this << std::string(s); }
    void end_row();
    const std::string& str() const { return out_; }

  private:
    void sep();
    std::string out_;
    bool rowStart_ = true;
};

inline constexpr const char* kToolVersion = "0.1.0";

} // namespace lab
