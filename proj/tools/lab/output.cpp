#include "output.hpp"

#include <cstdio>
#include <fstream>

#include <openssl/evp.h>

namespace lab {

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
    return buf;
}

std::string sha256_hex(const std::string& bytes)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256: digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

OutputSet::OutputSet(std::filesystem::path dir) : dir_(std::move(dir))
{
    std::filesystem::create_directories(dir_);
}

void OutputSet::write(const std::string& name, const std::string& content)
{
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    out << content;
    out.close();
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    files_.push_back(name);
    digests_.push_back(sha256_hex(content));
    sizes_.push_back(content.size());
}

void OutputSet::write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

void OutputSet::write_manifest(const std::string& command, const ScenarioConfig& cfg,
                               std::uint64_t seed)
{
    Json files = Json::array();
    for (std::size_t i = 0; i < files_.size(); ++i)
        files.push_back({{"path", files_[i]}, {"bytes", sizes_[i]}, {"sha256", digests_[i]}});
    const Json echo = to_json(cfg);
    Json m;
    m["tool"] = "lab";
    m["version"] = kToolVersion;
    m["command"] = command;
    m["seed"] = seed;
    m["tolerances"] = echo["tolerances"];
    m["config"] = echo;
    m["files"] = files;
    std::ofstream out(dir_ / "manifest.json", std::ios::binary | std::ios::trunc);
    out << m.dump(2) << "\n";
    if (!out) throw std::runtime_error("cannot write manifest.json");
}

Csv::Csv(std::initializer_list<const char*> header)
{
    for (const char* h : header) *this << std::string(h);
    end_row();
}

void Csv::sep()
{
    if (!rowStart_) out_ += ',';
    rowStart_ = false;
}

Csv& Csv::operator<<(double v)
{
    sep();
    out_ += fmt(v);
    return *this;
}

Csv& Csv::operator<<(long long v)
{
    sep();
    out_ += std::to_string(v);
    return *this;
}

Csv& Csv::operator<<(const std::string& s)
{
    sep();
    out_ += s;
    return *this;
}

void Csv::end_row()
{
    out_ += '\n';
    rowStart_ = true;
}

} // namespace lab
