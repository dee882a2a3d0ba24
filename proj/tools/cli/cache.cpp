// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include "cli/cache.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "cli/config.hpp"
#include "specdet/error.hpp"

namespace specdet::cli {

namespace {

constexpr char magic[4] = {'S', 'D', 'E', 'C'};
constexpr std::size_t digest_bytes = 32;

// Exact text for a double, independent of locale and precision settings.
std::string exact(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

template <class T>
void append(std::string& out, const T& v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof v);
}

std::string raw_digest(const std::string& body) {
  const std::string hex = sha256_hex(body);
  std::string out(digest_bytes, '\0');
  for (std::size_t i = 0; i < digest_bytes; ++i) out[i] = char(std::stoi(hex.substr(2 * i, 2), nullptr, 16));
  return out;
}

}  // namespace

std::string eigen_cache_key(const Geometry& geometry, const PerturbationField& V, OperatorKind kind, int cutoff,
                            int builder) {
  std::ostringstream os;
  os << "geometry " << to_string(geometry.kind) << ' ' << exact(geometry.length) << ' ' << exact(geometry.mass)
     << ' ' << geometry.lattice_size << '\n';
  os << "field " << V.dim();
  for (const auto& [n, c] : V.coefficients())
    os << ' ' << n[0] << ',' << n[1] << '=' << exact(c.real()) << ',' << exact(c.imag());
  os << "\noperator " << to_string(kind) << "\ncutoff " << cutoff << "\nordering " << ModeBasis::ordering_version
     << "\nbuilder " << builder << '\n';
  return sha256_hex(os.str());
}

EigenCache::EigenCache(std::filesystem::path dir, std::uint32_t format_version, Warn warn)
    : dir_(std::move(dir)), version_(format_version), warn_(std::move(warn)) {
  if (!warn_) warn_ = [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };
}

std::filesystem::path EigenCache::entry_path(const std::string& key) const { return dir_ / (key + ".eig"); }

std::optional<std::vector<cplx>> EigenCache::get(const std::string& key) const {
  const auto path = entry_path(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::size_t header = sizeof magic + sizeof(std::uint32_t) + key.size() + sizeof(std::uint64_t);
  auto corrupt = [&](const std::string& why) -> std::optional<std::vector<cplx>> {
    warn_("cache entry " + path.string() + " " + why + "; recomputing");
    return std::nullopt;
  };
  if (bytes.size() < header + digest_bytes || std::memcmp(bytes.data(), magic, sizeof magic) != 0)
    return corrupt("is truncated or not a cache file");
  std::uint32_t version = 0;
  std::memcpy(&version, bytes.data() + sizeof magic, sizeof version);
  if (version != version_) return corrupt("has format version " + std::to_string(version));
  if (bytes.compare(sizeof magic + sizeof version, key.size(), key) != 0) return corrupt("belongs to another key");
  std::uint64_t count = 0;
  std::memcpy(&count, bytes.data() + header - sizeof count, sizeof count);
  if (count > (bytes.size() - header) / sizeof(cplx) || bytes.size() != header + count * sizeof(cplx) + digest_bytes)
    return corrupt("has the wrong length");
  const std::string body = bytes.substr(0, bytes.size() - digest_bytes);
  if (raw_digest(body) != bytes.substr(body.size())) return corrupt("failed its checksum");
  std::vector<cplx> out(count);
  std::memcpy(out.data(), bytes.data() + header, count * sizeof(cplx));
  return out;
}

void EigenCache::put(const std::string& key, const std::vector<cplx>& eigenvalues) const {
  std::string body(magic, sizeof magic);
  append(body, version_);
  body += key;
  append(body, std::uint64_t(eigenvalues.size()));
  body.append(reinterpret_cast<const char*>(eigenvalues.data()), eigenvalues.size() * sizeof(cplx));
  body += raw_digest(body);

  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  static std::atomic<unsigned long> counter{0};
  const auto final_path = entry_path(key);
  auto tmp = final_path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(body.data(), std::streamsize(body.size()));
    if (!out) throw Error(ErrorKind::io, "cache: cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, final_path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::io, "cache: cannot publish " + final_path.string());
  }
}

std::filesystem::path cache_dir_from_env(const std::filesystem::path& fallback) {
  const char* env = std::getenv("SPECDET_CACHE_DIR");
  return env && *env ? std::filesystem::path(env) : fallback;
}

}  // namespace specdet::cli
