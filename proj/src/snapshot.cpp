/*
 * (C) Copyright 2026 GASM contributors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "gasm/snapshot.hpp"

#include <cstring>
#include <fstream>
#include <vector>

#include "gasm/errors.hpp"

namespace gasm {

namespace {

constexpr char kMagic[4] = {'G', 'A', 'S', 'M'};

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& buf, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof bits);
  put_u64(buf, bits);
}

class Reader {
 public:
  Reader(const std::string& data, const std::string& path)
      : data_(data), path_(path) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 8;
    return v;
  }

  double f64() {
    const std::uint64_t bits = u64();
    double d;
    std::memcpy(&d, &bits, sizeof d);
    return d;
  }

  void raw(char* dst, std::size_t n) {
    need(n);
    std::memcpy(dst, data_.data() + pos_, n);
    pos_ += n;
  }

  bool exhausted() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) {
    if (pos_ + n > data_.size()) {
      throw IoError("snapshot truncated: " + path_);
    }
  }

  const std::string& data_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

void write_snapshot(const std::filesystem::path& path, const GridState& state) {
  state.geometry.validate();
  if (state.values.size() != static_cast<std::size_t>(state.geometry.size())) {
    throw DimensionError("state value count does not match geometry");
  }
  std::string buf;
  buf.reserve(28 + 8 * (state.geometry.n_lat + state.values.size()));
  buf.append(kMagic, 4);
  put_u32(buf, kSnapshotFormatVersion);
  put_u32(buf, static_cast<std::uint32_t>(state.geometry.n_features));
  put_u32(buf, static_cast<std::uint32_t>(state.geometry.n_lat));
  put_u32(buf, static_cast<std::uint32_t>(state.geometry.n_lon));
  put_u64(buf, static_cast<std::uint64_t>(state.time_index));
  for (double lat : state.geometry.lat_values) put_f64(buf, lat);
  for (double v : state.values) put_f64(buf, v);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("short write: " + path.string());
}

GridState read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot: " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  Reader r(data, path.string());

  char magic[4];
  r.raw(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("bad magic in snapshot: " + path.string());
  }
  const std::uint32_t version = r.u32();
  if (version != kSnapshotFormatVersion) {
    throw IoError("unsupported snapshot version " + std::to_string(version) +
                  " in " + path.string());
  }
  GridState s;
  s.geometry.n_features = static_cast<int>(r.u32());
  s.geometry.n_lat = static_cast<int>(r.u32());
  s.geometry.n_lon = static_cast<int>(r.u32());
  s.time_index = static_cast<std::int64_t>(r.u64());
  if (s.geometry.n_features < 1 || s.geometry.n_lat < 1 || s.geometry.n_lon < 1) {
    throw IoError("corrupt snapshot header: " + path.string());
  }
  s.geometry.lat_values.resize(s.geometry.n_lat);
  for (double& lat : s.geometry.lat_values) lat = r.f64();
  s.values.resize(static_cast<std::size_t>(s.geometry.size()));
  for (double& v : s.values) v = r.f64();
  if (!r.exhausted()) throw IoError("trailing bytes in snapshot: " + path.string());
  s.geometry.validate();
  return s;
}

void write_sidecar(const std::filesystem::path& path,
                   const std::map<std::string, std::string>& entries) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  for (const auto& [k, v] : entries) out << k << " = " << v << "\n";
  if (!out) throw IoError("short write: " + path.string());
}

std::map<std::string, std::string> read_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sidecar: " + path.string());
  std::map<std::string, std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw IoError("malformed sidecar line: " + line);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    entries[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return entries;
}

}  // namespace gasm
