// SPDX-License-Identifier: MIT

#include "ttoi/snapshot_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>

namespace ttoi {
namespace {

constexpr char kMagic[4] = {'T', 'T', 'O', 'I'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint8_t kDtypeF64 = 1;

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is, const char* what) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw IoError(std::string("snapshot read: truncated ") + what);
  }
  return v;
}

}  // namespace

void write_snapshots(const std::filesystem::path& path,
                     const SnapshotSet& s) {
  if (s.count <= 0 || s.state_dims.empty()) {
    throw InvalidInputError("write_snapshots: empty set");
  }
  std::random_device rd;
  const auto tmp = path.parent_path() /
                   (path.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("write_snapshots: cannot open " + tmp.string());
    os.write(kMagic, 4);
    put(os, kVersion);
    put(os, kDtypeF64);
    put(os, static_cast<std::uint8_t>(s.layout));
    put(os, static_cast<std::uint32_t>(s.state_dims.size() + 1));
    put(os, static_cast<std::uint64_t>(s.count));
    for (Index d : s.state_dims) put(os, static_cast<std::uint64_t>(d));
    put(os, s.dt);
    put(os, s.t0);
    // payload: time index slowest, one contiguous block per snapshot
    const Index n = s.state_size();
    std::vector<double> buf(static_cast<std::size_t>(n));
    for (Index k = 0; k < s.count; ++k) {
      Eigen::Map<Eigen::VectorXd>(buf.data(), n) = s.matrix().col(k);
      os.write(reinterpret_cast<const char*>(buf.data()),
               static_cast<std::streamsize>(sizeof(double)) * n);
    }
    if (!os) throw IoError("write_snapshots: write failed " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("write_snapshots: rename failed: " + ec.message());
  }
}

SnapshotSet read_snapshots(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("read_snapshots: cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("read_snapshots: bad magic in " + path.string());
  }
  const auto version = get<std::uint32_t>(is, "version");
  if (version != kVersion) {
    throw IoError("read_snapshots: unsupported version " +
                  std::to_string(version));
  }
  const auto dtype = get<std::uint8_t>(is, "dtype");
  if (dtype != kDtypeF64) {
    throw IoError("read_snapshots: unsupported dtype");
  }
  const auto layout = get<std::uint8_t>(is, "layout");
  if (layout != 1 && layout != 2) {
    throw IoError("read_snapshots: unknown layout");
  }
  const auto ndims = get<std::uint32_t>(is, "ndims");
  if (ndims < 2 || ndims > 64) {
    throw IoError("read_snapshots: implausible ndims");
  }
  const auto count = static_cast<Index>(get<std::uint64_t>(is, "dims"));
  std::vector<Index> dims;
  for (std::uint32_t i = 1; i < ndims; ++i) {
    dims.push_back(static_cast<Index>(get<std::uint64_t>(is, "dims")));
  }
  const double dt = get<double>(is, "dt");
  const double t0 = get<double>(is, "t0");
  if (count <= 0) throw IoError("read_snapshots: nonpositive count");

  SnapshotSet s(static_cast<SnapshotSet::Layout>(layout), dims, count, t0,
                dt);
  const Index n = s.state_size();
  std::vector<double> buf(static_cast<std::size_t>(n));
  for (Index k = 0; k < count; ++k) {
    if (!is.read(reinterpret_cast<char*>(buf.data()),
                 static_cast<std::streamsize>(sizeof(double)) * n)) {
      throw IoError("read_snapshots: truncated payload");
    }
    s.matrix().col(k) = Eigen::Map<const Eigen::VectorXd>(buf.data(), n);
  }
  return s;
}

std::uint64_t fnv1a(std::span<const unsigned char> bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("fnv1a_file: cannot open " + path.string());
  std::uint64_t h = 14695981039346656037ull;
  char buf[65536];
  while (is.read(buf, sizeof(buf)) || is.gcount() > 0) {
    const auto got = is.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
    if (!is) break;
  }
  return h;
}

}  // namespace ttoi
