// SPDX-License-Identifier: MIT

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "ttoi/errors.hpp"
#include "ttoi/snapshot_io.hpp"

using namespace ttoi;

namespace {

std::filesystem::path temp_file(const std::string& stem) {
  return std::filesystem::temp_directory_path() / stem;
}

SnapshotSet sample_set() {
  SnapshotSet s(SnapshotSet::Layout::structured, {3, 4, 1, 1}, 5, 0.25, 0.01);
  std::mt19937 rng(71);
  std::normal_distribution<double> normal;
  for (double& v : s.data) v = normal(rng);
  return s;
}

std::vector<char> slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_SUITE_BEGIN("snapshot_io");

TEST_CASE("write, read, write round-trips to identical bytes") {
  const SnapshotSet s = sample_set();
  const auto p1 = temp_file("ttoi_io_a.snap");
  const auto p2 = temp_file("ttoi_io_b.snap");
  write_snapshots(p1, s);
  const SnapshotSet r = read_snapshots(p1);
  CHECK(r.layout == s.layout);
  CHECK(r.state_dims == s.state_dims);
  CHECK(r.count == s.count);
  CHECK(r.t0 == s.t0);
  CHECK(r.dt == s.dt);
  CHECK(r.data == s.data);
  write_snapshots(p2, r);
  CHECK(slurp(p1) == slurp(p2));
  CHECK(fnv1a_file(p1) == fnv1a_file(p2));
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
}

TEST_CASE("unstructured layouts survive the round trip") {
  SnapshotSet s(SnapshotSet::Layout::unstructured, {60}, 3, 0.0, 0.5);
  for (std::size_t i = 0; i < s.data.size(); ++i) {
    s.data[i] = static_cast<double>(i) * 0.125;
  }
  const auto p = temp_file("ttoi_io_u.snap");
  write_snapshots(p, s);
  const SnapshotSet r = read_snapshots(p);
  CHECK(r.layout == SnapshotSet::Layout::unstructured);
  CHECK(r.state_dims == std::vector<Index>{60});
  CHECK(r.data == s.data);
  std::filesystem::remove(p);
}

TEST_CASE("corrupted headers are rejected") {
  const SnapshotSet s = sample_set();
  const auto p = temp_file("ttoi_io_bad.snap");
  write_snapshots(p, s);

  auto bytes = slurp(p);
  bytes[0] = 'X';  // break the magic
  {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  CHECK_THROWS_AS((void)read_snapshots(p), IoError);

  // truncated payload
  write_snapshots(p, s);
  bytes = slurp(p);
  bytes.resize(bytes.size() - 16);
  {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  CHECK_THROWS_AS((void)read_snapshots(p), IoError);

  CHECK_THROWS_AS((void)read_snapshots(temp_file("ttoi_io_absent.snap")),
                  IoError);
  std::filesystem::remove(p);
}

TEST_CASE("matrix and window views slice the payload consistently") {
  const SnapshotSet s = sample_set();
  CHECK(s.matrix().rows() == 12);
  CHECK(s.matrix().cols() == 5);
  const Eigen::VectorXd third = s.snapshot(2);
  const SnapshotSet w = s.window(2, 5);
  CHECK(w.count == 3);
  CHECK(w.t0 == doctest::Approx(0.27).epsilon(1e-15));
  CHECK((w.snapshot(0) - third).norm() == 0.0);
  CHECK_THROWS_AS((void)s.window(3, 3), InvalidInputError);
}

TEST_CASE("content digests separate different payloads") {
  const SnapshotSet a = sample_set();
  SnapshotSet b = a;
  b.data[7] += 1e-9;
  const auto pa = temp_file("ttoi_io_h1.snap");
  const auto pb = temp_file("ttoi_io_h2.snap");
  write_snapshots(pa, a);
  write_snapshots(pb, b);
  CHECK(fnv1a_file(pa) != fnv1a_file(pb));
  std::filesystem::remove(pa);
  std::filesystem::remove(pb);
}

TEST_SUITE_END();
