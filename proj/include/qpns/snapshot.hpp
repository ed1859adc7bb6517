#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "qpns/fields.hpp"

namespace qpns {

/// Textual field snapshot:
///
///   # qpns-snapshot kind=<space|spacetime> nu=.. d=.. Kphi=.. Kx=.. ncomp=..
///   # key=value                      (zero or more metadata lines)
///   l_1 .. l_nu  j_1 .. j_d  comp  re  im
///
/// One record per stored mode; the l columns are absent for kind=space.
/// Doubles are written in shortest round-trip form, so write -> read -> write
/// reproduces the file byte for byte.
using SnapshotMeta = std::map<std::string, std::string>;

struct SnapshotReadOptions {
  /// Each record also sets the conjugate mode (hand-written forcing files).
  bool conjugate_implied = false;
};

void write_snapshot(std::ostream& os, const SpaceTimeField& U, const SnapshotMeta& meta = {});
void write_snapshot(std::ostream& os, const SpaceField& u, const SnapshotMeta& meta = {});

SpaceTimeField read_spacetime_snapshot(std::istream& is, SnapshotMeta* meta = nullptr,
                                       SnapshotReadOptions opts = {});
SpaceField read_space_snapshot(std::istream& is, SnapshotMeta* meta = nullptr, SnapshotReadOptions opts = {});

void save_snapshot(const std::filesystem::path& path, const SpaceTimeField& U, const SnapshotMeta& meta = {});
SpaceTimeField load_spacetime_snapshot(const std::filesystem::path& path, SnapshotMeta* meta = nullptr,
                                       SnapshotReadOptions opts = {});

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);

}  // namespace qpns
