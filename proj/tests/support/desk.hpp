#pragma once

#include <utility>
#include <vector>

#include "dsfs/network.hpp"

namespace dsfs_test {

// The desk network: the fixed 12-bus, 18-resource, two-step feeder that all
// directional experiments run on. Roughly 54% of its inflated sampling box
// is feasible, and one oracle call costs on the order of 13 ms here.
inline const std::pair<dsfs::FeederSpec, std::vector<dsfs::DerSpec>>&
desk_feeder() {
  static const auto fd = dsfs::generate_feeder(42, 12, 18, 2);
  return fd;
}

inline const dsfs::CompactModel& desk_model() {
  static const dsfs::CompactModel model =
      dsfs::assemble_compact(desk_feeder().first, desk_feeder().second);
  return model;
}

}  // namespace dsfs_test
