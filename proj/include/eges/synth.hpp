#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "eges/ingest.hpp"
#include "eges/side_info.hpp"

namespace eges {

// Synthetic behavior logs with planted cluster structure.
//
// twoblock:  2,000 items in 2 clusters of 20 groups (50 items each). Users
//            browse mostly inside one group with long-tailed item popularity.
//            12 side-information types: "category" (the group) and "brand"
//            (half a group) are informative; 10 further types are drawn
//            uniformly at random and carry no signal.
// coldstart: 2,000 items in 10 clusters of 200 items with the same 12 types
//            ("category" is the cluster). 10% of items never appear in the
//            log; they exist only in the catalog.
// Both profiles mix in clicks with zero dwell time and two spam users above
// the click limit, which the noise filter is expected to remove.
enum class SynthProfile { kTwoBlock, kColdStart };

SynthProfile parse_synth_profile(std::string_view name);

struct SynthItem {
  std::string id;
  std::uint32_t cluster = 0;
  std::uint32_t group = 0;
  bool cold = false;
};

struct SynthData {
  std::vector<BehaviorEvent> log;
  CatalogTable catalog;
  std::vector<SynthItem> items;
};

SynthData generate_synthetic(SynthProfile profile, std::uint64_t seed);

// Writes log.tsv, catalog.tsv and clusters.tsv (item, cluster, group, cold).
void write_synthetic(const SynthData& data, const std::filesystem::path& dir);

}  // namespace eges
