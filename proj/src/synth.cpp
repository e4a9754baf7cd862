#include "eges/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "eges/error.hpp"
#include "eges/random.hpp"

namespace eges {

SynthProfile parse_synth_profile(std::string_view name) {
  if (name == "twoblock") return SynthProfile::kTwoBlock;
  if (name == "coldstart") return SynthProfile::kColdStart;
  throw ConfigError("unknown synth profile '" + std::string(name) + "'");
}

namespace {

struct Layout {
  std::uint32_t clusters;
  std::uint32_t groups_per_cluster;
  std::uint32_t items_per_group;
  double cold_fraction;
};

Layout layout_for(SynthProfile profile) {
  switch (profile) {
    case SynthProfile::kTwoBlock:
      return {2, 20, 50, 0.0};
    case SynthProfile::kColdStart:
      return {10, 1, 200, 0.1};
  }
  throw ConfigError("unknown synth profile");
}

constexpr std::uint32_t kNoiseTypes = 10;
constexpr std::int64_t kEpoch = 1'600'000'000;

std::string item_name(std::uint32_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "i%04u", i);
  return buf;
}

}  // namespace

SynthData generate_synthetic(SynthProfile profile, std::uint64_t seed) {
  const Layout layout = layout_for(profile);
  const std::uint32_t groups = layout.clusters * layout.groups_per_cluster;
  const std::uint32_t num_items = groups * layout.items_per_group;
  Rng rng = derive_rng(seed, 0x73796e7468 /* "synth" */);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SynthData data;
  data.items.resize(num_items);
  std::vector<std::vector<std::uint32_t>> members(groups);
  for (std::uint32_t i = 0; i < num_items; ++i) {
    auto& item = data.items[i];
    item.id = item_name(i);
    item.group = i / layout.items_per_group;
    item.cluster = item.group / layout.groups_per_cluster;
    item.cold = unit(rng) < layout.cold_fraction;
    if (!item.cold) members[item.group].push_back(i);
  }

  // Catalog: two informative types, then uniform noise types.
  auto& cat = data.catalog;
  cat.type_names = {"category", "brand"};
  std::vector<std::uint32_t> noise_vocab(kNoiseTypes);
  for (std::uint32_t t = 0; t < kNoiseTypes; ++t) {
    cat.type_names.push_back("attr" + std::to_string(t + 1));
    noise_vocab[t] = t + 2;
  }
  for (std::uint32_t i = 0; i < num_items; ++i) {
    const auto& item = data.items[i];
    const std::uint32_t local = i % layout.items_per_group;
    const std::uint32_t brands = layout.groups_per_cluster == 1 ? 4 : 2;
    const std::uint32_t brand =
        item.group * brands + local * brands / layout.items_per_group;
    cat.items.push_back(item.id);
    auto& row = cat.values.emplace_back();
    row.push_back("c" + std::to_string(item.group));
    row.push_back("b" + std::to_string(brand));
    for (std::uint32_t t = 0; t < kNoiseTypes; ++t) {
      std::uniform_int_distribution<std::uint32_t> pick(0, noise_vocab[t] - 1);
      row.push_back("a" + std::to_string(pick(rng)));
    }
  }

  // Long-tailed popularity inside each group.
  std::vector<std::discrete_distribution<std::size_t>> popularity;
  for (const auto& m : members) {
    std::vector<double> w(m.size());
    for (std::size_t r = 0; r < m.size(); ++r) {
      w[r] = 1.0 / std::pow(static_cast<double>(r) + 1.0, 0.9);
    }
    std::shuffle(w.begin(), w.end(), rng);
    popularity.emplace_back(w.begin(), w.end());
  }
  std::vector<std::uint32_t> warm;
  for (const auto& m : members) warm.insert(warm.end(), m.begin(), m.end());

  auto pick_in = [&](std::uint32_t group) {
    return members[group][popularity[group](rng)];
  };

  const std::uint32_t num_users = num_items * 3 / 4;
  std::uniform_int_distribution<std::uint32_t> any_group(0, groups - 1);
  std::uniform_int_distribution<std::uint32_t> sibling(
      0, layout.groups_per_cluster - 1);
  std::uniform_int_distribution<std::size_t> any_warm(0, warm.size() - 1);
  std::uniform_int_distribution<int> session_count(1, 3);
  std::uniform_int_distribution<int> session_len(3, 8);
  std::uniform_int_distribution<std::int64_t> gap(30, 120);
  std::uniform_int_distribution<std::int64_t> dwell(1, 60);
  std::uniform_int_distribution<std::int64_t> start_offset(0, 30 * 86400);

  for (std::uint32_t u = 0; u < num_users; ++u) {
    const std::string user = "u" + std::to_string(u);
    const std::uint32_t home = any_group(rng);
    const std::uint32_t home_cluster = home / layout.groups_per_cluster;
    std::int64_t t = kEpoch + start_offset(rng);
    const int sessions = session_count(rng);
    for (int s = 0; s < sessions; ++s) {
      const int len = session_len(rng);
      for (int e = 0; e < len; ++e) {
        const double r = unit(rng);
        std::uint32_t item;
        if (r < 0.02) {
          item = warm[any_warm(rng)];
        } else if (r < 0.08) {
          item = pick_in(home_cluster * layout.groups_per_cluster + sibling(rng));
        } else {
          item = pick_in(home);
        }
        BehaviorEvent ev{user, data.items[item].id, t, Action::kClick,
                         dwell(rng)};
        if (unit(rng) < 0.03) ev.dwell = 0;  // accidental click
        data.log.push_back(ev);
        if (unit(rng) < 0.05) {
          data.log.push_back({user, ev.item_id, t + 1, Action::kPurchase, 0});
        }
        t += gap(rng);
      }
      t += 2 * 3600 + gap(rng);
    }
  }

  // Spam users: random clicks across the whole catalog.
  for (int s = 0; s < 2; ++s) {
    const std::string user = "spam" + std::to_string(s);
    std::int64_t t = kEpoch;
    for (int e = 0; e < 3600; ++e) {
      data.log.push_back(
          {user, data.items[warm[any_warm(rng)]].id, t, Action::kClick, 5});
      t += 20;
    }
  }
  return data;
}

void write_synthetic(const SynthData& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw IoError("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("log.tsv");
    for (const auto& ev : data.log) {
      out << ev.user_id << '\t' << ev.item_id << '\t' << ev.timestamp << '\t'
          << (ev.action == Action::kClick ? "click" : "purchase") << '\t'
          << ev.dwell << '\n';
    }
  }
  {
    auto out = open("catalog.tsv");
    out << "item_id";
    for (const auto& name : data.catalog.type_names) out << '\t' << name;
    out << '\n';
    for (std::size_t r = 0; r < data.catalog.items.size(); ++r) {
      out << data.catalog.items[r];
      for (const auto& v : data.catalog.values[r]) out << '\t' << v;
      out << '\n';
    }
  }
  {
    auto out = open("clusters.tsv");
    for (const auto& item : data.items) {
      out << item.id << '\t' << item.cluster << '\t' << item.group << '\t'
          << (item.cold ? 1 : 0) << '\n';
    }
  }
}

}  // namespace eges
