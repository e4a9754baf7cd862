#include "eges/side_info.hpp"

#include <algorithm>
#include <istream>
#include <unordered_map>

#include "eges/error.hpp"
#include "text_util.hpp"

namespace eges {

CatalogTable read_catalog_table(std::istream& in) {
  CatalogTable table;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    detail::strip_cr(line);
    if (line.empty() || detail::is_header_comment(line)) continue;
    auto cols = detail::split(line, '\t');
    if (!have_header) {
      for (std::size_t c = 1; c < cols.size(); ++c) {
        table.type_names.emplace_back(cols[c]);
      }
      have_header = true;
      continue;
    }
    if (cols.size() != table.type_names.size() + 1) {
      throw FormatError("catalog line " + std::to_string(lineno) + ": expected " +
                        std::to_string(table.type_names.size() + 1) +
                        " columns");
    }
    if (cols[0].empty()) {
      throw FormatError("catalog line " + std::to_string(lineno) +
                        ": empty item id");
    }
    table.items.emplace_back(cols[0]);
    auto& row = table.values.emplace_back();
    for (std::size_t c = 1; c < cols.size(); ++c) {
      row.emplace_back(cols[c].empty() ? kUnknownValue : cols[c]);
    }
  }
  if (in.bad()) throw IoError("failed reading catalog");
  if (!have_header) throw FormatError("catalog: missing header row");
  return table;
}

SideInfoCatalog SideInfoCatalog::none(std::size_t num_items) {
  return SideInfoCatalog(num_items, {}, {}, {});
}

SideInfoCatalog SideInfoCatalog::from_indices(
    std::size_t num_items, std::vector<std::uint32_t> vocab_sizes,
    std::vector<std::uint32_t> values) {
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> vocab;
  for (std::size_t s = 0; s < vocab_sizes.size(); ++s) {
    names.push_back("type" + std::to_string(s + 1));
    auto& words = vocab.emplace_back();
    for (std::uint32_t k = 0; k < vocab_sizes[s]; ++k) {
      words.push_back("v" + std::to_string(k));
    }
  }
  return SideInfoCatalog(num_items, std::move(names), std::move(vocab),
                         std::move(values));
}

SideInfoCatalog SideInfoCatalog::align(const CatalogTable& table,
                                       std::span<const std::string> items) {
  const std::size_t n = table.type_names.size();
  std::vector<std::vector<std::string>> vocab(n);
  std::vector<std::unordered_map<std::string, std::uint32_t>> index(n);
  for (std::size_t s = 0; s < n; ++s) {
    vocab[s].emplace_back(kUnknownValue);
    index[s].emplace(kUnknownValue, 0);
  }
  std::unordered_map<std::string_view, std::size_t> row_of;
  for (std::size_t r = 0; r < table.items.size(); ++r) {
    row_of.try_emplace(table.items[r], r);
    for (std::size_t s = 0; s < n; ++s) {
      const auto& value = table.values[r][s];
      auto [it, inserted] = index[s].try_emplace(
          value, static_cast<std::uint32_t>(vocab[s].size()));
      if (inserted) vocab[s].push_back(value);
    }
  }
  std::vector<std::uint32_t> values(items.size() * n, 0);
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto it = row_of.find(items[i]);
    if (it == row_of.end()) continue;
    for (std::size_t s = 0; s < n; ++s) {
      values[i * n + s] = index[s].at(table.values[it->second][s]);
    }
  }
  return SideInfoCatalog(items.size(), table.type_names, std::move(vocab),
                         std::move(values));
}

SideInfoCatalog::SideInfoCatalog(std::size_t num_items,
                                 std::vector<std::string> type_names,
                                 std::vector<std::vector<std::string>> vocab,
                                 std::vector<std::uint32_t> values)
    : num_items_(num_items),
      type_names_(std::move(type_names)),
      vocab_(std::move(vocab)),
      values_(std::move(values)) {
  const std::size_t n = type_names_.size();
  if (vocab_.size() != n) throw ConfigError("catalog: vocabulary count mismatch");
  if (values_.size() != num_items_ * n) {
    throw ConfigError("catalog: assignment size mismatch");
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (vocab_[s].empty()) throw ConfigError("catalog: empty vocabulary");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] >= vocab_[i % n].size()) {
      throw ConfigError("catalog: value index out of range");
    }
  }
}

std::vector<std::uint32_t> SideInfoCatalog::vocab_sizes() const {
  std::vector<std::uint32_t> sizes;
  for (std::size_t s = 0; s < num_types(); ++s) sizes.push_back(vocab_size(s));
  return sizes;
}

std::uint32_t SideInfoCatalog::value_index(std::size_t type,
                                           std::string_view value) const {
  const auto& words = vocab_.at(type);
  auto it = std::find(words.begin(), words.end(), value);
  if (it == words.end()) {
    throw LookupError("unknown value '" + std::string(value) + "' for " +
                      type_names_.at(type));
  }
  return static_cast<std::uint32_t>(it - words.begin());
}

}  // namespace eges
