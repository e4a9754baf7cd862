#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace eges {

inline constexpr std::string_view kUnknownValue = "unknown";

// Raw side-information table as read from a catalog file, before it is
// aligned to a node vocabulary.
struct CatalogTable {
  std::vector<std::string> type_names;
  std::vector<std::string> items;
  std::vector<std::vector<std::string>> values;  // row-aligned with items
};

// TSV with a header row `item_id<TAB>type1<TAB>...`; empty cells read as
// "unknown".
CatalogTable read_catalog_table(std::istream& in);

// Per-item assignment of one value per side-information type. Value indices
// refer to per-type vocabularies.
class SideInfoCatalog {
 public:
  SideInfoCatalog() = default;

  // Catalog without side information (n = 0).
  static SideInfoCatalog none(std::size_t num_items);

  // `values` is item-major (num_items x vocab_sizes.size()). Types and values
  // get generated labels.
  static SideInfoCatalog from_indices(std::size_t num_items,
                                      std::vector<std::uint32_t> vocab_sizes,
                                      std::vector<std::uint32_t> values);

  // Aligns `table` to `items` (node index order). Each type's vocabulary
  // starts with "unknown" at index 0 followed by values in order of first
  // appearance in the table, including rows for items outside `items`.
  // Items missing from the table are assigned "unknown" everywhere.
  static SideInfoCatalog align(const CatalogTable& table,
                               std::span<const std::string> items);

  // Fully labelled construction; validates shapes and ranges.
  SideInfoCatalog(std::size_t num_items, std::vector<std::string> type_names,
                  std::vector<std::vector<std::string>> vocabularies,
                  std::vector<std::uint32_t> values);

  std::size_t num_items() const { return num_items_; }
  std::size_t num_types() const { return type_names_.size(); }
  std::uint32_t vocab_size(std::size_t type) const {
    return static_cast<std::uint32_t>(vocab_.at(type).size());
  }
  std::vector<std::uint32_t> vocab_sizes() const;

  std::span<const std::uint32_t> item_values(std::size_t item) const {
    return {values_.data() + item * num_types(), num_types()};
  }
  const std::vector<std::uint32_t>& values() const { return values_; }

  const std::vector<std::string>& type_names() const { return type_names_; }
  const std::vector<std::string>& vocabulary(std::size_t type) const {
    return vocab_.at(type);
  }
  // LookupError for values outside the vocabulary.
  std::uint32_t value_index(std::size_t type, std::string_view value) const;

  friend bool operator==(const SideInfoCatalog&,
                         const SideInfoCatalog&) = default;

 private:
  std::size_t num_items_ = 0;
  std::vector<std::string> type_names_;
  std::vector<std::vector<std::string>> vocab_;
  std::vector<std::uint32_t> values_;
};

}  // namespace eges
