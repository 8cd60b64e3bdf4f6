#pragma once

// Frequency tables, ingestion and ranking.
//
// A FrequencyTable is the raw empirical object: type labels with positive
// token counts, optionally tagged with the group it was collected under
// (region, decade, gender, lexical context, ...). rank() turns a table into
// a RankedDistribution, which every fit and metric consumes.

#include <compare>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rankfreq {

using Count = std::uint64_t;

// Ordered (dimension, value) pairs, e.g. {("region","DE"),("decade","1910")}.
class GroupKey {
 public:
  using Dimension = std::pair<std::string, std::string>;

  GroupKey() = default;
  // Throws Error(schema) on a repeated dimension name.
  explicit GroupKey(std::vector<Dimension> dimensions);

  const std::vector<Dimension>& dimensions() const noexcept { return dims_; }
  bool empty() const noexcept { return dims_.empty(); }
  std::optional<std::string> value(std::string_view dimension) const;

  // "region=DE,decade=1910"; empty key renders as "".
  std::string to_string() const;

  auto operator<=>(const GroupKey&) const = default;
  bool operator==(const GroupKey&) const = default;

 private:
  std::vector<Dimension> dims_;
};

class FrequencyTable {
 public:
  using Entries = std::map<std::string, Count>;

  FrequencyTable() = default;
  // Zero counts are dropped.
  explicit FrequencyTable(Entries entries,
                          std::optional<GroupKey> group = std::nullopt);

  // Adds to an existing count. Adding zero is a no-op.
  void add(const std::string& label, Count count);

  const Entries& entries() const noexcept { return entries_; }
  const std::optional<GroupKey>& group() const noexcept { return group_; }
  void set_group(std::optional<GroupKey> group) { group_ = std::move(group); }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  Count total_tokens() const noexcept { return total_; }
  Count count(const std::string& label) const;

  bool operator==(const FrequencyTable&) const = default;

 private:
  Entries entries_;
  std::optional<GroupKey> group_;
  Count total_ = 0;
};

// Frequencies sorted descending, ranks 1..N. Frequencies are integer token
// counts when built from a table; from_frequencies() also admits exact
// real-valued series (analytic expected counts).
class RankedDistribution {
 public:
  // Throws Error(empty_input) if empty, Error(domain) unless every
  // frequency is positive, finite and non-increasing. Missing labels are
  // synthesized as "r1".."rN".
  static RankedDistribution from_frequencies(
      std::vector<double> frequencies, std::vector<std::string> labels = {});

  std::span<const std::string> labels() const noexcept { return labels_; }
  std::span<const double> counts() const noexcept { return counts_; }
  std::span<const double> probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return counts_.size(); }
  double total_tokens() const noexcept { return total_; }

  // 1-based accessors.
  double count_at(std::size_t rank) const { return counts_.at(rank - 1); }
  double prob_at(std::size_t rank) const { return probs_.at(rank - 1); }

 private:
  RankedDistribution() = default;

  std::vector<std::string> labels_;
  std::vector<double> counts_;
  std::vector<double> probs_;
  double total_ = 0.0;
};

// Ranks by descending count, ties by ascending label (byte order, which for
// UTF-8 is code-point order). Throws Error(empty_input) on an empty table.
RankedDistribution rank(const FrequencyTable& table);

// Keeps entries with count >= threshold. Throws Error(domain) for a zero
// threshold and Error(empty_result) when nothing survives.
FrequencyTable filter_min_count(const FrequencyTable& table, Count threshold);

// Column layout of a delimited counts file.
struct Schema {
  std::string type_column = "type";
  std::string count_column = "count";
  std::vector<std::string> group_columns;

  // "type,count[,group...]" e.g. "name,n,region,decade".
  static Schema parse(std::string_view spec);
};

// Reads comma- or tab-separated records (delimiter detected from the header)
// into one table per distinct group key, ordered by key. Duplicate
// (key, type) rows are summed.
std::vector<FrequencyTable> load_counts(std::istream& in, const Schema& schema);

using ConditionedToken = std::pair<std::string, std::string>;  // (context, type)

// Reads the two-column `context`, `type` token-stream format.
std::vector<ConditionedToken> load_tokens(std::istream& in);

// One table per distinct context, keyed ("context", label).
std::vector<FrequencyTable> count_conditioned_tokens(
    std::span<const ConditionedToken> tokens);

}  // namespace rankfreq
