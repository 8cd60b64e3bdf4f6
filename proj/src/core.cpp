#include "rankfreq/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>

#include "rankfreq/error.hpp"

namespace rankfreq {

// ---------------------------------------------------------------------------
// GroupKey

GroupKey::GroupKey(std::vector<Dimension> dimensions)
    : dims_(std::move(dimensions)) {
  std::set<std::string_view> seen;
  for (const auto& [name, value] : dims_) {
    if (!seen.insert(name).second) {
      throw Error(ErrorKind::schema, "duplicate group dimension '" + name + "'");
    }
  }
}

std::optional<std::string> GroupKey::value(std::string_view dimension) const {
  for (const auto& [name, value] : dims_) {
    if (name == dimension) return value;
  }
  return std::nullopt;
}

std::string GroupKey::to_string() const {
  std::string out;
  for (const auto& [name, value] : dims_) {
    if (!out.empty()) out += ',';
    out += name;
    out += '=';
    out += value;
  }
  return out;
}

// ---------------------------------------------------------------------------
// FrequencyTable

FrequencyTable::FrequencyTable(Entries entries, std::optional<GroupKey> group)
    : group_(std::move(group)) {
  for (auto& [label, count] : entries) {
    if (count == 0) continue;
    total_ += count;
    entries_.emplace_hint(entries_.end(), label, count);
  }
}

void FrequencyTable::add(const std::string& label, Count count) {
  if (count == 0) return;
  entries_[label] += count;
  total_ += count;
}

Count FrequencyTable::count(const std::string& label) const {
  auto it = entries_.find(label);
  return it == entries_.end() ? 0 : it->second;
}

// ---------------------------------------------------------------------------
// RankedDistribution

RankedDistribution RankedDistribution::from_frequencies(
    std::vector<double> frequencies, std::vector<std::string> labels) {
  if (frequencies.empty()) {
    throw Error(ErrorKind::empty_input, "distribution has no types");
  }
  if (!labels.empty() && labels.size() != frequencies.size()) {
    throw Error(ErrorKind::domain, "label count does not match frequency count");
  }
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    const double f = frequencies[i];
    if (!std::isfinite(f) || f <= 0.0) {
      throw Error(ErrorKind::domain, "frequencies must be positive and finite");
    }
    if (i > 0 && f > frequencies[i - 1]) {
      throw Error(ErrorKind::domain, "frequencies must be non-increasing in rank");
    }
  }
  if (labels.empty()) {
    labels.reserve(frequencies.size());
    for (std::size_t r = 1; r <= frequencies.size(); ++r) {
      labels.push_back("r" + std::to_string(r));
    }
  }

  RankedDistribution dist;
  dist.total_ = std::accumulate(frequencies.begin(), frequencies.end(), 0.0);
  dist.probs_.reserve(frequencies.size());
  for (double f : frequencies) dist.probs_.push_back(f / dist.total_);
  dist.counts_ = std::move(frequencies);
  dist.labels_ = std::move(labels);
  return dist;
}

RankedDistribution rank(const FrequencyTable& table) {
  if (table.empty()) {
    throw Error(ErrorKind::empty_input, "cannot rank an empty table");
  }
  // Entries are already in ascending label order, so a stable sort on
  // descending count leaves ties in label order.
  std::vector<std::pair<const std::string*, Count>> rows;
  rows.reserve(table.size());
  for (const auto& [label, count] : table.entries()) rows.emplace_back(&label, count);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<double> freqs;
  std::vector<std::string> labels;
  freqs.reserve(rows.size());
  labels.reserve(rows.size());
  for (const auto& [label, count] : rows) {
    labels.push_back(*label);
    freqs.push_back(static_cast<double>(count));
  }
  return RankedDistribution::from_frequencies(std::move(freqs), std::move(labels));
}

FrequencyTable filter_min_count(const FrequencyTable& table, Count threshold) {
  if (threshold == 0) {
    throw Error(ErrorKind::domain, "minimum count threshold must be >= 1");
  }
  FrequencyTable::Entries kept;
  for (const auto& [label, count] : table.entries()) {
    if (count >= threshold) kept.emplace_hint(kept.end(), label, count);
  }
  if (kept.empty()) {
    throw Error(ErrorKind::empty_result,
                "no entries reach minimum count " + std::to_string(threshold));
  }
  return FrequencyTable(std::move(kept), table.group());
}

// ---------------------------------------------------------------------------
// Delimited input

Schema Schema::parse(std::string_view spec) {
  std::vector<std::string> parts;
  std::string current;
  for (char ch : spec) {
    if (ch == ',') {
      parts.push_back(current);
      current.clear();
    } else {
      current += ch;
    }
  }
  parts.push_back(current);
  if (parts.size() < 2) {
    throw Error(ErrorKind::schema,
                "schema needs at least a type and a count column: '" +
                    std::string(spec) + "'");
  }
  for (const auto& p : parts) {
    if (p.empty()) throw Error(ErrorKind::schema, "empty column name in schema");
  }
  Schema schema;
  schema.type_column = parts[0];
  schema.count_column = parts[1];
  schema.group_columns.assign(parts.begin() + 2, parts.end());
  return schema;
}

namespace {

// Splits one record. Double-quoted fields may contain the delimiter; a doubled
// quote inside quotes is a literal quote.
std::vector<std::string> split_record(std::string_view line, char delim,
                                      std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"' && field.empty()) {
      quoted = true;
    } else if (ch == delim) {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += ch;
    }
  }
  if (quoted) throw Error(ErrorKind::parse, "unterminated quoted field", line_no);
  fields.push_back(std::move(field));
  return fields;
}

void strip_line_end(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

struct Header {
  char delim = ',';
  std::vector<std::string> columns;
  std::size_t line_no = 0;

  std::size_t index_of(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) {
      throw Error(ErrorKind::schema, "missing required column '" + name + "'",
                  line_no);
    }
    return static_cast<std::size_t>(it - columns.begin());
  }
};

// Reads up to the first non-blank line. Tab wins if the header has one.
std::optional<Header> read_header(std::istream& in, std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    strip_line_end(line);
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (is_blank(line)) continue;
    Header header;
    header.delim = line.find('\t') != std::string::npos ? '\t' : ',';
    header.line_no = line_no;
    for (auto& col : split_record(line, header.delim, line_no)) {
      header.columns.emplace_back(trim(col));
    }
    return header;
  }
  return std::nullopt;
}

Count parse_count(std::string_view text, std::size_t line_no) {
  text = trim(text);
  Count value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::parse,
                "count '" + std::string(text) + "' is not a non-negative integer",
                line_no);
  }
  return value;
}

}  // namespace

std::vector<FrequencyTable> load_counts(std::istream& in, const Schema& schema) {
  std::size_t line_no = 0;
  auto header = read_header(in, line_no);
  if (!header) throw Error(ErrorKind::empty_input, "input has no header row");

  const std::size_t type_idx = header->index_of(schema.type_column);
  const std::size_t count_idx = header->index_of(schema.count_column);
  std::vector<std::size_t> group_idx;
  for (const auto& g : schema.group_columns) group_idx.push_back(header->index_of(g));

  std::map<GroupKey, FrequencyTable::Entries> groups;
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    strip_line_end(line);
    if (is_blank(line)) continue;
    auto fields = split_record(line, header->delim, line_no);
    if (fields.size() != header->columns.size()) {
      throw Error(ErrorKind::parse,
                  "expected " + std::to_string(header->columns.size()) +
                      " fields, found " + std::to_string(fields.size()),
                  line_no);
    }
    ++rows;
    const Count count = parse_count(fields[count_idx], line_no);
    std::vector<GroupKey::Dimension> dims;
    dims.reserve(group_idx.size());
    for (std::size_t i = 0; i < group_idx.size(); ++i) {
      dims.emplace_back(schema.group_columns[i], std::string(trim(fields[group_idx[i]])));
    }
    auto& entries = groups[GroupKey(std::move(dims))];
    if (count > 0) entries[std::string(trim(fields[type_idx]))] += count;
  }
  if (rows == 0) throw Error(ErrorKind::empty_input, "input has no data rows");

  std::vector<FrequencyTable> tables;
  for (auto& [key, entries] : groups) {
    if (entries.empty()) continue;
    std::optional<GroupKey> group;
    if (!key.empty()) group = key;
    tables.emplace_back(std::move(entries), std::move(group));
  }
  if (tables.empty()) throw Error(ErrorKind::empty_input, "input has no positive counts");
  return tables;
}

std::vector<ConditionedToken> load_tokens(std::istream& in) {
  std::size_t line_no = 0;
  auto header = read_header(in, line_no);
  if (!header) throw Error(ErrorKind::empty_input, "input has no header row");
  const std::size_t context_idx = header->index_of("context");
  const std::size_t type_idx = header->index_of("type");

  std::vector<ConditionedToken> tokens;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    strip_line_end(line);
    if (is_blank(line)) continue;
    auto fields = split_record(line, header->delim, line_no);
    if (fields.size() != header->columns.size()) {
      throw Error(ErrorKind::parse,
                  "expected " + std::to_string(header->columns.size()) +
                      " fields, found " + std::to_string(fields.size()),
                  line_no);
    }
    tokens.emplace_back(std::string(trim(fields[context_idx])),
                        std::string(trim(fields[type_idx])));
  }
  if (tokens.empty()) throw Error(ErrorKind::empty_input, "token stream is empty");
  return tokens;
}

std::vector<FrequencyTable> count_conditioned_tokens(
    std::span<const ConditionedToken> tokens) {
  if (tokens.empty()) throw Error(ErrorKind::empty_input, "token stream is empty");
  std::map<std::string, FrequencyTable::Entries> by_context;
  for (const auto& [context, type] : tokens) ++by_context[context][type];

  std::vector<FrequencyTable> tables;
  tables.reserve(by_context.size());
  for (auto& [context, entries] : by_context) {
    tables.emplace_back(std::move(entries), GroupKey({{"context", context}}));
  }
  return tables;
}

}  // namespace rankfreq
