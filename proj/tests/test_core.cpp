#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "rankfreq/core.hpp"

using namespace rankfreq;

namespace {

std::vector<FrequencyTable> load(const std::string& text, const std::string& schema = "type,count") {
  std::istringstream in(text);
  return load_counts(in, Schema::parse(schema));
}

FrequencyTable random_table(std::mt19937_64& rng, int types) {
  FrequencyTable::Entries e;
  std::uniform_int_distribution<Count> count(1, 50);
  for (int i = 0; i < types; ++i) e["t" + std::to_string(rng() % 1000)] += count(rng);
  return FrequencyTable(e);
}

}  // namespace

TEST_CASE("group key") {
  GroupKey key({{"region", "DE"}, {"decade", "1910"}});
  CHECK(key.to_string() == "region=DE,decade=1910");
  CHECK(key.value("decade") == "1910");
  CHECK_FALSE(key.value("gender"));
  CHECK(GroupKey().to_string().empty());
  CHECK(error_kind([] { GroupKey({{"a", "1"}, {"a", "2"}}); }) == ErrorKind::schema);
}

TEST_CASE("frequency table drops zeros and tracks totals") {
  FrequencyTable t({{"a", 3}, {"b", 0}, {"c", 2}});
  CHECK(t.size() == 2);
  CHECK(t.total_tokens() == 5);
  t.add("b", 4);
  t.add("d", 0);
  CHECK(t.size() == 3);
  CHECK(t.count("b") == 4);
  CHECK(t.count("zz") == 0);
  CHECK(t.total_tokens() == 9);
}

TEST_CASE("rank orders by count then label bytes") {
  FrequencyTable t({{"b", 5}, {"a", 5}, {"c", 9}, {"\xc3\xa9", 5}, {"Z", 5}});
  auto d = rank(t);
  std::vector<std::string> labels(d.labels().begin(), d.labels().end());
  CHECK(labels == std::vector<std::string>{"c", "Z", "a", "b", "\xc3\xa9"});
  CHECK(d.count_at(1) == 9);
  CHECK(d.total_tokens() == 29);
  CHECK(d.prob_at(1) == doctest::Approx(9.0 / 29));
  CHECK(error_kind([] { rank(FrequencyTable()); }) == ErrorKind::empty_input);
}

TEST_CASE("rank conserves tokens and types and is deterministic") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    auto t = random_table(rng, 1 + trial * 3);
    auto d1 = rank(t), d2 = rank(t);
    CHECK(d1.size() == t.size());
    CHECK(d1.total_tokens() == static_cast<double>(t.total_tokens()));
    std::vector<double> in, out(d1.counts().begin(), d1.counts().end());
    for (const auto& [label, c] : t.entries()) in.push_back(static_cast<double>(c));
    std::sort(in.begin(), in.end());
    std::sort(out.begin(), out.end());
    CHECK(in == out);
    CHECK(std::equal(d1.labels().begin(), d1.labels().end(), d2.labels().begin()));
    CHECK(std::is_sorted(d1.counts().begin(), d1.counts().end(), std::greater<>()));
  }
}

TEST_CASE("filter then rank equals rank then truncate") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    auto t = random_table(rng, 40);
    const Count threshold = 1 + rng() % 40;
    auto full = rank(t);
    const auto kept = std::count_if(full.counts().begin(), full.counts().end(),
                                    [&](double c) { return c >= threshold; });
    if (kept == 0) {
      CHECK(error_kind([&] { filter_min_count(t, threshold); }) == ErrorKind::empty_result);
      continue;
    }
    auto filtered = rank(filter_min_count(t, threshold));
    REQUIRE(filtered.size() == static_cast<std::size_t>(kept));
    for (std::size_t r = 1; r <= filtered.size(); ++r) {
      CHECK(filtered.labels()[r - 1] == full.labels()[r - 1]);
      CHECK(filtered.count_at(r) == full.count_at(r));
    }
  }
  CHECK(error_kind([] { filter_min_count(FrequencyTable({{"a", 1}}), 0); }) == ErrorKind::domain);
}

TEST_CASE("from_frequencies validates") {
  auto d = RankedDistribution::from_frequencies({4, 2, 1});
  CHECK(d.labels()[2] == "r3");
  CHECK(d.prob_at(2) == doctest::Approx(2.0 / 7));
  CHECK(error_kind([] { RankedDistribution::from_frequencies({}); }) == ErrorKind::empty_input);
  CHECK(error_kind([] { RankedDistribution::from_frequencies({1, 2}); }) == ErrorKind::domain);
  CHECK(error_kind([] { RankedDistribution::from_frequencies({1, 0}); }) == ErrorKind::domain);
  CHECK(error_kind([] { RankedDistribution::from_frequencies({1}, {"a", "b"}); }) ==
        ErrorKind::domain);
}

TEST_CASE("schema parsing") {
  auto s = Schema::parse("name,n,region,decade");
  CHECK(s.type_column == "name");
  CHECK(s.count_column == "n");
  CHECK(s.group_columns == std::vector<std::string>{"region", "decade"});
  CHECK(error_kind([] { Schema::parse("type"); }) == ErrorKind::schema);
  CHECK(error_kind([] { Schema::parse("type,,g"); }) == ErrorKind::schema);
}

TEST_CASE("load_counts csv and tsv") {
  auto csv = load("type,count\nalpha,3\nbeta,5\nalpha,2\n");
  REQUIRE(csv.size() == 1);
  CHECK_FALSE(csv[0].group());
  CHECK(csv[0].count("alpha") == 5);
  CHECK(csv[0].total_tokens() == 10);

  auto tsv = load("\xEF\xBB\xBFtype\tcount\r\n\"a,b\"\t4\r\n\r\nc\t1\r\n");
  REQUIRE(tsv.size() == 1);
  CHECK(tsv[0].count("a,b") == 4);
  CHECK(tsv[0].count("c") == 1);

  auto quoted = load("type,count\n\"say \"\"hi\"\"\",2\n");
  CHECK(quoted[0].count("say \"hi\"") == 2);
}

TEST_CASE("load_counts groups") {
  auto tables = load("name,n,region\nanna,3,DE\nbob,1,AT\nanna,2,AT\ncarl,0,FR\n",
                     "name,n,region");
  REQUIRE(tables.size() == 2);  // FR has no positive counts
  CHECK(tables[0].group()->to_string() == "region=AT");
  CHECK(tables[0].total_tokens() == 3);
  CHECK(tables[1].group()->value("region") == "DE");
}

TEST_CASE("load_counts is invariant to row order") {
  std::vector<std::string> rows = {"a,1,x", "b,4,x", "c,2,y", "a,5,y", "d,7,x", "b,1,x"};
  std::mt19937_64 rng(3);
  auto render = [&] {
    std::string text = "type,count,g\n";
    for (const auto& r : rows) text += r + "\n";
    return load(text, "type,count,g");
  };
  const auto reference = render();
  for (int i = 0; i < 20; ++i) {
    std::shuffle(rows.begin(), rows.end(), rng);
    CHECK(render() == reference);
  }
}

TEST_CASE("load_counts errors") {
  CHECK(error_kind([] { load(""); }) == ErrorKind::empty_input);
  CHECK(error_kind([] { load("type,count\n"); }) == ErrorKind::empty_input);
  CHECK(error_kind([] { load("type,count\na,0\n"); }) == ErrorKind::empty_input);
  CHECK(error_kind([] { load("word,count\na,1\n"); }) == ErrorKind::schema);
  CHECK(error_kind([] { load("type,count\na,1,2\n"); }) == ErrorKind::parse);
  CHECK(error_kind([] { load("type,count\n\"a,1\n"); }) == ErrorKind::parse);
  try {
    load("type,count\na,1\nb,-3\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::parse);
    CHECK(e.line() == 3);
  }
  CHECK(error_kind([] { load("type,count\na,1.5\n"); }) == ErrorKind::parse);
}

TEST_CASE("conditioned tokens") {
  std::istringstream in("context,type\nthe,cat\nthe,dog\na,cat\nthe,cat\n");
  auto tokens = load_tokens(in);
  CHECK(tokens.size() == 4);
  auto tables = count_conditioned_tokens(tokens);
  REQUIRE(tables.size() == 2);
  CHECK(tables[0].group()->to_string() == "context=a");
  CHECK(tables[1].count("cat") == 2);
  CHECK(tables[1].total_tokens() == 3);
  std::istringstream bad("ctx,type\nx,y\n");
  CHECK(error_kind([&] { load_tokens(bad); }) == ErrorKind::schema);
}

TEST_CASE("worked ingestion examples") {
  auto t = load("type,count\nanna,5\nbob,3\n");
  CHECK(t[0] == FrequencyTable({{"anna", 5}, {"bob", 3}}));
  t = load("type,count,region\nkim,2,DE\nkim,3,DE\n", "type,count,region");
  REQUIRE(t.size() == 1);
  CHECK(t[0].count("kim") == 5);
  t = load("type,count,region\nlee,4,KR\nlee,4,US\n", "type,count,region");
  REQUIRE(t.size() == 2);
  CHECK(t[0].entries() == t[1].entries());

  const std::vector<ConditionedToken> tokens{{"der", "hund"}, {"der", "hund"}, {"die", "katze"}};
  auto ctx = count_conditioned_tokens(tokens);
  CHECK(ctx[0].entries() == FrequencyTable::Entries{{"hund", 2}});
  CHECK(ctx[1].entries() == FrequencyTable::Entries{{"katze", 1}});
  const std::vector<ConditionedToken> one{{"x", "a"}, {"x", "b"}, {"x", "a"}};
  CHECK(count_conditioned_tokens(one)[0].entries() ==
        FrequencyTable({{"a", 2}, {"b", 1}}).entries());

  const FrequencyTable ab({{"a", 50}, {"b", 39}});
  CHECK(filter_min_count(ab, 40).entries() == FrequencyTable::Entries{{"a", 50}});
  CHECK(filter_min_count(ab, 1) == ab);
  CHECK(error_kind([] { filter_min_count(FrequencyTable({{"a", 5}}), 10); }) ==
        ErrorKind::empty_result);

  const auto d = rank(FrequencyTable({{"c", 2}, {"b", 5}, {"a", 5}}));
  CHECK(d.labels()[0] == "a");
  CHECK(d.labels()[1] == "b");
  const auto single = rank(FrequencyTable({{"x", 9}}));
  CHECK(single.size() == 1);
  CHECK(single.prob_at(1) == 1.0);
}
