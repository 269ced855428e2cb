#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "causelog/log.hpp"

#include <random>

#include "test_util.hpp"

using namespace causelog;

namespace {

LogRecord rec(std::int64_t t, std::string comp, std::string event,
              std::vector<std::pair<std::string, std::string>> params = {},
              std::optional<std::string> parent = std::nullopt) {
  LogRecord r;
  r.t = t;
  r.comp = std::move(comp);
  r.event = std::move(event);
  r.params = std::move(params);
  r.parent = std::move(parent);
  return r;
}

LogFile sample_chain() {
  LogFile f;
  f = append_record(f, rec(0, "operator", "start"));
  f = append_record(f, rec(5, "robot", "lane_start", {{"lane", "1"}}, "operator"));
  f = append_record(f, rec(9, "robot", "bump", {{"side", "front"}}));
  f = append_record(f, rec(12, "robot", "lane_start", {{"lane", "2"}}));
  f = append_record(f, rec(20, "robot", "bump"));
  return f;
}

}  // namespace

TEST_CASE("sha256 matches the reference vector") {
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("parse_log: uav_pilot fixture has 12 chained records") {
  LogFile f = parse_log(test_util::read_file(test_util::fixture_path("uav_pilot.log")));
  CHECK(f.records.size() == 12);
  CHECK(f.chained);
  CHECK(f.records[0].comp == "pilot");
  CHECK(f.records[0].event == "start");
  // 25 m climb and the repeated go-left commands are present.
  int go_left = 0;
  bool climb = false;
  for (const LogRecord& r : f.records) {
    if (r.comp == "pilot" && r.event == "cmd_left") ++go_left;
    for (const auto& [k, v] : r.params)
      if (k == "alt" && v == "25") climb = true;
  }
  CHECK(go_left == 2);
  CHECK(climb);
}

TEST_CASE("parse_log: empty input") {
  LogFile f = parse_log("");
  CHECK(f.records.empty());
  CHECK(f.chained);
}

TEST_CASE("parse_log: decreasing timestamps are rejected with the line") {
  std::string text =
      "{\"t\":0,\"comp\":\"a\",\"event\":\"x\"}\n"
      "{\"t\":5,\"comp\":\"a\",\"event\":\"x\"}\n"
      "{\"t\":3,\"comp\":\"a\",\"event\":\"x\"}\n";
  CHECK_THROWS_WITH_AS(parse_log(text), doctest::Contains("line 3"), ParseError);
}

TEST_CASE("parse_log: parent must name a previously seen component") {
  std::string text = "{\"t\":0,\"comp\":\"a\",\"event\":\"x\",\"parent\":\"ghost\"}\n";
  CHECK_THROWS_WITH_AS(parse_log(text), doctest::Contains("ghost"), ParseError);
}

TEST_CASE("parse_log: mixed chained and unchained records are rejected") {
  LogFile f = sample_chain();
  std::string text = serialize(f);
  // Strip the hash from the last line only.
  LogFile broken = f;
  broken.records.back().h.reset();
  CHECK_THROWS_WITH_AS(parse_log(serialize(broken)), doctest::Contains("mixed"), ParseError);
  CHECK_NOTHROW(parse_log(text));
}

TEST_CASE("parse_log: malformed JSON names the line") {
  std::string text = "{\"t\":0,\"comp\":\"a\",\"event\":\"x\"}\nnot json\n";
  CHECK_THROWS_WITH_AS(parse_log(text), doctest::Contains("line 2"), ParseError);
}

TEST_CASE("parse_log: unknown keys are preserved in params, in order") {
  std::string text =
      "{\"t\":1,\"comp\":\"a\",\"event\":\"x\",\"extra\":\"1\",\"params\":{\"p\":\"2\"},"
      "\"zz\":\"3\"}\n";
  LogFile f = parse_log(text);
  REQUIRE(f.records.size() == 1);
  std::vector<std::pair<std::string, std::string>> expected = {
      {"extra", "1"}, {"p", "2"}, {"zz", "3"}};
  CHECK(f.records[0].params == expected);
  // Round trip keeps them inside params.
  LogFile again = parse_log(serialize(f));
  CHECK(again.records[0].params == expected);
}

TEST_CASE("parse_log: numeric params are canonicalized to strings") {
  LogFile f = parse_log("{\"t\":1,\"comp\":\"a\",\"event\":\"x\",\"params\":{\"alt\":25}}\n");
  CHECK(f.records[0].params == std::vector<std::pair<std::string, std::string>>{{"alt", "25"}});
}

TEST_CASE("append_record: genesis chaining is verified by round trip") {
  LogFile f;
  f = append_record(f, rec(3, "a", "x"));
  REQUIRE(f.records.size() == 1);
  REQUIRE(f.records[0].h.has_value());
  CHECK(*f.records[0].h == sha256_hex(kChainGenesis + "\n" + canonical_body(f.records[0])));
  CHECK(verify_chain(f).ok);
}

TEST_CASE("append_record: appending keeps the chain valid") {
  CHECK(verify_chain(sample_chain()).ok);
}

TEST_CASE("append_record: timestamp regression is rejected") {
  LogFile f = sample_chain();
  CHECK_THROWS_WITH_AS(append_record(f, rec(1, "robot", "late")),
                       doctest::Contains("regression"), Error);
  CHECK_THROWS_AS(append_record(f, rec(30, "", "x")), Error);
  CHECK_THROWS_AS(append_record(f, rec(30, "x", "")), Error);
}

TEST_CASE("verify_chain: edit of one record is pinned to its seq") {
  LogFile f = sample_chain();
  f.records[2].event = "bumP";
  ChainReport report = verify_chain(f);
  CHECK_FALSE(report.ok);
  CHECK(report.first_bad_seq == 2);
}

TEST_CASE("verify_chain: truncation alone is not detected") {
  LogFile f = sample_chain();
  f.records.pop_back();
  CHECK(verify_chain(f).ok);
}

TEST_CASE("verify_chain: unchained file is an error") {
  LogFile f;
  f.records.push_back(rec(0, "a", "x"));
  f.chained = false;
  CHECK_THROWS_AS(verify_chain(f), Error);
}

TEST_CASE("round trip: parse(serialize(f)) == f, byte-identical") {
  LogFile f = sample_chain();
  std::string bytes = serialize(f);
  LogFile again = parse_log(bytes);
  CHECK(again == f);
  CHECK(serialize(again) == bytes);

  for (const char* name :
       {"firing_squad.log", "uav_pilot.log", "uav_rogue.log", "roomba.log", "roomba_clean.log"}) {
    std::string fixture = test_util::read_file(test_util::fixture_path(name));
    LogFile parsed = parse_log(fixture);
    CHECK(serialize(parsed) == fixture);
    CHECK(verify_chain(parsed).ok);
  }
}

TEST_CASE("property: any single-field edit is reported at or before its seq") {
  LogFile f = sample_chain();
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    LogFile mutated = f;
    std::size_t k = rng() % mutated.records.size();
    LogRecord& r = mutated.records[k];
    switch (rng() % 4) {
      case 0: r.t += 1 + static_cast<int>(rng() % 5); break;
      case 1: r.event.push_back('x'); break;
      case 2: r.comp[0] = static_cast<char>('a' + rng() % 26); break;
      default: r.params.emplace_back("k", "v"); break;
    }
    if (canonical_body(r) == canonical_body(f.records[k])) continue;
    ChainReport report = verify_chain(mutated);
    REQUIRE_FALSE(report.ok);
    CHECK(report.first_bad_seq <= static_cast<std::int64_t>(k));
    CHECK(report.first_bad_seq == static_cast<std::int64_t>(k));
  }
}
