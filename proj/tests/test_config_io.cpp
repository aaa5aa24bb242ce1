#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "dlcz/config.hpp"
#include "dlcz/errors.hpp"
#include "dlcz/io.hpp"

using namespace dlcz;
using doctest::Approx;

namespace {

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

CountsTable sample_table(double t, double ts, double tas) {
  CountsTable c;
  c.storage_time = t;
  c.settings = {ts, tas};
  c.n_pulses = 1000000;
  c.n_d1 = 800;
  c.n_d2 = 760;
  c.c13 = 90;
  c.c24 = 85;
  c.c14 = 12;
  c.c23 = 9;
  return c;
}

}  // namespace

TEST_SUITE("config_io") {

TEST_CASE("defaults survive a dump and re-parse") {
  const Config c;
  CHECK(parse_config(canonical_dump(c)) == c);
  CHECK(canonical_dump(parse_config(canonical_dump(c))) == canonical_dump(c));
}

TEST_CASE("non-default values round-trip exactly") {
  Config c;
  c.experiment.chi = 0.0123456789012345;
  c.experiment.v0 = 1.0 / 3.0;
  c.experiment.decay.tau0 = std::numeric_limits<double>::infinity();
  c.repeater.tau0 = std::numeric_limits<double>::infinity();
  c.repeater.nest_level = 3;
  c.repeater.modes = 77;
  c.repeater.link_divisor = LinkDivisor::kNestLevel;
  c.repeater.linear_multiplexing = true;
  c.double_pair = true;
  c.bell.theta_as = 0.1 + 1e-17;
  c.losses = LossBudget::as_built();
  // Parsed items come back ordered by name.
  std::ranges::sort(c.losses->items, {}, &LossBudget::Item::name);
  const Config back = parse_config(canonical_dump(c));
  CHECK(back == c);
  CHECK(std::isinf(back.experiment.decay.tau0));
}

TEST_CASE("comments, blanks and aliases") {
  const auto c = parse_config(
      "# a comment\n"
      "\n"
      "experiment.chi = 0.02   # trailing\n"
      "bell.theta_s_deg = 10\n"
      "geometry.atomic_mass_u = 87\n"
      "engine.double_pair = yes\n");
  CHECK(c.experiment.chi == 0.02);
  CHECK(c.bell.theta_s == Approx(std::numbers::pi / 18.0).epsilon(1e-15));
  CHECK(c.geometry.atomic_mass == Approx(87 * 1.66053906660e-27).epsilon(1e-9));
  CHECK(c.double_pair);
}

TEST_CASE("bad keys and values name the line") {
  auto msg = message_of([] { parse_config("experiment.chi = 0.1\nexperiment.chai = 0.1\n", "x.conf"); });
  CHECK(msg.find("x.conf:2") != std::string::npos);
  CHECK(msg.find("experiment.chai") != std::string::npos);

  CHECK_THROWS_AS(parse_config("experiment.chi = 0.1\nexperiment.chi = 0.2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("experiment.chi = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("experiment.chi\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("repeater.nest_level = 2.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("repeater.link_divisor = cube\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("engine.double_pair = maybe\n"), ConfigError);
  // Parsed but out of range.
  CHECK_THROWS_AS(parse_config("experiment.chi = 1.5\n"), ConfigError);
}

TEST_CASE("itemised losses must match the cavity loss") {
  const auto ok = parse_config(
      "losses.bs1 = 0.01\nlosses.bs2 = 0.03\nlosses.hr = 0.01\nlosses.optics = 0.048\n"
      "losses.arm = 0.032\n");
  REQUIRE(ok.losses.has_value());
  CHECK(ok.losses->items.size() == 5);
  CHECK(ok.losses->items.front().name == "arm");
  CHECK_THROWS_AS(parse_config("losses.bs1 = 0.5\n"), ConfigError);
}

TEST_CASE("shipped presets") {
  const auto op = load_config(DLCZ_CONFIG_DIR "/operating_point.conf");
  CHECK(op.experiment.chi == 0.01);
  CHECK(op.experiment.v0 == Approx(2.5 / (2.0 * std::numbers::sqrt2)).epsilon(1e-15));
  const auto ld = load_config(DLCZ_CONFIG_DIR "/long_distance.conf");
  CHECK(ld.repeater == fig8_preset(0.8));
}

TEST_CASE("file loading") {
  CHECK_THROWS_AS(load_config("/nonexistent/dir/none.conf"), IoError);
  CHECK_THROWS_AS(read_text_file("/nonexistent/dir/none.csv"), IoError);
}

TEST_CASE("sha256 test vectors") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("counts CSV round trip") {
  const std::vector<CountsTable> tables{sample_table(0.0, 0.0, 0.0),
                                        sample_table(2e-4, std::numbers::pi / 4.0, std::numbers::pi / 8.0)};
  Provenance prov{"simulate", "deadbeef", 42, {{"trials", "1000000"}}};
  const std::string text = format_counts_csv(tables, prov);
  CHECK(text.find("# seed: 42") != std::string::npos);
  CHECK(text.find("# config_hash: deadbeef") != std::string::npos);
  const auto back = parse_counts_csv(text, "t.csv");
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].n_pulses == tables[i].n_pulses);
    CHECK(back[i].c23 == tables[i].c23);
    CHECK(back[i].storage_time == tables[i].storage_time);
    CHECK(back[i].settings.same_analysis(tables[i].settings));
  }
}

TEST_CASE("counts CSV columns are matched by name") {
  const std::string text =
      "c23,c14,c24,c13,n_d2,n_d1,n_pulses,theta_as_deg,theta_s_deg,t_seconds,extra\n"
      "1,2,3,4,50,60,1000,22.5,0,0.001,zzz\n";
  const auto t = parse_counts_csv(text, "r.csv");
  REQUIRE(t.size() == 1);
  CHECK(t[0].c23 == 1);
  CHECK(t[0].c13 == 4);
  CHECK(t[0].n_d1 == 60);
  CHECK(t[0].storage_time == 0.001);
  CHECK(t[0].settings.theta_as == Approx(std::numbers::pi / 8.0));
}

TEST_CASE("counts CSV schema errors") {
  const std::string header{kCountsHeader};
  auto msg = message_of([] {
    parse_counts_csv("t_seconds,theta_s_deg,theta_as_deg,n_pulses,n_d1,n_d2,c13,c24,c14\n0,0,0,1,0,0,0,0,0\n",
                     "m.csv");
  });
  CHECK(msg.find("c23") != std::string::npos);
  CHECK_THROWS_AS(parse_counts_csv(header + "\n0,0,0,10,1,1,x,0,0,0\n", "b.csv"), SchemaError);
  msg = message_of([&] { parse_counts_csv(header + "\n0,0,0,10,1,1,x,0,0,0\n", "b.csv"); });
  CHECK(msg.find("c13") != std::string::npos);
  CHECK_THROWS_AS(parse_counts_csv(header + "\n0,0,0,10,1,1,5,0,0,0\n", "c.csv"), SchemaError);
  CHECK_THROWS_AS(parse_counts_csv(header + "\n0,0,0,1,1,1,0,0,0,0\n", "p.csv"), SchemaError);
  CHECK_THROWS_AS(parse_counts_csv(header + "\n-1,0,0,10,1,1,0,0,0,0\n", "t.csv"), SchemaError);
  CHECK_THROWS_AS(parse_counts_csv(header + "\n0,0,0,10,1\n", "n.csv"), SchemaError);
  CHECK_THROWS_AS(parse_counts_csv(header + "\n", "e.csv"), SchemaError);
}

TEST_CASE("decay samples with and without a header") {
  auto s = parse_decay_csv("0,0.7\n0.001,0.3\n", "a.csv");
  REQUIRE(s.size() == 2);
  CHECK(s[1].t == 0.001);
  CHECK(s[1].r == 0.3);
  CHECK(s[1].sigma == 0.0);
  s = parse_decay_csv("t_seconds,R,sigma\n0,0.7,0.01\n", "b.csv");
  REQUIRE(s.size() == 1);
  CHECK(s[0].sigma == 0.01);
  CHECK_THROWS_AS(parse_decay_csv("t_seconds,R\n0,abc\n", "c.csv"), SchemaError);
}

}  // TEST_SUITE
