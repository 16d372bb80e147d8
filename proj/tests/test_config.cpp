#include <gtest/gtest.h>

#include "dfsqec/config.hpp"

using namespace dfsqec;

TEST(Config, ParsesSectionsAndComments) {
  Config c = Config::parse("# header\n[run]\nkind = dfs\nshots=50 ; inline\n\n[noise]\npreset = h1-like\n");
  EXPECT_EQ(c.get("run", "kind"), "dfs");
  EXPECT_EQ(c.get("run", "shots"), "50");
  EXPECT_EQ(c.get_or("run", "seed", "9"), "9");
  EXPECT_TRUE(c.has("noise", "preset"));
  EXPECT_THROW(c.get("run", "seed"), ConfigError);
}

TEST(Config, RejectsUnknownSectionsAndKeys) {
  EXPECT_THROW(Config::parse("[bogus]\nx=1\n"), ConfigError);
  EXPECT_THROW(Config::parse("[run]\nshot=1\n"), ConfigError);
  EXPECT_THROW(Config::parse("[noise]\np3=0.1\n"), ConfigError);
  EXPECT_THROW(Config::parse("kind=dfs\n"), ConfigError);
  EXPECT_THROW(Config::parse("[run]\nkind\n"), ConfigError);
  Config c;
  EXPECT_THROW(c.set("run.nonsense=1"), ConfigError);
  EXPECT_THROW(c.set("shots=1"), ConfigError);
}

TEST(Config, OverridesReplaceValues) {
  Config c = Config::parse("[run]\nshots=50\n");
  c.set("run.shots=75");
  c.set("noise.p2", "0.01");
  EXPECT_EQ(c.get("run", "shots"), "75");
  EXPECT_EQ(c.get("noise", "p2"), "0.01");
}

TEST(Config, ListAndRangeParsers) {
  EXPECT_EQ(parse_states("all").size(), 6u);
  EXPECT_EQ(parse_states("0,+i").size(), 2u);
  EXPECT_THROW(parse_states("0,0"), ConfigError);
  EXPECT_THROW(parse_states("2"), ConfigError);
  auto t = parse_times("0:6:13");
  ASSERT_EQ(t.size(), 13u);
  EXPECT_DOUBLE_EQ(t[1], 0.5);
  EXPECT_DOUBLE_EQ(t.back(), 6.0);
  EXPECT_EQ(parse_times("0,1.5").size(), 2u);
  EXPECT_THROW(parse_times("0:1:0"), ConfigError);
  EXPECT_THROW(parse_times("-1"), ConfigError);
  EXPECT_EQ(parse_cycles("0:8"), (std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8}));
  EXPECT_EQ(parse_cycles("0:8:4"), (std::vector<int>{0, 4, 8}));
  EXPECT_EQ(parse_cycles("1,3"), (std::vector<int>{1, 3}));
  EXPECT_THROW(parse_cycles("3:1"), ConfigError);
  EXPECT_THROW(parse_cycles("x"), ConfigError);
}

TEST(Config, ResolveDefaultsAndPresetOrder) {
  RunSpec d = resolve_run(Config{});
  EXPECT_EQ(d.plan.kind, QubitKind::Physical);
  EXPECT_EQ(d.plan.shots, 1000u);
  EXPECT_EQ(d.plan.times.size(), 13u);
  EXPECT_EQ(d.plan.states.size(), 6u);
  Config c = Config::parse("[noise]\np2=0.02\npreset=h1-like\n");
  RunSpec r = resolve_run(c);
  EXPECT_DOUBLE_EQ(r.plan.noise.p2, 0.02);
  EXPECT_DOUBLE_EQ(r.plan.noise.p1, 1e-4);
}

TEST(Config, ResolveRejectsInvalidRuns) {
  EXPECT_THROW(resolve_run(Config::parse("[run]\nkind=qubit\n")), ConfigError);
  EXPECT_THROW(resolve_run(Config::parse("[run]\nshots=0\n")), ConfigError);
  EXPECT_THROW(resolve_run(Config::parse("[run]\nshots=-5\n")), ConfigError);
  EXPECT_THROW(resolve_run(Config::parse("[run]\nkind=dfs_qec\ntimes=0,1\n")), ConfigError);
  EXPECT_THROW(resolve_run(Config::parse("[run]\nkind=dfs\ncycles=0:2\n")), ConfigError);
  EXPECT_THROW(resolve_run(Config::parse("[noise]\np2=1.5\n")), ConfigError);
  EXPECT_THROW(resolve_run(Config::parse("[noise]\npreset=loud\n")), ConfigError);
  EXPECT_THROW(resolve_run(Config::parse("[run]\nmode=maybe\n")), ConfigError);
  EXPECT_THROW(resolve_run(Config::parse("[run]\nkind=dfs_qec\nengine=statevector\nlayout=full\n")),
               ConfigError);
}

TEST(Config, ResolvedConfigRoundTrips) {
  Config c = Config::parse(
      "[run]\nkind=dfs_qec\ncycles=0:4:2\nshots=33\nmode=post-select\nseed=5\n[noise]\npreset=h1-like\np_meas=0.002\n"
      "[output]\ndir=somewhere\n");
  RunSpec a = resolve_run(c);
  Config rc = resolved_config(a);
  RunSpec b = resolve_run(Config::parse(rc.to_text()));
  EXPECT_EQ(rc.to_text(), resolved_config(b).to_text());
  EXPECT_EQ(b.plan.cycles, (std::vector<int>{0, 2, 4}));
  EXPECT_EQ(b.plan.mode, DecodeMode::PostSelect);
  EXPECT_EQ(b.plan.seed, 5u);
  EXPECT_DOUBLE_EQ(b.plan.noise.p_meas, 0.002);
  EXPECT_EQ(b.out_dir, "somewhere");
  EXPECT_EQ(b.plan.noise.to_map(), a.plan.noise.to_map());
}
