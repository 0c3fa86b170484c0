#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "spacinglab/config.hpp"

using spacinglab::config::KeyValueConfig;

TEST_SUITE_BEGIN("cli");

TEST_CASE("key=value config round-trips bit-exactly") {
  KeyValueConfig c;
  c.set("thm3.tol.m2", "0.1");
  c.set("seq.target_scaled_error", "1/1000000");
  c.set("weilscan.max_ratio", "24");
  c.set("label", "desk scale, big integers as decimal strings: 123456789012345678901234567890");

  std::string text = c.serialize();
  KeyValueConfig back = KeyValueConfig::parse(text);
  CHECK(back.serialize() == text);
  // and through a file
  auto path = std::filesystem::temp_directory_path() / "spacinglab_cfg_test.cfg";
  c.save(path.string());
  KeyValueConfig loaded = KeyValueConfig::load(path.string());
  CHECK(loaded.serialize() == text);
  std::filesystem::remove(path);

  CHECK(loaded.get_double("thm3.tol.m2", 0) == 0.1);
  CHECK(loaded.get_int("weilscan.max_ratio", 0) == 24);
  CHECK(loaded.get_or("seq.target_scaled_error", "") == "1/1000000");
  CHECK(!loaded.has("missing"));
  CHECK(loaded.get_double("missing", 7.5) == 7.5);
}

TEST_CASE("overwriting keeps insertion order") {
  KeyValueConfig c;
  c.set("a", "1");
  c.set("b", "2");
  c.set("a", "3");
  CHECK(c.serialize() == "a=3\nb=2\n");
}

TEST_CASE("malformed lines are rejected") {
  CHECK_THROWS(KeyValueConfig::parse("novalue\n"));
}

TEST_SUITE_END();
