#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "treeprof/error.hpp"
#include "treeprof/io.hpp"
#include "treeprof/sampler.hpp"

using namespace treeprof;
using nlohmann::json;

TEST_CASE("degree sequence JSON") {
  const auto ds = DegreeSequence::validate({{0, 5}, {1, 2}, {2, 2}, {3, 1}});
  const auto j = io::degseq_to_json(ds);
  CHECK(j == json::parse(R"({"counts": {"0": 5, "1": 2, "2": 2, "3": 1}})"));
  CHECK(io::degseq_from_json(j) == ds);
  CHECK_THROWS_AS(io::degseq_from_json(json::parse(R"({"counts": {"0": 2}})")), Error);
  CHECK_THROWS_AS(io::degseq_from_json(json::parse(R"({"counts": {"x": 2}})")), Error);
  CHECK_THROWS_AS(io::degseq_from_json(json::parse(R"([1, 2])")), Error);
}

TEST_CASE("degree sequence CSV and autodetection") {
  const auto ds = gen_kary(3, 4);
  const auto csv = io::degseq_to_csv(ds);
  CHECK(csv.rfind("i,N\n", 0) == 0);
  CHECK(io::degseq_from_csv(csv) == ds);
  CHECK(io::degseq_from_text(csv) == ds);
  CHECK(io::degseq_from_text(io::degseq_to_json(ds).dump()) == ds);
  CHECK(io::degseq_from_csv("0,2\n2,1\n") == DegreeSequence::validate({{0, 2}, {2, 1}}));
  try {
    io::degseq_from_text(R"({"counts": {"0": 2}})");
    FAIL("accepted an unbalanced sequence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BalanceViolation);
  }
}

TEST_CASE("tree serialization") {
  SeededStream rng(4, 0);
  for (Count k : {1, 2, 200}) {
    const auto t = sample_uniform_tree(gen_kary(k, 300), rng);
    CHECK(io::tree_from_json(io::tree_to_json(t)) == t);
    const auto bytes = io::tree_to_binary(t);
    CHECK(io::tree_from_binary(bytes) == t);
  }
  const auto small = PlaneTree::from_dfs_degrees({2, 0, 0});
  CHECK(io::tree_to_json(small) == json::parse("[2,0,0]"));
  CHECK(io::tree_to_binary(small) == std::vector<std::uint8_t>{3, 2, 0, 0});
  // 300 children need two varint bytes
  std::vector<Count> wide(301, 0);
  wide[0] = 300;
  const auto fan = PlaneTree::from_dfs_degrees(wide);
  const auto bytes = io::tree_to_binary(fan);
  CHECK(bytes[0] == ((301 & 0x7f) | 0x80));
  CHECK(io::tree_from_binary(bytes) == fan);
  CHECK_THROWS_AS(io::tree_from_binary(std::vector<std::uint8_t>{3, 2, 0}), Error);
  CHECK_THROWS_AS(io::tree_from_binary(std::vector<std::uint8_t>{2, 0, 0}), Error);
  CHECK_THROWS_AS(io::tree_from_json(json::parse("[1, 0, 0]")), Error);
}

TEST_CASE("walk and path CSV") {
  const std::vector<Count> walk{1, 3, 4, 3, 2, 1, 1, 2, 2, 1, 0};
  const auto csv = io::walk_to_csv(walk);
  CHECK(csv.rfind("index,value\n0,1\n1,3\n", 0) == 0);
  const auto back = io::walk_from_csv(csv);
  REQUIRE(back.size() == walk.size());
  for (std::size_t i = 0; i < walk.size(); ++i) CHECK(back[i] == static_cast<double>(walk[i]));

  const std::vector<double> reals{0.0, 0.1, -1.0 / 3.0, 1e-300};
  CHECK(io::walk_from_csv(io::walk_to_csv(reals)) == reals);

  const GridPath path{{0.0, 0.25, 1.0 / 3.0, 0.0}};
  const auto pcsv = io::grid_path_to_csv(path);
  CHECK(pcsv.rfind("t,value\n0,0\n0.3333333333333333,0.25\n", 0) == 0);
  CHECK(io::grid_path_from_csv(pcsv).values == path.values);
  CHECK_THROWS_AS(io::walk_from_csv("index,value\n0,abc\n"), Error);
}

TEST_CASE("profile CSV") {
  const Profile p{{1, 3, 3, 2, 1}, {1, 4, 7, 9, 10}};
  CHECK(io::profile_to_csv(p) == "generation,z,c\n0,1,1\n1,3,4\n2,3,7\n3,2,9\n4,1,10\n");
}

TEST_CASE("shortest round-trip doubles") {
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(2.0) == "2");
  CHECK(std::stod(io::format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("files") {
  const auto dir = std::filesystem::temp_directory_path() / "treeprof_io_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  io::write_file(dir / "a.txt", "hello\n");
  CHECK(io::read_file(dir / "a.txt") == "hello\n");
  CHECK_THROWS_AS(io::read_file(dir / "missing.txt"), Error);
  std::filesystem::remove_all(dir.parent_path());
}
