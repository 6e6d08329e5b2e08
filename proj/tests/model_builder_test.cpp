#include <scanpath/model_builder.hpp>
#include <scanpath/model_io.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "invariants.hpp"

namespace scanpath {
namespace {

TEST(UpdateRule, Values) {
  EXPECT_EQ(apply_update_rule(UpdateRule::constant, 4, 3), 4u);
  EXPECT_EQ(apply_update_rule(UpdateRule::halving, 8, 3), 2u);
  EXPECT_EQ(apply_update_rule(UpdateRule::halving, 8, 10), 1u);
  EXPECT_EQ(apply_update_rule(UpdateRule::linear_decay, 3, 5), 1u);
  EXPECT_EQ(apply_update_rule(UpdateRule::linear_decay, 5, 2), 4u);
  EXPECT_THROW(parse_update_rule("cubic"), ConfigError);
  EXPECT_EQ(parse_update_rule("halving"), UpdateRule::halving);
  for (auto rule : {UpdateRule::constant, UpdateRule::halving, UpdateRule::linear_decay})
    for (int level = 1; level < 100; ++level) EXPECT_GE(apply_update_rule(rule, 7, level), 1u);
}

TEST(GenerateModel, RepeatedPointCollapses) {
  Dataset ds;
  GazeRecording rec;
  rec.points.assign(10, GazePoint{0.4, 0.6, 0.0});
  ds.recordings.push_back(rec);
  BuildConfig cfg;
  cfg.max_level = 2;
  cfg.num_clusters = 2;
  const auto model = generate_model(ds, cfg);
  ASSERT_GE(model.depth(), 1);
  ASSERT_FALSE(model.levels[0].empty());
  for (const auto& level : model.levels)
    for (const auto& node : level) EXPECT_EQ(node.shape.rank(), 0);
  for (const auto& node : model.levels[0]) {
    EXPECT_NEAR(node.mean_shift[0], 0.4, 1e-15);
    EXPECT_NEAR(node.mean_shift[1], 0.6, 1e-15);
  }
}

TEST(GenerateModel, TwoBlobFixture) {
  const auto ds = testing::two_blob_fixture();
  BuildConfig cfg;
  cfg.max_level = 3;
  cfg.num_clusters = 2;
  BuildTrace tr;
  const auto model = generate_model(ds, cfg, &tr);
  ASSERT_EQ(model.levels[0].size(), 2u);
  for (const auto& node : model.levels[0]) {
    EXPECT_EQ(node.support, 2u);
    const bool low = std::abs(node.mean_shift[0] - 0.2) < 0.02 && std::abs(node.mean_shift[1] - 0.2) < 0.02;
    const bool high = std::abs(node.mean_shift[0] - 0.8) < 0.02 && std::abs(node.mean_shift[1] - 0.8) < 0.02;
    EXPECT_TRUE(low || high);
  }
  EXPECT_EQ(testing::check_partition(ds, model, tr), "");
  EXPECT_EQ(testing::check_weighted_mean(tr), "");
  // Smoke property: node counts do not shrink with depth on this fixture.
  for (int l = 1; l < model.depth(); ++l) EXPECT_GE(model.levels[l].size(), model.levels[l - 1].size());
}

TEST(GenerateModel, SingleLevel) {
  BuildConfig cfg;
  cfg.max_level = 1;
  cfg.num_clusters = 3;
  const auto model = generate_model(testing::two_blob_fixture(), cfg);
  EXPECT_EQ(model.depth(), 1);
}

TEST(GenerateModel, TimedDataIs3d) {
  BuildConfig cfg;
  cfg.max_level = 2;
  cfg.num_clusters = 2;
  const auto timed = testing::two_blob_fixture(3, true);
  EXPECT_EQ(generate_model(timed, cfg).dim, 3);
  cfg.use_time = false;
  EXPECT_EQ(generate_model(timed, cfg).dim, 2);
}

TEST(GenerateModel, Errors) {
  BuildConfig cfg;
  EXPECT_THROW(generate_model(Dataset{}, cfg), ArgumentError);
  auto ds = testing::two_blob_fixture(3, true);
  ds.recordings[1].has_time = false;
  EXPECT_THROW(generate_model(ds, cfg), SchemaError);
}

TEST(GenerateModel, DeterministicAndThreadIndependent) {
  const auto ds = testing::blob_dataset({{0.2, 0.3}, {0.7, 0.6}, {0.4, 0.9}}, 6, 30, 0.03, 17, true);
  BuildConfig cfg;
  cfg.max_level = 3;
  cfg.num_clusters = 3;
  cfg.seed = 5;
  const auto a = model_to_json(generate_model(ds, cfg)).dump();
  cfg.threads = 4;
  const auto b = model_to_json(generate_model(ds, cfg)).dump();
  EXPECT_EQ(a, b);
}

TEST(GenerateModel, InvariantsOnRandomBlobs) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto ds = testing::blob_dataset({{0.2, 0.2}, {0.8, 0.3}, {0.5, 0.8}}, 4, 25, 0.04, seed, seed % 2 == 0);
    BuildConfig cfg;
    cfg.max_level = 4;
    cfg.num_clusters = 2 + seed % 3;
    cfg.dyn_cluster = seed % 3 == 0;
    cfg.rule = UpdateRule::linear_decay;
    cfg.seed = seed;
    BuildTrace tr;
    const auto model = generate_model(ds, cfg, &tr);
    EXPECT_EQ(testing::check_partition(ds, model, tr), "") << "seed " << seed;
    EXPECT_EQ(testing::check_weighted_mean(tr), "") << "seed " << seed;
    for (int l = 0; l < model.depth(); ++l)
      for (const auto& n : model.levels[l]) {
        EXPECT_EQ(n.level, l + 1);
        EXPECT_EQ(n.shape.dim, model.dim);
        EXPECT_LT((n.mean_shift - n.shape.mean_shift).norm(), 1e-15);
      }
  }
}

TEST(ModelIo, RoundTrip) {
  const auto ds = testing::blob_dataset({{0.2, 0.3}, {0.7, 0.6}}, 4, 30, 0.03, 2, true);
  BuildConfig cfg;
  cfg.max_level = 3;
  cfg.num_clusters = 2;
  cfg.merge_radius = 0.25;
  const auto m = generate_model(ds, cfg);
  std::stringstream buf;
  buf << model_to_json(m).dump(1);
  const auto back = read_model(buf);
  ASSERT_EQ(back.depth(), m.depth());
  EXPECT_EQ(back.dim, m.dim);
  EXPECT_EQ(back.max_level, m.max_level);
  EXPECT_EQ(back.build_config.merge_radius, m.build_config.merge_radius);
  for (int l = 0; l < m.depth(); ++l) {
    ASSERT_EQ(back.levels[l].size(), m.levels[l].size());
    for (std::size_t n = 0; n < m.levels[l].size(); ++n) {
      const auto& a = m.levels[l][n];
      const auto& b = back.levels[l][n];
      EXPECT_EQ(a.support, b.support);
      EXPECT_LE((a.mean_shift - b.mean_shift).norm(), 1e-12);
      ASSERT_EQ(a.shape.rank(), b.shape.rank());
      if (a.shape.rank() > 0) {
        EXPECT_LE((a.shape.components - b.shape.components).norm(), 1e-12);
      }
      for (int i = 0; i < b.shape.rank(); ++i)
        for (int j = 0; j < b.shape.rank(); ++j)
          EXPECT_NEAR(b.shape.components.row(i).dot(b.shape.components.row(j)), i == j ? 1.0 : 0.0, 1e-9);
    }
  }
}

TEST(ModelIo, VersionMismatch) {
  auto doc = model_to_json(generate_model(testing::two_blob_fixture(), BuildConfig{}));
  doc["version"] = 99;
  try {
    model_from_json(doc);
    FAIL() << "expected VersionError";
  } catch (const VersionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("99"), std::string::npos);
    EXPECT_NE(msg.find("1"), std::string::npos);
  }
}

TEST(ModelIo, TruncatedFileIsParseError) {
  const auto text = model_to_json(generate_model(testing::two_blob_fixture(), BuildConfig{})).dump();
  std::istringstream in(text.substr(0, text.size() / 2));
  EXPECT_THROW(read_model(in), ParseError);
  std::istringstream garbage("{\"format\": \"scanpath-model\", \"version\": 1}");
  EXPECT_THROW(read_model(garbage), ParseError);
}

TEST(ModelIo, FileRoundTrip) {
  const auto path = (std::filesystem::temp_directory_path() / "scanpath_model_io_test.json").string();
  const auto m = generate_model(testing::two_blob_fixture(), BuildConfig{});
  save_model(m, path);
  EXPECT_EQ(model_to_json(load_model(path)).dump(), model_to_json(m).dump());
  std::filesystem::remove(path);
  EXPECT_THROW(load_model(path), Error);
}

}  // namespace
}  // namespace scanpath
