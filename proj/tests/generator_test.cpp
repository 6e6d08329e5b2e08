#include <scanpath/generator.hpp>
#include <scanpath/model_builder.hpp>

#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"

namespace scanpath {
namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

ScanPathModel repeated_point_model() {
  Dataset ds;
  GazeRecording rec;
  rec.points.assign(10, GazePoint{0.3, 0.7, 0.0});
  ds.recordings.push_back(rec);
  BuildConfig cfg;
  cfg.max_level = 2;
  cfg.num_clusters = 2;
  return generate_model(ds, cfg);
}

ScanPathModel blob_model(bool timed = false) {
  BuildConfig cfg;
  cfg.max_level = 3;
  cfg.num_clusters = 3;
  cfg.seed = 3;
  return generate_model(testing::blob_dataset({{0.2, 0.2}, {0.8, 0.3}, {0.5, 0.8}}, 5, 30, 0.02, 8, timed), cfg);
}

TEST(NormalizeTime, SortsAndRescales) {
  const PointList pts{vec({0.1, 0.1, 3}), vec({0.2, 0.2, 1}), vec({0.3, 0.3, 2})};
  const auto rec = normalize_time(pts);
  ASSERT_EQ(rec.points.size(), 3u);
  EXPECT_DOUBLE_EQ(rec.points[0].x, 0.2);
  EXPECT_DOUBLE_EQ(rec.points[1].x, 0.3);
  EXPECT_DOUBLE_EQ(rec.points[2].x, 0.1);
  EXPECT_DOUBLE_EQ(rec.points[0].t, 0.0);
  EXPECT_DOUBLE_EQ(rec.points[1].t, 0.5);
  EXPECT_DOUBLE_EQ(rec.points[2].t, 1.0);
}

TEST(NormalizeTime, SinglePointAndIdempotence) {
  EXPECT_EQ(normalize_time(PointList{vec({0.5, 0.5, 0.7})}).points[0].t, 0.0);
  const PointList sorted{vec({0.1, 0.1, 0.0}), vec({0.2, 0.2, 0.25}), vec({0.3, 0.3, 1.0})};
  const auto rec = normalize_time(sorted);
  EXPECT_DOUBLE_EQ(rec.points[1].t, 0.25);
  EXPECT_DOUBLE_EQ(rec.points[1].x, 0.2);
}

TEST(NormalizeTime, ConstantTimeFallsBackToLinear) {
  const auto rec = normalize_time(PointList{vec({0.1, 0.1, 0.4}), vec({0.2, 0.2, 0.4}), vec({0.3, 0.3, 0.4})});
  EXPECT_DOUBLE_EQ(rec.points[0].x, 0.1);
  EXPECT_DOUBLE_EQ(rec.points[0].t, 0.0);
  EXPECT_DOUBLE_EQ(rec.points[1].t, 0.5);
  EXPECT_DOUBLE_EQ(rec.points[2].t, 1.0);
}

TEST(AddTime, LinearFill) {
  const auto three = add_time(PointList(3, vec({0.5, 0.5})));
  EXPECT_DOUBLE_EQ(three.points[1].t, 0.5);
  EXPECT_DOUBLE_EQ(three.points[2].t, 1.0);
  EXPECT_EQ(add_time(PointList{vec({0.5, 0.5})}).points[0].t, 0.0);
  const auto five = add_time(PointList(5, vec({0.5, 0.5})));
  for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(five.points[i].t, 0.25 * i);
  EXPECT_THROW(add_time(PointList{}), ArgumentError);
}

TEST(GenerateScanpath, ZeroVarianceModelRepeatsThePoint) {
  const auto model = repeated_point_model();
  GeneratorConfig cfg;
  cfg.max_clusters = 1;
  cfg.max_subclusters = 1;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    cfg.seed = seed;
    const auto rec = generate_scanpath(model, cfg);
    for (const auto& p : rec.points) {
      EXPECT_NEAR(p.x, 0.3, 1e-12);
      EXPECT_NEAR(p.y, 0.7, 1e-12);
    }
  }
}

TEST(GenerateScanpath, Deterministic) {
  const auto model = blob_model();
  GeneratorConfig cfg;
  cfg.seed = 99;
  const auto a = generate_scanpath(model, cfg);
  const auto b = generate_scanpath(model, cfg);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].x, b.points[i].x);
    EXPECT_EQ(a.points[i].y, b.points[i].y);
    EXPECT_EQ(a.points[i].t, b.points[i].t);
  }
}

TEST(GenerateScanpath, UntimedModelGetsLinearTime) {
  const auto model = blob_model(false);
  ASSERT_EQ(model.dim, 2);
  GeneratorConfig cfg;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    cfg.seed = seed;
    const auto rec = generate_scanpath(model, cfg);
    const auto n = rec.points.size();
    ASSERT_GE(n, 1u);
    for (std::size_t i = 0; i < n; ++i)
      EXPECT_DOUBLE_EQ(rec.points[i].t, n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1));
  }
}

// Properties: bounds, time ordering, leaf bound.
TEST(GenerateScanpath, OutputProperties) {
  for (bool timed : {false, true}) {
    const auto model = blob_model(timed);
    GeneratorConfig cfg;
    cfg.max_clusters = 3;
    cfg.max_subclusters = 2;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      cfg.seed = seed;
      GenerationStats st;
      const auto rec = generate_scanpath(model, cfg, 0, &st);
      EXPECT_TRUE(rec.has_time);
      ASSERT_GE(rec.points.size(), 1u);
      EXPECT_EQ(st.leaves, rec.points.size());
      EXPECT_LE(static_cast<double>(st.leaves), std::pow(3.0 * 2.0, st.levels));
      for (std::size_t i = 0; i < rec.points.size(); ++i) {
        EXPECT_GE(rec.points[i].x, 0.0);
        EXPECT_LE(rec.points[i].x, 1.0);
        EXPECT_GE(rec.points[i].y, 0.0);
        EXPECT_LE(rec.points[i].y, 1.0);
        if (i) {
          EXPECT_LE(rec.points[i - 1].t, rec.points[i].t);
        }
      }
      if (rec.points.size() >= 2) {
        EXPECT_EQ(rec.points.front().t, 0.0);
        EXPECT_EQ(rec.points.back().t, 1.0);
      }
    }
  }
}

TEST(GenerateScanpath, NoClampKeepsRawPositions) {
  ScanPathModel model;
  model.dim = 2;
  model.max_level = 1;
  ModelNode node;
  node.mean_shift = vec({1.2, -0.1});
  node.shape.mean_shift = node.mean_shift;
  node.shape.components.resize(0, 2);
  model.levels = {{node}};
  GeneratorConfig cfg;
  cfg.clamp_to_unit = false;
  const auto raw = generate_scanpath(model, cfg);
  EXPECT_DOUBLE_EQ(raw.points[0].x, 1.2);
  cfg.clamp_to_unit = true;
  GenerationStats st;
  const auto clamped = generate_scanpath(model, cfg, 0, &st);
  EXPECT_DOUBLE_EQ(clamped.points[0].x, 1.0);
  EXPECT_DOUBLE_EQ(clamped.points[0].y, 0.0);
  EXPECT_EQ(st.clamped_points, clamped.points.size());
}

TEST(GenerateScanpath, EmptyLevelIsAnError) {
  auto model = blob_model();
  ASSERT_GE(model.depth(), 2);
  model.levels[1].clear();
  GeneratorConfig cfg;
  try {
    generate_scanpath(model, cfg);
    FAIL();
  } catch (const GenerationError& e) {
    EXPECT_NE(std::string(e.what()).find("level 2"), std::string::npos);
  }
}

TEST(GenerateScanpath, BranchTerminationRate) {
  const auto model = blob_model();
  for (std::size_t c : {1u, 2u, 4u}) {
    GeneratorConfig cfg;
    cfg.max_clusters = c;
    cfg.max_subclusters = 1;
    std::size_t draws = 0, ended = 0;
    for (std::uint64_t s = 0; draws < 10000; ++s) {
      GenerationStats st;
      generate_scanpath(model, cfg, s, &st);
      draws += st.branch_draws;
      ended += st.terminated_branches;
    }
    EXPECT_NEAR(static_cast<double>(ended) / draws, 1.0 / (c + 1), 0.02) << "max_clusters " << c;
  }
}

TEST(GenerateScanpath, SupportWeightedSelection) {
  const auto model = blob_model();
  GeneratorConfig cfg;
  cfg.weight_by_support = true;
  EXPECT_GE(generate_scanpath(model, cfg).points.size(), 1u);
}

TEST(GenerateScanpath, DynamicBudgets) {
  const auto model = blob_model();
  GeneratorConfig cfg;
  cfg.dyn_cluster = true;
  cfg.rule = UpdateRule::halving;
  cfg.max_clusters = 4;
  cfg.max_subclusters = 4;
  GenerationStats st;
  generate_scanpath(model, cfg, 0, &st);
  // Budgets 4, 2, 1 over three levels: at most (4*4)(2*2)(1*1) leaves.
  EXPECT_LE(st.leaves, 64u);
}

TEST(GenerateBatch, StreamsAreIndependentOfThreads) {
  const auto model = blob_model(true);
  GeneratorConfig cfg;
  cfg.seed = 12;
  const auto serial = generate_batch(model, cfg, 40);
  cfg.threads = 4;
  const auto parallel = generate_batch(model, cfg, 40);
  ASSERT_EQ(serial.size(), 40u);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    ASSERT_EQ(serial[i].points.size(), parallel[i].points.size());
    for (std::size_t j = 0; j < serial[i].points.size(); ++j) EXPECT_EQ(serial[i].points[j].x, parallel[i].points[j].x);
  }
  const auto single = generate_scanpath(model, cfg, 0);
  const auto one = generate_batch(model, cfg, 1);
  ASSERT_EQ(one[0].points.size(), single.points.size());
  for (std::size_t j = 0; j < single.points.size(); ++j) EXPECT_EQ(one[0].points[j].y, single.points[j].y);
  EXPECT_THROW(generate_batch(model, cfg, 0), ArgumentError);
}

TEST(GenerateBatch, ThousandPerClass) { EXPECT_EQ(generate_batch(blob_model(), GeneratorConfig{}, 1000).size(), 1000u); }

}  // namespace
}  // namespace scanpath
