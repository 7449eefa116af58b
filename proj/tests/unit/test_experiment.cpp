#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "eon/errors.hpp"
#include "eon/experiment.hpp"
#include "eon/image.hpp"
#include "eon/model_file.hpp"
#include "helpers.hpp"

using namespace eon;
namespace fs = std::filesystem;

namespace {

// Class c is a thick bar at angle c * 18 degrees through the centre, with noise.
Image bar_digit(std::size_t cls, test::TestRng& rng) {
  Image img(28, 28);
  const double a = static_cast<double>(cls) * 3.14159265 / 10.0;
  const double ux = std::cos(a), uy = std::sin(a);
  const double jx = static_cast<double>(rng.below(5)) - 2.0, jy = static_cast<double>(rng.below(5)) - 2.0;
  for (std::size_t y = 0; y < 28; ++y) {
    for (std::size_t x = 0; x < 28; ++x) {
      const double dx = static_cast<double>(x) - 13.5 - jx, dy = static_cast<double>(y) - 13.5 - jy;
      const double dist = std::abs(-uy * dx + ux * dy);
      const double along = std::abs(ux * dx + uy * dy);
      int v = (dist < 2.5 && along < 10.0) ? 230 : 10;
      v += static_cast<int>(rng.below(30));
      img.at(x, y) = static_cast<std::uint8_t>(std::min(v, 255));
    }
  }
  return img;
}

LabeledImageSet bars(std::size_t n, std::uint64_t seed) {
  test::TestRng rng(seed);
  LabeledImageSet s;
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = i % 10;
    s.images.push_back(bar_digit(c, rng));
    s.labels.push_back(static_cast<std::uint8_t>(c));
  }
  return s;
}

ExperimentConfig small_mnist() {
  ExperimentConfig cfg;
  cfg.model.neurons = 200;
  cfg.checkpoint_every = 50;
  return cfg;
}

} // namespace

TEST(ExperimentConfig, ParsesKeyValueText) {
  std::istringstream in(R"(# comment
mode = faces-adapt
seed = 42   # trailing comment
[model]
D = 28
F = 4
N = 400
clusters = 1
[learning]
swap_rate = 0.5
supervision = "self-supervised-on-fire"
[data]
faces_train = '/tmp/faces'
clk_period_ns = 5
)");
  const auto cfg = ExperimentConfig::parse(in);
  EXPECT_EQ(cfg.mode, Mode::faces_adapt);
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_EQ(cfg.model.side, 28u);
  EXPECT_EQ(cfg.model.filters, 4);
  EXPECT_EQ(cfg.model.neurons, 400u);
  EXPECT_DOUBLE_EQ(cfg.learn.swap_rate, 0.5);
  EXPECT_EQ(cfg.learn.supervision, Supervision::self_on_fire);
  EXPECT_EQ(cfg.faces_train, fs::path("/tmp/faces"));
  EXPECT_NEAR(cfg.cost.clk_period_s, 5e-9, 1e-18);
}

TEST(ExperimentConfig, RejectsBadInput) {
  std::istringstream unknown("mystery = 3\n");
  EXPECT_THROW(ExperimentConfig::parse(unknown), ConfigError);
  std::istringstream noeq("N 5\n");
  EXPECT_THROW(ExperimentConfig::parse(noeq), ConfigError);
  ExperimentConfig cfg;
  EXPECT_THROW(cfg.set("N", "12x"), ConfigError);
  EXPECT_THROW(cfg.set("F", "16"), ConfigError);
  EXPECT_THROW(cfg.set("mode", "train-everything"), ConfigError);
}

TEST(ExperimentConfig, OverridesAndSanity) {
  ExperimentConfig cfg;
  cfg.set_assignment("W=101");
  EXPECT_THROW(cfg.validate(false), ConfigError);
  cfg.set_assignment("W=64");
  cfg.set_assignment("K=0");
  EXPECT_THROW(cfg.validate(false), ConfigError);
  cfg.set_assignment("K=1");
  EXPECT_NO_THROW(cfg.validate(false));
  cfg.set_assignment("train_images=/nonexistent/file");
  EXPECT_THROW(cfg.validate(true), ConfigError);
}

TEST(FitPatch, SizesAndErrors) {
  EXPECT_EQ(fit_patch(Image(28, 28), 14).width, 14u);
  EXPECT_EQ(fit_patch(Image(14, 14), 14).width, 14u);
  EXPECT_THROW(fit_patch(Image(20, 20), 14), DimensionMismatch);
}

TEST(RunMnist, LearnsSyntheticClassesDeterministically) {
  const auto train = bars(400, 1), test = bars(200, 2);
  const auto cfg = small_mnist();
  std::vector<MnistCheckpoint> streamed;
  const auto a = run_mnist(cfg, train, test, [&](const MnistCheckpoint& cp) { streamed.push_back(cp); });
  const auto b = run_mnist(cfg, train, test);
  EXPECT_EQ(a.checkpoints, b.checkpoints);
  EXPECT_TRUE(a.layer == b.layer);
  EXPECT_EQ(streamed, a.checkpoints);

  ASSERT_EQ(a.checkpoints.size(), 9u);  // 0, 50, ..., 400
  EXPECT_EQ(a.checkpoints.front().sample_count, 0u);
  EXPECT_EQ(a.checkpoints.back().sample_count, 400u);
  for (std::size_t i = 1; i < a.checkpoints.size(); ++i) {
    EXPECT_LE(a.checkpoints[i].capacity, a.checkpoints[i - 1].capacity);
  }
  EXPECT_GT(a.final_eval.accuracy, 0.6);
  EXPECT_EQ(a.fingerprint_before_tests, a.fingerprint_after_tests);
  EXPECT_EQ(a.fingerprint_after_tests, layer_fingerprint(a.layer));
  EXPECT_EQ(a.cost.total_cycles, inference_latency_cycles(200, 1, 10, 5));

  auto other = cfg;
  other.seed = 2;
  EXPECT_FALSE(run_mnist(other, train, test).layer == a.layer);
}

TEST(RunMnist, NoTrainingMeansNoPredictions) {
  const auto test = bars(100, 3);
  const auto r = run_mnist(small_mnist(), LabeledImageSet{}, test);
  ASSERT_EQ(r.checkpoints.size(), 1u);
  EXPECT_EQ(r.final_eval.no_prediction, 100u);
  EXPECT_EQ(r.final_eval.accuracy, 0.0);
  EXPECT_EQ(r.layer.capacity(), 200u);
}

TEST(RunMnist, WorkerCountDoesNotChangeResults) {
  const auto train = bars(200, 4), test = bars(100, 5);
  auto cfg = small_mnist();
  const auto one = run_mnist(cfg, train, test);
  cfg.workers = 3;
  const auto three = run_mnist(cfg, train, test);
  EXPECT_EQ(one.checkpoints, three.checkpoints);
}

namespace {

// "Faces": a dark ring with two eyes; non-faces: random texture.
Image blob_face(test::TestRng& rng) {
  Image img(32, 32, 120);
  const double cx = 15.5 + static_cast<double>(rng.below(3)) - 1.0, cy = 15.5;
  for (std::size_t y = 0; y < 32; ++y) {
    for (std::size_t x = 0; x < 32; ++x) {
      const double r = std::hypot(static_cast<double>(x) - cx, static_cast<double>(y) - cy);
      if (r > 10 && r < 13) {
        img.at(x, y) = 20;
      }
      if (std::hypot(static_cast<double>(x) - cx + 4, static_cast<double>(y) - cy + 3) < 2 ||
          std::hypot(static_cast<double>(x) - cx - 4, static_cast<double>(y) - cy + 3) < 2) {
        img.at(x, y) = 240;
      }
      img.at(x, y) = static_cast<std::uint8_t>(img.at(x, y) + rng.below(8));
    }
  }
  return img;
}

Image texture(test::TestRng& rng) {
  Image img(32, 32);
  for (auto& p : img.pixels) {
    p = static_cast<std::uint8_t>(rng.below(256));
  }
  return img;
}

FaceData synthetic_faces() {
  test::TestRng rng(7);
  FaceData d;
  for (int i = 0; i < 60; ++i) {
    d.faces_train.push_back(blob_face(rng));
    d.nonfaces_train.push_back(texture(rng));
  }
  for (int i = 0; i < 20; ++i) {
    d.faces_test.push_back(blob_face(rng));
    d.nonfaces_test.push_back(texture(rng));
  }
  return d;
}

ExperimentConfig small_faces(Mode mode) {
  ExperimentConfig cfg;
  cfg.mode = mode;
  cfg.model.side = 28;
  cfg.model.filters = 4;
  cfg.model.neurons = 40;
  cfg.model.clusters = 1;
  cfg.theta = 350;
  cfg.pretrain_samples = 20;
  cfg.frame_height = 128;
  cfg.frame_width = 160;
  cfg.collage_faces = 6;
  cfg.scan_stride = 2;
  cfg.adapt_stride = 32;
  cfg.cost.parallelism = 40;
  return cfg;
}

} // namespace

TEST(RunFaces, PretrainAndAdaptStages) {
  const auto data = synthetic_faces();
  const auto pre = run_faces(small_faces(Mode::faces_pretrain), data);
  ASSERT_EQ(pre.stages.size(), 1u);
  EXPECT_EQ(pre.stages[0].stage, "pretrained");
  EXPECT_EQ(pre.stages[0].faces_total, 6u);
  EXPECT_GT(pre.stages[0].accuracy, 0.9);
  EXPECT_EQ(pre.collage.face_count(), 6u);

  const auto a = run_faces(small_faces(Mode::faces_adapt), data);
  const auto b = run_faces(small_faces(Mode::faces_adapt), data);
  ASSERT_EQ(a.stages.size(), 2u);
  EXPECT_EQ(a.stages, b.stages);
  EXPECT_EQ(a.stages[0].stage, "before");
  EXPECT_EQ(a.stages[1].stage, "adapted");
  EXPECT_EQ(a.stages[0], (FacesStage{"before", pre.stages[0].learned, pre.stages[0].accuracy, pre.stages[0].recall,
                                     pre.stages[0].faces_found, pre.stages[0].faces_total}));
  EXPECT_GE(a.stages[1].learned, a.stages[0].learned);
  EXPECT_EQ(a.collage.canvas, pre.collage.canvas);
  EXPECT_GE(a.adapt.learning_events, a.stages[1].learned - a.stages[0].learned);
}

TEST(RunFaces, NeedsSingleCluster) {
  auto cfg = small_faces(Mode::faces_pretrain);
  cfg.model.clusters = 2;
  EXPECT_THROW(run_faces(cfg, synthetic_faces()), ConfigError);
}

TEST(ScanCollage, DetectionsAreFiringWindows) {
  const auto data = synthetic_faces();
  const auto cfg = small_faces(Mode::faces_pretrain);
  const auto res = run_faces(cfg, data);
  const auto bank = make_filter_bank(cfg);
  const auto spikes = encode_frame(res.collage.canvas, bank);
  const auto scan = scan_collage(res.layer, spikes, res.collage, 4, 2);
  EXPECT_EQ(scan.windows, WindowGrid(128, 160, 32, 4).size());
  for (const auto& o : scan.detections) {
    const auto s = encode(res.collage.canvas.crop(o.x, o.y, 32, 32), bank);
    ASSERT_FALSE(infer(res.layer, s).fired.empty());
  }
}

TEST(RunCost, SampleAndFrameJson) {
  ExperimentConfig cfg;
  cfg.mode = Mode::cost;
  auto j = nlohmann::json::parse(run_cost(cfg));
  EXPECT_EQ(j["sample"]["cycles"]["total"], 2015);
  EXPECT_FALSE(j.contains("frame"));

  cfg.set_assignment("D=28");
  cfg.set_assignment("F=4");
  cfg.set_assignment("N=400");
  cfg.set_assignment("clusters=1");
  cfg.set_assignment("P=400");
  cfg.set_assignment("cost_frame_height=2160");
  cfg.set_assignment("cost_frame_width=3840");
  j = nlohmann::json::parse(run_cost(cfg));
  EXPECT_EQ(j["frame"]["cycles"]["total"], 8'177'490);
}
