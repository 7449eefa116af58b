#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eon/collage.hpp"
#include "eon/costmodel.hpp"
#include "eon/encoder.hpp"
#include "eon/experiment_config.hpp"
#include "eon/idx.hpp"
#include "eon/network.hpp"

namespace eon {

/// Bank named by cfg.filter_bank, or the built-in oriented edges for cfg.model.
FilterBank make_filter_bank(const ExperimentConfig& cfg);

/// Brings an image to the encoder's input size: as-is when it already is
/// (D + K_S - 1) square, halved when it is exactly twice that.
Image fit_patch(const Image& img, std::size_t patch_side);

std::vector<CompressedVector> encode_all(std::span<const Image> images, const FilterBank& bank,
                                         std::size_t patch_side, std::size_t workers = 1);

// ---- MNIST ---------------------------------------------------------------

struct MnistCheckpoint {
  std::size_t sample_count = 0;
  double accuracy = 0.0;        ///< NO_PREDICTION counts as wrong
  std::size_t capacity = 0;
  double eligible = 0.0;        ///< mean learn-eligible neurons over the training samples since the last checkpoint
  std::size_t no_prediction = 0;
  std::size_t tested = 0;

  friend bool operator==(const MnistCheckpoint&, const MnistCheckpoint&) = default;
};

struct EvalResult {
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::size_t no_prediction = 0;
  std::size_t total = 0;
};

/// Inference only; the layer is never modified.
EvalResult evaluate(const Layer& layer, std::span<const CompressedVector> inputs,
                    std::span<const std::uint8_t> labels, std::size_t parallelism = 1, std::size_t workers = 1);

struct MnistResult {
  Layer layer;
  std::vector<MnistCheckpoint> checkpoints;
  EvalResult final_eval;
  std::size_t learning_events = 0;   ///< neuron updates over the run
  std::optional<std::size_t> events_to_exhaustion;  ///< learning events when capacity first hit 0
  CostReport cost;                   ///< one sample with K learners
  std::uint32_t fingerprint_before_tests = 0;
  std::uint32_t fingerprint_after_tests = 0;
};

using CheckpointSink = std::function<void(const MnistCheckpoint&)>;

/// Single-pass online training: infer then learn for each training sample;
/// every checkpoint_every samples (and at the end) the test set is scored
/// with learning disabled.
MnistResult run_mnist(const ExperimentConfig& cfg, const LabeledImageSet& train, const LabeledImageSet& test,
                      const CheckpointSink& sink = {});
MnistResult run_mnist(const ExperimentConfig& cfg, const CheckpointSink& sink = {});

// ---- Faces ---------------------------------------------------------------

struct FaceData {
  std::vector<Image> faces_train;
  std::vector<Image> faces_test;
  std::vector<Image> faces_collage;
  std::vector<Image> nonfaces_train;
  std::vector<Image> nonfaces_test;

  static FaceData load(const ExperimentConfig& cfg);
};

/// Binary detector accuracy on a balanced test set: equal numbers of faces
/// and non-faces (the smaller class size). A sample is called a face when any
/// neuron fires.
struct BinaryEval {
  double accuracy = 0.0;
  std::size_t true_pos = 0;
  std::size_t true_neg = 0;
  std::size_t per_class = 0;
};
BinaryEval evaluate_faces(const Layer& layer, std::span<const CompressedVector> faces,
                          std::span<const CompressedVector> nonfaces, std::size_t workers = 1);

struct ScanResult {
  std::vector<WindowOrigin> detections;  ///< row-major
  std::size_t windows = 0;
  RecallResult recall;
};
/// Slides a (D + K_S - 1) window over the frame and records every origin
/// where at least one neuron fires.
ScanResult scan_collage(const Layer& layer, const SpikeMap& spikes, const CollageFrame& frame,
                        std::size_t stride, std::size_t workers = 1);

struct AdaptStats {
  std::size_t windows = 0;
  std::size_t fired = 0;
  std::size_t learning_events = 0;
};
/// Self-supervised adaptation over collage windows: a window whose spikes
/// make any neuron fire is learned by up to K eligible neurons. Stops early
/// when capacity is exhausted.
AdaptStats adapt_on_collage(Layer& layer, const SpikeMap& spikes, std::size_t stride, const LearnConfig& learn,
                            Rng& rng);

struct FacesStage {
  std::string stage;
  std::size_t learned = 0;   ///< neurons that have learned at least once
  double accuracy = 0.0;
  double recall = 0.0;
  std::size_t faces_found = 0;
  std::size_t faces_total = 0;

  friend bool operator==(const FacesStage&, const FacesStage&) = default;
};

struct FacesResult {
  Layer layer;
  std::vector<FacesStage> stages;
  CollageFrame collage;
  AdaptStats adapt;
  CostReport frame_cost;
};

using StageSink = std::function<void(const FacesStage&)>;

/// faces-pretrain: labeled pretraining on pretrain_samples faces (or the
/// model file), then accuracy and recall. faces-adapt: the same, followed by
/// self-supervised adaptation on the collage and a second measurement.
/// collage-scan: measurement only.
FacesResult run_faces(const ExperimentConfig& cfg, const FaceData& data, const StageSink& sink = {});
FacesResult run_faces(const ExperimentConfig& cfg, const StageSink& sink = {});

/// Collage of cfg.frame_height x cfg.frame_width with cfg.collage_faces faces.
CollageFrame make_collage(const ExperimentConfig& cfg, std::span<const Image> faces,
                          std::span<const Image> nonfaces, Rng& rng);

// ---- Cost ----------------------------------------------------------------

/// JSON object with a "sample" report and, when cost_frame_height/width are
/// set, a "frame" report.
std::string run_cost(const ExperimentConfig& cfg, int indent = 2);

} // namespace eon
