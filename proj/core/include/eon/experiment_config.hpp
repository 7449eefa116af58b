#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "eon/config.hpp"
#include "eon/costmodel.hpp"
#include "eon/learning.hpp"

namespace eon {

enum class Mode { mnist_train, mnist_eval, faces_pretrain, faces_adapt, collage_scan, cost };

std::string_view to_string(Mode m) noexcept;
Mode parse_mode(std::string_view s);

/// Everything one experiment run needs. Loaded from a key = value text file
/// ('#' comments, optional quotes, [section] lines ignored) and overridable
/// key by key with set().
struct ExperimentConfig {
  Mode mode = Mode::mnist_train;
  std::uint64_t seed = 1;
  ModelConfig model;
  LearnConfig learn{1, 1.0, 0, Supervision::labeled_cluster};
  CostParams cost;
  std::int32_t theta = 0;
  std::filesystem::path filter_bank;  ///< empty: built-in oriented edge bank
  std::size_t workers = 1;            ///< evaluation fan-out; training is always sequential

  // MNIST
  std::filesystem::path train_images;
  std::filesystem::path train_labels;
  std::filesystem::path test_images;
  std::filesystem::path test_labels;
  std::size_t train_limit = 0;         ///< 0: whole file
  std::size_t test_limit = 0;
  std::size_t checkpoint_every = 500;
  std::size_t checkpoint_test_limit = 0;  ///< test samples per intermediate checkpoint (0: all)

  // Faces and collage
  std::filesystem::path faces_train;
  std::filesystem::path faces_test;
  std::filesystem::path faces_collage;   ///< collage faces; empty: training faces not used for pretraining
  std::filesystem::path nonfaces_train;
  std::filesystem::path nonfaces_test;
  std::filesystem::path model_path;     ///< layer to load instead of training
  std::size_t pretrain_samples = 200;
  std::size_t frame_height = 1080;
  std::size_t frame_width = 1920;
  std::size_t collage_faces = 100;
  double nonface_fill = 1.0;
  std::size_t scan_stride = 1;
  std::size_t adapt_stride = 4;

  // Cost mode: optional sliding-window frame
  std::size_t cost_frame_height = 0;
  std::size_t cost_frame_width = 0;
  std::size_t cost_patch = 32;
  std::size_t cost_stride = 1;
  std::size_t cost_learners = 1;

  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig load(const std::filesystem::path& path);

  /// Applies one key = value assignment. Throws ConfigError on unknown keys
  /// or unparsable values.
  void set(std::string_view key, std::string_view value);
  /// "key=value" form used by --set.
  void set_assignment(std::string_view assignment);

  /// Parameter sanity (W <= D^2, K >= 1, F <= 15, ...) and, when
  /// `check_files` is set, existence of the files the mode reads.
  void validate(bool check_files = true) const;

  std::string describe() const;
};

} // namespace eon
