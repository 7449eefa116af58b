#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "eon/config.hpp"

namespace eon {

/// Clock and per-operation energy constants. Defaults are the FPGA clock
/// (10 ns) and the 22 nm per-SOP energies.
struct CostParams {
  double clk_period_s = 10e-9;
  std::size_t parallelism = 1;        ///< P: IF units
  double pj_per_inference_sop = 0.09;
  double pj_per_learning_sop = 1.5;

  /// Throws ConfigError unless every field is positive.
  void validate() const;
};

/// Per-sample inference latency: encoder fill (D + K_S - 1) + ceil(N / P)
/// time-multiplexed IF updates + 1 classifier cycle.
std::uint64_t inference_latency_cycles(std::size_t neurons, std::size_t parallelism,
                                       std::size_t side, std::size_t kernel_side);

struct LearningLatency {
  std::uint64_t cycles = 0;  ///< worst case K * D^2
  bool keeps_up = false;     ///< K * D^2 < N
};
LearningLatency learning_latency_cycles(std::size_t max_learners, std::size_t side, std::size_t neurons);

/// One SOP is the evaluation of one expanded synapse position (pixel, filter).
std::uint64_t inference_sops(std::size_t neurons, std::size_t side, std::size_t filters) noexcept;
std::uint64_t learning_sops(std::size_t learners, std::size_t side, std::size_t filters) noexcept;

struct SopCounts {
  std::uint64_t inference = 0;
  std::uint64_t learning = 0;
};

struct EnergyEstimate {
  double inference_j = 0.0;
  double learning_j = 0.0;
  double total_j() const noexcept { return inference_j + learning_j; }
  /// (E_learn_total - E_inf) / E_inf where E_learn_total = inference + learning.
  double learning_overhead() const noexcept {
    return inference_j > 0.0 ? learning_j / inference_j : 0.0;
  }
};

EnergyEstimate energy_estimate(const SopCounts& sops, const CostParams& params);

struct CostReport {
  std::uint64_t encode_cycles = 0;
  std::uint64_t inference_cycles = 0;
  std::uint64_t classify_cycles = 0;
  std::uint64_t learning_cycles = 0;
  std::uint64_t total_cycles = 0;
  std::uint64_t units = 0;            ///< samples or patches covered by the report
  double seconds = 0.0;               ///< total_cycles * clk_period
  double fps = 0.0;                   ///< 1 / seconds
  SopCounts sops;
  EnergyEstimate energy;
  bool learning_keeps_up = true;
};

/// Cost of one MNIST-style sample: inference latency, optional learners, energy.
CostReport sample_cost(const ModelConfig& model, std::size_t max_learners, std::size_t learners,
                       const CostParams& params);

struct FrameSpec {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t patch_side = 32;
  std::size_t stride = 1;
};

/// Number of valid window origins per axis and in total.
struct WindowCount {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t total() const noexcept { return rows * cols; }
};
/// Throws GeometryError when the patch does not fit or stride is 0.
WindowCount window_count(const FrameSpec& frame);

/// Sliding-window frame cost: every patch takes max(1, ceil(N / P)) cycles;
/// each row of patches additionally pays one encoder fill of patch_side
/// cycles, after which the shift register is reused along the row.
CostReport frame_cost(const FrameSpec& frame, const ModelConfig& model, const CostParams& params);

std::string to_json(const CostReport& report, int indent = 2);

} // namespace eon
