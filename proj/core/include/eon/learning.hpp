#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "eon/compressed.hpp"
#include "eon/network.hpp"

namespace eon {

class Rng;

enum class Supervision {
  unsupervised,      ///< any neuron in the layer may learn
  labeled_cluster,   ///< only the label's cluster may learn
  self_on_fire,      ///< learn only on samples the layer fires for
};

std::string_view to_string(Supervision s) noexcept;
Supervision parse_supervision(std::string_view s);

struct LearnConfig {
  std::size_t max_learners = 1;        ///< K
  double swap_rate = 1.0;
  std::uint32_t t_learn_decay = 0;     ///< subtracted from non-learners' T_learn each sample
  Supervision supervision = Supervision::unsupervised;

  /// Throws ConfigError on K = 0 or swap_rate outside [0, 1].
  void validate() const;
  /// True when K * D^2 >= N, i.e. learning can fall behind inference.
  bool learning_may_lag(const ModelConfig& model) const noexcept;
};

struct SwapResult {
  WeightVector weights;
  std::size_t target = 0;              ///< floor(swap_rate * (W - V_mem))
  std::size_t achieved = 0;            ///< pairs actually flipped
  std::vector<std::size_t> on_pixels;  ///< in flip order
  std::vector<std::size_t> off_pixels;
};

struct LearnerReport {
  std::size_t neuron = 0;
  std::uint32_t v_mem = 0;
  std::size_t swap_target = 0;
  std::size_t swap_n = 0;
  std::vector<std::size_t> on_pixels;
  std::vector<std::size_t> off_pixels;
  std::uint32_t t_learn = 0;
  std::uint32_t t_fire = 0;

  friend bool operator==(const LearnerReport&, const LearnerReport&) = default;
};

struct LearnReport {
  std::vector<LearnerReport> learners;
  std::size_t scanned = 0;     ///< neurons examined by the eligibility scan
  bool gated = false;          ///< self_on_fire sample skipped because nothing fired

  friend bool operator==(const LearnReport&, const LearnReport&) = default;
};

/// Starts at a uniformly drawn index inside `range`, wraps around it once and
/// returns the first `max_learners` neurons with match_count >= T_learn, in
/// visit order. `scanned` (optional) receives how many neurons were visited.
std::vector<std::size_t> eligibility_scan(const Layer& layer, const CompressedVector& s, Rng& rng,
                                          std::size_t max_learners, Layer::Range range,
                                          std::size_t* scanned = nullptr);

/// Paired flips: each pair switches on a uniformly drawn ineffective-spike
/// pixel (w' = s there) and switches off a uniformly drawn ineffective weight.
/// Candidate sets are rebuilt after every pair. Stops early when no
/// ineffective spike is left.
SwapResult swap_update(const WeightVector& w, const CompressedVector& s, double swap_rate, Rng& rng);

/// T_learn += swap_n; T_fire = ceil(T_learn / 2) (activated on first event);
/// learned_count += 1.
NeuronRecord apply_homeostasis(NeuronRecord neuron, std::size_t swap_n);

/// One learning event: eligibility scan, then swap_update and homeostasis for
/// each learner, then optional T_learn decay for everyone else.
/// `label` selects the cluster in labeled_cluster mode and is ignored otherwise.
LearnReport learn_step(Layer& layer, const CompressedVector& s, std::optional<std::size_t> label,
                       const LearnConfig& cfg, Rng& rng);

} // namespace eon
