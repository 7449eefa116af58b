#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "eon/compressed.hpp"
#include "eon/config.hpp"

namespace eon {

class Rng;

/// One integrate-and-fire neuron. t_fire is empty (infinite) until the
/// neuron first learns; afterwards it is ceil(t_learn / 2).
struct NeuronRecord {
  WeightVector weights;
  std::uint32_t t_learn = 0;
  std::optional<std::uint32_t> t_fire;
  std::uint32_t learned_count = 0;

  friend bool operator==(const NeuronRecord&, const NeuronRecord&) = default;
};

std::uint32_t fire_threshold_for(std::uint32_t t_learn) noexcept;

/// N neurons plus a one-hot copy of every weight vector for the popcount
/// kernel. Neurons are only modified through replace(), which keeps both
/// views in step.
class Layer {
public:
  Layer() = default;
  /// Fresh layer: random weights, T_learn = T_learn[0], T_fire inactive.
  Layer(const ModelConfig& cfg, Rng& rng);
  Layer(const ModelConfig& cfg, std::vector<NeuronRecord> neurons);

  const ModelConfig& config() const noexcept { return cfg_; }
  std::size_t size() const noexcept { return neurons_.size(); }
  const NeuronRecord& neuron(std::size_t n) const { return neurons_.at(n); }
  std::span<const NeuronRecord> neurons() const noexcept { return neurons_; }

  void replace(std::size_t n, NeuronRecord rec);

  /// Updates thresholds only; weights untouched.
  void set_thresholds(std::size_t n, std::uint32_t t_learn, std::optional<std::uint32_t> t_fire);

  std::span<const std::uint64_t> plane(std::size_t n) const noexcept {
    return std::span(planes_).subspan(n * words_, words_);
  }
  std::size_t words_per_neuron() const noexcept { return words_; }

  /// Neurons of cluster c: [first, first + size). Requires clusters > 0.
  struct Range {
    std::size_t first = 0;
    std::size_t count = 0;
  };
  Range cluster_range(std::size_t c) const;
  Range all() const noexcept { return {0, neurons_.size()}; }
  std::size_t cluster_of(std::size_t n) const;

  /// Neurons that have never learned.
  std::size_t capacity() const noexcept;

  friend bool operator==(const Layer& a, const Layer& b) {
    return a.cfg_ == b.cfg_ && a.neurons_ == b.neurons_;
  }

private:
  void check_record(const NeuronRecord& rec) const;

  ModelConfig cfg_;
  std::vector<NeuronRecord> neurons_;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> planes_;
};

struct InferenceResult {
  std::vector<std::uint32_t> v_mem;           ///< per neuron
  std::vector<std::uint32_t> fired;           ///< ascending neuron ids
  std::vector<std::uint32_t> cluster_fired;   ///< fired count per cluster
  std::vector<std::uint64_t> cluster_v_mem;   ///< summed V_mem per cluster
  std::size_t learn_eligible = 0;             ///< neurons with V_mem >= T_learn
  std::uint64_t cycles = 0;                   ///< ceil(N / P) IF-unit cycles

  friend bool operator==(const InferenceResult&, const InferenceResult&) = default;
};

/// Evaluates every neuron against s. P is the number of IF units: neuron n is
/// handled by lane n mod P at step n / P. The result does not depend on P
/// except for `cycles`.
InferenceResult infer(const Layer& layer, const CompressedVector& s, std::size_t parallelism = 1);
InferenceResult infer(const Layer& layer, const ExpandedVector& s, std::size_t parallelism = 1);

/// True if at least one neuron fires. Stops at the first firing neuron.
bool any_fires(const Layer& layer, std::span<const std::uint64_t> expanded_spikes);

/// Cluster vote: most fired neurons wins; ties go to the larger summed
/// V_mem, then to the lower class index. Empty if nothing fired.
std::optional<std::size_t> classify(const InferenceResult& result, const Layer& layer);

} // namespace eon
