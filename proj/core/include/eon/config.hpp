#pragma once

#include <cstddef>
#include <cstdint>

namespace eon {

/// Structural parameters of the encoder and IF layer.
struct ModelConfig {
  std::size_t side = 10;          ///< D: spike/weight vectors are D x D
  std::size_t kernel_side = 5;    ///< K_S
  std::uint8_t filters = 8;       ///< F
  std::size_t neurons = 2000;     ///< N
  std::size_t active = 64;        ///< W: active synapses per neuron
  std::uint32_t t_learn0 = 6;     ///< initial learning threshold
  std::size_t clusters = 10;      ///< 0 disables classification

  std::size_t pixels() const noexcept { return side * side; }
  std::size_t patch_side() const noexcept { return side + kernel_side - 1; }

  /// Throws ConfigError on W > D^2, F outside [1, 15], N = 0, T_learn[0] > W,
  /// or N not divisible by the cluster count.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

} // namespace eon
