#include "eon/network.hpp"

#include <string>

#include "eon/errors.hpp"
#include "eon/rng.hpp"

namespace eon {

void ModelConfig::validate() const {
  if (side == 0 || kernel_side == 0) {
    throw ConfigError("D and K_S must be positive");
  }
  if (filters == 0 || filters > kMaxFilters) {
    throw ConfigError("F must be in [1, 15], got " + std::to_string(filters));
  }
  if (neurons == 0) {
    throw ConfigError("N must be positive");
  }
  if (active == 0 || active > pixels()) {
    throw ConfigError("W must be in [1, D^2]; W = " + std::to_string(active) +
                      ", D^2 = " + std::to_string(pixels()));
  }
  if (t_learn0 > active) {
    throw ConfigError("T_learn[0] cannot exceed W");
  }
  if (clusters > 0 && neurons % clusters != 0) {
    throw ConfigError("N = " + std::to_string(neurons) + " is not divisible by " +
                      std::to_string(clusters) + " clusters");
  }
}

std::uint32_t fire_threshold_for(std::uint32_t t_learn) noexcept {
  return (t_learn + 1) / 2;
}

Layer::Layer(const ModelConfig& cfg, Rng& rng) : cfg_(cfg) {
  cfg_.validate();
  words_ = ExpandedVector::word_count(cfg_.pixels(), cfg_.filters);
  neurons_.reserve(cfg_.neurons);
  planes_.assign(cfg_.neurons * words_, 0);
  for (std::size_t n = 0; n < cfg_.neurons; ++n) {
    NeuronRecord rec;
    rec.weights = random_weights(cfg_.side, cfg_.filters, cfg_.active, rng);
    rec.t_learn = cfg_.t_learn0;
    neurons_.push_back(std::move(rec));
    expand_into(neurons_.back().weights.vector(), std::span(planes_).subspan(n * words_, words_));
  }
}

Layer::Layer(const ModelConfig& cfg, std::vector<NeuronRecord> neurons)
    : cfg_(cfg), neurons_(std::move(neurons)) {
  cfg_.validate();
  if (neurons_.size() != cfg_.neurons) {
    throw ConfigError("layer expects " + std::to_string(cfg_.neurons) + " neurons, got " +
                      std::to_string(neurons_.size()));
  }
  words_ = ExpandedVector::word_count(cfg_.pixels(), cfg_.filters);
  planes_.assign(cfg_.neurons * words_, 0);
  for (std::size_t n = 0; n < neurons_.size(); ++n) {
    check_record(neurons_[n]);
    expand_into(neurons_[n].weights.vector(), std::span(planes_).subspan(n * words_, words_));
  }
}

void Layer::check_record(const NeuronRecord& rec) const {
  const auto& w = rec.weights;
  if (w.side() != cfg_.side || w.filters() != cfg_.filters || w.active() != cfg_.active ||
      !w.invariant_holds()) {
    throw ContractViolation("neuron weights do not match the layer configuration");
  }
  if (rec.t_learn < cfg_.t_learn0 || rec.t_learn > cfg_.active) {
    throw ContractViolation("T_learn " + std::to_string(rec.t_learn) + " outside [T_learn[0], W]");
  }
}

void Layer::replace(std::size_t n, NeuronRecord rec) {
  if (n >= neurons_.size()) {
    throw ContractViolation("neuron index out of range");
  }
  check_record(rec);
  neurons_[n] = std::move(rec);
  expand_into(neurons_[n].weights.vector(), std::span(planes_).subspan(n * words_, words_));
}

void Layer::set_thresholds(std::size_t n, std::uint32_t t_learn, std::optional<std::uint32_t> t_fire) {
  if (n >= neurons_.size()) {
    throw ContractViolation("neuron index out of range");
  }
  if (t_learn < cfg_.t_learn0 || t_learn > cfg_.active) {
    throw ContractViolation("T_learn outside [T_learn[0], W]");
  }
  neurons_[n].t_learn = t_learn;
  neurons_[n].t_fire = t_fire;
}

Layer::Range Layer::cluster_range(std::size_t c) const {
  if (cfg_.clusters == 0 || c >= cfg_.clusters) {
    throw ContractViolation("cluster " + std::to_string(c) + " does not exist");
  }
  const std::size_t per = neurons_.size() / cfg_.clusters;
  return {c * per, per};
}

std::size_t Layer::cluster_of(std::size_t n) const {
  if (cfg_.clusters == 0) {
    throw ContractViolation("classification disabled");
  }
  return n / (neurons_.size() / cfg_.clusters);
}

std::size_t Layer::capacity() const noexcept {
  std::size_t n = 0;
  for (const auto& rec : neurons_) {
    n += (rec.learned_count == 0);
  }
  return n;
}

InferenceResult infer(const Layer& layer, const ExpandedVector& s, std::size_t parallelism) {
  const auto& cfg = layer.config();
  if (s.pixels() != cfg.pixels() || s.filters() != cfg.filters) {
    throw DimensionMismatch("spike vector does not match layer geometry");
  }
  if (parallelism == 0) {
    throw ContractViolation("parallelism must be >= 1");
  }
  const std::size_t n_total = layer.size();
  InferenceResult r;
  r.v_mem.assign(n_total, 0);
  const std::size_t steps = (n_total + parallelism - 1) / parallelism;
  r.cycles = steps;
  const auto spikes = s.words();
  for (std::size_t step = 0; step < steps; ++step) {
    for (std::size_t lane = 0; lane < parallelism; ++lane) {
      const std::size_t n = step * parallelism + lane;
      if (n >= n_total) {
        break;
      }
      r.v_mem[n] = static_cast<std::uint32_t>(and_popcount(spikes, layer.plane(n)));
    }
  }

  const std::size_t clusters = cfg.clusters;
  r.cluster_fired.assign(clusters, 0);
  r.cluster_v_mem.assign(clusters, 0);
  const std::size_t per = clusters ? n_total / clusters : 0;
  for (std::size_t n = 0; n < n_total; ++n) {
    const auto& rec = layer.neuron(n);
    const auto v = r.v_mem[n];
    const bool fires = rec.t_fire && v >= *rec.t_fire;
    if (fires) {
      r.fired.push_back(static_cast<std::uint32_t>(n));
    }
    r.learn_eligible += (v >= rec.t_learn);
    if (clusters) {
      r.cluster_fired[n / per] += fires;
      r.cluster_v_mem[n / per] += v;
    }
  }
  return r;
}

InferenceResult infer(const Layer& layer, const CompressedVector& s, std::size_t parallelism) {
  if (s.size() != layer.config().pixels() || s.filters() != layer.config().filters) {
    throw DimensionMismatch("spike vector does not match layer geometry");
  }
  return infer(layer, expand(s), parallelism);
}

bool any_fires(const Layer& layer, std::span<const std::uint64_t> expanded_spikes) {
  if (expanded_spikes.size() != layer.words_per_neuron()) {
    throw DimensionMismatch("any_fires: spike words do not match layer geometry");
  }
  for (std::size_t n = 0; n < layer.size(); ++n) {
    const auto& t = layer.neuron(n).t_fire;
    if (t && and_popcount(expanded_spikes, layer.plane(n)) >= *t) {
      return true;
    }
  }
  return false;
}

std::optional<std::size_t> classify(const InferenceResult& result, const Layer& layer) {
  const std::size_t clusters = layer.config().clusters;
  if (clusters == 0) {
    throw ContractViolation("classify: classification disabled (0 clusters)");
  }
  if (result.cluster_fired.size() != clusters) {
    throw DimensionMismatch("classify: result was produced by a different layer");
  }
  if (result.fired.empty()) {
    return std::nullopt;
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < clusters; ++c) {
    const auto fc = result.cluster_fired[c];
    const auto fb = result.cluster_fired[best];
    if (fc > fb || (fc == fb && result.cluster_v_mem[c] > result.cluster_v_mem[best])) {
      best = c;
    }
  }
  return best;
}

} // namespace eon
