#include "eon/learning.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eon/errors.hpp"
#include "eon/rng.hpp"

namespace eon {

std::string_view to_string(Supervision s) noexcept {
  switch (s) {
  case Supervision::unsupervised:
    return "unsupervised";
  case Supervision::labeled_cluster:
    return "labeled-cluster";
  case Supervision::self_on_fire:
    return "self-supervised-on-fire";
  }
  return "unknown";
}

Supervision parse_supervision(std::string_view s) {
  if (s == "unsupervised") {
    return Supervision::unsupervised;
  }
  if (s == "labeled-cluster") {
    return Supervision::labeled_cluster;
  }
  if (s == "self-supervised-on-fire") {
    return Supervision::self_on_fire;
  }
  throw ConfigError("unknown supervision mode '" + std::string(s) + "'");
}

void LearnConfig::validate() const {
  if (max_learners == 0) {
    throw ConfigError("K must be >= 1");
  }
  if (!(swap_rate >= 0.0 && swap_rate <= 1.0)) {
    throw ConfigError("swap_rate must lie in [0, 1]");
  }
}

bool LearnConfig::learning_may_lag(const ModelConfig& model) const noexcept {
  return max_learners * model.pixels() >= model.neurons;
}

std::vector<std::size_t> eligibility_scan(const Layer& layer, const CompressedVector& s, Rng& rng,
                                          std::size_t max_learners, Layer::Range range,
                                          std::size_t* scanned) {
  if (range.count == 0) {
    throw ContractViolation("eligibility_scan: empty neuron range");
  }
  if (range.first + range.count > layer.size()) {
    throw ContractViolation("eligibility_scan: range exceeds layer");
  }
  if (s.size() != layer.config().pixels() || s.filters() != layer.config().filters) {
    throw DimensionMismatch("eligibility_scan: spike vector does not match layer geometry");
  }
  const auto spikes = expand(s);
  const std::size_t start = rng.uniform(range.count);
  std::vector<std::size_t> out;
  std::size_t visited = 0;
  for (std::size_t k = 0; k < range.count && out.size() < max_learners; ++k) {
    const std::size_t n = range.first + (start + k) % range.count;
    ++visited;
    if (and_popcount(spikes.words(), layer.plane(n)) >= layer.neuron(n).t_learn) {
      out.push_back(n);
    }
  }
  if (scanned) {
    *scanned = visited;
  }
  return out;
}

SwapResult swap_update(const WeightVector& w, const CompressedVector& s, double swap_rate, Rng& rng) {
  if (!(swap_rate >= 0.0 && swap_rate <= 1.0)) {
    throw ContractViolation("swap_rate must lie in [0, 1]");
  }
  const std::size_t v_mem = match_count(s, w);
  const std::size_t missing = w.active() - v_mem;
  // The epsilon keeps products such as 0.29 * 100 from flooring to 28.
  const auto target = static_cast<std::size_t>(std::floor(swap_rate * static_cast<double>(missing) + 1e-9));

  SwapResult out;
  out.target = target;
  CompressedVector cur = w.vector();
  std::vector<std::size_t> on_candidates;
  std::vector<std::size_t> off_candidates;
  for (std::size_t k = 0; k < target; ++k) {
    on_candidates.clear();
    off_candidates.clear();
    for (std::size_t i = 0; i < cur.size(); ++i) {
      if (s[i] != 0 && cur[i] == 0) {
        on_candidates.push_back(i);
      } else if (cur[i] != 0 && cur[i] != s[i]) {
        off_candidates.push_back(i);
      }
    }
    if (on_candidates.empty() || off_candidates.empty()) {
      break;
    }
    const std::size_t on = on_candidates[rng.uniform(on_candidates.size())];
    const std::size_t off = off_candidates[rng.uniform(off_candidates.size())];
    cur.set(on, s[on]);
    cur.set(off, 0);
    out.on_pixels.push_back(on);
    out.off_pixels.push_back(off);
  }
  out.achieved = out.on_pixels.size();
  out.weights = WeightVector(std::move(cur), w.active());
  return out;
}

NeuronRecord apply_homeostasis(NeuronRecord neuron, std::size_t swap_n) {
  neuron.t_learn += static_cast<std::uint32_t>(swap_n);
  neuron.t_fire = fire_threshold_for(neuron.t_learn);
  neuron.learned_count += 1;
  return neuron;
}

namespace {

void decay_thresholds(Layer& layer, const std::vector<std::size_t>& learners, std::uint32_t decay) {
  if (decay == 0) {
    return;
  }
  const std::uint32_t floor_t = layer.config().t_learn0;
  for (std::size_t n = 0; n < layer.size(); ++n) {
    if (std::find(learners.begin(), learners.end(), n) != learners.end()) {
      continue;
    }
    const auto& rec = layer.neuron(n);
    const std::uint32_t t = rec.t_learn > floor_t + decay ? rec.t_learn - decay : floor_t;
    if (t != rec.t_learn) {
      layer.set_thresholds(n, t, rec.t_fire ? std::optional(fire_threshold_for(t)) : std::nullopt);
    }
  }
}

} // namespace

LearnReport learn_step(Layer& layer, const CompressedVector& s, std::optional<std::size_t> label,
                       const LearnConfig& cfg, Rng& rng) {
  cfg.validate();
  if (s.size() != layer.config().pixels() || s.filters() != layer.config().filters) {
    throw DimensionMismatch("learn_step: spike vector does not match layer geometry");
  }
  LearnReport report;
  if (cfg.supervision == Supervision::self_on_fire && !any_fires(layer, expand(s).words())) {
    report.gated = true;
    decay_thresholds(layer, {}, cfg.t_learn_decay);
    return report;
  }

  Layer::Range range = layer.all();
  if (cfg.supervision == Supervision::labeled_cluster) {
    if (!label) {
      throw ContractViolation("labeled-cluster learning needs a label");
    }
    range = layer.cluster_range(*label);
  }

  const auto learners = eligibility_scan(layer, s, rng, cfg.max_learners, range, &report.scanned);
  for (const auto n : learners) {
    NeuronRecord rec = layer.neuron(n);
    const auto v_mem = static_cast<std::uint32_t>(match_count(s, rec.weights));
    auto swapped = swap_update(rec.weights, s, cfg.swap_rate, rng);
    rec.weights = std::move(swapped.weights);
    rec = apply_homeostasis(std::move(rec), swapped.achieved);

    LearnerReport lr;
    lr.neuron = n;
    lr.v_mem = v_mem;
    lr.swap_target = swapped.target;
    lr.swap_n = swapped.achieved;
    lr.on_pixels = std::move(swapped.on_pixels);
    lr.off_pixels = std::move(swapped.off_pixels);
    lr.t_learn = rec.t_learn;
    lr.t_fire = *rec.t_fire;
    layer.replace(n, std::move(rec));
    report.learners.push_back(std::move(lr));
  }
  decay_thresholds(layer, learners, cfg.t_learn_decay);
  return report;
}

} // namespace eon
