#include "eon/costmodel.hpp"

#include <json.hpp>

#include "eon/errors.hpp"

namespace eon {

void CostParams::validate() const {
  if (!(clk_period_s > 0.0) || parallelism == 0 || !(pj_per_inference_sop > 0.0) ||
      !(pj_per_learning_sop > 0.0)) {
    throw ConfigError("cost parameters must all be positive");
  }
}

namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

} // namespace

std::uint64_t inference_latency_cycles(std::size_t neurons, std::size_t parallelism,
                                       std::size_t side, std::size_t kernel_side) {
  if (parallelism == 0) {
    throw ContractViolation("P must be >= 1");
  }
  return (side + kernel_side - 1) + ceil_div(neurons, parallelism) + 1;
}

LearningLatency learning_latency_cycles(std::size_t max_learners, std::size_t side, std::size_t neurons) {
  LearningLatency out;
  out.cycles = static_cast<std::uint64_t>(max_learners) * side * side;
  out.keeps_up = out.cycles < neurons;
  return out;
}

std::uint64_t inference_sops(std::size_t neurons, std::size_t side, std::size_t filters) noexcept {
  return static_cast<std::uint64_t>(neurons) * side * side * filters;
}

std::uint64_t learning_sops(std::size_t learners, std::size_t side, std::size_t filters) noexcept {
  return static_cast<std::uint64_t>(learners) * side * side * filters;
}

EnergyEstimate energy_estimate(const SopCounts& sops, const CostParams& params) {
  EnergyEstimate e;
  e.inference_j = static_cast<double>(sops.inference) * params.pj_per_inference_sop * 1e-12;
  e.learning_j = static_cast<double>(sops.learning) * params.pj_per_learning_sop * 1e-12;
  return e;
}

CostReport sample_cost(const ModelConfig& model, std::size_t max_learners, std::size_t learners,
                       const CostParams& params) {
  params.validate();
  CostReport r;
  r.units = 1;
  r.encode_cycles = model.side + model.kernel_side - 1;
  r.inference_cycles = ceil_div(model.neurons, params.parallelism);
  r.classify_cycles = 1;
  const auto learn = learning_latency_cycles(max_learners, model.side, model.neurons);
  // Learning runs beside inference and only adds latency when it cannot keep up.
  r.learning_cycles = learners ? learn.cycles : 0;
  r.learning_keeps_up = learn.keeps_up;
  r.total_cycles = r.encode_cycles + r.inference_cycles + r.classify_cycles;
  if (learners && !learn.keeps_up) {
    r.total_cycles = std::max<std::uint64_t>(r.total_cycles, r.encode_cycles + r.learning_cycles);
  }
  r.seconds = static_cast<double>(r.total_cycles) * params.clk_period_s;
  r.fps = 1.0 / r.seconds;
  r.sops.inference = inference_sops(model.neurons, model.side, model.filters);
  r.sops.learning = learning_sops(learners, model.side, model.filters);
  r.energy = energy_estimate(r.sops, params);
  return r;
}

WindowCount window_count(const FrameSpec& frame) {
  if (frame.stride == 0 || frame.patch_side == 0) {
    throw GeometryError("patch side and stride must be positive");
  }
  if (frame.patch_side > frame.height || frame.patch_side > frame.width) {
    throw GeometryError("patch of side " + std::to_string(frame.patch_side) + " does not fit a " +
                        std::to_string(frame.height) + "x" + std::to_string(frame.width) + " frame");
  }
  return {(frame.height - frame.patch_side) / frame.stride + 1,
          (frame.width - frame.patch_side) / frame.stride + 1};
}

CostReport frame_cost(const FrameSpec& frame, const ModelConfig& model, const CostParams& params) {
  params.validate();
  const auto windows = window_count(frame);
  CostReport r;
  r.units = windows.total();
  const std::uint64_t per_patch = std::max<std::uint64_t>(1, ceil_div(model.neurons, params.parallelism));
  r.inference_cycles = per_patch * windows.total();
  r.encode_cycles = static_cast<std::uint64_t>(windows.rows) * frame.patch_side;
  r.classify_cycles = 1;
  r.total_cycles = r.inference_cycles + r.encode_cycles + r.classify_cycles;
  r.seconds = static_cast<double>(r.total_cycles) * params.clk_period_s;
  r.fps = 1.0 / r.seconds;
  r.sops.inference = windows.total() * inference_sops(model.neurons, model.side, model.filters);
  r.energy = energy_estimate(r.sops, params);
  return r;
}

std::string to_json(const CostReport& report, int indent) {
  nlohmann::ordered_json j;
  j["units"] = report.units;
  j["cycles"] = {{"encode", report.encode_cycles},
                 {"inference", report.inference_cycles},
                 {"classify", report.classify_cycles},
                 {"learning", report.learning_cycles},
                 {"total", report.total_cycles}};
  j["seconds"] = report.seconds;
  j["fps"] = report.fps;
  j["sops"] = {{"inference", report.sops.inference}, {"learning", report.sops.learning}};
  j["energy_j"] = {{"inference", report.energy.inference_j},
                   {"learning", report.energy.learning_j},
                   {"total", report.energy.total_j()}};
  j["learning_overhead"] = report.energy.learning_overhead();
  j["learning_keeps_up"] = report.learning_keeps_up;
  return j.dump(indent);
}

} // namespace eon
