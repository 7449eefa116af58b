#include "eon/experiment.hpp"

#include <algorithm>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "eon/errors.hpp"
#include "eon/learning.hpp"
#include "eon/model_file.hpp"
#include "eon/rng.hpp"

namespace eon {

namespace {

// Splits [0, count) into contiguous chunks, one per worker. Each index is
// handled exactly once and results are written by index, so the outcome does
// not depend on the worker count.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      fn(i);
    }
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) {
        fn(i);
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
}

constexpr std::uint64_t kCollageStream = 0xC0'11A6'E5EEDull;
constexpr std::uint64_t kSplitStream = 0x5B'117F'ACE5ull;

std::vector<CompressedVector> take(std::span<const CompressedVector> v, std::size_t limit) {
  const std::size_t n = limit == 0 ? v.size() : std::min(limit, v.size());
  return {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n)};
}

} // namespace

FilterBank make_filter_bank(const ExperimentConfig& cfg) {
  FilterBank bank = cfg.filter_bank.empty()
                        ? FilterBank::oriented_edges(cfg.model.filters, cfg.model.kernel_side, cfg.theta)
                        : FilterBank::load(cfg.filter_bank, cfg.theta);
  if (bank.filters() != cfg.model.filters || bank.kernel_side() != cfg.model.kernel_side) {
    throw ConfigError("filter bank shape does not match F / K_S");
  }
  return bank;
}

Image fit_patch(const Image& img, std::size_t patch_side) {
  if (img.width == patch_side && img.height == patch_side) {
    return img;
  }
  if (img.width == 2 * patch_side && img.height == 2 * patch_side) {
    return downscale_2x2(img);
  }
  throw DimensionMismatch("image is " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                          ", encoder expects " + std::to_string(patch_side) + " square (or twice that)");
}

std::vector<CompressedVector> encode_all(std::span<const Image> images, const FilterBank& bank,
                                         std::size_t patch_side, std::size_t workers) {
  std::vector<CompressedVector> out(images.size());
  parallel_for(images.size(), workers, [&](std::size_t i) { out[i] = encode(fit_patch(images[i], patch_side), bank); });
  return out;
}

EvalResult evaluate(const Layer& layer, std::span<const CompressedVector> inputs,
                    std::span<const std::uint8_t> labels, std::size_t parallelism, std::size_t workers) {
  if (inputs.size() != labels.size()) {
    throw DimensionMismatch("evaluate: inputs and labels differ in length");
  }
  std::vector<std::int16_t> predicted(inputs.size(), -1);
  parallel_for(inputs.size(), workers, [&](std::size_t i) {
    const auto cls = classify(infer(layer, inputs[i], parallelism), layer);
    if (cls) {
      predicted[i] = static_cast<std::int16_t>(*cls);
    }
  });
  EvalResult r;
  r.total = inputs.size();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (predicted[i] < 0) {
      ++r.no_prediction;
    } else if (predicted[i] == labels[i]) {
      ++r.correct;
    }
  }
  r.accuracy = r.total ? static_cast<double>(r.correct) / static_cast<double>(r.total) : 0.0;
  return r;
}

MnistResult run_mnist(const ExperimentConfig& cfg, const LabeledImageSet& train, const LabeledImageSet& test,
                      const CheckpointSink& sink) {
  cfg.validate(false);
  if (cfg.learn.supervision == Supervision::labeled_cluster) {
    for (const auto l : train.labels) {
      if (l >= cfg.model.clusters) {
        throw ConfigError("label " + std::to_string(l) + " has no cluster");
      }
    }
  }
  const FilterBank bank = make_filter_bank(cfg);
  const std::size_t patch = cfg.model.patch_side();
  const auto test_inputs = encode_all(test.images, bank, patch, cfg.workers);
  const auto checkpoint_inputs = take(test_inputs, cfg.checkpoint_test_limit);
  const std::span<const std::uint8_t> checkpoint_labels(test.labels.data(), checkpoint_inputs.size());

  Rng rng(cfg.seed);
  MnistResult result;
  result.layer = Layer(cfg.model, rng);
  Layer& layer = result.layer;

  std::size_t learners_max = 0;
  std::uint64_t eligible_sum = 0;
  std::size_t since_checkpoint = 0;

  const auto checkpoint = [&](std::size_t samples, bool final) {
    MnistCheckpoint cp;
    cp.sample_count = samples;
    cp.capacity = layer.capacity();
    cp.eligible = since_checkpoint ? static_cast<double>(eligible_sum) / static_cast<double>(since_checkpoint) : 0.0;
    const std::uint32_t before = layer_fingerprint(layer);
    const EvalResult ev = final ? evaluate(layer, test_inputs, test.labels, cfg.cost.parallelism, cfg.workers)
                                : evaluate(layer, checkpoint_inputs, checkpoint_labels, cfg.cost.parallelism,
                                           cfg.workers);
    const std::uint32_t after = layer_fingerprint(layer);
    if (before != after) {
      throw Error("layer changed during a learning-disabled test pass");
    }
    result.fingerprint_before_tests = before;
    result.fingerprint_after_tests = after;
    cp.accuracy = ev.accuracy;
    cp.no_prediction = ev.no_prediction;
    cp.tested = ev.total;
    if (final) {
      result.final_eval = ev;
    }
    result.checkpoints.push_back(cp);
    if (sink) {
      sink(cp);
    }
    eligible_sum = 0;
    since_checkpoint = 0;
  };

  checkpoint(0, train.size() == 0);
  for (std::size_t i = 0; i < train.size(); ++i) {
    const CompressedVector s = encode(fit_patch(train.images[i], patch), bank);
    eligible_sum += infer(layer, s, cfg.cost.parallelism).learn_eligible;
    ++since_checkpoint;
    const auto report = learn_step(layer, s, std::optional<std::size_t>(train.labels[i]), cfg.learn, rng);
    result.learning_events += report.learners.size();
    if (!report.learners.empty() && !result.events_to_exhaustion && layer.capacity() == 0) {
      result.events_to_exhaustion = result.learning_events;
    }
    learners_max = std::max(learners_max, report.learners.size());

    const std::size_t done = i + 1;
    const bool last = done == train.size();
    if (last || (cfg.checkpoint_every && done % cfg.checkpoint_every == 0)) {
      checkpoint(done, last);
    }
  }
  result.cost = sample_cost(cfg.model, cfg.learn.max_learners, learners_max, cfg.cost);
  return result;
}

MnistResult run_mnist(const ExperimentConfig& cfg, const CheckpointSink& sink) {
  cfg.validate(true);
  const auto train = load_idx(cfg.train_images, cfg.train_labels, cfg.train_limit);
  const auto test = load_idx(cfg.test_images, cfg.test_labels, cfg.test_limit);
  return run_mnist(cfg, train, test, sink);
}

FaceData FaceData::load(const ExperimentConfig& cfg) {
  FaceData d;
  const auto maybe = [](const std::filesystem::path& p) {
    return p.empty() ? std::vector<Image>{} : load_pgm_dir(p);
  };
  d.faces_train = maybe(cfg.faces_train);
  d.faces_test = maybe(cfg.faces_test);
  d.faces_collage = maybe(cfg.faces_collage);
  d.nonfaces_train = maybe(cfg.nonfaces_train);
  d.nonfaces_test = maybe(cfg.nonfaces_test);
  return d;
}

BinaryEval evaluate_faces(const Layer& layer, std::span<const CompressedVector> faces,
                          std::span<const CompressedVector> nonfaces, std::size_t workers) {
  BinaryEval r;
  r.per_class = std::min(faces.size(), nonfaces.size());
  if (r.per_class == 0) {
    return r;
  }
  std::vector<std::uint8_t> hit(2 * r.per_class, 0);
  parallel_for(hit.size(), workers, [&](std::size_t i) {
    const auto& s = i < r.per_class ? faces[i] : nonfaces[i - r.per_class];
    hit[i] = any_fires(layer, expand(s).words()) ? 1 : 0;
  });
  for (std::size_t i = 0; i < r.per_class; ++i) {
    r.true_pos += hit[i];
    r.true_neg += 1 - hit[r.per_class + i];
  }
  r.accuracy = static_cast<double>(r.true_pos + r.true_neg) / static_cast<double>(2 * r.per_class);
  return r;
}

ScanResult scan_collage(const Layer& layer, const SpikeMap& spikes, const CollageFrame& frame,
                        std::size_t stride, std::size_t workers) {
  const auto& m = layer.config();
  const WindowGrid grid(frame.canvas.height, frame.canvas.width, m.patch_side(), stride);
  std::vector<std::vector<WindowOrigin>> per_row(grid.rows());
  parallel_for(grid.rows(), workers, [&](std::size_t row) {
    std::vector<std::uint64_t> buf(layer.words_per_neuron());
    for (std::size_t col = 0; col < grid.cols(); ++col) {
      const auto o = grid[row * grid.cols() + col];
      spikes.window_expanded(o.x, o.y, m.side, buf);
      if (any_fires(layer, buf)) {
        per_row[row].push_back(o);
      }
    }
  });
  ScanResult r;
  r.windows = grid.size();
  for (auto& row : per_row) {
    r.detections.insert(r.detections.end(), row.begin(), row.end());
  }
  r.recall = recall_on_manifest(r.detections, frame.manifest, frame.tile_side);
  return r;
}

AdaptStats adapt_on_collage(Layer& layer, const SpikeMap& spikes, std::size_t stride, const LearnConfig& learn,
                            Rng& rng) {
  const auto& m = layer.config();
  // The spike map is (H - K_S + 1) wide, so D-sized windows over it line up
  // one to one with patch-sized windows over the frame.
  const std::size_t frame_h = spikes.height() + m.kernel_side - 1;
  const std::size_t frame_w = spikes.width() + m.kernel_side - 1;
  const WindowGrid grid(frame_h, frame_w, m.patch_side(), stride);

  LearnConfig self = learn;
  self.supervision = Supervision::self_on_fire;
  AdaptStats stats;
  std::size_t capacity = layer.capacity();
  std::vector<std::uint64_t> buf(layer.words_per_neuron());
  for (std::size_t k = 0; k < grid.size() && capacity > 0; ++k) {
    const auto o = grid[k];
    ++stats.windows;
    spikes.window_expanded(o.x, o.y, m.side, buf);
    if (!any_fires(layer, buf)) {
      continue;
    }
    ++stats.fired;
    const auto report = learn_step(layer, spikes.window(o.x, o.y, m.side), std::nullopt, self, rng);
    stats.learning_events += report.learners.size();
    if (!report.learners.empty()) {
      capacity = layer.capacity();
    }
  }
  return stats;
}

CollageFrame make_collage(const ExperimentConfig& cfg, std::span<const Image> faces,
                          std::span<const Image> nonfaces, Rng& rng) {
  CollageSpec spec;
  spec.height = cfg.frame_height;
  spec.width = cfg.frame_width;
  spec.faces = cfg.collage_faces;
  spec.tile_side = cfg.model.patch_side();
  spec.nonface_fill = cfg.nonface_fill;
  return build_collage(faces, nonfaces, spec, rng);
}

FacesResult run_faces(const ExperimentConfig& cfg, const FaceData& data, const StageSink& sink) {
  cfg.validate(false);
  if (cfg.model.clusters != 1) {
    throw ConfigError("face experiments need clusters = 1");
  }
  const FilterBank bank = make_filter_bank(cfg);
  const std::size_t patch = cfg.model.patch_side();

  Rng rng(cfg.seed);
  FacesResult result;
  if (!cfg.model_path.empty()) {
    result.layer = load_model(cfg.model_path, cfg.model);
  } else {
    result.layer = Layer(cfg.model, rng);
    if (cfg.mode == Mode::collage_scan) {
      throw ConfigError("collage-scan needs a trained model");
    }
  }

  // Seeded split of the training faces: the first pretrain_samples are shown
  // with labels, the rest feed the collage. With a loaded model nothing is
  // held back.
  std::vector<Image> order(data.faces_train);
  Rng split_rng(splitmix64(cfg.seed ^ kSplitStream));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[split_rng.uniform(i)]);
  }
  const std::size_t n_pre = cfg.model_path.empty() ? std::min(cfg.pretrain_samples, order.size()) : 0;
  if (n_pre > 0) {
    LearnConfig pre = cfg.learn;
    pre.supervision = Supervision::labeled_cluster;
    for (std::size_t i = 0; i < n_pre; ++i) {
      learn_step(result.layer, encode(fit_patch(order[i], patch), bank), std::size_t{0}, pre, rng);
    }
  }
  Layer& layer = result.layer;

  const auto faces_test = encode_all(data.faces_test, bank, patch, cfg.workers);
  const auto nonfaces_test = encode_all(data.nonfaces_test, bank, patch, cfg.workers);

  Rng collage_rng(splitmix64(cfg.seed ^ kCollageStream));
  std::span<const Image> pool(order);
  if (!data.faces_collage.empty()) {
    pool = data.faces_collage;
  } else if (n_pre < order.size()) {
    pool = pool.subspan(n_pre);
  }
  result.collage = make_collage(cfg, pool, data.nonfaces_train, collage_rng);
  const SpikeMap spikes = encode_frame(result.collage.canvas, bank);

  const auto measure = [&](std::string stage) {
    FacesStage st;
    st.stage = std::move(stage);
    st.learned = layer.size() - layer.capacity();
    st.accuracy = evaluate_faces(layer, faces_test, nonfaces_test, cfg.workers).accuracy;
    const auto scan = scan_collage(layer, spikes, result.collage, cfg.scan_stride, cfg.workers);
    st.recall = scan.recall.recall();
    st.faces_found = scan.recall.found;
    st.faces_total = scan.recall.total;
    result.stages.push_back(st);
    if (sink) {
      sink(st);
    }
  };

  measure(cfg.mode == Mode::faces_adapt ? "before" : "pretrained");
  if (cfg.mode == Mode::faces_adapt) {
    result.adapt = adapt_on_collage(layer, spikes, cfg.adapt_stride, cfg.learn, rng);
    measure("adapted");
  }

  FrameSpec fs;
  fs.height = cfg.frame_height;
  fs.width = cfg.frame_width;
  fs.patch_side = patch;
  fs.stride = cfg.scan_stride;
  result.frame_cost = frame_cost(fs, cfg.model, cfg.cost);
  return result;
}

FacesResult run_faces(const ExperimentConfig& cfg, const StageSink& sink) {
  cfg.validate(true);
  return run_faces(cfg, FaceData::load(cfg), sink);
}

std::string run_cost(const ExperimentConfig& cfg, int indent) {
  cfg.validate(false);
  nlohmann::ordered_json out;
  out["sample"] = nlohmann::ordered_json::parse(
      to_json(sample_cost(cfg.model, cfg.learn.max_learners, cfg.cost_learners, cfg.cost), -1));
  if (cfg.cost_frame_height && cfg.cost_frame_width) {
    FrameSpec fs;
    fs.height = cfg.cost_frame_height;
    fs.width = cfg.cost_frame_width;
    fs.patch_side = cfg.cost_patch;
    fs.stride = cfg.cost_stride;
    out["frame"] = nlohmann::ordered_json::parse(to_json(frame_cost(fs, cfg.model, cfg.cost), -1));
  }
  return out.dump(indent);
}

} // namespace eon
