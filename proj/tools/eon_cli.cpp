// eon: experiment runner for the spiking edge-feature engine.
//
//   eon mnist-train  --config configs/mnist.toml --out runs/mnist
//   eon faces-adapt  --config configs/faces.toml --set N=400 --out runs/faces
//   eon cost         --set cost_frame_height=2160 --set cost_frame_width=3840 ...

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eon/errors.hpp"
#include "eon/experiment.hpp"
#include "eon/model_file.hpp"

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "eon_out";
  std::vector<std::string> sets;
  std::string model;
};

eon::ExperimentConfig resolve(const Options& o, eon::Mode mode) {
  eon::ExperimentConfig cfg = o.config.empty() ? eon::ExperimentConfig{} : eon::ExperimentConfig::load(o.config);
  for (const auto& s : o.sets) {
    cfg.set_assignment(s);
  }
  cfg.mode = mode;
  if (o.seed) {
    cfg.seed = *o.seed;
  }
  if (!o.model.empty()) {
    cfg.model_path = o.model;
  }
  cfg.validate(true);
  return cfg;
}

class CsvWriter {
public:
  CsvWriter(const fs::path& path, const std::string& header) : out_(path, std::ios::trunc) {
    if (!out_) {
      throw eon::IoError("cannot write " + path.string());
    }
    out_ << header << '\n' << std::flush;
  }
  template <typename... Ts>
  void row(const Ts&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ",") << fields, first = false), ...);
    out_ << '\n' << std::flush;
  }

private:
  std::ofstream out_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw eon::IoError("cannot write " + path.string());
  }
  out << text << '\n';
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int mnist_train(const eon::ExperimentConfig& cfg, const fs::path& out) {
  const auto t0 = std::chrono::steady_clock::now();
  std::cerr << cfg.describe() << '\n';
  CsvWriter csv(out / "metrics.csv", "sample_count,accuracy,capacity,eligible,no_prediction");
  const auto result = eon::run_mnist(cfg, [&](const eon::MnistCheckpoint& cp) {
    csv.row(cp.sample_count, cp.accuracy, cp.capacity, cp.eligible, cp.no_prediction);
    std::fprintf(stderr, "[%7.1fs] samples=%zu acc=%.4f capacity=%zu eligible=%.1f no_pred=%zu\n", elapsed_s(t0),
                 cp.sample_count, cp.accuracy, cp.capacity, cp.eligible, cp.no_prediction);
  });
  eon::save_model(result.layer, out / "model.eon");
  write_text(out / "cost.json", eon::to_json(result.cost));
  std::printf("accuracy %.4f (%zu/%zu, %zu no prediction), %zu learning events\n", result.final_eval.accuracy,
              result.final_eval.correct, result.final_eval.total, result.final_eval.no_prediction,
              result.learning_events);
  return 0;
}

int mnist_eval(const eon::ExperimentConfig& cfg, const fs::path&) {
  const auto layer = eon::load_model(cfg.model_path, cfg.model);
  const auto test = eon::load_idx(cfg.test_images, cfg.test_labels, cfg.test_limit);
  const auto bank = eon::make_filter_bank(cfg);
  const auto inputs = eon::encode_all(test.images, bank, cfg.model.patch_side(), cfg.workers);
  const auto ev = eon::evaluate(layer, inputs, test.labels, cfg.cost.parallelism, cfg.workers);
  std::printf("accuracy %.4f (%zu/%zu, %zu no prediction)\n", ev.accuracy, ev.correct, ev.total, ev.no_prediction);
  return 0;
}

int faces(const eon::ExperimentConfig& cfg, const fs::path& out) {
  const auto t0 = std::chrono::steady_clock::now();
  std::cerr << cfg.describe() << '\n';
  CsvWriter csv(out / "faces_metrics.csv", "stage,learned,accuracy,recall,faces_found,faces_total");
  const auto result = eon::run_faces(cfg, [&](const eon::FacesStage& st) {
    csv.row(st.stage, st.learned, st.accuracy, st.recall, st.faces_found, st.faces_total);
    std::fprintf(stderr, "[%7.1fs] %s: learned=%zu accuracy=%.4f recall=%.4f (%zu/%zu)\n", elapsed_s(t0),
                 st.stage.c_str(), st.learned, st.accuracy, st.recall, st.faces_found, st.faces_total);
  });
  if (cfg.mode != eon::Mode::collage_scan) {
    eon::save_model(result.layer, out / "model.eon");
  }
  eon::write_pgm(out / "collage.pgm", result.collage.canvas);
  eon::write_manifest(out / "manifest.jsonl", result.collage);
  write_text(out / "frame_cost.json", eon::to_json(result.frame_cost));
  if (cfg.mode == eon::Mode::faces_adapt) {
    std::fprintf(stderr, "adaptation: %zu windows, %zu fired, %zu learning events\n", result.adapt.windows,
                 result.adapt.fired, result.adapt.learning_events);
  }
  for (const auto& st : result.stages) {
    std::printf("%s accuracy %.4f recall %.4f\n", st.stage.c_str(), st.accuracy, st.recall);
  }
  return 0;
}

int cost(const eon::ExperimentConfig& cfg, const fs::path& out) {
  const auto json = eon::run_cost(cfg);
  write_text(out / "cost.json", json);
  std::cout << json << '\n';
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spiking edge-feature engine: online learning experiments and cost model"};
  app.require_subcommand(1);
  Options opts;

  struct Command {
    const char* name;
    const char* help;
    eon::Mode mode;
    int (*run)(const eon::ExperimentConfig&, const fs::path&);
  };
  const std::vector<Command> commands = {
      {"mnist-train", "single-pass online training on MNIST with periodic test checkpoints",
       eon::Mode::mnist_train, mnist_train},
      {"mnist-eval", "score a saved model on the MNIST test set", eon::Mode::mnist_eval, mnist_eval},
      {"faces-pretrain", "labeled face pretraining, then test accuracy and collage recall",
       eon::Mode::faces_pretrain, faces},
      {"faces-adapt", "pretraining followed by self-supervised adaptation on the collage", eon::Mode::faces_adapt,
       faces},
      {"collage-scan", "sliding-window scan of a collage with a saved model", eon::Mode::collage_scan, faces},
      {"cost", "cycle, throughput and energy estimates as JSON", eon::Mode::cost, cost},
  };

  const Command* chosen = nullptr;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", opts.config, "key = value experiment file")->check(CLI::ExistingFile);
    sub->add_option("--seed", opts.seed, "overrides the config seed");
    sub->add_option("--out", opts.out, "output directory")->capture_default_str();
    sub->add_option("--set", opts.sets, "override one key, e.g. --set N=9000 (repeatable)");
    sub->add_option("--model", opts.model, "model file to load");
    sub->callback([&chosen, &c] { chosen = &c; });
  }
  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = resolve(opts, chosen->mode);
    const fs::path out(opts.out);
    fs::create_directories(out);
    return chosen->run(cfg, out);
  } catch (const eon::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
