#include "eon/experiment_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "eon/errors.hpp"

namespace eon {

std::string_view to_string(Mode m) noexcept {
  switch (m) {
  case Mode::mnist_train:
    return "mnist-train";
  case Mode::mnist_eval:
    return "mnist-eval";
  case Mode::faces_pretrain:
    return "faces-pretrain";
  case Mode::faces_adapt:
    return "faces-adapt";
  case Mode::collage_scan:
    return "collage-scan";
  case Mode::cost:
    return "cost";
  }
  return "unknown";
}

Mode parse_mode(std::string_view s) {
  for (const auto m : {Mode::mnist_train, Mode::mnist_eval, Mode::faces_pretrain, Mode::faces_adapt,
                       Mode::collage_scan, Mode::cost}) {
    if (to_string(m) == s) {
      return m;
    }
  }
  throw ConfigError("unknown mode '" + std::string(s) + "'");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string_view unquote(std::string_view s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("bad value '" + std::string(v) + "' for " + std::string(key));
  }
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  try {
    std::size_t used = 0;
    const std::string s(v);
    const double d = std::stod(s, &used);
    if (used != s.size()) {
      throw ConfigError("bad value '" + s + "' for " + std::string(key));
    }
    return d;
  } catch (const std::logic_error&) {
    throw ConfigError("bad value '" + std::string(v) + "' for " + std::string(key));
  }
}

using Setter = std::function<void(ExperimentConfig&, std::string_view key, std::string_view value)>;

template <typename T>
Setter size_field(T ExperimentConfig::*field) {
  return [field](ExperimentConfig& c, std::string_view k, std::string_view v) { c.*field = parse_number<T>(k, v); };
}

Setter path_field(std::filesystem::path ExperimentConfig::*field) {
  return [field](ExperimentConfig& c, std::string_view, std::string_view v) { c.*field = std::filesystem::path(v); };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"mode", [](ExperimentConfig& c, std::string_view, std::string_view v) { c.mode = parse_mode(v); }},
      {"seed", size_field(&ExperimentConfig::seed)},
      {"D", [](ExperimentConfig& c, auto k, auto v) { c.model.side = parse_number<std::size_t>(k, v); }},
      {"K_S", [](ExperimentConfig& c, auto k, auto v) { c.model.kernel_side = parse_number<std::size_t>(k, v); }},
      {"F",
       [](ExperimentConfig& c, auto k, auto v) {
         const auto f = parse_number<unsigned>(k, v);
         if (f == 0 || f > kMaxFilters) {
           throw ConfigError("F must be in [1, 15]");
         }
         c.model.filters = static_cast<std::uint8_t>(f);
       }},
      {"N", [](ExperimentConfig& c, auto k, auto v) { c.model.neurons = parse_number<std::size_t>(k, v); }},
      {"W", [](ExperimentConfig& c, auto k, auto v) { c.model.active = parse_number<std::size_t>(k, v); }},
      {"T_learn0", [](ExperimentConfig& c, auto k, auto v) { c.model.t_learn0 = parse_number<std::uint32_t>(k, v); }},
      {"clusters", [](ExperimentConfig& c, auto k, auto v) { c.model.clusters = parse_number<std::size_t>(k, v); }},
      {"K", [](ExperimentConfig& c, auto k, auto v) { c.learn.max_learners = parse_number<std::size_t>(k, v); }},
      {"swap_rate", [](ExperimentConfig& c, auto k, auto v) { c.learn.swap_rate = parse_double(k, v); }},
      {"T_learn_decay",
       [](ExperimentConfig& c, auto k, auto v) { c.learn.t_learn_decay = parse_number<std::uint32_t>(k, v); }},
      {"supervision", [](ExperimentConfig& c, auto, auto v) { c.learn.supervision = parse_supervision(v); }},
      {"theta", size_field(&ExperimentConfig::theta)},
      {"filter_bank", path_field(&ExperimentConfig::filter_bank)},
      {"workers", size_field(&ExperimentConfig::workers)},
      {"clk_period_ns", [](ExperimentConfig& c, auto k, auto v) { c.cost.clk_period_s = parse_double(k, v) * 1e-9; }},
      {"P", [](ExperimentConfig& c, auto k, auto v) { c.cost.parallelism = parse_number<std::size_t>(k, v); }},
      {"pj_inference_sop", [](ExperimentConfig& c, auto k, auto v) { c.cost.pj_per_inference_sop = parse_double(k, v); }},
      {"pj_learning_sop", [](ExperimentConfig& c, auto k, auto v) { c.cost.pj_per_learning_sop = parse_double(k, v); }},
      {"train_images", path_field(&ExperimentConfig::train_images)},
      {"train_labels", path_field(&ExperimentConfig::train_labels)},
      {"test_images", path_field(&ExperimentConfig::test_images)},
      {"test_labels", path_field(&ExperimentConfig::test_labels)},
      {"train_limit", size_field(&ExperimentConfig::train_limit)},
      {"test_limit", size_field(&ExperimentConfig::test_limit)},
      {"checkpoint_every", size_field(&ExperimentConfig::checkpoint_every)},
      {"checkpoint_test_limit", size_field(&ExperimentConfig::checkpoint_test_limit)},
      {"faces_train", path_field(&ExperimentConfig::faces_train)},
      {"faces_test", path_field(&ExperimentConfig::faces_test)},
      {"faces_collage", path_field(&ExperimentConfig::faces_collage)},
      {"nonfaces_train", path_field(&ExperimentConfig::nonfaces_train)},
      {"nonfaces_test", path_field(&ExperimentConfig::nonfaces_test)},
      {"model", path_field(&ExperimentConfig::model_path)},
      {"pretrain_samples", size_field(&ExperimentConfig::pretrain_samples)},
      {"frame_height", size_field(&ExperimentConfig::frame_height)},
      {"frame_width", size_field(&ExperimentConfig::frame_width)},
      {"collage_faces", size_field(&ExperimentConfig::collage_faces)},
      {"nonface_fill", [](ExperimentConfig& c, auto k, auto v) { c.nonface_fill = parse_double(k, v); }},
      {"scan_stride", size_field(&ExperimentConfig::scan_stride)},
      {"adapt_stride", size_field(&ExperimentConfig::adapt_stride)},
      {"cost_frame_height", size_field(&ExperimentConfig::cost_frame_height)},
      {"cost_frame_width", size_field(&ExperimentConfig::cost_frame_width)},
      {"cost_patch", size_field(&ExperimentConfig::cost_patch)},
      {"cost_stride", size_field(&ExperimentConfig::cost_stride)},
      {"cost_learners", size_field(&ExperimentConfig::cost_learners)},
  };
  return table;
}

} // namespace

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  const auto it = setters().find(trim(key));
  if (it == setters().end()) {
    throw ConfigError("unknown configuration key '" + std::string(trim(key)) + "'");
  }
  it->second(*this, it->first, unquote(trim(value)));
}

void ExperimentConfig::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
  }
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = line;
    if (const auto hash = sv.find('#'); hash != std::string_view::npos) {
      sv = sv.substr(0, hash);
    }
    sv = trim(sv);
    if (sv.empty() || sv.front() == '[') {
      continue;
    }
    try {
      cfg.set_assignment(sv);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config " + path.string());
  }
  return parse(in);
}

void ExperimentConfig::validate(bool check_files) const {
  model.validate();
  learn.validate();
  cost.validate();
  if (workers == 0) {
    throw ConfigError("workers must be >= 1");
  }
  if (scan_stride == 0 || adapt_stride == 0 || cost_stride == 0) {
    throw ConfigError("strides must be >= 1");
  }
  if (!(nonface_fill >= 0.0 && nonface_fill <= 1.0)) {
    throw ConfigError("nonface_fill must lie in [0, 1]");
  }
  const bool faces = mode == Mode::faces_pretrain || mode == Mode::faces_adapt || mode == Mode::collage_scan;
  if (faces && model.clusters > 1) {
    throw ConfigError("face experiments use a single face cluster (clusters = 0 or 1)");
  }
  if (mode == Mode::mnist_train && model.clusters == 0) {
    throw ConfigError("MNIST classification needs clusters > 0");
  }
  if (!check_files) {
    return;
  }
  const auto need = [](const std::filesystem::path& p, const char* key) {
    if (p.empty()) {
      throw ConfigError(std::string(key) + " is required for this mode");
    }
    if (!std::filesystem::exists(p)) {
      throw ConfigError(std::string(key) + ": " + p.string() + " does not exist");
    }
  };
  if (!filter_bank.empty()) {
    need(filter_bank, "filter_bank");
  }
  switch (mode) {
  case Mode::mnist_train:
    need(train_images, "train_images");
    need(train_labels, "train_labels");
    need(test_images, "test_images");
    need(test_labels, "test_labels");
    break;
  case Mode::mnist_eval:
    need(test_images, "test_images");
    need(test_labels, "test_labels");
    need(model_path, "model");
    break;
  case Mode::faces_pretrain:
  case Mode::faces_adapt:
    need(faces_test, "faces_test");
    need(nonfaces_test, "nonfaces_test");
    need(nonfaces_train, "nonfaces_train");
    if (!faces_collage.empty()) {
      need(faces_collage, "faces_collage");
    }
    if (model_path.empty()) {
      need(faces_train, "faces_train");
    } else {
      need(model_path, "model");
    }
    break;
  case Mode::collage_scan:
    if (faces_collage.empty()) {
      need(faces_train, "faces_train");
    } else {
      need(faces_collage, "faces_collage");
    }
    need(nonfaces_train, "nonfaces_train");
    need(model_path, "model");
    break;
  case Mode::cost:
    break;
  }
}

std::string ExperimentConfig::describe() const {
  std::ostringstream os;
  os << "mode=" << to_string(mode) << " seed=" << seed << " D=" << model.side << " K_S=" << model.kernel_side
     << " F=" << int(model.filters) << " N=" << model.neurons << " W=" << model.active
     << " T_learn0=" << model.t_learn0 << " clusters=" << model.clusters << " K=" << learn.max_learners
     << " swap_rate=" << learn.swap_rate << " supervision=" << to_string(learn.supervision) << " theta=" << theta
     << " P=" << cost.parallelism;
  return os.str();
}

} // namespace eon
