#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "daal/datasets.hpp"
#include "daal/learner.hpp"
#include "daal/selector.hpp"
#include "daal/teacher.hpp"

namespace daal {

enum class DatasetKind { toy, mnist };
enum class SelectorKind { daal, uncertainty };
enum class InitKind { balanced, biased, beta };

struct MnistPaths {
  std::filesystem::path train_images;
  std::filesystem::path train_labels;
  std::filesystem::path test_images;
  std::filesystem::path test_labels;
};

// Everything one active-learning experiment needs. Defaults reproduce the
// toy benchmark: 2 classes, 20% outliers, MLP 2-8-4-2, 10 queries per cycle.
struct ALConfig {
  DatasetKind dataset = DatasetKind::toy;
  ToySpec toy;
  MnistPaths mnist_paths;
  MnistSplitOptions mnist;

  std::vector<std::size_t> classifier_widths{2, 8, 4, 2};
  std::size_t classifier_epochs = 200;
  double classifier_lr = 0.01;
  std::size_t classifier_batch = 32;

  VaeArchitecture teacher;
  std::size_t teacher_epochs = 2000;
  double teacher_lr = 3e-3;
  std::size_t teacher_batch = 64;

  BetaSchedule beta{0.8, 1.0, 0.0};
  SelectorKind selector = SelectorKind::daal;
  std::size_t batch_size = 10;
  std::size_t num_cycles = 10;

  InitKind init = InitKind::balanced;
  std::size_t init_per_class = 1;
  std::vector<int> init_classes{0, 1};
  std::size_t init_count = 32;

  std::size_t num_runs = 10;
  std::uint64_t base_seed = 0;
  bool record_wall_time = true;
  bool score_dump = false;

  // Throws ConfigError on inconsistent settings.
  void validate() const;
};

ALConfig toy_config();
// MNIST subset protocol: digits 0-4, MLP 784-256-64-5, batch 32, beta 4 annealed by 0.9.
ALConfig mnist_config(const std::filesystem::path& idx_dir);

// Line-based `key = value` text; '#' starts a comment. Relative paths are
// resolved against `base_dir`. Unknown keys are a ConfigError. Keys left out
// take the toy_config() or mnist_config() value, following `dataset`.
ALConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ALConfig load_config(const std::filesystem::path& path);

// Canonical text form; parse_config(to_config_text(c)) reproduces c.
std::string to_config_text(const ALConfig& config);

// True when two configs produce the same splits and teacher for a seed.
bool same_world(const ALConfig& a, const ALConfig& b);

}  // namespace daal
