// Command-line front end: dataset generation, teacher training, AL runs,
// paired comparisons, heatmaps and latent dumps.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "daal/artifacts.hpp"
#include "daal/config.hpp"
#include "daal/error.hpp"
#include "daal/harness.hpp"
#include "daal/rng.hpp"

namespace fs = std::filesystem;
using namespace daal;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitOther = 1;

struct CommonFlags {
  std::vector<std::string> configs;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::string out = "out";
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool two_configs = false) {
  auto* opt = cmd->add_option("--config", flags.configs, two_configs ? "Two config files to compare" : "Config file");
  if (two_configs) {
    opt->expected(2)->required();
  } else {
    opt->expected(0, 1);
  }
  cmd->add_option("--seed", flags.seed, "Base seed (overrides base_seed)");
  cmd->add_option("--runs", flags.runs, "Number of seeded runs (overrides num_runs)");
  cmd->add_option("--out", flags.out, "Output directory")->capture_default_str();
}

ALConfig resolve(const CommonFlags& flags, std::size_t which = 0) {
  ALConfig config = which < flags.configs.size() ? load_config(flags.configs[which]) : toy_config();
  if (flags.seed) config.base_seed = *flags.seed;
  if (flags.runs) config.num_runs = *flags.runs;
  config.validate();
  return config;
}

std::ofstream open_file(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::string label_text(int label) { return label == kOutlierLabel ? "OUTLIER" : std::to_string(label); }

void write_points(const fs::path& path, const Tensor& x, const std::vector<long>& ids, const std::vector<int>& labels) {
  std::ofstream out = open_file(path);
  out << "id";
  for (std::size_t c = 0; c < x.cols(); ++c) out << ",x" << c + 1;
  out << ",label\n";
  char buf[64];
  for (std::size_t r = 0; r < x.rows(); ++r) {
    out << ids[r];
    for (std::size_t c = 0; c < x.cols(); ++c) {
      std::snprintf(buf, sizeof buf, ",%.10g", x(r, c));
      out << buf;
    }
    out << ',' << label_text(labels[r]) << '\n';
  }
}

void write_labeled_manifest(const fs::path& path, const LabeledSet& labeled) {
  std::ofstream out = open_file(path);
  out << "pool_id,label,origin_cycle\n";
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    out << labeled.pool_ids[i] << ',' << labeled.labels[i] << ',' << labeled.origin_cycle[i] << '\n';
  }
}

void print_summary(const char* name, const RepeatedResult& r) {
  if (r.aggregate.empty()) return;
  const auto& last = r.aggregate.back();
  std::printf("%s: %zu runs, cycle %zu mean_acc %.4f (sd %.4f), mean cumulative outliers %.2f (sd %.2f)\n", name,
              r.runs.size(), last.cycle, last.mean_acc, last.std_acc, last.mean_outliers, last.std_outliers);
}

int cmd_gen_toy(const CommonFlags& flags) {
  const ALConfig config = resolve(flags);
  if (config.dataset != DatasetKind::toy) throw ConfigError("gen-toy needs dataset = toy");
  const DatasetSplit split = build_split(config, config.base_seed);
  const fs::path out = flags.out;
  write_points(out / "teacher.csv", split.teacher_train, split.teacher_ids, split.teacher_labels);
  write_points(out / "pool.csv", split.pool.features, split.pool.ids, split.pool.true_labels);
  write_points(out / "test.csv", split.test.features, split.test.ids, split.test.labels);
  write_split_manifest(split, out / "split_manifest.csv");
  std::printf("toy split: teacher %zu, pool %zu (%zu outliers), test %zu -> %s\n", split.teacher_train.rows(),
              split.pool.size(), split.pool.outlier_count(), split.test.features.rows(), out.string().c_str());
  return kExitOk;
}

int cmd_train_teacher(const CommonFlags& flags) {
  const ALConfig config = resolve(flags);
  const PreparedWorld world = prepare_world(config, config.base_seed);
  const fs::path out = flags.out;
  fs::create_directories(out);
  save_teacher(world.teacher, world.calibration, out / "teacher.bin");
  std::ofstream log = open_file(out / "teacher_log.csv");
  log << "epoch,mean_elbo\n";
  char buf[64];
  for (std::size_t e = 0; e < world.teacher_log.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%zu,%.10g\n", e, world.teacher_log[e]);
    log << buf;
  }
  for (const auto& note : world.split.notes) std::printf("note: %s\n", note.c_str());
  std::printf("teacher trained on %zu samples; pool ELBO mean %.4f sd %.4f -> %s\n", world.split.teacher_train.rows(),
              world.calibration.elbo_mean, world.calibration.elbo_std, (out / "teacher.bin").string().c_str());
  return kExitOk;
}

int cmd_run(const CommonFlags& flags) {
  const ALConfig config = resolve(flags);
  const fs::path out = flags.out;
  fs::create_directories(out);
  RepeatedResult results;
  for (std::size_t r = 0; r < config.num_runs; ++r) {
    const std::uint64_t seed = config.base_seed + r;
    const PreparedWorld world = prepare_world(config, seed);
    RunHooks hooks;
    std::ofstream scores;
    if (config.score_dump) {
      scores = open_file(out / ("scores_run" + std::to_string(r) + ".csv"));
      scores << kScoreDumpHeader << '\n';
      hooks.score_dump = &scores;
    }
    results.runs.push_back(run_prepared(config, world, seed, hooks));
    write_labeled_manifest(out / ("labeled_run" + std::to_string(r) + ".csv"), results.runs.back().final_labeled);
    if (results.runs.back().truncated) std::printf("run %zu: pool exhausted, run truncated\n", r);
  }
  results.aggregate = aggregate(results.runs);
  emit_csv(results, out / "runs.csv", out / "aggregate.csv");
  print_summary("run", results);
  return kExitOk;
}

int cmd_compare(const CommonFlags& flags) {
  const ALConfig first = resolve(flags, 0);
  ALConfig second = resolve(flags, 1);
  second.base_seed = first.base_seed;
  const std::size_t runs = flags.runs ? *flags.runs : first.num_runs;
  const Comparison cmp = compare(first, second, runs);
  const fs::path out = flags.out;
  emit_csv(cmp.first, out / "first" / "runs.csv", out / "first" / "aggregate.csv");
  emit_csv(cmp.second, out / "second" / "runs.csv", out / "second" / "aggregate.csv");

  std::size_t fewer_outliers = 0;
  std::size_t higher_acc = 0;
  for (std::size_t r = 0; r < runs; ++r) {
    const auto& a = cmp.first.runs[r].cycles.back();
    const auto& b = cmp.second.runs[r].cycles.back();
    if (a.cumulative_outlier_queries < b.cumulative_outlier_queries) ++fewer_outliers;
    if (a.test_accuracy > b.test_accuracy) ++higher_acc;
  }
  std::ofstream summary = open_file(out / "summary.txt");
  summary << "runs = " << runs << "\nfirst_fewer_outliers = " << fewer_outliers
          << "\nfirst_higher_final_accuracy = " << higher_acc << '\n';
  print_summary("first", cmp.first);
  print_summary("second", cmp.second);
  std::printf("first has fewer cumulative outliers in %zu/%zu runs, higher final accuracy in %zu/%zu\n",
              fewer_outliers, runs, higher_acc, runs);
  return kExitOk;
}

struct HeatmapFlags {
  double beta = -1.0;  // negative: beta(0) of the config schedule
  std::size_t resolution = 100;
  std::string field = "q_beta";
  std::string teacher;
};

int cmd_heatmap(const CommonFlags& flags, const HeatmapFlags& hm) {
  const ALConfig config = resolve(flags);
  HeatmapField field;
  if (hm.field == "q_beta") field = HeatmapField::q_beta;
  else if (hm.field == "phi_b") field = HeatmapField::phi_b;
  else if (hm.field == "phi") field = HeatmapField::phi;
  else throw ConfigError("--field: expected q_beta, phi_b or phi, got '" + hm.field + "'");
  if (hm.resolution < 1) throw ConfigError("--resolution must be >= 1");
  const double beta = hm.beta >= 0.0 ? hm.beta : anneal(config.beta, 0);

  const std::uint64_t seed = config.base_seed;
  std::optional<PreparedWorld> world;
  if (hm.teacher.empty()) {
    world.emplace(prepare_world(config, seed));
  } else {
    LoadedTeacher loaded = load_teacher(hm.teacher);
    world.emplace(PreparedWorld{build_split(config, seed), std::move(loaded.model), loaded.calibration, {}});
  }

  std::optional<ClassifierModel> classifier;
  if (field != HeatmapField::q_beta) {
    // Classifier trained on the labeled set the AL run ends with.
    const RunResult run = run_prepared(config, *world, seed);
    classifier.emplace(config.classifier_widths);
    train(*classifier, run.final_labeled,
          {config.classifier_epochs, config.classifier_lr, config.classifier_batch,
           derive_seed(seed, 1000 + config.num_cycles + 1)});
  }
  const fs::path path = fs::path(flags.out) / ("heatmap_" + hm.field + ".pgm");
  emit_heatmap(world->teacher, world->calibration, classifier ? &*classifier : nullptr, world->split.bbox,
               hm.resolution, beta, field, path);
  std::printf("heatmap %s (beta %.4g, %zux%zu) -> %s\n", hm.field.c_str(), beta, hm.resolution, hm.resolution,
              path.string().c_str());
  return kExitOk;
}

int cmd_latent_dump(const CommonFlags& flags) {
  const ALConfig config = resolve(flags);
  const std::uint64_t seed = config.base_seed;
  const PreparedWorld world = prepare_world(config, seed);
  std::vector<LatentRecord> records;
  RunHooks hooks;
  hooks.latent = &records;
  run_prepared(config, world, seed, hooks);
  const fs::path path = fs::path(flags.out) / "latent.csv";
  emit_latent_dump(records, path);
  std::printf("%zu queried samples -> %s\n", records.size(), path.string().c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distribution-aware active learning experiments"};
  app.require_subcommand(1);

  CommonFlags gen_flags, teacher_flags, run_flags, compare_flags, heatmap_flags, latent_flags;
  HeatmapFlags hm;

  auto* gen = app.add_subcommand("gen-toy", "Generate the 2-D toy splits as CSV");
  add_common(gen, gen_flags);
  auto* teach = app.add_subcommand("train-teacher", "Train and calibrate the VAE teacher, save a checkpoint");
  add_common(teach, teacher_flags);
  auto* run = app.add_subcommand("run", "Run active learning for --runs seeds");
  add_common(run, run_flags);
  auto* cmp = app.add_subcommand("compare", "Run two configs on shared seeds");
  add_common(cmp, compare_flags, true);
  auto* heat = app.add_subcommand("heatmap", "Write a PGM heatmap of q^beta, phi_b or phi (2-D data only)");
  add_common(heat, heatmap_flags);
  heat->add_option("--beta", hm.beta, "Exponent on q (default: beta at cycle 0)");
  heat->add_option("--resolution", hm.resolution, "Grid cells per side")->capture_default_str();
  heat->add_option("--field", hm.field, "q_beta, phi_b or phi")->capture_default_str();
  heat->add_option("--teacher", hm.teacher, "Teacher checkpoint from train-teacher");
  auto* latent = app.add_subcommand("latent-dump", "Dump queried samples in the teacher's latent space");
  add_common(latent, latent_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen) return cmd_gen_toy(gen_flags);
    if (*teach) return cmd_train_teacher(teacher_flags);
    if (*run) return cmd_run(run_flags);
    if (*cmp) return cmd_compare(compare_flags);
    if (*heat) return cmd_heatmap(heatmap_flags, hm);
    if (*latent) return cmd_latent_dump(latent_flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UnsupportedDimensionError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const BudgetExhaustedError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const FormatError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const LengthError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const DomainError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const DegeneratePoolError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const IoError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const ContractError& e) {
    // Contract violations reachable from the CLI come from settings.
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOther;
}
