#include "daal/harness.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include "daal/error.hpp"
#include "daal/oracle.hpp"
#include "daal/rng.hpp"
#include "daal/selector.hpp"

namespace daal {

namespace {

// Random streams of one run.
enum Stream : std::uint64_t { kSplit = 1, kTeacher = 2, kInitialSet = 3, kClassifier = 1000 };

InitStrategy make_strategy(const ALConfig& config, const PreparedWorld& world) {
  switch (config.init) {
    case InitKind::balanced:
      return init::Balanced{config.init_per_class};
    case InitKind::biased:
      return init::Biased{config.init_classes, config.init_count};
    case InitKind::beta:
      break;
  }
  return init::Beta{config.init_count, &world.teacher, &world.calibration};
}

template <typename T>
std::vector<T> gather(const std::vector<T>& values, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(values[i]);
  return out;
}

void write_score_rows(std::ostream& out, std::size_t cycle, const Pool& pool, const std::vector<ScoreBreakdown>& scores,
                      const std::vector<std::size_t>& chosen) {
  std::vector<std::uint8_t> selected(pool.size(), 0);
  for (std::size_t idx : chosen) selected[idx] = 1;
  char buf[256];
  for (const auto& s : scores) {
    std::snprintf(buf, sizeof buf, "%zu,%ld,%.10g,%.10g,%.10g,%.10g,%d,%d\n", cycle, pool.ids[s.pool_index], s.phi_b, s.q,
                  s.beta, s.log_phi, selected[s.pool_index] ? 1 : 0, pool.is_outlier(s.pool_index) ? 1 : 0);
    out << buf;
  }
}

}  // namespace

DatasetSplit build_split(const ALConfig& config, std::uint64_t seed) {
  config.validate();
  DatasetSplit split;
  if (config.dataset == DatasetKind::toy) {
    ToySpec spec = config.toy;
    spec.seed = derive_seed(seed, kSplit);
    split = gen_toy(spec);
  } else {
    const IdxData train = load_idx(config.mnist_paths.train_images, config.mnist_paths.train_labels);
    const IdxData test = load_idx(config.mnist_paths.test_images, config.mnist_paths.test_labels);
    MnistSplitOptions options = config.mnist;
    options.seed = derive_seed(seed, kSplit);
    split = mnist_split(train, test, options);
  }
  if (split.pool.features.cols() != config.classifier_widths.front()) {
    throw ConfigError("classifier expects " + std::to_string(config.classifier_widths.front()) +
                      " features, data has " + std::to_string(split.pool.features.cols()));
  }
  return split;
}

PreparedWorld prepare_world(const ALConfig& config, std::uint64_t seed) {
  DatasetSplit split = build_split(config, seed);
  VaeArchitecture arch = config.teacher;
  arch.input_dim = split.teacher_train.cols();
  VaeModel teacher(arch);
  const TeacherTrainOptions options{config.teacher_epochs, config.teacher_lr, config.teacher_batch,
                                    derive_seed(seed, kTeacher)};
  auto log = train_teacher(teacher, split.teacher_train, options);
  DensityCalibration cal = calibrate(teacher, split.pool.features, "pool");
  return PreparedWorld{std::move(split), std::move(teacher), std::move(cal), std::move(log)};
}

RunResult run_prepared(const ALConfig& config, const PreparedWorld& world, std::uint64_t seed, const RunHooks& hooks) {
  config.validate();
  using Clock = std::chrono::steady_clock;
  const std::size_t k = config.batch_size;

  Pool pool = world.split.pool;
  Oracle oracle(pool);
  ClassifierModel model(config.classifier_widths);
  if (model.num_classes() != world.split.num_classes) {
    throw ConfigError("classifier has " + std::to_string(model.num_classes()) + " outputs, data has " +
                      std::to_string(world.split.num_classes) + " classes");
  }

  RunResult result;
  result.seed = seed;
  InitialSet initial = initial_set(pool, oracle, make_strategy(config, world), world.split.num_classes,
                                   derive_seed(seed, kInitialSet));
  for (std::size_t idx : initial.queried) result.initial_ids.push_back(pool.ids[idx]);
  result.initial_rejects = initial.rejected;
  LabeledSet labeled = std::move(initial.labeled);

  const std::vector<double> q_all = density_score(world.teacher, world.calibration, pool.features);
  const auto& test = world.split.test;
  std::size_t cumulative_rejects = initial.rejected;
  std::size_t latent_open = 0;  // first record still waiting for pred_after

  for (std::size_t t = 0; t <= config.num_cycles; ++t) {
    const auto start = Clock::now();
    const std::uint64_t cycle_seed = derive_seed(seed, kClassifier + t);
    if (labeled.empty()) {
      model.initialize(cycle_seed);
    } else {
      train(model, labeled, {config.classifier_epochs, config.classifier_lr, config.classifier_batch, cycle_seed});
    }

    if (hooks.latent != nullptr) {
      auto& records = *hooks.latent;
      if (latent_open < records.size()) {
        std::vector<std::size_t> rows;
        for (std::size_t r = latent_open; r < records.size(); ++r) {
          for (std::size_t i = 0; i < pool.size(); ++i) {
            if (pool.ids[i] == records[r].pool_id) rows.push_back(i);
          }
        }
        const auto after = predict(model, pool.features.select_rows(rows));
        for (std::size_t r = latent_open; r < records.size(); ++r) records[r].pred_after = after[r - latent_open];
        latent_open = records.size();
      }
    }

    CycleMetrics m;
    m.cycle = t;
    m.beta = config.selector == SelectorKind::daal ? anneal(config.beta, t) : 0.0;
    m.test_accuracy = accuracy(model, test.features, test.labels);

    const auto candidates = pool.unqueried_indices();
    if (candidates.size() < k) {
      result.truncated = true;
      m.cumulative_labeled = labeled.size();
      m.cumulative_outlier_queries = cumulative_rejects;
      if (config.record_wall_time) m.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
      result.cycles.push_back(m);
      break;
    }

    const Tensor candidate_x = pool.features.select_rows(candidates);
    const std::vector<double> phi_b = entropy_scores(model, candidate_x);
    const std::vector<double> q = gather(q_all, candidates);
    const auto scores = daal_scores(phi_b, q, m.beta, candidates);
    const std::vector<std::size_t> chosen = config.selector == SelectorKind::daal
                                                ? select_batch(pool, scores, k)
                                                : select_by_uncertainty(pool, candidates, phi_b, k);

    const auto answers = oracle.answer(chosen);
    const std::size_t rejects = extend_labeled(labeled, pool, answers, static_cast<int>(t));
    cumulative_rejects += rejects;

    std::vector<long>& ids = result.queried_ids.emplace_back();
    for (std::size_t idx : chosen) ids.push_back(pool.ids[idx]);

    if (hooks.score_dump != nullptr) write_score_rows(*hooks.score_dump, t, pool, scores, chosen);
    if (hooks.latent != nullptr) {
      const Tensor chosen_x = pool.features.select_rows(chosen);
      const Encoding enc = encode(world.teacher, chosen_x);
      const auto before = predict(model, chosen_x);
      for (std::size_t i = 0; i < chosen.size(); ++i) {
        LatentRecord rec;
        rec.cycle = t;
        rec.pool_id = pool.ids[chosen[i]];
        rec.z1 = enc.mu(i, 0);
        rec.z2 = enc.mu.cols() > 1 ? enc.mu(i, 1) : 0.0;
        rec.pred_before = before[i];
        rec.true_label = pool.true_labels[chosen[i]];
        hooks.latent->push_back(rec);
      }
    }

    m.cumulative_labeled = labeled.size();
    m.outlier_queries = rejects;
    m.cumulative_outlier_queries = cumulative_rejects;
    if (config.record_wall_time) m.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
    result.cycles.push_back(m);
  }
  result.final_labeled = std::move(labeled);
  return result;
}

RunResult run_once(const ALConfig& config, std::uint64_t seed) {
  const PreparedWorld world = prepare_world(config, seed);
  return run_prepared(config, world, seed);
}

std::vector<AggregateRow> aggregate(const std::vector<RunResult>& runs) {
  std::size_t longest = 0;
  for (const auto& r : runs) longest = std::max(longest, r.cycles.size());
  std::vector<AggregateRow> rows;
  for (std::size_t t = 0; t < longest; ++t) {
    std::vector<double> acc;
    std::vector<double> out;
    for (const auto& r : runs) {
      if (t < r.cycles.size()) {
        acc.push_back(r.cycles[t].test_accuracy);
        out.push_back(static_cast<double>(r.cycles[t].cumulative_outlier_queries));
      }
    }
    auto mean_std = [](const std::vector<double>& v) {
      double m = 0.0;
      for (double x : v) m += x;
      m /= static_cast<double>(v.size());
      double ss = 0.0;
      for (double x : v) ss += (x - m) * (x - m);
      const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
      return std::pair{m, sd};
    };
    AggregateRow row;
    row.cycle = t;
    row.runs = acc.size();
    std::tie(row.mean_acc, row.std_acc) = mean_std(acc);
    std::tie(row.mean_outliers, row.std_outliers) = mean_std(out);
    rows.push_back(row);
  }
  return rows;
}

RepeatedResult run_repeated(const ALConfig& config, std::size_t runs) {
  if (runs < 1) throw ConfigError("run_repeated needs at least one run");
  RepeatedResult out;
  for (std::size_t r = 0; r < runs; ++r) out.runs.push_back(run_once(config, config.base_seed + r));
  out.aggregate = aggregate(out.runs);
  return out;
}

Comparison compare(const ALConfig& first, const ALConfig& second, std::size_t runs) {
  if (runs < 1) throw ConfigError("compare needs at least one run");
  const bool shared = same_world(first, second);
  Comparison out;
  for (std::size_t r = 0; r < runs; ++r) {
    const std::uint64_t seed = first.base_seed + r;
    const PreparedWorld world = prepare_world(first, seed);
    out.first.runs.push_back(run_prepared(first, world, seed));
    if (shared) {
      out.second.runs.push_back(run_prepared(second, world, seed));
    } else {
      out.second.runs.push_back(run_prepared(second, prepare_world(second, seed), seed));
    }
  }
  out.first.aggregate = aggregate(out.first.runs);
  out.second.aggregate = aggregate(out.second.runs);
  return out;
}

}  // namespace daal
