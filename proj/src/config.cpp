#include "daal/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "daal/error.hpp"

namespace daal {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(std::string(key) + ": not a number: '" + std::string(v) + "'");
  return out;
}

std::uint64_t parse_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(std::string(key) + ": not a nonnegative integer: '" + std::string(v) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(std::string(key) + ": expected true/false, got '" + std::string(v) + "'");
}

template <typename T>
std::vector<T> parse_list(std::string_view key, std::string_view v) {
  std::vector<T> out;
  if (trim(v).empty()) return out;
  for (auto part : split(v, ',')) out.push_back(static_cast<T>(parse_uint(key, part)));
  return out;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(values[i]);
  }
  return out;
}

struct Field {
  std::string key;
  bool world;  // affects splits or teacher
  std::function<void(ALConfig&, std::string_view, const std::filesystem::path&)> set;
  std::function<std::string(const ALConfig&)> get;  // empty string result: omit
};

std::filesystem::path resolve(const std::filesystem::path& base, std::string_view v) {
  if (v.empty()) return {};
  std::filesystem::path p{std::string(v)};
  if (p.is_relative() && !base.empty()) p = base / p;
  return p;
}

#define DAAL_SIZE_FIELD(KEY, WORLD, MEMBER)                                                              \
  Field {                                                                                                \
    KEY, WORLD, [](ALConfig& c, std::string_view v, const auto&) { c.MEMBER = parse_uint(KEY, v); },     \
        [](const ALConfig& c) { return std::to_string(c.MEMBER); }                                       \
  }
#define DAAL_DOUBLE_FIELD(KEY, WORLD, MEMBER)                                                            \
  Field {                                                                                                \
    KEY, WORLD, [](ALConfig& c, std::string_view v, const auto&) { c.MEMBER = parse_double(KEY, v); },   \
        [](const ALConfig& c) { return fmt_double(c.MEMBER); }                                           \
  }
#define DAAL_PATH_FIELD(KEY, MEMBER)                                                                                \
  Field {                                                                                                           \
    KEY, true, [](ALConfig& c, std::string_view v, const std::filesystem::path& base) { c.MEMBER = resolve(base, v); }, \
        [](const ALConfig& c) { return c.MEMBER.string(); }                                                         \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      Field{"dataset", true,
            [](ALConfig& c, std::string_view v, const auto&) {
              if (v == "toy") c.dataset = DatasetKind::toy;
              else if (v == "mnist") c.dataset = DatasetKind::mnist;
              else throw ConfigError("dataset: expected toy or mnist, got '" + std::string(v) + "'");
            },
            [](const ALConfig& c) { return std::string(c.dataset == DatasetKind::toy ? "toy" : "mnist"); }},
      DAAL_SIZE_FIELD("toy.modes_per_class", true, toy.modes_per_class),
      Field{"toy.class_means", true,
            [](ALConfig& c, std::string_view v, const auto&) {
              c.toy.class_means.clear();
              for (auto point : split(v, ';')) {
                if (point.empty()) continue;
                std::istringstream is{std::string(point)};
                std::array<double, 2> xy{};
                std::string extra;
                if (!(is >> xy[0] >> xy[1]) || (is >> extra)) {
                  throw ConfigError("toy.class_means: expected 'x y; x y; ...', got '" + std::string(point) + "'");
                }
                c.toy.class_means.push_back(xy);
              }
            },
            [](const ALConfig& c) {
              std::string out;
              for (std::size_t i = 0; i < c.toy.class_means.size(); ++i) {
                if (i) out += "; ";
                out += fmt_double(c.toy.class_means[i][0]) + " " + fmt_double(c.toy.class_means[i][1]);
              }
              return out;
            }},
      DAAL_DOUBLE_FIELD("toy.class_var", true, toy.class_var),
      DAAL_SIZE_FIELD("toy.n_inliers", true, toy.n_inliers),
      DAAL_DOUBLE_FIELD("toy.outlier_fraction", true, toy.outlier_fraction),
      DAAL_DOUBLE_FIELD("toy.bbox_margin", true, toy.bbox_margin),
      Field{"mnist.dir", true,
            [](ALConfig& c, std::string_view v, const std::filesystem::path& base) {
              const auto dir = resolve(base, v);
              c.mnist_paths = {dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte",
                               dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte"};
            },
            [](const ALConfig&) { return std::string(); }},
      DAAL_PATH_FIELD("mnist.train_images", mnist_paths.train_images),
      DAAL_PATH_FIELD("mnist.train_labels", mnist_paths.train_labels),
      DAAL_PATH_FIELD("mnist.test_images", mnist_paths.test_images),
      DAAL_PATH_FIELD("mnist.test_labels", mnist_paths.test_labels),
      Field{"mnist.inlier_digits", true,
            [](ALConfig& c, std::string_view v, const auto&) { c.mnist.inlier_digits = parse_list<int>("mnist.inlier_digits", v); },
            [](const ALConfig& c) { return join(c.mnist.inlier_digits); }},
      DAAL_SIZE_FIELD("mnist.per_digit_teacher", true, mnist.per_digit_teacher),
      DAAL_DOUBLE_FIELD("mnist.outlier_multiplier", true, mnist.outlier_multiplier),
      DAAL_SIZE_FIELD("mnist.pool_size", true, mnist.pool_size),
      Field{"classifier.widths", false,
            [](ALConfig& c, std::string_view v, const auto&) {
              c.classifier_widths = parse_list<std::size_t>("classifier.widths", v);
            },
            [](const ALConfig& c) { return join(c.classifier_widths); }},
      DAAL_SIZE_FIELD("classifier.epochs", false, classifier_epochs),
      DAAL_DOUBLE_FIELD("classifier.lr", false, classifier_lr),
      DAAL_SIZE_FIELD("classifier.batch_size", false, classifier_batch),
      Field{"teacher.hidden", true,
            [](ALConfig& c, std::string_view v, const auto&) { c.teacher.hidden = parse_list<std::size_t>("teacher.hidden", v); },
            [](const ALConfig& c) { return join(c.teacher.hidden); }},
      DAAL_SIZE_FIELD("teacher.latent_dim", true, teacher.latent_dim),
      Field{"teacher.decoder", true,
            [](ALConfig& c, std::string_view v, const auto&) {
              if (v == "bernoulli") c.teacher.decoder = DecoderFamily::bernoulli;
              else if (v == "gaussian") c.teacher.decoder = DecoderFamily::gaussian;
              else throw ConfigError("teacher.decoder: expected bernoulli or gaussian, got '" + std::string(v) + "'");
            },
            [](const ALConfig& c) {
              return std::string(c.teacher.decoder == DecoderFamily::bernoulli ? "bernoulli" : "gaussian");
            }},
      DAAL_DOUBLE_FIELD("teacher.sigma_dec", true, teacher.sigma_dec),
      Field{"teacher.activation", true,
            [](ALConfig& c, std::string_view v, const auto&) {
              if (v == "tanh") c.teacher.activation = Activation::tanh;
              else if (v == "relu") c.teacher.activation = Activation::relu;
              else throw ConfigError("teacher.activation: expected tanh or relu, got '" + std::string(v) + "'");
            },
            [](const ALConfig& c) { return std::string(c.teacher.activation == Activation::tanh ? "tanh" : "relu"); }},
      DAAL_SIZE_FIELD("teacher.epochs", true, teacher_epochs),
      DAAL_DOUBLE_FIELD("teacher.lr", true, teacher_lr),
      DAAL_SIZE_FIELD("teacher.batch_size", true, teacher_batch),
      DAAL_DOUBLE_FIELD("beta.beta0", false, beta.beta0),
      DAAL_DOUBLE_FIELD("beta.alpha", false, beta.alpha),
      DAAL_DOUBLE_FIELD("beta.floor", false, beta.floor),
      Field{"selector", false,
            [](ALConfig& c, std::string_view v, const auto&) {
              if (v == "daal") c.selector = SelectorKind::daal;
              else if (v == "uncertainty") c.selector = SelectorKind::uncertainty;
              else throw ConfigError("selector: expected daal or uncertainty, got '" + std::string(v) + "'");
            },
            [](const ALConfig& c) { return std::string(c.selector == SelectorKind::daal ? "daal" : "uncertainty"); }},
      DAAL_SIZE_FIELD("batch_size", false, batch_size),
      DAAL_SIZE_FIELD("num_cycles", false, num_cycles),
      Field{"init.strategy", false,
            [](ALConfig& c, std::string_view v, const auto&) {
              if (v == "balanced") c.init = InitKind::balanced;
              else if (v == "biased") c.init = InitKind::biased;
              else if (v == "beta") c.init = InitKind::beta;
              else throw ConfigError("init.strategy: expected balanced, biased or beta, got '" + std::string(v) + "'");
            },
            [](const ALConfig& c) {
              switch (c.init) {
                case InitKind::balanced: return std::string("balanced");
                case InitKind::biased: return std::string("biased");
                case InitKind::beta: break;
              }
              return std::string("beta");
            }},
      DAAL_SIZE_FIELD("init.per_class", false, init_per_class),
      Field{"init.classes", false,
            [](ALConfig& c, std::string_view v, const auto&) { c.init_classes = parse_list<int>("init.classes", v); },
            [](const ALConfig& c) { return join(c.init_classes); }},
      DAAL_SIZE_FIELD("init.count", false, init_count),
      DAAL_SIZE_FIELD("num_runs", false, num_runs),
      DAAL_SIZE_FIELD("base_seed", false, base_seed),
      Field{"record_wall_time", false,
            [](ALConfig& c, std::string_view v, const auto&) { c.record_wall_time = parse_bool("record_wall_time", v); },
            [](const ALConfig& c) { return std::string(c.record_wall_time ? "true" : "false"); }},
      Field{"score_dump", false,
            [](ALConfig& c, std::string_view v, const auto&) { c.score_dump = parse_bool("score_dump", v); },
            [](const ALConfig& c) { return std::string(c.score_dump ? "true" : "false"); }},
  };
  return table;
}

#undef DAAL_SIZE_FIELD
#undef DAAL_DOUBLE_FIELD
#undef DAAL_PATH_FIELD

}  // namespace

void ALConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (num_runs < 1) fail("num_runs must be >= 1");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (classifier_widths.size() < 2) fail("classifier.widths needs at least input and output widths");
  if (classifier_widths.back() < 2) fail("classifier needs at least two output classes");
  if (!(classifier_lr > 0.0) || !(teacher_lr > 0.0)) fail("learning rates must be positive");
  if (teacher.latent_dim < 1) fail("teacher.latent_dim must be >= 1");
  if (teacher.decoder == DecoderFamily::gaussian && !(teacher.sigma_dec > 0.0)) fail("teacher.sigma_dec must be > 0");
  try {
    beta.validate();
  } catch (const ContractError& e) {
    fail(e.what());
  }
  if (dataset == DatasetKind::toy) {
    if (classifier_widths.front() != 2 || classifier_widths.back() != ToySpec::kNumClasses) {
      fail("toy classifier must map 2 features to 2 classes");
    }
    if (toy.class_means.size() != ToySpec::kNumClasses * toy.modes_per_class) {
      fail("toy.class_means must list 2 * toy.modes_per_class points");
    }
    if (!(toy.outlier_fraction >= 0.0 && toy.outlier_fraction < 1.0)) fail("toy.outlier_fraction must lie in [0, 1)");
    const double pool = 0.6 * static_cast<double>(toy.n_inliers) / (1.0 - toy.outlier_fraction);
    if (static_cast<double>(batch_size * num_cycles) > pool) fail("batch_size * num_cycles exceeds the pool size");
  } else {
    if (classifier_widths.back() != mnist.inlier_digits.size()) {
      fail("classifier output width must equal the number of inlier digits");
    }
    if (mnist_paths.train_images.empty() || mnist_paths.test_images.empty()) fail("mnist paths are not set");
    if (mnist.pool_size > 0 && batch_size * num_cycles > mnist.pool_size) {
      fail("batch_size * num_cycles exceeds mnist.pool_size");
    }
  }
  if (init == InitKind::biased && init_classes.empty()) fail("init.classes must name at least one class");
}

ALConfig toy_config() { return ALConfig{}; }

ALConfig mnist_config(const std::filesystem::path& idx_dir) {
  ALConfig c;
  c.dataset = DatasetKind::mnist;
  c.mnist_paths = {idx_dir / "train-images-idx3-ubyte", idx_dir / "train-labels-idx1-ubyte",
                   idx_dir / "t10k-images-idx3-ubyte", idx_dir / "t10k-labels-idx1-ubyte"};
  c.classifier_widths = {784, 256, 64, 5};
  c.classifier_epochs = 20;
  c.classifier_lr = 1e-3;
  c.teacher.input_dim = 784;
  c.teacher.hidden = {256};
  c.teacher.latent_dim = 2;
  c.teacher.decoder = DecoderFamily::bernoulli;
  c.teacher.activation = Activation::relu;
  c.teacher_epochs = 30;
  c.teacher_lr = 1e-3;
  c.teacher_batch = 100;
  c.beta = {4.0, 0.9, 0.0};
  c.batch_size = 32;
  c.num_cycles = 15;
  c.init = InitKind::beta;
  c.init_classes = {0, 1};
  c.init_count = 32;
  return c;
}

ALConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  struct Entry {
    std::size_t line_no;
    std::string key;
    std::string_view value;
  };
  std::vector<Entry> entries;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    entries.push_back({line_no, std::string(trim(line.substr(0, eq))), trim(line.substr(eq + 1))});
  }

  // Unset keys fall back to the preset of the chosen dataset.
  const bool mnist = std::any_of(entries.begin(), entries.end(),
                                 [](const Entry& e) { return e.key == "dataset" && e.value == "mnist"; });
  ALConfig config = mnist ? mnist_config({}) : toy_config();
  if (mnist) config.mnist_paths = {};
  std::set<std::string> seen;
  for (const auto& [line_no, key, value] : entries) {
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return f.key == key; });
    if (it == table.end()) throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    it->set(config, value, base_dir);
  }
  return config;
}

ALConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

std::string to_config_text(const ALConfig& config) {
  std::string out;
  for (const auto& f : fields()) {
    const std::string v = f.get(config);
    if (v.empty() && f.key == "mnist.dir") continue;
    out += f.key + " = " + v + "\n";
  }
  return out;
}

bool same_world(const ALConfig& a, const ALConfig& b) {
  for (const auto& f : fields()) {
    if (f.world && f.get(a) != f.get(b)) return false;
  }
  return true;
}

}  // namespace daal
