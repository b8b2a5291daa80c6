#include "daal/teacher.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>

#include "daal/binary_io.hpp"
#include "daal/error.hpp"
#include "daal/rng.hpp"

namespace daal {

namespace {

constexpr std::string_view kTeacherMagic = "DAALVAE1";
const std::string kEncoderPrefix = "enc.";
const std::string kDecoderPrefix = "dec.";
constexpr double kProbFloor = 1e-7;

void check_input(const VaeModel& model, const Tensor& x, const char* op) {
  if (x.rank() != 2 || x.cols() != model.input_dim()) {
    throw ContractError(std::string(op) + ": teacher expects " + std::to_string(model.input_dim()) +
                        " features, input has shape " + shape_str(x.shape()));
  }
  if (model.architecture().decoder == DecoderFamily::bernoulli) {
    for (double v : x.data()) {
      if (!(v >= 0.0 && v <= 1.0)) throw DomainError(std::string(op) + ": bernoulli input outside [0, 1]: " + std::to_string(v));
    }
  }
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

std::vector<std::size_t> VaeArchitecture::encoder_widths() const {
  std::vector<std::size_t> w{input_dim};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(2 * latent_dim);
  return w;
}

std::vector<std::size_t> VaeArchitecture::decoder_widths() const {
  std::vector<std::size_t> w{latent_dim};
  w.insert(w.end(), hidden.rbegin(), hidden.rend());
  w.push_back(input_dim);
  return w;
}

VaeModel::VaeModel(VaeArchitecture arch) : arch_(std::move(arch)) {
  if (arch_.input_dim == 0 || arch_.latent_dim == 0) throw ContractError("VAE dimensions must be positive");
  if (arch_.decoder == DecoderFamily::gaussian && !(arch_.sigma_dec > 0.0)) {
    throw ContractError("gaussian decoder needs sigma_dec > 0");
  }
  register_dense_stack(encoder_, kEncoderPrefix, arch_.encoder_widths());
  register_dense_stack(decoder_, kDecoderPrefix, arch_.decoder_widths());
}

void VaeModel::initialize(std::uint64_t seed) {
  Rng rng(seed);
  init_dense_stack(encoder_, kEncoderPrefix, arch_.encoder_widths(), rng);
  init_dense_stack(decoder_, kDecoderPrefix, arch_.decoder_widths(), rng);
  encoder_.reset_optimizer();
  decoder_.reset_optimizer();
  encoder_.zero_grad();
  decoder_.zero_grad();
}

Variable VaeModel::encoder_output(const Variable& x) const {
  return dense_forward(encoder_, kEncoderPrefix, arch_.encoder_widths(), x, arch_.activation);
}

Variable VaeModel::decoder_output(const Variable& z) const {
  return dense_forward(decoder_, kDecoderPrefix, arch_.decoder_widths(), z, arch_.activation);
}

Encoding encode(const VaeModel& model, const Tensor& x) {
  check_input(model, x, "encode");
  NoGradGuard guard;
  const Variable out = model.encoder_output(Variable::constant(x));
  const std::size_t l = model.latent_dim();
  return {slice_cols(out, 0, l).value(), slice_cols(out, l, l).value()};
}

Variable reparameterize(const Variable& mu, const Variable& logvar, const Tensor& noise) {
  if (mu.shape() != logvar.shape() || mu.shape() != noise.shape()) {
    throw DimensionError("reparameterize: shapes " + shape_str(mu.shape()) + ", " + shape_str(logvar.shape()) + ", " +
                         shape_str(noise.shape()) + " must agree");
  }
  return add(mu, mul(exp(scale(logvar, 0.5)), Variable::constant(noise)));
}

Variable gaussian_kl(const Variable& mu, const Variable& logvar) {
  Variable inner = sub(sub(add_scalar(logvar, 1.0), square(mu)), exp(logvar));
  return scale(row_sum(inner), -0.5);
}

ElboGraph elbo_graph(const VaeModel& model, const Tensor& x, const Tensor& noise) {
  check_input(model, x, "elbo");
  const std::size_t l = model.latent_dim();
  const Variable xv = Variable::constant(x);
  const Variable enc = model.encoder_output(xv);
  const Variable mu = slice_cols(enc, 0, l);
  const Variable logvar = slice_cols(enc, l, l);
  const Variable z = noise.empty() ? mu : reparameterize(mu, logvar, noise);
  const Variable out = model.decoder_output(z);

  Variable recon;
  const auto& arch = model.architecture();
  if (arch.decoder == DecoderFamily::bernoulli) {
    const Variable p = clamp(sigmoid(out), kProbFloor, 1.0 - kProbFloor);
    const Variable one_minus_x = Variable::constant([&] {
      Tensor t = x;
      for (double& v : t.data()) v = 1.0 - v;
      return t;
    }());
    const Variable log_p = log(p);
    const Variable log_q = log(add_scalar(scale(p, -1.0), 1.0));
    recon = row_sum(add(mul(xv, log_p), mul(one_minus_x, log_q)));
  } else {
    const double var = arch.sigma_dec * arch.sigma_dec;
    const double log_norm = -0.5 * static_cast<double>(x.cols()) * std::log(2.0 * std::numbers::pi * var);
    recon = add_scalar(scale(row_sum(square(sub(xv, out))), -0.5 / var), log_norm);
  }
  const Variable kl = gaussian_kl(mu, logvar);
  return {sub(recon, kl), recon, kl};
}

std::vector<double> elbo(const VaeModel& model, const Tensor& x, const Tensor& noise) {
  NoGradGuard guard;
  const ElboGraph g = elbo_graph(model, x, noise);
  const auto values = g.elbo.value().data();
  return {values.begin(), values.end()};
}

std::vector<double> train_teacher(VaeModel& model, const Tensor& data, const TeacherTrainOptions& options) {
  if (data.rank() != 2 || data.rows() < 2) throw ContractError("train_teacher: need at least two samples");
  check_input(model, data, "train_teacher");
  model.initialize(derive_seed(options.seed, 0));
  Rng shuffle_rng(derive_seed(options.seed, 1));
  Rng noise_rng(derive_seed(options.seed, 2));
  std::normal_distribution<double> normal(0.0, 1.0);

  const std::size_t n = data.rows();
  const std::size_t l = model.latent_dim();
  const std::size_t batch = std::max<std::size_t>(1, std::min(options.batch_size, n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const Adam rule{.lr = options.lr};
  std::vector<double> log_elbo;
  log_elbo.reserve(options.epochs);

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double total = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      std::span<const std::size_t> idx(order.data() + start, stop - start);
      Tensor noise({idx.size(), l});
      for (double& v : noise.data()) v = normal(noise_rng);
      const ElboGraph g = elbo_graph(model, data.select_rows(idx), noise);
      const Variable loss = scale(mean(g.elbo), -1.0);
      model.encoder().zero_grad();
      model.decoder().zero_grad();
      backward(loss);
      step(model.encoder(), rule);
      step(model.decoder(), rule);
      total -= loss.value().item() * static_cast<double>(idx.size());
    }
    log_elbo.push_back(total / static_cast<double>(n));
  }
  return log_elbo;
}

DensityCalibration calibrate(const VaeModel& model, const Tensor& pool, std::string pool_name) {
  if (pool.rank() != 2 || pool.rows() < 2) throw ContractError("calibrate: pool needs at least two samples");
  const std::vector<double> values = elbo(model, pool);
  const double n = static_cast<double>(values.size());
  const double m = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  const double sd = std::sqrt(ss / n);
  // Identical ELBOs leave only round-off in sd.
  if (!(sd > 1e-12 * std::max(1.0, std::abs(m))) || !std::isfinite(sd)) throw DegeneratePoolError("calibrate: ELBO has zero variance over " + pool_name);
  return {m, sd, std::move(pool_name)};
}

double density_from_elbo(double elbo_value, const DensityCalibration& cal) {
  // Keep q strictly inside (0, 1) so log q stays finite downstream.
  constexpr double lo = std::numeric_limits<double>::min();
  const double hi = std::nextafter(1.0, 0.0);
  return std::clamp(stable_sigmoid((elbo_value - cal.elbo_mean) / cal.elbo_std), lo, hi);
}

std::vector<double> density_score(const VaeModel& model, const DensityCalibration& cal, const Tensor& x) {
  std::vector<double> q = elbo(model, x);
  for (double& v : q) v = density_from_elbo(v, cal);
  return q;
}

Tensor grid_points(const BoundingBox& box, std::size_t resolution) {
  if (resolution == 0) throw ContractError("grid resolution must be positive");
  const double dx = (box.x_max - box.x_min) / static_cast<double>(resolution);
  const double dy = (box.y_max - box.y_min) / static_cast<double>(resolution);
  Tensor pts({resolution * resolution, 2});
  for (std::size_t r = 0; r < resolution; ++r) {
    for (std::size_t c = 0; c < resolution; ++c) {
      pts(r * resolution + c, 0) = box.x_min + (static_cast<double>(c) + 0.5) * dx;
      pts(r * resolution + c, 1) = box.y_min + (static_cast<double>(r) + 0.5) * dy;
    }
  }
  return pts;
}

Tensor score_grid(const VaeModel& model, const DensityCalibration& cal, const BoundingBox& box, std::size_t resolution,
                  double beta) {
  if (model.input_dim() != 2) {
    throw UnsupportedDimensionError("score_grid: only 2-D inputs, teacher has " + std::to_string(model.input_dim()));
  }
  const std::vector<double> q = density_score(model, cal, grid_points(box, resolution));
  Tensor grid({resolution, resolution});
  for (std::size_t i = 0; i < q.size(); ++i) grid[i] = std::pow(q[i], beta);
  return grid;
}

void save_teacher(const VaeModel& model, const DensityCalibration& cal, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const auto& arch = model.architecture();
  io::write_magic(out, kTeacherMagic);
  io::write_u32_le(out, static_cast<std::uint32_t>(arch.latent_dim));
  io::write_u32_le(out, static_cast<std::uint32_t>(arch.decoder));
  for (const auto& widths : {arch.encoder_widths(), arch.decoder_widths()}) {
    io::write_u32_le(out, static_cast<std::uint32_t>(widths.size()));
    for (std::size_t w : widths) io::write_u32_le(out, static_cast<std::uint32_t>(w));
  }
  io::write_u32_le(out, arch.activation == Activation::tanh ? 1u : 0u);
  io::write_f64_le(out, arch.sigma_dec);
  io::write_f64_le(out, model.encoder().flatten());
  io::write_f64_le(out, model.decoder().flatten());
  io::write_f64_le(out, cal.elbo_mean);
  io::write_f64_le(out, cal.elbo_std);
}

LoadedTeacher load_teacher(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  io::expect_magic(in, kTeacherMagic);
  VaeArchitecture arch;
  arch.latent_dim = io::read_u32_le(in);
  const std::uint32_t family = io::read_u32_le(in);
  if (family > 1) throw FormatError("unknown decoder family tag " + std::to_string(family));
  arch.decoder = static_cast<DecoderFamily>(family);
  auto read_widths = [&in] {
    const std::uint32_t count = io::read_u32_le(in);
    if (count < 2 || count > 64) throw FormatError("implausible layer count " + std::to_string(count));
    std::vector<std::size_t> w(count);
    for (auto& v : w) v = io::read_u32_le(in);
    return w;
  };
  const auto enc = read_widths();
  const auto dec = read_widths();
  arch.input_dim = enc.front();
  arch.hidden.assign(enc.begin() + 1, enc.end() - 1);
  if (enc.back() != 2 * arch.latent_dim || dec != arch.decoder_widths()) {
    throw FormatError("teacher checkpoint widths are inconsistent");
  }
  arch.activation = io::read_u32_le(in) == 1 ? Activation::tanh : Activation::relu;
  arch.sigma_dec = io::read_f64_le(in);
  VaeModel model(arch);
  for (ParamStore* store : {&model.encoder(), &model.decoder()}) {
    std::vector<double> values(store->total_values());
    for (double& v : values) v = io::read_f64_le(in);
    store->assign(values);
  }
  DensityCalibration cal;
  cal.elbo_mean = io::read_f64_le(in);
  cal.elbo_std = io::read_f64_le(in);
  cal.computed_over = "checkpoint";
  return {std::move(model), std::move(cal)};
}

}  // namespace daal
