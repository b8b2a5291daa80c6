#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "daal/layers.hpp"
#include "daal/optim.hpp"
#include "daal/tensor.hpp"

namespace daal {

enum class DecoderFamily : std::uint32_t { bernoulli = 0, gaussian = 1 };

struct VaeArchitecture {
  std::size_t input_dim = 2;
  std::vector<std::size_t> hidden{128};  // shared by encoder and (mirrored) decoder
  std::size_t latent_dim = 2;
  DecoderFamily decoder = DecoderFamily::gaussian;
  double sigma_dec = 0.5;  // gaussian only
  Activation activation = Activation::relu;

  std::vector<std::size_t> encoder_widths() const;  // input .. 2L
  std::vector<std::size_t> decoder_widths() const;  // L .. input
};

// Variational autoencoder used as the density "teacher". The encoder emits
// [mu | logvar]; the decoder emits Bernoulli logits or Gaussian means.
class VaeModel {
 public:
  explicit VaeModel(VaeArchitecture arch);

  const VaeArchitecture& architecture() const noexcept { return arch_; }
  std::size_t latent_dim() const noexcept { return arch_.latent_dim; }
  std::size_t input_dim() const noexcept { return arch_.input_dim; }

  ParamStore& encoder() noexcept { return encoder_; }
  const ParamStore& encoder() const noexcept { return encoder_; }
  ParamStore& decoder() noexcept { return decoder_; }
  const ParamStore& decoder() const noexcept { return decoder_; }

  void initialize(std::uint64_t seed);

  // Raw encoder output [n × 2L].
  Variable encoder_output(const Variable& x) const;
  // Decoder output before the family link (logits or means) [n × d].
  Variable decoder_output(const Variable& z) const;

 private:
  VaeArchitecture arch_;
  ParamStore encoder_;
  ParamStore decoder_;
};

struct Encoding {
  Tensor mu;
  Tensor logvar;
};

Encoding encode(const VaeModel& model, const Tensor& x);

// z = mu + exp(logvar / 2) * noise.
Variable reparameterize(const Variable& mu, const Variable& logvar, const Tensor& noise);

// Closed-form KL(N(mu, diag exp(logvar)) || N(0, I)) per row, shape [n × 1].
Variable gaussian_kl(const Variable& mu, const Variable& logvar);

struct ElboGraph {
  Variable elbo;            // [n × 1]
  Variable reconstruction;  // [n × 1]
  Variable kl;              // [n × 1]
};

// Differentiable single-sample ELBO. `noise` is [n × L]; an empty tensor
// means zero noise (z = mu).
ElboGraph elbo_graph(const VaeModel& model, const Tensor& x, const Tensor& noise);

// Per-sample ELBO values in nats.
std::vector<double> elbo(const VaeModel& model, const Tensor& x, const Tensor& noise = Tensor());

struct TeacherTrainOptions {
  std::size_t epochs = 100;
  double lr = 1e-3;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;
};

// Seeded init, then Adam ascent on the mean ELBO. Returns mean ELBO per epoch.
std::vector<double> train_teacher(VaeModel& model, const Tensor& data, const TeacherTrainOptions& options);

struct DensityCalibration {
  double elbo_mean = 0.0;
  double elbo_std = 1.0;
  std::string computed_over;
};

// Pool statistics of the deterministic (z = mu) ELBO.
DensityCalibration calibrate(const VaeModel& model, const Tensor& pool, std::string pool_name = "pool");

// sigmoid((ELBO(x) - mean) / std), in (0, 1).
std::vector<double> density_score(const VaeModel& model, const DensityCalibration& cal, const Tensor& x);
double density_from_elbo(double elbo_value, const DensityCalibration& cal);

struct BoundingBox {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
};

// Cell-center coordinates of a g × g grid, row-major with row 0 at y_min.
Tensor grid_points(const BoundingBox& box, std::size_t resolution);

// Row-major [g × g] grid of density_score^beta at cell centers.
Tensor score_grid(const VaeModel& model, const DensityCalibration& cal, const BoundingBox& box, std::size_t resolution,
                  double beta);

void save_teacher(const VaeModel& model, const DensityCalibration& cal, const std::filesystem::path& path);

struct LoadedTeacher {
  VaeModel model;
  DensityCalibration calibration;
};
LoadedTeacher load_teacher(const std::filesystem::path& path);

}  // namespace daal
