#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "daal/harness.hpp"
#include "daal/learner.hpp"
#include "daal/teacher.hpp"

namespace daal {

inline constexpr const char* kRunsCsvHeader =
    "run,cycle,beta,test_accuracy,cumulative_labeled,outlier_queries,cumulative_outlier_queries,wall_time_s";
inline constexpr const char* kAggregateCsvHeader = "cycle,mean_acc,std_acc,mean_outliers,std_outliers";
inline constexpr const char* kScoreDumpHeader = "cycle,pool_id,phi_b,q,beta,log_phi,selected,is_outlier";
inline constexpr const char* kLatentCsvHeader = "cycle,pool_id,z1,z2,pred_before,pred_after,true_label";

// Writes the per-run table to `runs_path` and the per-cycle aggregate to
// `aggregate_path`.
void emit_csv(const RepeatedResult& results, const std::filesystem::path& runs_path,
              const std::filesystem::path& aggregate_path);

enum class HeatmapField { q_beta, phi_b, phi };

// Raw [g × g] field on the grid of grid_points(): q^beta, the classifier's
// entropy, or their product. phi_b and phi need a classifier.
Tensor heatmap_values(const VaeModel& teacher, const DensityCalibration& cal, const ClassifierModel* classifier,
                      const BoundingBox& box, std::size_t resolution, double beta, HeatmapField field);

// Plain PGM (P2, maxval 65535), values rescaled linearly from [min, max].
// Image rows run from y_max (top) down to y_min. A `<path>.txt` companion
// records bbox, resolution and the raw range.
void write_pgm(const Tensor& grid, const BoundingBox& box, const std::string& field_name, double beta,
               const std::filesystem::path& path);

void emit_heatmap(const VaeModel& teacher, const DensityCalibration& cal, const ClassifierModel* classifier,
                  const BoundingBox& box, std::size_t resolution, double beta, HeatmapField field,
                  const std::filesystem::path& path);

void emit_latent_dump(const std::vector<LatentRecord>& records, const std::filesystem::path& path);

}  // namespace daal
