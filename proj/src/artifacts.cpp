#include "daal/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "daal/error.hpp"

namespace daal {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::string label_text(int label) { return label == kOutlierLabel ? "OUTLIER" : std::to_string(label); }

const char* field_name(HeatmapField f) {
  switch (f) {
    case HeatmapField::q_beta: return "q_beta";
    case HeatmapField::phi_b: return "phi_b";
    case HeatmapField::phi: break;
  }
  return "phi";
}

}  // namespace

void emit_csv(const RepeatedResult& results, const std::filesystem::path& runs_path,
              const std::filesystem::path& aggregate_path) {
  std::ofstream runs = open_out(runs_path);
  runs << kRunsCsvHeader << '\n';
  char buf[256];
  for (std::size_t r = 0; r < results.runs.size(); ++r) {
    for (const auto& m : results.runs[r].cycles) {
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.10g,%.10g,%zu,%zu,%zu,%.6f\n", r, m.cycle, m.beta, m.test_accuracy,
                    m.cumulative_labeled, m.outlier_queries, m.cumulative_outlier_queries, m.wall_time_s);
      runs << buf;
    }
  }
  std::ofstream agg = open_out(aggregate_path);
  agg << kAggregateCsvHeader << '\n';
  for (const auto& row : results.aggregate) {
    std::snprintf(buf, sizeof buf, "%zu,%.10g,%.10g,%.10g,%.10g\n", row.cycle, row.mean_acc, row.std_acc,
                  row.mean_outliers, row.std_outliers);
    agg << buf;
  }
}

Tensor heatmap_values(const VaeModel& teacher, const DensityCalibration& cal, const ClassifierModel* classifier,
                      const BoundingBox& box, std::size_t resolution, double beta, HeatmapField field) {
  Tensor grid = score_grid(teacher, cal, box, resolution, field == HeatmapField::phi_b ? 0.0 : beta);
  if (field == HeatmapField::q_beta) return grid;
  if (classifier == nullptr) throw ContractError(std::string("heatmap field ") + field_name(field) + " needs a classifier");
  const auto h = entropy_scores(*classifier, grid_points(box, resolution));
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = field == HeatmapField::phi_b ? h[i] : h[i] * grid[i];
  return grid;
}

void write_pgm(const Tensor& grid, const BoundingBox& box, const std::string& name, double beta,
               const std::filesystem::path& path) {
  const std::size_t g = grid.rows();
  const auto [lo_it, hi_it] = std::minmax_element(grid.data().begin(), grid.data().end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  constexpr int kMax = 65535;
  std::ofstream out = open_out(path);
  out << "P2\n" << grid.cols() << ' ' << g << '\n' << kMax << '\n';
  for (std::size_t r = 0; r < g; ++r) {
    const std::size_t src = g - 1 - r;
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      const double v = hi > lo ? (grid(src, c) - lo) / (hi - lo) : 0.0;
      if (c) out << ' ';
      out << static_cast<int>(std::lround(v * kMax));
    }
    out << '\n';
  }
  std::ofstream meta = open_out(path.string() + ".txt");
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "field = %s\nbeta = %.10g\nx_min = %.10g\nx_max = %.10g\ny_min = %.10g\ny_max = %.10g\n"
                "resolution = %zu\nraw_min = %.17g\nraw_max = %.17g\n",
                name.c_str(), beta, box.x_min, box.x_max, box.y_min, box.y_max, g, lo, hi);
  meta << buf;
}

void emit_heatmap(const VaeModel& teacher, const DensityCalibration& cal, const ClassifierModel* classifier,
                  const BoundingBox& box, std::size_t resolution, double beta, HeatmapField field,
                  const std::filesystem::path& path) {
  write_pgm(heatmap_values(teacher, cal, classifier, box, resolution, beta, field), box, field_name(field), beta, path);
}

void emit_latent_dump(const std::vector<LatentRecord>& records, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << kLatentCsvHeader << '\n';
  char buf[256];
  for (const auto& r : records) {
    const std::string after = r.pred_after < 0 ? "NA" : std::to_string(r.pred_after);
    std::snprintf(buf, sizeof buf, "%zu,%ld,%.10g,%.10g,%d,%s,%s\n", r.cycle, r.pool_id, r.z1, r.z2, r.pred_before,
                  after.c_str(), label_text(r.true_label).c_str());
    out << buf;
  }
}

}  // namespace daal
