#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "limase/dataset.hpp"
#include "limase/matrix.hpp"
#include "limase/shapley.hpp"
#include "limase/sp.hpp"

namespace limase {

struct Contribution {
  std::size_t feature = 0;
  std::string name;
  double value = 0.0;  // feature value of the explained instance
  double phi = 0.0;
};

struct ForcePlotData {
  double base_value = 0.0;
  double fx = 0.0;
  std::vector<Contribution> contributions;  // by |phi| descending, then index
  std::vector<std::size_t> positive;        // positions in contributions, phi > 0
  std::vector<std::size_t> negative;        // phi < 0
};

struct SummarySeries {
  std::size_t feature = 0;
  std::string name;
  double mean_abs_phi = 0.0;
  std::vector<double> phi;
  std::vector<double> color;  // min-max normalized feature value in [0, 1]
};

struct SummaryPlotData {
  std::vector<SummarySeries> series;  // display order: mean |phi| descending
  std::size_t sample_count = 0;
};

// Throws InvalidArgument when base_value + sum(phi) misses fx by more than
// 1e-6 (relative to max(1, |fx|)).
ForcePlotData build_force_plot(const ShapExplanation& e, std::span<const FeatureMeta> features);

// `x` holds the explained instances, row-aligned with `m`. A feature that is
// constant across x gets color 0.5.
SummaryPlotData build_summary_plot(const ExplanationMatrix& m, const Matrix& x,
                                   std::span<const FeatureMeta> features);

struct SvgOptions {
  std::size_t max_summary_features = 15;
};

inline constexpr int kSvgWidth = 900;
inline constexpr int kForceHeight = 160;
int summary_height(std::size_t rendered_features);

std::string render_svg(const ForcePlotData& plot);
std::string render_svg(const SummaryPlotData& plot, const SvgOptions& options = {});
void render_svg(const ForcePlotData& plot, const std::filesystem::path& path);
void render_svg(const SummaryPlotData& plot, const std::filesystem::path& path,
                const SvgOptions& options = {});

}  // namespace limase
