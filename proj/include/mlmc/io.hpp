#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "mlmc/density.hpp"
#include "mlmc/multilevel.hpp"
#include "mlmc/spectral.hpp"
#include "mlmc/stochastic_matrix.hpp"
#include "mlmc/szegedy.hpp"

namespace mlmc {

/// Shortest round-trip decimal form; "inf"/"nan" for non-finite values.
std::string format_double(double v);

void write_text(const std::filesystem::path& path, const std::string& content);

nlohmann::json to_json(const Partition& p);

/// row,col,value per stored entry.
std::string matrix_csv(const StochasticMatrix& p);
/// index,mass per bin.
std::string density_csv(const DiscreteDensity& pi);

nlohmann::json to_json(const TauComparison& t);
nlohmann::json to_json(const SenetaCheck& s);
nlohmann::json to_json(const Overlap& o);
nlohmann::json to_json(const SpectralGap& g);
nlohmann::json to_json(const SpectralReport& r);
nlohmann::json to_json(const WalkSpectrum& w);
nlohmann::json to_json(const TotalCostCheck& t);
nlohmann::json to_json(const LevelRecord& r, PipelineMode mode);
nlohmann::json to_json(const PipelineReport& r);

/// Per-level CSV; the classical columns only appear in classical-emulation mode.
std::string pipeline_csv(const PipelineReport& r);

/// step,overlap,autocorrelation.
std::string walk_trace_csv(const WalkTrace& t);

}  // namespace mlmc
