#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mrl/dataset.hpp"
#include "mrl/eval.hpp"

namespace mrl {

// Shortest text round-tripping the double exactly (%.17g).
std::string format_g17(double v);

// Dataset files carry a "label,x1,...,xd" header row, then one row per
// point; the sidecar holds the geometry card as key=value lines. Writing
// then reading gives back bit-identical points.
void write_dataset_csv(const LabeledDataset& ds, const std::string& csv_path,
                       const std::string& meta_path);
LabeledDataset read_dataset_csv(const std::string& csv_path,
                                const std::string& meta_path);

// Meta path convention: the csv path with its extension swapped for ".meta".
std::string meta_path_for(const std::string& csv_path);

// Long-form robustness rows: epsilon,attack,accuracy,seed.
void write_curves_csv(const std::string& path,
                      const std::vector<RobustnessCurve>& curves,
                      const std::vector<std::uint64_t>& seeds);

// Aggregate rows: epsilon,acc_mean,acc_std,nauc_mean,nauc_std. The nauc
// columns repeat the curve-level aggregate on every row.
void write_aggregate_csv(const std::string& path, const CurveAggregate& agg);

}  // namespace mrl
