#pragma once

#include <string>
#include <vector>

#include "depthalloc/binocular.hpp"
#include "depthalloc/config.hpp"
#include "depthalloc/solver.hpp"

namespace depthalloc {

// Orchestration of the three run kinds used by the command-line tool and the
// acceptance tests. Each run_* function is pure computation; write_* persists
// the results as CSV/JSON under config.output_dir and returns the paths
// written (relative to that directory).

struct QuantizeRow {
    double age = 0.0;
    double pupil_mm = 0.0;
    std::vector<double> planes_cm;  // ascending
};

struct QuantizeResult {
    std::vector<QuantizeRow> rows;
};

struct AllocationRow {
    int budget = 0;
    Selection exact;
    Selection greedy;
    Selection equidistant_depth;
    Selection equidistant_diopter;
    std::vector<double> exact_centers_cm;  // ascending plane depths
    double exact_wall_ms = 0.0;
};

struct AllocateResult {
    int knoll_count = 0;
    long long pixel_count = 0;
    int condensed_rows = 0;
    double total_weight = 0.0;  // solver objective normalizer
    double total_eval = 0.0;    // achievable-box normalizer
    double intrinsic_error_ref = 0.0;  // eye's own quantization, config pupil
    std::vector<AllocationRow> rows;   // one per T in 1..t_max
    // Evaluation-weighted coverage error per T for each policy.
    std::vector<double> exact_error;
    std::vector<double> greedy_error;
    std::vector<double> equidistant_depth_error;
    std::vector<double> equidistant_diopter_error;
    // Sparse (row, col) triplets and the parallel u vector, filled only when
    // solve.dump_matrix is set.
    std::vector<std::pair<int, int>> matrix_triplets;
    std::vector<double> matrix_u;
};

struct BinocularResult {
    HoropterLevels levels;          // config IPD, floor per config
    HoropterLevels levels_no_floor;
    double ipd_spread = 0.0;        // relative count spread over ipd_set
    HFit h_fit;                     // over default_h_table()
    std::vector<HoropterTrace> traces;  // one per fixation distance
};

QuantizeResult run_quantize(const RunConfig& config);
AllocateResult run_allocate(const RunConfig& config);
BinocularResult run_binocular(const RunConfig& config);

std::vector<std::string> write_quantize(const QuantizeResult& r,
                                        const RunConfig& config);
std::vector<std::string> write_allocate(const AllocateResult& r,
                                        const RunConfig& config);
std::vector<std::string> write_binocular(const BinocularResult& r,
                                         const RunConfig& config);

// Run one subcommand end to end: compute, export, and write run_manifest.json
// (atomically) under config.output_dir. kind is one of "quantize-monocular",
// "allocate", "binocular".
RunManifest run_and_export(const RunConfig& config, const std::string& kind);

}  // namespace depthalloc
