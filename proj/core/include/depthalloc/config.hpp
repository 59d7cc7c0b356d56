#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "depthalloc/accommodation.hpp"
#include "depthalloc/weighting.hpp"

namespace depthalloc {

enum class WeightMode { kMeasure, kProfileScale };

// Structured run configuration. Parsing is strict: unknown keys are rejected,
// and parse -> serialize -> parse is lossless.
struct RunConfig {
    std::string scenario_name = "custom";
    std::string output_dir = "out";
    std::uint64_t seed = 1;

    AccommodationModel model;
    double pupil_mm = 3.0;
    std::map<double, double> dof_fwhm_overrides;

    struct Train {
        double d_min = 0.5;
        double d_max = 7.08;
        double spacing_d = (7.08 - 0.5) / 150.0;
    } train;

    struct GridCfg {
        int depth_cols = 512;
        int age_rows = 61;
        int height_bins = 128;
    } grid;

    AgeDistribution age;
    std::string age_table_path;  // used when age.kind == kTable
    DepthEmphasis depth;
    WeightMode weight_mode = WeightMode::kMeasure;

    struct Solve {
        int t_max = 9;
        long long timeout_ms = 0;
        bool dump_matrix = false;
    } solve;

    struct Quantize {
        std::vector<double> ages = {10, 20, 30, 40, 50, 60, 70};
        std::vector<double> pupils = {2, 3, 6};
        double z_stop_m = 10.0;
    } quantize;

    struct Binocular {
        double ipd_mm = 64.0;
        double acuity_arcmin = 0.5;
        double z_start_m = 0.25;
        double z_stop_m = 15.0;
        double vernier_floor_um = 100.0;
        bool apply_floor = true;
        std::vector<double> fixation_m = {0.4, 2.37};
        // ANSUR-derived IPD extremes; spread over them reproduces the
        // reported ~7.7% count variation.
        std::vector<double> ipd_set_mm = {59.3, 64.0};
        int trace_samples = 201;
        double h_override = std::numeric_limits<double>::quiet_NaN();
    } binocular;

    DofTable dof_table() const;  // defaults + overrides applied
};

// Strict JSON (de)serialization.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

// Canonical 64-bit FNV-1a hash of the serialized config.
std::uint64_t config_hash(const RunConfig& config);

// Named presets reproducing the paper's figure configurations.
// Known names: unweighted_{3mm,2mm}_{2m,11m}, fig4a..fig4d, fig5,
// fig6a..fig6d, fig9a..fig9d, supp_fig1.
RunConfig scenario_config(const std::string& name);
std::vector<std::string> scenario_names();

// Run provenance record, written atomically at run end.
struct RunManifest {
    std::string scenario_name;
    std::uint64_t config_hash = 0;
    std::string tool_version;
    std::vector<std::pair<std::string, double>> stage_wall_ms;
    std::vector<std::string> outputs;
};

void write_manifest(const RunManifest& manifest, const std::string& path);

}  // namespace depthalloc
