#include "depthalloc/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "depthalloc/hypograph.hpp"
#include "depthalloc/units.hpp"
#include "depthalloc/version.hpp"

namespace depthalloc {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0)
        .count();
}

int thread_budget() {
    if (const char* env = std::getenv("DEPTHALLOC_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

AgeDistribution resolve_age(const RunConfig& config) {
    if (config.age.kind == AgeDistribution::Kind::kTable) {
        if (!config.age_table_path.empty())
            return load_population_table(config.age_table_path);
        return us_census_distribution();
    }
    return config.age;
}

bool is_unweighted(const RunConfig& config) {
    return config.age.kind == AgeDistribution::Kind::kUniform &&
           config.depth.kind == DepthEmphasis::Kind::kNone;
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
    std::ofstream out(dir / name);
    if (!out) throw IoError("cannot write " + (dir / name).string());
    return out;
}

std::string join_indices(const std::vector<int>& idx) {
    std::ostringstream os;
    for (size_t i = 0; i < idx.size(); ++i) {
        if (i) os << ';';
        os << idx[i];
    }
    return os.str();
}

const char* certificate_name(Certificate c) {
    switch (c) {
        case Certificate::kLpIntegral: return "lp_integral";
        case Certificate::kBranchAndBound: return "branch_and_bound";
        case Certificate::kBaseline: return "baseline";
    }
    return "baseline";
}

nlohmann::json selection_record(const KnollTrain& train, int t,
                                const char* mode, const Selection& s,
                                double eval_error, double wall_ms) {
    std::vector<double> centers, depths_cm;
    for (int i : s.indices) {
        centers.push_back(train.knolls[i].center);
        depths_cm.push_back(100.0 * diopter_to_depth(train.knolls[i].center));
    }
    return {{"T", t},
            {"mode", mode},
            {"indices", s.indices},
            {"centers_diopter", centers},
            {"depths_cm", depths_cm},
            {"objective", s.objective},
            {"coverage_error", eval_error},
            {"certificate", certificate_name(s.certificate)},
            {"wall_ms", wall_ms}};
}

}  // namespace

QuantizeResult run_quantize(const RunConfig& config) {
    if (config.quantize.ages.empty())
        throw ConfigError("quantize: age list is empty");
    if (config.quantize.pupils.empty())
        throw ConfigError("quantize: pupil list is empty");
    const DofTable dof = config.dof_table();
    QuantizeResult result;
    for (double age : config.quantize.ages)
        for (double pupil : config.quantize.pupils)
            result.rows.push_back(
                {age, pupil,
                 iterate_focal_planes(config.model, dof, age, pupil,
                                      config.quantize.z_stop_m)});
    return result;
}

AllocateResult run_allocate(const RunConfig& config) {
    if (config.solve.t_max < 1)
        throw ConfigError("allocate: t_max must be >= 1");
    const DofTable dof = config.dof_table();
    const Grid grid =
        Grid::make(config.train.d_min, config.train.d_max,
                   config.grid.depth_cols, config.grid.age_rows,
                   config.grid.height_bins, Measure::kDepth);
    KnollTrain train =
        build_train(config.train.d_min, config.train.d_max,
                    config.train.spacing_d, dof.dof_fwhm(config.pupil_mm),
                    config.model, grid);

    WeightField field;
    const WeightField* field_ptr = nullptr;
    if (!is_unweighted(config)) {
        field = build_weight_field(resolve_age(config), config.depth, grid);
        if (config.weight_mode == WeightMode::kProfileScale) {
            // Importance reshapes the profiles themselves; the box measure
            // stays uniform.
            for (Knoll& k : train.knolls)
                for (int r = 0; r < grid.age_rows; ++r)
                    for (int c = 0; c < grid.depth_cols; ++c)
                        k.values[static_cast<size_t>(r) * grid.depth_cols +
                                 c] *= field.at(r, c);
        } else {
            field_ptr = &field;
        }
    }

    const CondensedProblem cp =
        rasterize_condensed(train, grid, config.model, field_ptr);

    AllocateResult result;
    result.knoll_count = train.size();
    result.pixel_count = grid.pixel_count();
    result.condensed_rows = cp.m.rows();
    result.total_weight = cp.m.total_weight();
    result.total_eval = cp.total_eval;
    result.intrinsic_error_ref =
        intrinsic_error(config.model, dof, config.pupil_mm, config.train.d_min,
                        config.train.d_max);

    AllocationProblem base;
    base.condensed = &cp.m;
    base.total_weight = result.total_weight;
    base.timeout_ms = config.solve.timeout_ms;

    auto eval_error = [&](const Selection& s) {
        return 1.0 -
               covered_weight(cp.m, s.mask(), cp.u_eval) / cp.total_eval;
    };

    for (int t = 1; t <= config.solve.t_max; ++t) {
        AllocationProblem p = base;
        p.budget = t;
        AllocationRow row;
        row.budget = t;
        const auto t0 = Clock::now();
        row.exact = solve_mbp(p);
        row.exact_wall_ms = ms_since(t0);
        row.greedy = greedy_select(p);
        row.equidistant_depth =
            equidistant_baseline(train, t, EquidistantMode::kDepth, p);
        row.equidistant_diopter =
            equidistant_baseline(train, t, EquidistantMode::kDiopter, p);
        for (int i : row.exact.indices)
            row.exact_centers_cm.push_back(
                100.0 * diopter_to_depth(train.knolls[i].center));
        std::sort(row.exact_centers_cm.begin(), row.exact_centers_cm.end());

        result.exact_error.push_back(eval_error(row.exact));
        result.greedy_error.push_back(eval_error(row.greedy));
        result.equidistant_depth_error.push_back(
            eval_error(row.equidistant_depth));
        result.equidistant_diopter_error.push_back(
            eval_error(row.equidistant_diopter));
        result.rows.push_back(std::move(row));
    }

    if (config.solve.dump_matrix) {
        for (int j = 0; j < cp.m.rows(); ++j) {
            result.matrix_u.push_back(cp.m.u[j]);
            for (int i = 0; i < cp.m.n; ++i)
                if (cp.m.patterns[j].test(i))
                    result.matrix_triplets.emplace_back(j, i);
        }
    }
    return result;
}

BinocularResult run_binocular(const RunConfig& config) {
    StereoParams params;
    params.ipd_m = config.binocular.ipd_mm * 1e-3;
    params.acuity_rad =
        StereoParams::arcmin_to_rad(config.binocular.acuity_arcmin);
    params.z_start_m = config.binocular.z_start_m;
    params.z_stop_m = config.binocular.z_stop_m;
    params.vernier_floor_m = config.binocular.vernier_floor_um * 1e-6;
    if (!(params.ipd_m > 0.0))
        throw ConfigError("binocular: ipd_mm must be positive");
    if (!(params.acuity_rad > 0.0))
        throw ConfigError("binocular: acuity_arcmin must be positive");

    BinocularResult result;
    result.levels = iterate_horopters(params, config.binocular.apply_floor);
    result.levels_no_floor = iterate_horopters(params, false);
    if (config.binocular.ipd_set_mm.size() >= 2) {
        std::vector<double> ipds_m;
        for (double mm : config.binocular.ipd_set_mm)
            ipds_m.push_back(mm * 1e-3);
        result.ipd_spread =
            ipd_sensitivity(params, ipds_m, config.binocular.apply_floor);
    }
    result.h_fit = fit_H(default_h_table());

    const auto& fixations = config.binocular.fixation_m;
    result.traces.resize(fixations.size());
    const int workers = std::min<int>(thread_budget(),
                                      static_cast<int>(fixations.size()));
    if (workers <= 1) {
        for (size_t i = 0; i < fixations.size(); ++i) {
            const double h = std::isnan(config.binocular.h_override)
                                 ? result.h_fit.predict(fixations[i])
                                 : config.binocular.h_override;
            result.traces[i] = horopter_trace(fixations[i], params.ipd_m, h,
                                              config.binocular.trace_samples);
        }
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (size_t i = w; i < fixations.size();
                         i += static_cast<size_t>(workers)) {
                        const double h =
                            std::isnan(config.binocular.h_override)
                                ? result.h_fit.predict(fixations[i])
                                : config.binocular.h_override;
                        result.traces[i] =
                            horopter_trace(fixations[i], params.ipd_m, h,
                                           config.binocular.trace_samples);
                    }
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    return result;
}

std::vector<std::string> write_quantize(const QuantizeResult& r,
                                        const RunConfig& config) {
    const fs::path dir(config.output_dir);
    auto out = open_output(dir, "focal_planes.csv");
    out << "age,pupil_mm,plane_index,distance_cm,diopter\n";
    for (const QuantizeRow& row : r.rows)
        for (size_t p = 0; p < row.planes_cm.size(); ++p)
            out << row.age << ',' << row.pupil_mm << ',' << p << ','
                << row.planes_cm[p] << ',' << 100.0 / row.planes_cm[p] << '\n';
    return {"focal_planes.csv"};
}

std::vector<std::string> write_allocate(const AllocateResult& r,
                                        const RunConfig& config) {
    const fs::path dir(config.output_dir);
    const DofTable dof = config.dof_table();
    const Grid grid =
        Grid::make(config.train.d_min, config.train.d_max,
                   config.grid.depth_cols, config.grid.age_rows,
                   config.grid.height_bins, Measure::kDepth);
    const KnollTrain train =
        build_train(config.train.d_min, config.train.d_max,
                    config.train.spacing_d, dof.dof_fwhm(config.pupil_mm),
                    config.model, grid);

    std::vector<std::string> files;

    {
        nlohmann::json records = nlohmann::json::array();
        for (size_t t = 0; t < r.rows.size(); ++t) {
            const AllocationRow& row = r.rows[t];
            records.push_back(selection_record(train, row.budget, "optimized",
                                               row.exact, r.exact_error[t],
                                               row.exact_wall_ms));
            records.push_back(selection_record(train, row.budget, "greedy",
                                               row.greedy, r.greedy_error[t],
                                               0.0));
            records.push_back(selection_record(
                train, row.budget, "equidistant_depth", row.equidistant_depth,
                r.equidistant_depth_error[t], 0.0));
            records.push_back(selection_record(
                train, row.budget, "equidistant_diopter",
                row.equidistant_diopter, r.equidistant_diopter_error[t], 0.0));
        }
        auto out = open_output(dir, "solutions.json");
        out << records.dump(2) << "\n";
        files.push_back("solutions.json");
    }
    {
        auto out = open_output(dir, "sweep.csv");
        out << "T,mode,objective,coverage_error,indices\n";
        for (size_t t = 0; t < r.rows.size(); ++t) {
            const AllocationRow& row = r.rows[t];
            auto line = [&](const char* mode, const Selection& s,
                            double err) {
                out << row.budget << ',' << mode << ',' << s.objective << ','
                    << err << ',' << join_indices(s.indices) << '\n';
            };
            line("optimized", row.exact, r.exact_error[t]);
            line("greedy", row.greedy, r.greedy_error[t]);
            line("equidistant_depth", row.equidistant_depth,
                 r.equidistant_depth_error[t]);
            line("equidistant_diopter", row.equidistant_diopter,
                 r.equidistant_diopter_error[t]);
        }
        files.push_back("sweep.csv");
    }
    {
        auto out = open_output(dir, "comparison.csv");
        out << "T,optimized,greedy,equidistant_depth,equidistant_diopter,"
               "intrinsic\n";
        for (size_t t = 0; t < r.rows.size(); ++t)
            out << r.rows[t].budget << ',' << r.exact_error[t] << ','
                << r.greedy_error[t] << ',' << r.equidistant_depth_error[t]
                << ',' << r.equidistant_diopter_error[t] << ','
                << r.intrinsic_error_ref << '\n';
        files.push_back("comparison.csv");
    }
    if (config.solve.dump_matrix) {
        auto out = open_output(dir, "matrix.csv");
        out << "row,col\n";
        for (const auto& [row, col] : r.matrix_triplets)
            out << row << ',' << col << '\n';
        files.push_back("matrix.csv");
        auto uout = open_output(dir, "matrix_u.csv");
        uout << "u\n";
        for (double u : r.matrix_u) uout << u << '\n';
        files.push_back("matrix_u.csv");
    }
    return files;
}

std::vector<std::string> write_binocular(const BinocularResult& r,
                                         const RunConfig& config) {
    const fs::path dir(config.output_dir);
    std::vector<std::string> files;
    {
        auto out = open_output(dir, "levels.csv");
        out << "index,z_m,delta_z_m\n";
        const auto& z = r.levels.distances_m;
        for (size_t i = 0; i < z.size(); ++i) {
            const double dz = i + 1 < z.size() ? z[i + 1] - z[i] : 0.0;
            out << i << ',' << z[i] << ',' << dz << '\n';
        }
        files.push_back("levels.csv");
    }
    for (size_t i = 0; i < r.traces.size(); ++i) {
        std::ostringstream name;
        name << "trace_" << i << ".csv";
        auto out = open_output(dir, name.str());
        out << "x_m,y_m\n";
        for (const auto& [x, y] : r.traces[i].points)
            out << x << ',' << y << '\n';
        files.push_back(name.str());
    }
    {
        nlohmann::json j = {
            {"level_count", r.levels.count()},
            {"level_count_no_floor", r.levels_no_floor.count()},
            {"ipd_spread", r.ipd_spread},
            {"h_fit",
             {{"slope", r.h_fit.slope},
              {"intercept", r.h_fit.intercept},
              {"rms_residual", r.h_fit.rms_residual}}}};
        auto out = open_output(dir, "binocular_summary.json");
        out << j.dump(2) << "\n";
        files.push_back("binocular_summary.json");
    }
    return files;
}

RunManifest run_and_export(const RunConfig& config, const std::string& kind) {
    fs::create_directories(config.output_dir);
    RunManifest manifest;
    manifest.scenario_name = config.scenario_name;
    manifest.config_hash = config_hash(config);
    manifest.tool_version = kVersionString;

    const auto t0 = Clock::now();
    if (kind == "quantize-monocular") {
        const QuantizeResult r = run_quantize(config);
        manifest.stage_wall_ms.emplace_back("quantize", ms_since(t0));
        const auto t1 = Clock::now();
        manifest.outputs = write_quantize(r, config);
        manifest.stage_wall_ms.emplace_back("export", ms_since(t1));
    } else if (kind == "allocate") {
        const AllocateResult r = run_allocate(config);
        manifest.stage_wall_ms.emplace_back("allocate", ms_since(t0));
        const auto t1 = Clock::now();
        manifest.outputs = write_allocate(r, config);
        manifest.stage_wall_ms.emplace_back("export", ms_since(t1));
    } else if (kind == "binocular") {
        const BinocularResult r = run_binocular(config);
        manifest.stage_wall_ms.emplace_back("binocular", ms_since(t0));
        const auto t1 = Clock::now();
        manifest.outputs = write_binocular(r, config);
        manifest.stage_wall_ms.emplace_back("export", ms_since(t1));
    } else {
        throw ConfigError("unknown command '" + kind + "'");
    }
    write_manifest(manifest,
                   (fs::path(config.output_dir) / "run_manifest.json")
                       .string());
    return manifest;
}

}  // namespace depthalloc
