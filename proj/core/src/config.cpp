#include "depthalloc/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "depthalloc/version.hpp"

namespace depthalloc {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const char* where,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok)
            throw ConfigError(std::string("config: unknown key '") + it.key() +
                              "' in " + where);
    }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
    if (auto it = obj.find(key); it != obj.end()) {
        try {
            out = it->get<T>();
        } catch (const json::exception&) {
            throw ConfigError(std::string("config: bad value for '") + key +
                              "'");
        }
    }
}

AgeDistribution::Kind age_kind_from(const std::string& s) {
    if (s == "uniform") return AgeDistribution::Kind::kUniform;
    if (s == "gamma") return AgeDistribution::Kind::kGamma;
    if (s == "table") return AgeDistribution::Kind::kTable;
    throw ConfigError("config: unknown age.kind '" + s + "'");
}

std::string age_kind_str(AgeDistribution::Kind k) {
    switch (k) {
        case AgeDistribution::Kind::kUniform: return "uniform";
        case AgeDistribution::Kind::kGamma: return "gamma";
        case AgeDistribution::Kind::kTable: return "table";
    }
    return "uniform";
}

DepthEmphasis::Kind depth_kind_from(const std::string& s) {
    if (s == "none") return DepthEmphasis::Kind::kNone;
    if (s == "gaussian_diopter") return DepthEmphasis::Kind::kGaussianDiopter;
    if (s == "gaussian_depth") return DepthEmphasis::Kind::kGaussianDepth;
    throw ConfigError("config: unknown depth.kind '" + s + "'");
}

std::string depth_kind_str(DepthEmphasis::Kind k) {
    switch (k) {
        case DepthEmphasis::Kind::kNone: return "none";
        case DepthEmphasis::Kind::kGaussianDiopter: return "gaussian_diopter";
        case DepthEmphasis::Kind::kGaussianDepth: return "gaussian_depth";
    }
    return "none";
}

}  // namespace

DofTable RunConfig::dof_table() const {
    DofTable t;
    for (const auto& [pupil, fwhm] : dof_fwhm_overrides) t.set(pupil, fwhm);
    return t;
}

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: JSON parse failure: ") +
                          e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    check_keys(j, "top level",
               {"scenario_name", "output_dir", "seed", "model", "pupil_mm",
                "dof_fwhm_overrides", "d_min", "d_max", "spacing_d", "grid",
                "age", "depth", "weight_mode", "solve", "quantize",
                "binocular"});

    RunConfig c;
    read(j, "scenario_name", c.scenario_name);
    read(j, "output_dir", c.output_dir);
    read(j, "seed", c.seed);
    read(j, "pupil_mm", c.pupil_mm);
    read(j, "d_min", c.train.d_min);
    read(j, "d_max", c.train.d_max);
    read(j, "spacing_d", c.train.spacing_d);

    if (auto it = j.find("model"); it != j.end()) {
        check_keys(*it, "model",
                   {"amplitude_max", "midpoint_age", "slope", "rest_offset_d"});
        read(*it, "amplitude_max", c.model.amplitude_max);
        read(*it, "midpoint_age", c.model.midpoint_age);
        read(*it, "slope", c.model.slope);
        read(*it, "rest_offset_d", c.model.rest_offset_d);
    }
    if (auto it = j.find("dof_fwhm_overrides"); it != j.end()) {
        for (auto kv = it->begin(); kv != it->end(); ++kv) {
            try {
                c.dof_fwhm_overrides[std::stod(kv.key())] =
                    kv.value().get<double>();
            } catch (const std::exception&) {
                throw ConfigError("config: bad dof_fwhm_overrides entry '" +
                                  kv.key() + "'");
            }
        }
    }
    if (auto it = j.find("grid"); it != j.end()) {
        check_keys(*it, "grid", {"depth_cols", "age_rows", "height_bins"});
        read(*it, "depth_cols", c.grid.depth_cols);
        read(*it, "age_rows", c.grid.age_rows);
        read(*it, "height_bins", c.grid.height_bins);
    }
    if (auto it = j.find("age"); it != j.end()) {
        check_keys(*it, "age", {"kind", "k", "theta", "table_path"});
        std::string kind = age_kind_str(c.age.kind);
        read(*it, "kind", kind);
        c.age.kind = age_kind_from(kind);
        read(*it, "k", c.age.k);
        read(*it, "theta", c.age.theta);
        read(*it, "table_path", c.age_table_path);
    }
    if (auto it = j.find("depth"); it != j.end()) {
        check_keys(*it, "depth", {"kind", "mean", "sd"});
        std::string kind = depth_kind_str(c.depth.kind);
        read(*it, "kind", kind);
        c.depth.kind = depth_kind_from(kind);
        read(*it, "mean", c.depth.mean);
        read(*it, "sd", c.depth.sd);
    }
    if (auto it = j.find("weight_mode"); it != j.end()) {
        const std::string m = it->get<std::string>();
        if (m == "measure") c.weight_mode = WeightMode::kMeasure;
        else if (m == "profile_scale") c.weight_mode = WeightMode::kProfileScale;
        else throw ConfigError("config: unknown weight_mode '" + m + "'");
    }
    if (auto it = j.find("solve"); it != j.end()) {
        check_keys(*it, "solve", {"t_max", "timeout_ms", "dump_matrix"});
        read(*it, "t_max", c.solve.t_max);
        read(*it, "timeout_ms", c.solve.timeout_ms);
        read(*it, "dump_matrix", c.solve.dump_matrix);
    }
    if (auto it = j.find("quantize"); it != j.end()) {
        check_keys(*it, "quantize", {"ages", "pupils", "z_stop_m"});
        read(*it, "ages", c.quantize.ages);
        read(*it, "pupils", c.quantize.pupils);
        read(*it, "z_stop_m", c.quantize.z_stop_m);
    }
    if (auto it = j.find("binocular"); it != j.end()) {
        check_keys(*it, "binocular",
                   {"ipd_mm", "acuity_arcmin", "z_start_m", "z_stop_m",
                    "vernier_floor_um", "apply_floor", "fixation_m",
                    "ipd_set_mm", "trace_samples", "h_override"});
        auto& b = c.binocular;
        read(*it, "ipd_mm", b.ipd_mm);
        read(*it, "acuity_arcmin", b.acuity_arcmin);
        read(*it, "z_start_m", b.z_start_m);
        read(*it, "z_stop_m", b.z_stop_m);
        read(*it, "vernier_floor_um", b.vernier_floor_um);
        read(*it, "apply_floor", b.apply_floor);
        read(*it, "fixation_m", b.fixation_m);
        read(*it, "ipd_set_mm", b.ipd_set_mm);
        read(*it, "trace_samples", b.trace_samples);
        if (auto h = it->find("h_override"); h != it->end() && !h->is_null())
            b.h_override = h->get<double>();
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& c) {
    json j;
    j["scenario_name"] = c.scenario_name;
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    j["pupil_mm"] = c.pupil_mm;
    j["d_min"] = c.train.d_min;
    j["d_max"] = c.train.d_max;
    j["spacing_d"] = c.train.spacing_d;
    j["model"] = {{"amplitude_max", c.model.amplitude_max},
                  {"midpoint_age", c.model.midpoint_age},
                  {"slope", c.model.slope},
                  {"rest_offset_d", c.model.rest_offset_d}};
    json overrides = json::object();
    for (const auto& [pupil, fwhm] : c.dof_fwhm_overrides) {
        std::ostringstream key;
        key << pupil;
        overrides[key.str()] = fwhm;
    }
    j["dof_fwhm_overrides"] = overrides;
    j["grid"] = {{"depth_cols", c.grid.depth_cols},
                 {"age_rows", c.grid.age_rows},
                 {"height_bins", c.grid.height_bins}};
    j["age"] = {{"kind", age_kind_str(c.age.kind)},
                {"k", c.age.k},
                {"theta", c.age.theta},
                {"table_path", c.age_table_path}};
    j["depth"] = {{"kind", depth_kind_str(c.depth.kind)},
                  {"mean", c.depth.mean},
                  {"sd", c.depth.sd}};
    j["weight_mode"] =
        c.weight_mode == WeightMode::kMeasure ? "measure" : "profile_scale";
    j["solve"] = {{"t_max", c.solve.t_max},
                  {"timeout_ms", c.solve.timeout_ms},
                  {"dump_matrix", c.solve.dump_matrix}};
    j["quantize"] = {{"ages", c.quantize.ages},
                     {"pupils", c.quantize.pupils},
                     {"z_stop_m", c.quantize.z_stop_m}};
    json b = {{"ipd_mm", c.binocular.ipd_mm},
              {"acuity_arcmin", c.binocular.acuity_arcmin},
              {"z_start_m", c.binocular.z_start_m},
              {"z_stop_m", c.binocular.z_stop_m},
              {"vernier_floor_um", c.binocular.vernier_floor_um},
              {"apply_floor", c.binocular.apply_floor},
              {"fixation_m", c.binocular.fixation_m},
              {"ipd_set_mm", c.binocular.ipd_set_mm},
              {"trace_samples", c.binocular.trace_samples}};
    if (std::isnan(c.binocular.h_override))
        b["h_override"] = nullptr;
    else
        b["h_override"] = c.binocular.h_override;
    j["binocular"] = b;
    return j.dump(2);
}

std::uint64_t config_hash(const RunConfig& config) {
    const std::string s = serialize_config(config);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

RunConfig base_scenario(double pupil_mm, bool far_range) {
    RunConfig c;
    c.pupil_mm = pupil_mm;
    if (far_range) {
        c.train.d_min = 0.09;  // 11.1 m
        c.train.d_max = 7.08;
        c.train.spacing_d = 0.044;
    } else {
        c.train.d_min = 0.5;  // 2 m
        c.train.d_max = 7.08;
        c.train.spacing_d = (7.08 - 0.5) / 150.0;
    }
    return c;
}

}  // namespace

std::vector<std::string> scenario_names() {
    return {"unweighted_3mm_2m", "unweighted_3mm_11m", "unweighted_2mm_2m",
            "unweighted_2mm_11m", "fig4a", "fig4b", "fig4c", "fig4d", "fig5",
            "fig6a", "fig6b", "fig6c", "fig6d", "fig9a", "fig9b", "fig9c",
            "fig9d", "supp_fig1"};
}

RunConfig scenario_config(const std::string& name) {
    RunConfig c;
    if (name == "unweighted_3mm_2m" || name == "fig9a") {
        c = base_scenario(3.0, false);
    } else if (name == "unweighted_3mm_11m" || name == "fig9b" ||
               name == "supp_fig1") {
        c = base_scenario(3.0, true);
    } else if (name == "unweighted_2mm_2m" || name == "fig9c" ||
               name == "fig5") {
        c = base_scenario(2.0, false);
    } else if (name == "unweighted_2mm_11m" || name == "fig9d") {
        c = base_scenario(2.0, true);
    } else if (name == "fig4a" || name == "fig6a") {
        c = base_scenario(name == "fig4a" ? 3.0 : 2.0, false);
        c.age.kind = AgeDistribution::Kind::kGamma;
        c.age.k = 3.0;
        c.age.theta = 10.0;
    } else if (name == "fig4b" || name == "fig6b") {
        c = base_scenario(name == "fig4b" ? 3.0 : 2.0, false);
        c.age.kind = AgeDistribution::Kind::kTable;
    } else if (name == "fig4c" || name == "fig6c") {
        c = base_scenario(name == "fig4c" ? 3.0 : 2.0, false);
        c.age.kind = AgeDistribution::Kind::kTable;
        c.depth.kind = DepthEmphasis::Kind::kGaussianDiopter;
        c.depth.mean = 1.5;
        c.depth.sd = 0.5;
    } else if (name == "fig4d" || name == "fig6d") {
        c = base_scenario(name == "fig4d" ? 3.0 : 2.0, false);
        c.age.kind = AgeDistribution::Kind::kTable;
        c.depth.kind = DepthEmphasis::Kind::kGaussianDepth;
        c.depth.mean = 0.66;  // desktop-monitor viewing distance, meters
        c.depth.sd = 0.20;
    } else {
        throw ConfigError("config: unknown scenario '" + name + "'");
    }
    c.scenario_name = name;
    return c;
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
    json j;
    j["scenario_name"] = manifest.scenario_name;
    std::ostringstream hash;
    hash << std::hex << manifest.config_hash;
    j["config_hash"] = hash.str();
    j["tool_version"] = manifest.tool_version;
    json stages = json::array();
    for (const auto& [stage, ms] : manifest.stage_wall_ms)
        stages.push_back({{"stage", stage}, {"wall_ms", ms}});
    j["stage_wall_ms"] = stages;
    j["outputs"] = manifest.outputs;

    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw IoError("manifest: cannot write " + tmp);
        out << j.dump(2) << "\n";
        if (!out) throw IoError("manifest: write failure on " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoError("manifest: cannot rename " + tmp + " to " + path);
}

}  // namespace depthalloc
