// Config-driven front end: audits, stratification, and peak-family limit
// experiments with deterministic CSV/JSON artifacts.
//
// Exit codes: 0 success, 1 property violation, 2 usage/config error.

#include "peakgeom/catalog.hpp"
#include "peakgeom/domain.hpp"
#include "peakgeom/grid.hpp"
#include "peakgeom/patch.hpp"
#include "peakgeom/peak_family.hpp"
#include "peakgeom/report.hpp"
#include "peakgeom/rng.hpp"
#include "peakgeom/strata.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

using namespace peakgeom;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    nlohmann::json canonical; // defaults applied; hashed into artifact headers
    DomainModel domain;
    std::optional<PatchModel> patch;
    Grid grid;
    std::uint64_t seed = 0;
    int threads = 1;
    long samples = 1000;
    long pair_samples = 10000;
    double tol_rank = -1.0;
    int refine_levels = 0;
    std::vector<double> delta_list;
    FamilyOptions family;
    long z_on_count = 5;
    long z_off_count = 5;
    long z_bulk_count = 40;
    std::string out_dir = "out";

    std::string hash() const { return hash_hex(fnv1a64(canonical.dump())); }
};

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
}

DomainModel domain_from_config(const nlohmann::json& j) {
    try {
        if (j.contains("catalog")) {
            std::string name = j.at("catalog").get<std::string>();
            if (name == "ball") return catalog::make_domain("ball", j.value("n", 2));
            if (name == "egg") return catalog::make_domain("egg", j.value("m", 2));
            if (name == "hyperboloid") return catalog::make_control_surface();
            throw ConfigError("unknown catalog domain: " + name);
        }
        return DomainModel::from_json(j);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad domain config: ") + e.what());
    }
}

PatchModel patch_from_config(const nlohmann::json& j) {
    try {
        std::string name = j.at("catalog").get<std::string>();
        catalog::Params params;
        if (j.contains("params"))
            for (auto& [k, v] : j.at("params").items()) params[k] = v.get<double>();
        return catalog::make_patch(name, params);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad patch config: ") + e.what());
    }
}

RunConfig parse_config(const std::string& path, const std::string& out_override,
                       std::optional<std::uint64_t> seed_override,
                       std::optional<int> threads_override) {
    nlohmann::json j = load_json(path);
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    RunConfig cfg{.canonical = {},
                  .domain = DomainModel(),
                  .patch = std::nullopt,
                  .grid = Grid{},
                  .family = FamilyOptions{}};

    if (!j.contains("domain")) throw ConfigError("config is missing \"domain\"");
    cfg.domain = domain_from_config(j.at("domain"));
    if (j.contains("patch")) cfg.patch = patch_from_config(j.at("patch"));

    try {
        cfg.seed = j.value("seed", std::uint64_t(20240809));
        cfg.threads = j.value("threads", 1);
        cfg.samples = j.value("samples", 1000L);
        cfg.pair_samples = j.value("pair_samples", 10000L);
        cfg.tol_rank = j.value("tol_rank", -1.0);
        cfg.refine_levels = j.value("refine_levels", 0);
        cfg.delta_list = j.value("delta_list", std::vector<double>{0.2, 0.1, 0.05, 0.02});
        cfg.z_on_count = j.value("z_on_count", 5L);
        cfg.z_off_count = j.value("z_off_count", 5L);
        cfg.z_bulk_count = j.value("z_bulk_count", 40L);
        cfg.out_dir = j.value("out_dir", std::string("out"));

        if (j.contains("bump")) {
            const auto& b = j.at("bump");
            std::string kind = b.value("kind", std::string("smooth_exponential"));
            if (kind == "smooth_exponential")
                cfg.family.bump_kind = BumpFunction::Kind::SmoothExp;
            else if (kind == "cosine")
                cfg.family.bump_kind = BumpFunction::Kind::Cosine;
            else
                throw ConfigError("unknown bump kind: " + kind);
            cfg.family.support_scale = b.value("support_scale", 0.8);
        }
        if (j.contains("quad")) {
            cfg.family.quad_abs_tol = j.at("quad").value("abs_tol", 1e-8);
            cfg.family.quad_max_cells = j.at("quad").value("max_cells", 20000);
        }
        cfg.family.pair_samples = cfg.pair_samples;

        if (j.contains("grid")) {
            cfg.grid = Grid::from_json(j.at("grid"));
        } else if (cfg.patch) {
            int d = cfg.patch->dim_d;
            double r = 0.8 * cfg.patch->radius;
            cfg.grid.lo = RealVec::Constant(d, -r);
            cfg.grid.hi = RealVec::Constant(d, r);
            cfg.grid.steps.assign(d, d == 1 ? 200 : 32);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad config field: ") + e.what());
    }

    if (!out_override.empty()) cfg.out_dir = out_override;
    if (seed_override) cfg.seed = *seed_override;
    if (threads_override) cfg.threads = *threads_override;
    cfg.family.seed = cfg.seed;
    cfg.family.threads = cfg.threads;

    nlohmann::json canon;
    canon["domain"] = nlohmann::json::parse(cfg.domain.to_json().dump());
    if (cfg.patch) {
        canon["patch"] = {{"name", cfg.patch->name},
                          {"dim", cfg.patch->dim_d},
                          {"radius", cfg.patch->radius}};
        canon["grid"] = nlohmann::json::parse(cfg.grid.to_json().dump());
    }
    canon["seed"] = cfg.seed;
    canon["samples"] = cfg.samples;
    canon["pair_samples"] = cfg.pair_samples;
    canon["tol_rank"] = cfg.tol_rank;
    canon["refine_levels"] = cfg.refine_levels;
    canon["delta_list"] = cfg.delta_list;
    canon["z_on_count"] = cfg.z_on_count;
    canon["z_off_count"] = cfg.z_off_count;
    canon["z_bulk_count"] = cfg.z_bulk_count;
    canon["bump_support_scale"] = cfg.family.support_scale;
    canon["bump_kind"] = cfg.family.bump_kind == BumpFunction::Kind::SmoothExp
                             ? "smooth_exponential"
                             : "cosine";
    canon["quad_abs_tol"] = cfg.family.quad_abs_tol;
    canon["quad_max_cells"] = cfg.family.quad_max_cells;
    cfg.canonical = std::move(canon);
    return cfg;
}

Json artifact_header(const RunConfig& cfg, const std::string& command) {
    Json j;
    j["tool"] = "peakgeom";
    j["command"] = command;
    j["config_hash"] = cfg.hash();
    j["seed"] = cfg.seed;
    return j;
}

void write_json(const RunConfig& cfg, const std::string& file, Json body) {
    namespace fs = std::filesystem;
    atomic_write((fs::path(cfg.out_dir) / file).string(), body.dump(2) + "\n");
}

std::string csv_header(const RunConfig& cfg, const std::string& command) {
    return "peakgeom " + command + " config_hash=" + cfg.hash() +
           " seed=" + std::to_string(cfg.seed);
}

int cmd_check(const RunConfig& cfg) {
    bool ok = true;
    ConvexityAudit da = convexity_audit(cfg.domain, cfg.samples, cfg.seed, cfg.threads);
    Json dj = artifact_header(cfg, "check");
    dj["domain"] = cfg.domain.name();
    dj["audit"] = da.to_json();
    write_json(cfg, "domain_audit.json", dj);
    ok = ok && da.pass;

    if (cfg.patch) {
        PatchAudit pa = patch_audit(*cfg.patch, cfg.domain, cfg.grid);
        Json pj = artifact_header(cfg, "check");
        pj["patch"] = cfg.patch->name;
        pj["audit"] = pa.to_json();
        write_json(cfg, "patch_audit.json", pj);
        ok = ok && pa.pass;
        if (!pa.pass)
            std::cerr << "patch audit failed: max tangency residual " << pa.max_tangency_residual
                      << ", boundary residual " << pa.max_boundary_residual << "\n";
    }
    if (!da.pass)
        std::cerr << "domain audit failed: min restricted eigenvalue "
                  << da.min_restricted_eigenvalue << "\n";
    return ok ? 0 : 1;
}

int cmd_stratify(const RunConfig& cfg) {
    if (!cfg.patch) throw ConfigError("stratify requires a patch");
    PatchAudit pa = patch_audit(*cfg.patch, cfg.domain, cfg.grid);
    if (!pa.pass) {
        Json pj = artifact_header(cfg, "stratify");
        pj["patch"] = cfg.patch->name;
        pj["audit"] = pa.to_json();
        write_json(cfg, "patch_audit.json", pj);
        std::cerr << "patch audit failed; not stratifying\n";
        return 1;
    }
    StratificationReport rep = stratify(*cfg.patch, cfg.domain, cfg.grid, cfg.tol_rank);
    if (cfg.refine_levels > 0)
        rep = refine_transitions(*cfg.patch, cfg.domain, rep, cfg.refine_levels);
    Json j = artifact_header(cfg, "stratify");
    j["domain"] = cfg.domain.name();
    j["patch"] = cfg.patch->name;
    j["report"] = rep.to_json();
    write_json(cfg, "strata.json", j);
    namespace fs = std::filesystem;
    atomic_write((fs::path(cfg.out_dir) / "strata.csv").string(),
                 rep.to_csv(csv_header(cfg, "stratify")));
    return 0;
}

int cmd_peak(const RunConfig& cfg) {
    if (!cfg.patch) throw ConfigError("peak requires a patch");
    const PatchModel& patch = *cfg.patch;

    PatchAudit pa = patch_audit(patch, cfg.domain, cfg.grid);
    if (!pa.pass) {
        Json pj = artifact_header(cfg, "peak");
        pj["patch"] = patch.name;
        pj["audit"] = pa.to_json();
        write_json(cfg, "patch_audit.json", pj);
        std::cerr << "patch audit failed; not building the family\n";
        return 1;
    }

    // degenerate points anywhere on the configured grid rule the family out
    double tol = cfg.tol_rank;
    if (tol <= 0.0) {
        double lmax = 0.0;
        for (const RealVec& x : cfg.grid.nodes()) {
            PullbackForm f = pullback_form(patch, cfg.domain, x);
            Eigen::SelfAdjointEigenSolver<RealMat> es(f.H);
            lmax = std::max(lmax, es.eigenvalues().maxCoeff());
        }
        tol = 1e-6 * std::max(lmax, 1e-300);
    }
    NondegeneracyMap nmap = nondegeneracy_map(patch, cfg.domain, cfg.grid, tol);
    if (nmap.degenerate_count > 0) {
        Json nj = artifact_header(cfg, "peak");
        nj["patch"] = patch.name;
        nj["nondegeneracy"] = nmap.to_json();
        write_json(cfg, "nondegeneracy.json", nj);
        std::cerr << "degenerate pullback form inside the configured grid; witness at [";
        for (int a = 0; a < nmap.argmin.size(); ++a)
            std::cerr << (a ? "," : "") << nmap.argmin[a];
        std::cerr << "] with min eigenvalue " << nmap.min_over_grid << "\n";
        return 1;
    }

    PeakFamily family = make_family(patch, cfg.domain, cfg.family);

    Json cj = artifact_header(cfg, "peak");
    cj["domain"] = cfg.domain.name();
    cj["patch"] = patch.name;
    cj["constants"] = family.constants.to_json();
    cj["bump"] = {{"kind", family.bump.kind == BumpFunction::Kind::SmoothExp
                               ? "smooth_exponential"
                               : "cosine"},
                  {"support_radius", family.bump.support_radius},
                  {"scale", family.bump.scale}};
    write_json(cfg, "constants.json", cj);

    Json gj = artifact_header(cfg, "peak");
    gj["normalizer"] = family.cache.to_json();
    write_json(cfg, "normalization.json", gj);

    // probe sets
    const int d = patch.dim_d;
    Rng rng(Rng::mix(cfg.seed, 21));
    std::vector<RealVec> z_on;
    z_on.push_back(RealVec::Zero(d));
    while (long(z_on.size()) < cfg.z_on_count)
        z_on.push_back(rng.in_ball(d, 0.8 * family.bump.support_radius));

    std::vector<RealVec> patch_lattice;
    for (const RealVec& x : cfg.grid.nodes()) {
        if (x.norm() <= family.constants.working_radius) patch_lattice.push_back(x);
    }
    std::vector<CplxVec> images;
    for (const RealVec& x : patch_lattice) images.push_back(patch.eval(x));

    std::vector<RealVec> bdry = sample_boundary(cfg.domain, 8 * cfg.z_off_count + 32,
                                                Rng::mix(cfg.seed, 22));
    std::vector<CplxVec> z_off;
    const RealVec& w = cfg.domain.interior_witness();
    for (const RealVec& b : bdry) {
        if (long(z_off.size()) >= cfg.z_off_count) break;
        double s = 0.25 + 0.75 * rng.uniform();
        CplxVec z = to_complex(RealVec(w + s * (b - w)));
        double dist = std::numeric_limits<double>::infinity();
        for (const CplxVec& img : images) dist = std::min(dist, (img - z).norm());
        if (dist >= 1e-2) z_off.push_back(z);
    }
    std::vector<CplxVec> z_bulk;
    Rng brng(Rng::mix(cfg.seed, 23));
    std::vector<RealVec> bdry2 = sample_boundary(cfg.domain, cfg.z_bulk_count,
                                                 Rng::mix(cfg.seed, 24));
    for (const RealVec& b : bdry2) {
        double s = 0.2 + 0.8 * brng.uniform();
        z_bulk.push_back(to_complex(RealVec(w + s * (b - w))));
    }

    LimitAudit audit =
        limit_audit(family, cfg.delta_list, z_on, z_off, z_bulk, cfg.threads);
    namespace fs = std::filesystem;
    atomic_write((fs::path(cfg.out_dir) / "limit_audit.csv").string(),
                 audit.to_csv(csv_header(cfg, "peak")));
    Json aj = artifact_header(cfg, "peak");
    aj["audit"] = audit.to_json();
    write_json(cfg, "limit_audit.json", aj);

    if (!audit.pass) {
        std::cerr << "limit audit failed: bound_ok=" << audit.bound_ok
                  << " onpatch_decreasing=" << audit.onpatch_decreasing
                  << " offpatch_decreasing=" << audit.offpatch_decreasing << "\n";
        return 1;
    }
    return 0;
}

int cmd_catalog(const std::string& dump_name) {
    if (!dump_name.empty()) {
        for (const auto& e : catalog::entries()) {
            if (e.name != dump_name) continue;
            if (e.kind == "domain") {
                int p = int(e.defaults.count("n") ? e.defaults.at("n") : e.defaults.at("m"));
                std::cout << catalog::make_domain(e.name, p).to_json().dump(2) << "\n";
            } else if (e.kind == "control") {
                std::cout << catalog::make_control_surface().to_json().dump(2) << "\n";
            } else {
                Json j;
                j["name"] = e.name;
                j["description"] = e.description;
                j["defaults"] = e.defaults;
                j["reference"] = e.reference;
                std::cout << j.dump(2) << "\n";
            }
            return 0;
        }
        std::cerr << "unknown catalog entry: " << dump_name << "\n";
        return 2;
    }
    for (const auto& e : catalog::entries())
        std::cout << e.kind << "  " << e.name << "  -  " << e.description << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"boundary curvature, stratification, and peak-family experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir, dump_name;
    std::uint64_t seed_flag = 0;
    int threads_flag = 0;
    bool seed_given = false, threads_given = false;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", config_path, "config JSON path");
        if (config_required) c->required();
        sub->add_option("--out", out_dir, "output directory override");
        sub->add_option("--seed", seed_flag, "seed override")->each([&](const std::string&) {
            seed_given = true;
        });
        sub->add_option("--threads", threads_flag, "worker thread count")
            ->each([&](const std::string&) { threads_given = true; });
    };

    CLI::App* check = app.add_subcommand("check", "run domain and patch audits");
    add_common(check, true);
    CLI::App* strat = app.add_subcommand("stratify", "rank-classify the pullback form");
    add_common(strat, true);
    CLI::App* peak = app.add_subcommand("peak", "build the peak family and audit its limits");
    add_common(peak, true);
    CLI::App* cat = app.add_subcommand("catalog", "list catalog entries");
    cat->add_option("--dump", dump_name, "print one entry as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cat->parsed()) return cmd_catalog(dump_name);
        RunConfig cfg = parse_config(
            config_path, out_dir,
            seed_given ? std::optional<std::uint64_t>(seed_flag) : std::nullopt,
            threads_given ? std::optional<int>(threads_flag) : std::nullopt);
        if (check->parsed()) return cmd_check(cfg);
        if (strat->parsed()) return cmd_stratify(cfg);
        if (peak->parsed()) return cmd_peak(cfg);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
