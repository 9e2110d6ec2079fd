// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "manifest.hpp"
#include "splat360/anchoring.hpp"
#include "splat360/drr.hpp"
#include "splat360/error.hpp"
#include "splat360/fitting.hpp"
#include "splat360/fusion.hpp"
#include "splat360/gradcheck.hpp"
#include "splat360/io.hpp"
#include "splat360/metrics.hpp"
#include "splat360/parallel.hpp"
#include "splat360/renderer.hpp"
#include "splat360/synthetic.hpp"
#include "splat360/version.hpp"

namespace splat360::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

struct CheckFailure : Error {
    using Error::Error;
};

struct Globals {
    std::uint64_t seed = 0;
    int workers = 0;
    std::string out;
};

std::string indexed(const std::string& prefix, std::size_t i, const std::string& ext) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%03zu", i);
    return prefix + "_" + buf + ext;
}

double deg(double d) { return d * kPi / 180.0; }

std::string format_double(double v, int precision = 6) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(precision);
    s << v;
    return s.str();
}

std::string require_out(const Globals& g, const std::string& verb) {
    if (g.out.empty()) throw ArgumentError(verb + ": --out is required");
    return g.out;
}

// ---- shared option groups ---------------------------------------------------

struct ViewOptions {
    std::vector<std::string> camera_files;
    std::string orbit = "ring:8";
    double elevation_deg = 20.0;
    double radius = 0.0; // 0: 2.5x scene radius
    int width = 256;
    int height = 256;
    int res = 0;
    double fov_deg = 50.0;

    void add(CLI::App* app) {
        app->add_option("--camera", camera_files, "camera JSON file (repeatable); overrides --orbit");
        app->add_option("--orbit", orbit, "orbit spec ring:N or fib:N")->capture_default_str();
        app->add_option("--elevation", elevation_deg, "ring elevation in degrees")->capture_default_str();
        app->add_option("--radius", radius, "orbit radius (0: 2.5x scene radius)")->capture_default_str();
        app->add_option("--width", width, "image width")->capture_default_str();
        app->add_option("--height", height, "image height")->capture_default_str();
        app->add_option("--res", res, "square resolution, overrides --width/--height");
        app->add_option("--fov", fov_deg, "vertical field of view in degrees")->capture_default_str();
    }

    std::vector<Camera> resolve(const Scene& scene, std::vector<fs::path>& inputs) const {
        std::vector<Camera> cams;
        if (!camera_files.empty()) {
            for (const auto& f : camera_files) {
                cams.push_back(parse_camera_json(read_text(f)));
                inputs.emplace_back(f);
            }
            return cams;
        }
        const auto colon = orbit.find(':');
        if (colon == std::string::npos) throw ArgumentError("--orbit: expected ring:N or fib:N, got '" + orbit + "'");
        const std::string kind = orbit.substr(0, colon);
        const std::string count = orbit.substr(colon + 1);
        int n = 0;
        const auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), n);
        if (ec != std::errc() || ptr != count.data() + count.size() || n < 1) {
            throw ArgumentError("--orbit: invalid view count '" + count + "'");
        }
        OrbitMode mode;
        if (kind == "ring") {
            mode = OrbitMode::ring;
        } else if (kind == "fib" || kind == "fibonacci") {
            mode = OrbitMode::fibonacci_sphere;
        } else {
            throw ArgumentError("--orbit: unknown mode '" + kind + "'");
        }
        const int w = res > 0 ? res : width;
        const int h = res > 0 ? res : height;
        if (w < 1 || h < 1) throw ArgumentError("image size must be positive");
        if (!(fov_deg > 0.0 && fov_deg < 180.0)) throw ArgumentError("--fov must lie in (0, 180)");
        const double r = radius > 0.0 ? radius : 2.5 * scene.radius();
        return make_orbit_cameras(scene.center(), r, n, deg(elevation_deg), mode, w, h, deg(fov_deg));
    }

    ojson to_json() const {
        ojson j;
        j["cameras"] = camera_files;
        j["orbit"] = orbit;
        j["elevation_deg"] = elevation_deg;
        j["radius"] = radius;
        j["width"] = res > 0 ? res : width;
        j["height"] = res > 0 ? res : height;
        j["fov_deg"] = fov_deg;
        return j;
    }
};

struct RenderOptions {
    double epsilon = 1e-3;
    double cutoff = 3.0;
    bool no_disentangle = false;
    bool no_anisotropy = false;

    void add(CLI::App* app) {
        app->add_option("--epsilon", epsilon, "early termination threshold")->capture_default_str();
        app->add_option("--cutoff", cutoff, "Mahalanobis cutoff in sigma")->capture_default_str();
        app->add_flag("--no-disentangle", no_disentangle, "fold anisotropic radiance in with f = 1");
        app->add_flag("--no-anisotropy", no_anisotropy, "drop the anisotropic term (f = 0)");
    }

    RenderConfig config() const {
        RenderConfig cfg;
        cfg.termination_epsilon = epsilon;
        cfg.cutoff_sigma = cutoff;
        cfg.disentangle = !no_disentangle;
        cfg.anisotropy_enabled = !no_anisotropy;
        try {
            cfg.validate();
        } catch (const Error& e) {
            throw ArgumentError(e.what());
        }
        return cfg;
    }

    ojson to_json() const {
        const RenderConfig c = config();
        return ojson{{"termination_epsilon", c.termination_epsilon},
                     {"cutoff_sigma", c.cutoff_sigma},
                     {"disentangle", c.disentangle},
                     {"anisotropy_enabled", c.anisotropy_enabled}};
    }
};

// ---- render -----------------------------------------------------------------

struct RenderCmd {
    std::string scene;
    std::string mlp;
    bool depth = false;
    bool transmittance = false;
    bool linear = false;
    ViewOptions view;
    RenderOptions render;
};

int cmd_render(const RenderCmd& c, const Globals& g, std::ostream& out) {
    const Scene scene = load_scene(c.scene);
    std::vector<fs::path> inputs{c.scene};
    const auto cams = c.view.resolve(scene, inputs);
    const RenderConfig cfg = c.render.config();
    std::optional<MlpParams> mlp;
    if (!c.mlp.empty()) {
        mlp = load_mlp(c.mlp);
        inputs.emplace_back(c.mlp);
    }
    const int workers = resolve_workers(g.workers);

    OutputSet outputs(require_out(g, "render"));
    for (std::size_t i = 0; i < cams.size(); ++i) {
        const auto res = render(scene, cams[i], cfg, ExecPolicy{workers, 16}, mlp ? &*mlp : nullptr);
        if (!res.color.all_finite()) throw NumericError("render: non-finite color in view " + std::to_string(i));
        outputs.write(indexed("frame", i, ".ppm"), encode_ppm(res.color));
        outputs.write(indexed("camera", i, ".json"), camera_to_json(cams[i]));
        if (c.linear) outputs.write(indexed("color", i, ".pfm"), encode_pfm(res.color));
        if (c.depth) outputs.write(indexed("depth", i, ".pfm"), encode_pfm(res.depth));
        if (c.transmittance) outputs.write(indexed("trans", i, ".pfm"), encode_pfm(res.transmittance));
    }

    ojson config;
    config["scene"] = fs::path(c.scene).filename().string();
    config["mlp"] = c.mlp.empty() ? "" : fs::path(c.mlp).filename().string();
    config["view"] = c.view.to_json();
    config["render"] = c.render.to_json();
    config["depth"] = c.depth;
    config["transmittance"] = c.transmittance;
    config["linear"] = c.linear;
    outputs.commit("manifest.json", make_manifest("render", g.seed, config, inputs));
    out << "rendered " << cams.size() << " view(s) to " << outputs.dir().string() << "\n";
    return kExitOk;
}

// ---- drr --------------------------------------------------------------------

struct DrrCmd {
    std::string volume;
    double sid = 500.0;
    double sdd = 1000.0;
    double angle_deg = 0.0;
    int det_width = 128;
    int det_height = 128;
    double pixel_mm = 0.0; // 0: cover the magnified volume
    double mu_water = 0.02;
    double i0 = 1.0;
    double step_mm = 0.0;
    std::string output = "intensity";
};

// Header plus the raw payload it names.
std::vector<fs::path> volume_files(const fs::path& header) {
    std::vector<fs::path> files{header};
    std::istringstream in(read_text(header));
    for (std::string line; std::getline(in, line);) {
        if (line.rfind("data=", 0) == 0) files.push_back(header.parent_path() / line.substr(5));
    }
    return files;
}

int cmd_drr(const DrrCmd& c, const Globals& g, std::ostream& out) {
    const VoxelVolume vol = load_volume(c.volume);
    DrrConfig cfg;
    cfg.mu_water = c.mu_water;
    cfg.i0 = c.i0;
    cfg.step_mm = c.step_mm;
    if (c.output == "intensity") {
        cfg.output = DrrOutput::intensity;
    } else if (c.output == "line_integral") {
        cfg.output = DrrOutput::line_integral;
    } else {
        throw ArgumentError("--output must be intensity or line_integral");
    }
    try {
        cfg.validate();
    } catch (const Error& e) {
        throw ArgumentError(e.what());
    }
    double pixel = c.pixel_mm;
    if (pixel <= 0.0) {
        const Aabb box = vol.box();
        const double extent = (box.hi - box.lo).norm();
        pixel = c.sid > 0.0 ? extent * (c.sdd / c.sid) / std::min(c.det_width, c.det_height) : 1.0;
    }
    const auto geom = ProjectionGeometry::cone_beam(vol.center(), c.sid, c.sdd, deg(c.angle_deg), c.det_width,
                                                    c.det_height, pixel);
    try {
        geom.validate();
    } catch (const Error& e) {
        throw ArgumentError(e.what());
    }
    const ImageBuffer img = render_drr(vol, geom, cfg, resolve_workers(g.workers));
    if (!img.all_finite()) throw NumericError("drr: non-finite pixel");

    const fs::path target(require_out(g, "drr"));
    if (target.filename().empty()) throw ArgumentError("drr: --out must name a file");
    OutputSet outputs(target.parent_path());
    const std::string name = target.filename().string();
    if (cfg.output == DrrOutput::intensity) {
        ImageBuffer normalized = img;
        for (double& v : normalized.data()) v /= cfg.i0;
        outputs.write(name, encode_ppm(normalized));
    } else {
        outputs.write(name, encode_pfm(img));
    }

    ojson config;
    config["volume"] = fs::path(c.volume).filename().string();
    config["sid_mm"] = c.sid;
    config["sdd_mm"] = c.sdd;
    config["angle_deg"] = c.angle_deg;
    config["det_width"] = c.det_width;
    config["det_height"] = c.det_height;
    config["pixel_mm"] = pixel;
    config["mu_water"] = cfg.mu_water;
    config["i0"] = cfg.i0;
    config["step_mm"] = cfg.resolved_step(vol);
    config["output"] = c.output;
    outputs.commit(name + ".manifest.json", make_manifest("drr", g.seed, config, volume_files(c.volume)));
    out << "wrote " << target.string() << "\n";
    return kExitOk;
}

// ---- fit --------------------------------------------------------------------

struct FitCmd {
    std::string scene;
    std::string targets;
    std::string mlp;
    bool fused = false;
    int embed_dim = kDefaultEmbeddingDim;
    std::string ablation = "none";
    FitConfig fit;
    RenderOptions render;
};

std::vector<FitTarget> load_targets(const fs::path& dir, std::vector<fs::path>& inputs) {
    if (!fs::is_directory(dir)) throw ArgumentError("fit: targets directory '" + dir.string() + "' not found");
    std::vector<fs::path> cameras;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.rfind("camera_", 0) == 0 && entry.path().extension() == ".json") cameras.push_back(entry.path());
    }
    std::sort(cameras.begin(), cameras.end());
    if (cameras.empty()) throw ArgumentError("fit: no camera_*.json files in '" + dir.string() + "'");
    std::vector<FitTarget> targets;
    for (const auto& cam_path : cameras) {
        const std::string key = cam_path.stem().string().substr(std::string("camera_").size());
        fs::path image = dir / ("color_" + key + ".pfm");
        if (!fs::exists(image)) image = dir / ("frame_" + key + ".ppm");
        if (!fs::exists(image)) throw FormatError("fit: no color_" + key + ".pfm or frame_" + key + ".ppm for " +
                                                  cam_path.filename().string());
        FitTarget t{parse_camera_json(read_text(cam_path)), read_image(image)};
        if (t.image.width() != t.camera.width || t.image.height() != t.camera.height || t.image.channels() != 3) {
            throw FormatError("fit: " + image.filename().string() + " does not match its camera resolution");
        }
        inputs.push_back(cam_path);
        inputs.push_back(image);
        targets.push_back(std::move(t));
    }
    return targets;
}

std::string metrics_table(const FitReport& report) {
    std::ostringstream s;
    s << "view\tpsnr_db\tssim\n";
    for (std::size_t i = 0; i < report.views.size(); ++i) {
        s << i << "\t" << format_double(report.views[i].psnr, 4) << "\t" << format_double(report.views[i].ssim, 6)
          << "\n";
    }
    s << "mean\t" << format_double(report.mean_psnr(), 4) << "\t" << format_double(report.mean_ssim(), 6) << "\n";
    return s.str();
}

int cmd_fit(FitCmd c, const Globals& g, std::ostream& out) {
    const Scene scene = load_scene(c.scene);
    std::vector<fs::path> inputs{c.scene};
    const auto targets = load_targets(c.targets, inputs);
    try {
        c.fit.ablation = Ablation::parse(c.ablation);
    } catch (const Error& e) {
        throw ArgumentError(e.what());
    }
    c.fit.seed = g.seed;
    c.fit.workers = resolve_workers(g.workers);
    try {
        c.fit.validate();
    } catch (const Error& e) {
        throw ArgumentError(e.what());
    }
    const RenderConfig rcfg = c.render.config();
    std::optional<MlpParams> mlp;
    if (!c.mlp.empty()) {
        mlp = load_mlp(c.mlp);
        inputs.emplace_back(c.mlp);
    } else if (c.fused) {
        if (c.embed_dim < kMinEmbeddingDim) {
            throw ArgumentError("--embed-dim must be at least " + std::to_string(kMinEmbeddingDim));
        }
        mlp = MlpParams::init(c.embed_dim, g.seed);
    }

    OutputSet outputs(require_out(g, "fit"));
    FitResult result;
    try {
        result = fit_scene(scene, targets, c.fit, rcfg, mlp);
    } catch (const FitAborted& e) {
        outputs.write("report.json", fit_report_to_json(e.report()));
        outputs.retain("report.json");
        throw;
    }
    outputs.write("scene.json", scene_to_json(result.scene));
    if (result.mlp) outputs.write("mlp.bin", encode_mlp(*result.mlp));
    outputs.write("report.json", fit_report_to_json(result.report));
    const std::string table = metrics_table(result.report);
    outputs.write("metrics.tsv", table);

    ojson config;
    config["scene"] = fs::path(c.scene).filename().string();
    config["targets"] = targets.size();
    config["lr"] = c.fit.lr;
    config["beta1"] = c.fit.beta1;
    config["beta2"] = c.fit.beta2;
    config["epsilon_adam"] = c.fit.epsilon_adam;
    config["lr_halve_every"] = c.fit.lr_halve_every;
    config["iters"] = c.fit.iters;
    config["lambda_mse"] = c.fit.lambda_mse;
    config["lambda_ssim"] = c.fit.lambda_ssim;
    config["lambda_lpips"] = c.fit.lambda_lpips;
    config["optimize_geometry"] = c.fit.optimize_geometry;
    config["ablation"] = c.fit.ablation.to_string();
    config["rays_per_step"] = c.fit.rays_per_step;
    config["anchor_k"] = c.fit.anchor_k;
    config["anchor_beta"] = c.fit.anchor_beta;
    config["anchor_radius"] = c.fit.anchor_radius;
    config["anchor_mix"] = c.fit.anchor_mix;
    config["geometry_fd_step"] = c.fit.geometry_fd_step;
    config["fusion"] = mlp.has_value();
    config["embed_dim"] = mlp ? mlp->embed_dim : 0;
    config["render"] = c.render.to_json();
    outputs.commit("manifest.json", make_manifest("fit", g.seed, config, inputs));
    out << "final loss " << format_double(result.report.final_loss, 9) << "\n" << table;
    return kExitOk;
}

// ---- anchors ----------------------------------------------------------------

struct AnchorsCmd {
    std::string scene;
    int view_index = 0;
    int k = 64;
    double suppression_radius = 5.0;
    double beta = 1.0;
    int samples = 0;
    ViewOptions view;
    RenderOptions render;
};

int cmd_anchors(const AnchorsCmd& c, const Globals& g, std::ostream& out) {
    const Scene scene = load_scene(c.scene);
    std::vector<fs::path> inputs{c.scene};
    const auto cams = c.view.resolve(scene, inputs);
    if (c.view_index < 0 || c.view_index >= static_cast<int>(cams.size())) {
        throw ArgumentError("--view out of range: " + std::to_string(c.view_index));
    }
    if (c.k < 1) throw ArgumentError("--k must be positive");
    if (c.samples < 0) throw ArgumentError("--samples must be non-negative");
    const auto res = render(scene, cams[c.view_index], c.render.config(), ExecPolicy{resolve_workers(g.workers), 16});
    const ImageBuffer grad = depth_gradient(res.depth);
    AnchorSet set = select_anchors(grad, c.k, c.suppression_radius, c.beta);
    std::vector<std::size_t> drawn;
    if (c.samples > 0) drawn = sample_anchor_indices(set, c.samples, g.seed);

    OutputSet outputs(require_out(g, "anchors"));
    outputs.write("anchors.json", anchors_to_json(set, g.seed, drawn));
    outputs.write("grad.pfm", encode_pfm(grad));
    outputs.write("depth.pfm", encode_pfm(res.depth));
    ojson config;
    config["scene"] = fs::path(c.scene).filename().string();
    config["view"] = c.view.to_json();
    config["view_index"] = c.view_index;
    config["k"] = c.k;
    config["suppression_radius"] = c.suppression_radius;
    config["beta"] = c.beta;
    config["samples"] = c.samples;
    config["render"] = c.render.to_json();
    outputs.commit("manifest.json", make_manifest("anchors", g.seed, config, inputs));
    out << set.anchors.size() << " anchor(s)\n";
    return kExitOk;
}

// ---- metrics ----------------------------------------------------------------

struct MetricsCmd {
    std::string a;
    std::string b;
};

int cmd_metrics(const MetricsCmd& c, const Globals& g, std::ostream& out) {
    const ImageBuffer a = read_image(c.a);
    const ImageBuffer b = read_image(c.b);
    if (!a.same_shape(b)) {
        throw ArgumentError("metrics: image shapes differ (" + std::to_string(a.width()) + "x" +
                            std::to_string(a.height()) + "x" + std::to_string(a.channels()) + " vs " +
                            std::to_string(b.width()) + "x" + std::to_string(b.height()) + "x" +
                            std::to_string(b.channels()) + ")");
    }
    ojson report;
    report["mse"] = mse(a, b);
    report["psnr_db"] = psnr(a, b);
    const SsimConfig scfg;
    const bool ssim_defined = a.width() >= scfg.window && a.height() >= scfg.window;
    report["ssim"] = ssim_defined ? ojson(ssim(a, b, scfg)) : ojson(nullptr);
    out << "PSNR " << format_double(report["psnr_db"].get<double>(), 4) << " dB\n";
    if (ssim_defined) {
        out << "SSIM " << format_double(report["ssim"].get<double>(), 6) << "\n";
    } else {
        out << "SSIM undefined (image smaller than " << scfg.window << "x" << scfg.window << ")\n";
    }
    out << "MSE " << format_double(report["mse"].get<double>(), 9) << "\n";
    if (!g.out.empty()) {
        const fs::path target(g.out);
        OutputSet outputs(target.parent_path());
        outputs.write(target.filename().string(), report.dump(2) + "\n");
        outputs.commit(target.filename().string() + ".manifest.json",
                       make_manifest("metrics", g.seed, ojson::object(), {c.a, c.b}));
    }
    return kExitOk;
}

// ---- gradcheck --------------------------------------------------------------

struct GradcheckCmd {
    double tol = 1e-4;
    double render_tol = 1e-3;
    int draws = 100;
};

int cmd_gradcheck(const GradcheckCmd& c, const Globals& g, std::ostream& out) {
    if (c.draws < 1) throw ArgumentError("--draws must be positive");
    if (!(c.tol > 0.0) || !(c.render_tol > 0.0)) throw ArgumentError("tolerances must be positive");
    std::vector<GradCheckResult> results;
    results.push_back(check_fusion_gradients(g.seed, c.draws, c.tol));
    results.push_back(check_loss_gradients(g.seed + 1, c.draws, 16, 1.0, 0.2, c.tol));
    results.push_back(check_loss_gradients(g.seed + 2, c.draws, 8, 1.0, 0.0, c.tol));
    results.push_back(check_render_gradients(g.seed + 3, 16, c.render_tol));
    bool ok = true;
    for (const auto& r : results) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name << " max_err=" << r.max_error << " tol=" << r.tolerance
            << " compared=" << r.compared << "\n";
        ok = ok && r.passed;
    }
    if (!ok) throw CheckFailure("gradcheck: gradient mismatch beyond tolerance");
    return kExitOk;
}

// ---- bench ------------------------------------------------------------------

struct BenchCmd {
    std::string scene;
    int res = 512;
    int frames = 10;
    std::vector<int> scaling;
    int gaussians = 5000;
    RenderOptions render;
};

int cmd_bench(const BenchCmd& c, const Globals& g, std::ostream& out) {
    if (c.res < 1 || c.frames < 1) throw ArgumentError("--res and --frames must be positive");
    const Scene scene = c.scene.empty() ? benchmark_scene(c.gaussians, 5000) : load_scene(c.scene);
    const auto cams = make_orbit_cameras(scene.center(), 2.5 * scene.radius(), c.frames, deg(20.0), OrbitMode::ring,
                                         c.res, c.res, deg(50.0));
    const RenderConfig cfg = c.render.config();
    ojson report;
    if (c.scaling.empty()) {
        report = ojson::parse(runtime_report_to_json(measure_runtime(scene, cams, cfg, g.workers)));
    } else {
        auto runs = ojson::array();
        std::vector<double> fps;
        for (int w : c.scaling) {
            if (w < 1) throw ArgumentError("--scaling entries must be positive");
            const auto r = measure_runtime(scene, cams, cfg, w);
            fps.push_back(r.fps);
            runs.push_back(ojson::parse(runtime_report_to_json(r)));
        }
        report["runs"] = std::move(runs);
        report["speedup"] = fps.front() > 0.0 ? fps.back() / fps.front() : 0.0;
    }
    report["gaussians"] = scene.gaussians().size();
    const std::string text = report.dump(2) + "\n";
    out << text;
    if (!g.out.empty()) {
        const fs::path target(g.out);
        OutputSet outputs(target.parent_path());
        outputs.write(target.filename().string(), text);
        outputs.retain(target.filename().string());
    }
    return kExitOk;
}

// ---- info -------------------------------------------------------------------

int cmd_info(const std::string& scene_path, const Globals& g, std::ostream& out) {
    out << "splat360 " << kVersion << "\n";
    out << "cpu: " << host_cpu_name() << "\n";
    out << "hardware threads: " << std::thread::hardware_concurrency() << "\n";
    out << "workers: " << resolve_workers(g.workers) << "\n";
    if (!scene_path.empty()) {
        const Scene s = load_scene(scene_path);
        const Aabb b = s.bounds();
        out << "gaussians: " << s.gaussians().size() << "\n";
        out << "bounds: [" << b.lo.x() << ", " << b.lo.y() << ", " << b.lo.z() << "] .. [" << b.hi.x() << ", "
            << b.hi.y() << ", " << b.hi.z() << "]\n";
        out << "radius: " << s.radius() << "\n";
    }
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"splat360: Gaussian splat renderer, DRR projector and fitting tools", "splat360"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    app.add_option("--workers", g.workers, "worker threads (0: SPLAT360_WORKERS or hardware)")
        ->envname("SPLAT360_WORKERS")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--out", g.out, "output directory or file");

    RenderCmd render_cmd;
    auto* render_app = app.add_subcommand("render", "render color/depth/transmittance frames");
    render_app->add_option("--scene", render_cmd.scene, "scene JSON")->required();
    render_app->add_option("--mlp", render_cmd.mlp, "fusion MLP parameters");
    render_app->add_flag("--depth", render_cmd.depth, "also write depth PFM");
    render_app->add_flag("--transmittance", render_cmd.transmittance, "also write transmittance PFM");
    render_app->add_flag("--linear", render_cmd.linear, "also write linear color PFM");
    render_cmd.view.add(render_app);
    render_cmd.render.add(render_app);

    DrrCmd drr_cmd;
    auto* drr_app = app.add_subcommand("drr", "digitally reconstructed radiograph from a CT volume");
    drr_app->add_option("--volume", drr_cmd.volume, "volume header")->required();
    drr_app->add_option("--sid", drr_cmd.sid, "source to isocenter distance (mm)")->capture_default_str();
    drr_app->add_option("--sdd", drr_cmd.sdd, "source to detector distance (mm)")->capture_default_str();
    drr_app->add_option("--angle", drr_cmd.angle_deg, "gantry angle (degrees)")->capture_default_str();
    drr_app->add_option("--det-width", drr_cmd.det_width, "detector columns")->capture_default_str();
    drr_app->add_option("--det-height", drr_cmd.det_height, "detector rows")->capture_default_str();
    drr_app->add_option("--pixel", drr_cmd.pixel_mm, "detector pixel size (mm, 0: auto)")->capture_default_str();
    drr_app->add_option("--mu-water", drr_cmd.mu_water, "water attenuation (1/mm)")->capture_default_str();
    drr_app->add_option("--i0", drr_cmd.i0, "source intensity")->capture_default_str();
    drr_app->add_option("--step", drr_cmd.step_mm, "integration step (mm, 0: auto)")->capture_default_str();
    drr_app->add_option("--output", drr_cmd.output, "intensity or line_integral")->capture_default_str();

    FitCmd fit_cmd;
    auto* fit_app = app.add_subcommand("fit", "optimize a scene against target views");
    fit_app->add_option("--scene", fit_cmd.scene, "initial scene JSON")->required();
    fit_app->add_option("--targets", fit_cmd.targets, "directory of camera_*.json + color/frame images")->required();
    fit_app->add_option("--mlp", fit_cmd.mlp, "initial fusion MLP parameters");
    fit_app->add_flag("--fused", fit_cmd.fused, "enable the fusion MLP with a fresh seeded init");
    fit_app->add_option("--embed-dim", fit_cmd.embed_dim, "camera embedding size")->capture_default_str();
    fit_app->add_option("--ablation", fit_cmd.ablation, "comma list of no_anchoring,no_disentangle,no_dual_branch,no_anisotropy")
        ->capture_default_str();
    fit_app->add_option("--iters", fit_cmd.fit.iters, "Adam iterations")->capture_default_str();
    fit_app->add_option("--lr", fit_cmd.fit.lr, "learning rate")->capture_default_str();
    fit_app->add_option("--lr-halve-every", fit_cmd.fit.lr_halve_every, "halve lr every N steps")->capture_default_str();
    fit_app->add_option("--lambda-mse", fit_cmd.fit.lambda_mse, "MSE weight")->capture_default_str();
    fit_app->add_option("--lambda-ssim", fit_cmd.fit.lambda_ssim, "1 - SSIM weight")->capture_default_str();
    fit_app->add_option("--lambda-lpips", fit_cmd.fit.lambda_lpips, "LPIPS weight (unsupported, must be 0)")
        ->capture_default_str();
    fit_app->add_flag("--optimize-geometry", fit_cmd.fit.optimize_geometry, "also fit means and scales");
    fit_app->add_option("--rays-per-step", fit_cmd.fit.rays_per_step, "rays per gradient step (0: all)")
        ->capture_default_str();
    fit_app->add_option("--anchor-k", fit_cmd.fit.anchor_k, "anchors per view")->capture_default_str();
    fit_app->add_option("--anchor-beta", fit_cmd.fit.anchor_beta, "anchor softmin temperature")->capture_default_str();
    fit_app->add_option("--anchor-radius", fit_cmd.fit.anchor_radius, "anchor suppression radius")
        ->capture_default_str();
    fit_app->add_option("--anchor-mix", fit_cmd.fit.anchor_mix, "share of anchor rays")->capture_default_str();
    fit_cmd.render.add(fit_app);

    AnchorsCmd anchors_cmd;
    auto* anchors_app = app.add_subcommand("anchors", "depth-gradient anchors for one view");
    anchors_app->add_option("--scene", anchors_cmd.scene, "scene JSON")->required();
    anchors_app->add_option("--view", anchors_cmd.view_index, "view index within the camera set")
        ->capture_default_str();
    anchors_app->add_option("--k", anchors_cmd.k, "maximum anchors")->capture_default_str();
    anchors_app->add_option("--suppression", anchors_cmd.suppression_radius, "suppression radius (pixels)")
        ->capture_default_str();
    anchors_app->add_option("--beta", anchors_cmd.beta, "softmin temperature")->capture_default_str();
    anchors_app->add_option("--samples", anchors_cmd.samples, "anchor draws to record")->capture_default_str();
    anchors_cmd.view.orbit = "ring:1";
    anchors_cmd.view.add(anchors_app);
    anchors_cmd.render.add(anchors_app);

    MetricsCmd metrics_cmd;
    auto* metrics_app = app.add_subcommand("metrics", "PSNR/SSIM/MSE between two images");
    metrics_app->add_option("a", metrics_cmd.a, "first image (PPM or PFM)")->required();
    metrics_app->add_option("b", metrics_cmd.b, "second image (PPM or PFM)")->required();

    GradcheckCmd gradcheck_cmd;
    auto* gradcheck_app = app.add_subcommand("gradcheck", "finite-difference gradient checks");
    gradcheck_app->add_option("--tol", gradcheck_cmd.tol, "relative tolerance (MLP, loss)")->capture_default_str();
    gradcheck_app->add_option("--render-tol", gradcheck_cmd.render_tol, "relative tolerance (render)")
        ->capture_default_str();
    gradcheck_app->add_option("--draws", gradcheck_cmd.draws, "random draws per check")->capture_default_str();

    BenchCmd bench_cmd;
    auto* bench_app = app.add_subcommand("bench", "render throughput");
    bench_app->add_option("--scene", bench_cmd.scene, "scene JSON (default: generated benchmark scene)");
    bench_app->add_option("--gaussians", bench_cmd.gaussians, "size of the generated scene")->capture_default_str();
    bench_app->add_option("--res", bench_cmd.res, "square resolution")->capture_default_str();
    bench_app->add_option("--frames", bench_cmd.frames, "timed frames")->capture_default_str();
    bench_app->add_option("--scaling", bench_cmd.scaling, "worker counts to compare, e.g. 1,8")->delimiter(',');
    bench_cmd.render.add(bench_app);

    std::string info_scene;
    auto* info_app = app.add_subcommand("info", "version, host and optional scene summary");
    info_app->add_option("--scene", info_scene, "scene JSON");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitArgument;
    }

    try {
        if (*render_app) return cmd_render(render_cmd, g, out);
        if (*drr_app) return cmd_drr(drr_cmd, g, out);
        if (*fit_app) return cmd_fit(fit_cmd, g, out);
        if (*anchors_app) return cmd_anchors(anchors_cmd, g, out);
        if (*metrics_app) return cmd_metrics(metrics_cmd, g, out);
        if (*gradcheck_app) return cmd_gradcheck(gradcheck_cmd, g, out);
        if (*bench_app) return cmd_bench(bench_cmd, g, out);
        if (*info_app) return cmd_info(info_scene, g, out);
    } catch (const CheckFailure& e) {
        err << "error: " << e.what() << "\n";
        return kExitCheck;
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << "\n";
        return kExitArgument;
    } catch (const NumericError& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitFormat;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitArgument;
}

} // namespace splat360::cli
