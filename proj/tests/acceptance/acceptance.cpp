// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL line per criterion; exits non-zero if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "splat360/anchoring.hpp"
#include "splat360/drr.hpp"
#include "splat360/fitting.hpp"
#include "splat360/gradcheck.hpp"
#include "splat360/io.hpp"
#include "splat360/metrics.hpp"
#include "splat360/parallel.hpp"
#include "splat360/phase.hpp"
#include "splat360/random.hpp"
#include "splat360/renderer.hpp"
#include "splat360/synthetic.hpp"
#include "test_support.hpp"

using namespace splat360;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// --- conservation -------------------------------------------------------------

Outcome conservation() {
    const auto t0 = Clock::now();
    Rng rng(1001);
    double worst = 0.0;
    int rays = 0;
    for (int s = 0; s < 100; ++s) {
        const Scene scene = random_scene(40, 5000 + s);
        for (int i = 0; i < 100; ++i, ++rays) {
            const Vec3 origin = 4.0 * random_unit_vector(rng);
            const Vec3 aim(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7));
            const auto res = composite_ray(scene, {origin, (aim - origin).normalized()}, RenderConfig{});
            double sum = res.final_T;
            for (const auto& smp : res.samples) sum += smp.transmittance_before * smp.weight;
            worst = std::max(worst, std::abs(sum - 1.0));
        }
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-9 && secs < 10.0 && rays == 10000,
            std::to_string(rays) + " rays, max |sum T w + T_final - 1| = " + fmt("%.3g", worst) +
                " (tol 1e-9), " + fmt("%.2f", secs) + " s (limit 10 s)"};
}

// --- disentanglement ----------------------------------------------------------

Outcome disentanglement() {
    double worst_off = 0.0;
    double worst_g0 = 0.0;
    for (int s = 0; s < 100; ++s) {
        const Scene scene = random_scene(20, 7000 + s);
        const Camera cam = make_orbit_cameras(scene.center(), 2.5 * scene.radius(), 1, 0.2 + 0.01 * s, OrbitMode::ring,
                                              24, 24, 0.9)
                               .front();
        RenderConfig off;
        off.anisotropy_enabled = false;
        auto zero_aniso = scene.gaussians();
        for (auto& p : zero_aniso) p.l_aniso.setZero();
        auto g0 = scene.gaussians();
        auto folded = scene.gaussians();
        for (std::size_t i = 0; i < g0.size(); ++i) {
            g0[i].g = 0.0;
            folded[i].g = 0.0;
            folded[i].l_iso += folded[i].l_aniso;
            folded[i].l_aniso.setZero();
        }
        const auto a = render(scene, cam, off).color;
        const auto b = render(Scene(zero_aniso, scene.background()), cam, RenderConfig{}).color;
        const auto c = render(Scene(g0, scene.background()), cam, RenderConfig{}).color;
        const auto d = render(Scene(folded, scene.background()), cam, RenderConfig{}).color;
        for (std::size_t i = 0; i < a.size(); ++i) {
            worst_off = std::max(worst_off, std::abs(a.data()[i] - b.data()[i]));
            worst_g0 = std::max(worst_g0, std::abs(c.data()[i] - d.data()[i]));
        }
    }
    return {worst_off <= 1e-9 && worst_g0 <= 1e-9,
            "100 scenes, anisotropy-off max diff " + fmt("%.3g", worst_off) + ", g=0 fold-in max diff " +
                fmt("%.3g", worst_g0) + " (tol 1e-9)"};
}

// --- phase normalization --------------------------------------------------------

Outcome phase_normalization() {
    // Midpoint quadrature over (theta, phi) about the normal axis, sin(theta) Jacobian.
    const int nt = 4000;
    const int np = 64;
    std::ostringstream detail;
    bool ok = true;
    const Vec3 normal = Vec3(0.3, -0.2, 0.9).normalized();
    const Vec3 u = normal.unitOrthogonal();
    const Vec3 v = normal.cross(u);
    for (double g : {-0.8, 0.0, 0.5, 0.9}) {
        double integral = 0.0;
        for (int i = 0; i < nt; ++i) {
            const double theta = (i + 0.5) * kPi / nt;
            for (int j = 0; j < np; ++j) {
                const double phi = (j + 0.5) * 2.0 * kPi / np;
                const Vec3 dir = std::cos(theta) * normal +
                                 std::sin(theta) * (std::cos(phi) * u + std::sin(phi) * v);
                integral += phase(dir, normal, g) * std::sin(theta);
            }
        }
        integral *= (kPi / nt) * (2.0 * kPi / np);
        ok = ok && std::abs(integral - 1.0) <= 1e-3;
        detail << "g=" << g << ": " << fmt("%.7f", integral) << "  ";
    }
    detail << "(tol 1e-3)";
    return {ok, detail.str()};
}

// --- DRR oracles ----------------------------------------------------------------

Outcome drr_oracles() {
    const double mu = 0.02;
    // Water slab, 20 mm thick along the central ray.
    const auto slab = VoxelVolume::filled({20, 40, 40}, Vec3::Ones(), Vec3::Zero(), 0.0);
    const auto geom = ProjectionGeometry::cone_beam(slab.center(), 300, 600, 0.0, 5, 5, 0.5);
    DrrConfig cfg;
    cfg.mu_water = mu;
    const double slab_i = render_drr(slab, geom, cfg).at(2, 2);
    const double slab_ref = std::exp(-mu * 20.0);
    const double slab_err = std::abs(slab_i - slab_ref) / slab_ref;

    const auto sphere = load_volume(splat360::testing::data_dir() / "phantoms" / "water_sphere.hdr");
    const auto sgeom = ProjectionGeometry::cone_beam(sphere.center(), 500, 1000, 0.0, 33, 33, 1.0);
    const double sphere_i = render_drr(sphere, sgeom, cfg).at(16, 16);
    const double sphere_ref = std::exp(-2.0 * mu * 30.0);
    const double sphere_err = std::abs(sphere_i - sphere_ref) / sphere_ref;

    // Step halving on an oblique ray through the slab.
    const Ray oblique{Vec3(-30, 5, 3), Vec3(1.0, 0.4, 0.3).normalized()};
    DrrConfig coarse = cfg;
    coarse.step_mm = 0.5;
    DrrConfig fine = cfg;
    fine.step_mm = 0.25;
    const double li_coarse = beer_lambert_ray(slab, oblique, coarse).line_integral;
    const double li_fine = beer_lambert_ray(slab, oblique, fine).line_integral;
    const double halving = std::abs(li_coarse - li_fine) / li_fine;

    return {slab_err < 0.005 && sphere_err < 0.01 && halving < 0.001 && li_fine > 0.0,
            "slab rel err " + fmt("%.3g", slab_err) + " (tol 0.5%), sphere chord rel err " + fmt("%.3g", sphere_err) +
                " (tol 1%), step-halving change " + fmt("%.3g", halving) + " (tol 0.1%)"};
}

// --- Hounsfield ---------------------------------------------------------------

Outcome hounsfield() {
    bool ok = true;
    for (double mu_w : {0.02, 0.0193, 0.1}) {
        ok = ok && hu_to_mu(-1000.0, mu_w) == 0.0 && hu_to_mu(0.0, mu_w) == mu_w &&
             hu_to_mu(1000.0, mu_w) == 2.0 * mu_w;
    }
    return {ok, "h in {-1000, 0, 1000} -> {0, mu_w, 2 mu_w} bit-exact for mu_w in {0.02, 0.0193, 0.1}"};
}

// --- gradient checks --------------------------------------------------------------

Outcome gradients() {
    const auto mlp = check_fusion_gradients(7, 100, 1e-4);
    const auto loss16 = check_loss_gradients(8, 100, 16, 1.0, 0.2, 1e-4);
    const auto loss8 = check_loss_gradients(9, 100, 8, 1.0, 0.0, 1e-4);
    const auto rend = check_render_gradients(10, 16, 1e-3);
    std::ostringstream sink;
    const int code = cli::run({"gradcheck", "--seed", "7", "--tol", "1e-4"}, sink, sink);
    return {mlp.passed && loss16.passed && loss8.passed && rend.passed && code == 0,
            "mlp " + fmt("%.2e", mlp.max_error) + ", loss 16x16 " + fmt("%.2e", loss16.max_error) + ", loss 8x8 " +
                fmt("%.2e", loss8.max_error) + " (tol 1e-4, 100 draws); render " + fmt("%.2e", rend.max_error) +
                " (tol 1e-3); gradcheck exit " + std::to_string(code)};
}

// --- toy recovery and ablations ------------------------------------------------------

struct ToySetup {
    Scene truth;
    Scene start;
    std::vector<FitTarget> targets;
    FitConfig cfg;
};

ToySetup toy_setup(int iters) {
    ToySetup s;
    s.truth = toy_recovery_scene();
    s.start = perturb_appearance(s.truth, 0.2, 99);
    for (const auto& cam : make_orbit_cameras(s.truth.center(), 2.5 * s.truth.radius(), 8, 20.0 * kPi / 180.0,
                                              OrbitMode::ring, 64, 64, 50.0 * kPi / 180.0)) {
        s.targets.push_back({cam, render(s.truth, cam, RenderConfig{}).color});
    }
    s.cfg.iters = iters;
    s.cfg.lr = 0.01;
    s.cfg.seed = 7;
    s.cfg.workers = resolve_workers(0);
    return s;
}

Outcome toy_recovery() {
    const fs::path baseline_path = splat360::testing::data_dir() / "baselines" / "toy_recovery.json";
    const auto baseline = nlohmann::json::parse(read_text(baseline_path));
    const int iters = baseline["iters"].get<int>();
    const double pinned = baseline["mean_psnr_db"].get<double>();
    auto setup = toy_setup(iters);
    setup.cfg.lr = baseline["lr"].get<double>();
    const auto t0 = Clock::now();
    const auto res = fit_scene(setup.start, setup.targets, setup.cfg, RenderConfig{});
    const double secs = seconds_since(t0);
    const double psnr_db = res.report.mean_psnr();
    double start_psnr = 0.0;
    for (const auto& t : setup.targets) start_psnr += psnr(render(setup.start, t.camera, RenderConfig{}).color, t.image);
    start_psnr /= setup.targets.size();
    const bool ok = iters <= 2000 && psnr_db >= 30.0 && psnr_db >= pinned - 1.0 && secs < 60.0;
    return {ok, std::to_string(iters) + " iters: mean PSNR " + fmt("%.2f", start_psnr) + " -> " + fmt("%.2f", psnr_db) +
                    " dB (need >= 30 and >= baseline " + fmt("%.2f", pinned) + " - 1), " + fmt("%.1f", secs) +
                    " s with " + std::to_string(setup.cfg.workers) + " worker(s) (limit 60 s)"};
}

Outcome ablation_order() {
    auto setup = toy_setup(200);
    auto final_loss = [&](const char* ablation) {
        FitConfig cfg = setup.cfg;
        cfg.ablation = Ablation::parse(ablation);
        return fit_scene(setup.start, setup.targets, cfg, RenderConfig{}).report.final_loss;
    };
    const double full = final_loss("none");
    const double no_aniso = final_loss("no_anisotropy");
    const double no_dis = final_loss("no_disentangle");
    return {full <= no_aniso + 1e-6 && full <= no_dis + 1e-6,
            "final loss full " + fmt("%.3e", full) + " <= no_anisotropy " + fmt("%.3e", no_aniso) +
                ", <= no_disentangle " + fmt("%.3e", no_dis) + " (tol 1e-6)"};
}

// --- anchoring statistics ---------------------------------------------------------

Outcome anchoring_stats() {
    const Scene scene = load_scene(splat360::testing::data_dir() / "demo_scene.json");
    const Camera cam = make_orbit_cameras(scene.center(), 2.5 * scene.radius(), 1, 0.3, OrbitMode::ring, 96, 96, 0.9)
                           .front();
    const auto grad = depth_gradient(render(scene, cam, RenderConfig{}).depth);

    AnchorSet uniform = select_anchors(grad, 32, 4.0, 0.0);
    const int n = 10000;
    std::vector<double> counts(uniform.anchors.size(), 0.0);
    for (auto j : sample_anchor_indices(uniform, n, 12345)) counts[j] += 1.0;
    const double expected = static_cast<double>(n) / counts.size();
    double chi2 = 0.0;
    for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
    const boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
    const double p_value = boost::math::cdf(boost::math::complement(dist, chi2));

    double worst_norm = 0.0;
    std::vector<double> top_prob;
    for (double beta : {0.0, 1.0, 2.0, -1.0, 10.0}) {
        const AnchorSet set = select_anchors(grad, 32, 4.0, beta);
        double sum = 0.0;
        for (const auto& a : set.anchors) sum += a.prob;
        worst_norm = std::max(worst_norm, std::abs(sum - 1.0));
        if (beta >= 0.0 && beta <= 2.0) top_prob.push_back(set.anchors.front().prob);
    }
    const bool monotone = top_prob[1] <= top_prob[0] && top_prob[2] <= top_prob[1];
    return {p_value > 0.01 && worst_norm <= 1e-9 && monotone && uniform.anchors.size() > 1,
            std::to_string(uniform.anchors.size()) + " anchors, beta=0 chi-square p = " + fmt("%.3f", p_value) +
                " (need > 0.01), max |sum p - 1| = " + fmt("%.2g", worst_norm) + ", top-anchor prob beta 0/1/2 = " +
                fmt("%.4f", top_prob[0]) + "/" + fmt("%.4f", top_prob[1]) + "/" + fmt("%.4f", top_prob[2])};
}

// --- metrics sanity ---------------------------------------------------------------

Outcome metrics_sanity() {
    ImageBuffer a(32, 24, 3, ImageKind::radiance);
    ImageBuffer b(32, 24, 3, ImageKind::radiance);
    Rng rng(3);
    for (double& v : a.data()) v = rng.uniform(0.1, 0.8);
    for (double& v : b.data()) v = rng.uniform(0.1, 0.8);
    ImageBuffer a20 = a, a40 = a;
    for (double& v : a20.data()) v += 0.1;
    for (double& v : a40.data()) v -= 0.01;
    const double e20 = std::abs(psnr(a, a20) - 20.0);
    const double e40 = std::abs(psnr(a, a40) - 40.0);
    const double sym = std::max(std::abs(ssim(a, b) - ssim(b, a)), std::abs(psnr(a, b) - psnr(b, a)));
    const bool self = ssim(a, a) == 1.0 && ssim(b, b) == 1.0;
    return {self && e20 <= 1e-9 && e40 <= 1e-9 && sym <= 1e-12,
            std::string("ssim(a,a)=1 ") + (self ? "exact" : "NOT exact") + ", |psnr-20| = " + fmt("%.2g", e20) +
                ", |psnr-40| = " + fmt("%.2g", e40) + " (tol 1e-9 dB), symmetry " + fmt("%.2g", sym) + " (tol 1e-12)"};
}

// --- determinism / golden files ----------------------------------------------------

Outcome golden_files() {
    splat360::testing::TempDir dir;
    const fs::path golden = splat360::testing::data_dir() / "golden";
    int compared = 0;
    int mismatched = 0;
    for (const char* workers : {"1", "2", "8", "8"}) {
        const fs::path out = dir / (std::string("w") + workers + "_" + std::to_string(compared));
        std::ostringstream sink;
        const int code = cli::run({"render", "--scene", (splat360::testing::data_dir() / "demo_scene.json").string(),
                                   "--orbit", "ring:4", "--res", "64", "--depth", "--transmittance", "--workers",
                                   workers, "--out", out.string()},
                                  sink, sink);
        if (code != 0) return {false, "render exited with " + std::to_string(code)};
        for (const auto& e : fs::directory_iterator(golden)) {
            ++compared;
            if (read_text(e.path()) != read_text(out / e.path().filename())) ++mismatched;
        }
    }
    return {mismatched == 0 && compared > 0,
            std::to_string(compared) + " files compared against data/golden over 4 runs (1, 2, 8, 8 workers), " +
                std::to_string(mismatched) + " mismatched"};
}

// --- throughput -----------------------------------------------------------------

Outcome throughput() {
    const Scene scene = benchmark_scene(5000, 5000);
    const auto cams = make_orbit_cameras(scene.center(), 2.5 * scene.radius(), 3, 20.0 * kPi / 180.0, OrbitMode::ring,
                                         512, 512, 50.0 * kPi / 180.0);
    const auto one = measure_runtime(scene, cams, RenderConfig{}, 1);
    const auto eight = measure_runtime(scene, cams, RenderConfig{}, 8);
    const double speedup = one.ms_per_frame / eight.ms_per_frame;
    const bool ok = eight.ms_per_frame < 1000.0 && speedup >= 3.0;
    return {ok, "512x512, 5000 gaussians: " + fmt("%.1f", eight.ms_per_frame) + " ms/frame on 8 workers (limit 1000), " +
                    "speedup 1->8 = " + fmt("%.2f", speedup) + "x (need >= 3) on " +
                    std::to_string(std::thread::hardware_concurrency()) + " hardware thread(s), " + eight.cpu};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"01 conservation", conservation},
        {"02 disentanglement equivalences", disentanglement},
        {"03 phase normalization", phase_normalization},
        {"04 DRR analytic oracles", drr_oracles},
        {"05 Hounsfield conversion", hounsfield},
        {"06 gradient checks", gradients},
        {"07 toy recovery", toy_recovery},
        {"08 ablation ordering", ablation_order},
        {"09 anchoring statistics", anchoring_stats},
        {"10 metrics sanity", metrics_sanity},
        {"11 determinism and golden files", golden_files},
        {"12 throughput", throughput},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
