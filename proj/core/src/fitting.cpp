// SPDX-License-Identifier: Apache-2.0

#include "splat360/fitting.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "render_kernels.hpp"
#include "splat360/anchoring.hpp"
#include "splat360/error.hpp"
#include "splat360/parallel.hpp"
#include "splat360/random.hpp"

namespace splat360 {
namespace {

constexpr double kSqueeze = 1e-6;
constexpr int kTile = 16;
constexpr std::size_t kGradChunks = 64;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) {
    p = std::clamp(p, kSqueeze, 1.0 - kSqueeze);
    return std::log(p / (1.0 - p));
}
double softplus(double x) { return x > 30.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double softplus_inv(double y) {
    y = std::max(y, kSqueeze);
    return y > 30.0 ? y + std::log(-std::expm1(-y)) : std::log(std::expm1(y));
}

// Latent layout per primitive: logit(alpha), logit(l_iso)[3], softplus^-1(l_aniso)[3],
// atanh(g), then optionally mu[3] and log-eigenvalues of cov[3]. MLP weights follow.
constexpr std::size_t kAppearanceLatents = 8;
constexpr std::size_t kGeometryLatents = 6;

class Parameterization {
public:
    Parameterization(const Scene& scene, const MlpParams* mlp, bool geometry)
        : original_(scene), geometry_(geometry) {
        const auto& gs = scene.gaussians();
        latent_.reserve(gs.size() * stride() + (mlp ? mlp->parameter_count() : 0));
        for (const auto& p : gs) {
            latent_.push_back(logit(p.alpha));
            for (int c = 0; c < 3; ++c) latent_.push_back(logit(p.l_iso[c]));
            for (int c = 0; c < 3; ++c) latent_.push_back(softplus_inv(p.l_aniso[c]));
            latent_.push_back(std::atanh(std::clamp(p.g, -1.0 + kSqueeze, 1.0 - kSqueeze)));
            if (geometry_) {
                Eigen::SelfAdjointEigenSolver<Mat3> solver(p.cov);
                rotations_.push_back(solver.eigenvectors());
                for (int c = 0; c < 3; ++c) latent_.push_back(p.mu[c]);
                for (int c = 0; c < 3; ++c) {
                    latent_.push_back(std::log(std::max(solver.eigenvalues()[c], 1e-12)));
                }
            }
        }
        mlp_offset_ = latent_.size();
        if (mlp) {
            const auto flat = mlp->flat();
            latent_.insert(latent_.end(), flat.begin(), flat.end());
        }
        initial_ = latent_;
    }

    std::vector<double>& latent() { return latent_; }
    std::size_t stride() const { return geometry_ ? kAppearanceLatents + kGeometryLatents : kAppearanceLatents; }
    std::size_t mlp_offset() const { return mlp_offset_; }

    // Keeps every decoded primitive valid however large the step.
    void project(std::span<double> z) const {
        static const double alpha_hi = std::log((1.0 - kSqueeze) / kSqueeze);
        static const double g_hi = std::atanh(1.0 - kSqueeze);
        const std::size_t s = stride();
        const std::size_t n = original_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t b = i * s;
            z[b] = std::clamp(z[b], -alpha_hi, alpha_hi);
            for (int c = 0; c < 3; ++c) {
                z[b + 1 + c] = std::clamp(z[b + 1 + c], -alpha_hi, alpha_hi);
                z[b + 4 + c] = std::clamp(z[b + 4 + c], -40.0, 40.0);
            }
            z[b + 7] = std::clamp(z[b + 7], -g_hi, g_hi);
            if (geometry_) {
                for (int c = 0; c < 3; ++c) z[b + 11 + c] = std::clamp(z[b + 11 + c], -25.0, 10.0);
            }
        }
    }

    // Untouched latents decode to the original values bit for bit.
    Scene decode(std::span<const double> z) const {
        auto gs = original_.gaussians();
        const std::size_t s = stride();
        auto pick = [&](std::size_t j, double original, auto&& transform) {
            return z[j] == initial_[j] ? original : transform(z[j]);
        };
        for (std::size_t i = 0; i < gs.size(); ++i) {
            auto& p = gs[i];
            const std::size_t b = i * s;
            p.alpha = pick(b, p.alpha, sigmoid);
            for (int c = 0; c < 3; ++c) {
                p.l_iso[c] = pick(b + 1 + c, p.l_iso[c], sigmoid);
                p.l_aniso[c] = pick(b + 4 + c, p.l_aniso[c], softplus);
            }
            p.g = pick(b + 7, p.g, [](double h) { return std::tanh(h); });
            if (geometry_) {
                for (int c = 0; c < 3; ++c) p.mu[c] = pick(b + 8 + c, p.mu[c], [](double v) { return v; });
                bool cov_changed = false;
                for (int c = 0; c < 3; ++c) cov_changed |= z[b + 11 + c] != initial_[b + 11 + c];
                if (cov_changed) {
                    const Vec3 eig(std::exp(z[b + 11]), std::exp(z[b + 12]), std::exp(z[b + 13]));
                    const Mat3& r = rotations_[i];
                    const Mat3 cov = r * eig.asDiagonal() * r.transpose();
                    p.cov = 0.5 * (cov + cov.transpose());
                }
            }
        }
        Scene out(std::move(gs), original_.background());
        return out;
    }

    void decode_mlp(std::span<const double> z, MlpParams& mlp) const {
        mlp.assign(z.subspan(mlp_offset_, mlp.parameter_count()));
    }

    // Raw appearance gradient (kGradStride per primitive) to latent gradient.
    void chain(const Scene& decoded, std::span<const double> raw, std::span<double> out) const {
        const auto& gs = decoded.gaussians();
        const std::size_t s = stride();
        for (std::size_t i = 0; i < gs.size(); ++i) {
            const auto& p = gs[i];
            const double* r = raw.data() + i * detail::kGradStride;
            double* o = out.data() + i * s;
            o[0] = r[detail::kGradAlpha] * p.alpha * (1.0 - p.alpha);
            for (int c = 0; c < 3; ++c) {
                o[1 + c] = r[detail::kGradIso + c] * p.l_iso[c] * (1.0 - p.l_iso[c]);
                // softplus'(v) = sigmoid(v) = 1 - exp(-l_aniso)
                o[4 + c] = r[detail::kGradAniso + c] * -std::expm1(-p.l_aniso[c]);
            }
            o[7] = r[detail::kGradG] * (1.0 - p.g * p.g);
        }
    }

private:
    Scene original_;
    bool geometry_;
    std::vector<double> latent_;
    std::vector<double> initial_;
    std::vector<Mat3> rotations_;
    std::size_t mlp_offset_ = 0;
};

struct Pick {
    std::uint32_t view;
    int row;
    int col;
    double weight;
};

class Objective {
public:
    Objective(const std::vector<FitTarget>& targets, const FitConfig& cfg, const RenderConfig& rcfg)
        : targets_(targets), cfg_(cfg), rcfg_(rcfg) {
        if (targets.empty()) throw ArgumentError("fit: at least one target view is required");
        for (const auto& t : targets) {
            t.camera.validate();
            if (t.image.width() != t.camera.width || t.image.height() != t.camera.height ||
                t.image.channels() != 3) {
                throw ArgumentError("fit: target image does not match its camera dimensions");
            }
            if (!t.image.all_finite()) throw ArgumentError("fit: target image has non-finite pixels");
        }
        preds_.resize(targets.size());
        depths_.resize(targets.size());
        grads_.resize(targets.size());
    }

    double forward(const Scene& scene, const MlpParams* mlp, bool need_grad) {
        const double inv_views = 1.0 / static_cast<double>(targets_.size());
        const ExecPolicy exec{cfg_.workers, kTile};
        double total = 0.0;
        for (std::size_t v = 0; v < targets_.size(); ++v) {
            auto out = render(scene, targets_[v].camera, rcfg_, exec, mlp);
            preds_[v] = std::move(out.color);
            depths_[v] = std::move(out.depth);
            auto loss = composite_loss(preds_[v], targets_[v].image, cfg_.lambda_mse, cfg_.lambda_ssim);
            total += loss.loss * inv_views;
            if (need_grad) {
                for (double& g : loss.grad.data()) g *= inv_views;
                grads_[v] = std::move(loss.grad);
            }
        }
        return total;
    }

    void backward(const Scene& scene, const MlpParams* mlp, std::span<const Pick> picks,
                  std::span<double> app_grad, MlpParams* mlp_grad) const {
        std::vector<detail::PreparedScene> prepared;
        std::vector<detail::TileGrid> grids;
        std::vector<CameraEmbedding> embeddings;
        for (const auto& t : targets_) {
            prepared.emplace_back(scene, t.camera.position, rcfg_);
            grids.push_back(detail::bin_tiles(prepared.back(), t.camera, kTile));
            if (mlp) embeddings.push_back(embed_camera(t.camera, scene.center(), scene.radius(), mlp->embed_dim));
        }

        const std::size_t chunks = std::min(kGradChunks, std::max<std::size_t>(1, picks.size()));
        std::vector<std::vector<double>> chunk_app(chunks, std::vector<double>(app_grad.size(), 0.0));
        std::vector<MlpParams> chunk_mlp;
        if (mlp) chunk_mlp.assign(chunks, MlpParams::zeros(mlp->embed_dim));

        parallel_for(chunks, resolve_workers(cfg_.workers), [&](std::size_t chunk) {
            std::vector<detail::Sample> samples;
            const std::size_t begin = picks.size() * chunk / chunks;
            const std::size_t end = picks.size() * (chunk + 1) / chunks;
            for (std::size_t i = begin; i < end; ++i) {
                const Pick& pk = picks[i];
                const auto& cam = targets_[pk.view].camera;
                const Ray ray = cam.pixel_ray(pk.row, pk.col);
                const auto tr = detail::trace_ray(prepared[pk.view], grids[pk.view].at(pk.row, pk.col),
                                                  ray.dir, rcfg_, cam.near, samples);
                const auto& g_img = grads_[pk.view];
                const Vec3 g(pk.weight * g_img.at(pk.row, pk.col, 0), pk.weight * g_img.at(pk.row, pk.col, 1),
                             pk.weight * g_img.at(pk.row, pk.col, 2));
                Vec3 g_iso = g;
                Vec3 g_aniso = g;
                if (mlp) {
                    const auto input = fusion_input(tr.iso, tr.aniso, embeddings[pk.view], ray.dir);
                    const auto ig = fuse_backward_accumulate(input, *mlp, g, chunk_mlp[chunk]);
                    g_iso = ig.segment<3>(0);
                    g_aniso = ig.segment<3>(3);
                }
                detail::backprop_ray(prepared[pk.view], samples, g_iso, g_aniso, chunk_app[chunk]);
            }
        });

        for (std::size_t c = 0; c < chunks; ++c) {
            for (std::size_t j = 0; j < app_grad.size(); ++j) app_grad[j] += chunk_app[c][j];
            if (mlp && mlp_grad) {
                for (std::size_t l = 0; l < mlp_grad->layers.size(); ++l) {
                    mlp_grad->layers[l].weight += chunk_mlp[c].layers[l].weight;
                    mlp_grad->layers[l].bias += chunk_mlp[c].layers[l].bias;
                }
            }
        }
    }

    std::vector<Pick> all_pixels() const {
        std::vector<Pick> picks;
        for (std::uint32_t v = 0; v < targets_.size(); ++v) {
            const auto& cam = targets_[v].camera;
            for (int r = 0; r < cam.height; ++r) {
                for (int c = 0; c < cam.width; ++c) picks.push_back({v, r, c, 1.0});
            }
        }
        return picks;
    }

    std::size_t total_pixels() const {
        std::size_t n = 0;
        for (const auto& t : targets_) n += t.image.pixel_count();
        return n;
    }

    // Importance-weighted ray subset; weights make the gradient estimate unbiased.
    std::vector<Pick> sample_pixels(Rng& rng) const {
        const int n = cfg_.rays_per_step;
        const std::size_t views = targets_.size();
        const bool anchored = !cfg_.ablation.no_anchoring && cfg_.anchor_mix > 0.0;
        const double mix = anchored ? cfg_.anchor_mix : 0.0;

        std::vector<AnchorSet> anchors(views);
        std::vector<std::vector<double>> anchor_prob(views);
        if (anchored) {
            for (std::size_t v = 0; v < views; ++v) {
                const auto& d = depths_[v];
                anchor_prob[v].assign(d.pixel_count(), 0.0);
                if (d.width() < 3 || d.height() < 3) continue;
                anchors[v] = select_anchors(depth_gradient(d), cfg_.anchor_k, cfg_.anchor_radius,
                                            cfg_.anchor_beta);
                for (const auto& a : anchors[v].anchors) {
                    anchor_prob[v][static_cast<std::size_t>(a.row) * d.width() + a.col] += a.prob;
                }
            }
        }

        std::vector<Pick> picks;
        picks.reserve(n);
        for (int s = 0; s < n; ++s) {
            const auto v = static_cast<std::uint32_t>(rng.below(views));
            const auto& cam = targets_[v].camera;
            const std::size_t hw = static_cast<std::size_t>(cam.width) * cam.height;
            const bool from_anchor = anchored && !anchors[v].anchors.empty() && rng.uniform() < mix;
            std::size_t pixel;
            if (from_anchor) {
                const double u = rng.uniform();
                double acc = 0.0;
                std::size_t j = 0;
                for (; j + 1 < anchors[v].anchors.size(); ++j) {
                    acc += anchors[v].anchors[j].prob;
                    if (u < acc) break;
                }
                const auto& a = anchors[v].anchors[j];
                pixel = static_cast<std::size_t>(a.row) * cam.width + a.col;
            } else {
                pixel = rng.below(hw);
            }
            const double eff_mix = anchors[v].anchors.empty() ? 0.0 : mix;
            const double p = ((1.0 - eff_mix) / static_cast<double>(hw) +
                              (anchored ? eff_mix * anchor_prob[v][pixel] : 0.0)) /
                             static_cast<double>(views);
            picks.push_back({v, static_cast<int>(pixel / cam.width), static_cast<int>(pixel % cam.width),
                             1.0 / (n * p)});
        }
        return picks;
    }

    const ImageBuffer& pred(std::size_t v) const { return preds_[v]; }

private:
    const std::vector<FitTarget>& targets_;
    const FitConfig& cfg_;
    RenderConfig rcfg_;
    std::vector<ImageBuffer> preds_;
    std::vector<ImageBuffer> depths_;
    std::vector<ImageBuffer> grads_;
};

} // namespace

Ablation Ablation::parse(const std::string& list) {
    Ablation a;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty() || item == "none") continue;
        if (item == "no_anchoring") a.no_anchoring = true;
        else if (item == "no_disentangle") a.no_disentangle = true;
        else if (item == "no_dual_branch") a.no_dual_branch = true;
        else if (item == "no_anisotropy") a.no_anisotropy = true;
        else throw ArgumentError("unknown ablation '" + item + "'");
    }
    return a;
}

std::string Ablation::to_string() const {
    std::string out;
    auto add = [&](bool on, const char* name) {
        if (!on) return;
        if (!out.empty()) out += ',';
        out += name;
    };
    add(no_anchoring, "no_anchoring");
    add(no_disentangle, "no_disentangle");
    add(no_dual_branch, "no_dual_branch");
    add(no_anisotropy, "no_anisotropy");
    return out;
}

void FitConfig::validate() const {
    if (!(lr > 0.0)) throw ArgumentError("lr must be positive");
    if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
        throw ArgumentError("Adam betas must lie in (0, 1)");
    }
    if (!(epsilon_adam > 0.0)) throw ArgumentError("epsilon_adam must be positive");
    if (lr_halve_every < 1) throw ArgumentError("lr_halve_every must be >= 1");
    if (iters < 0) throw ArgumentError("iters must be >= 0");
    if (!(lambda_mse >= 0.0) || !(lambda_ssim >= 0.0)) throw ArgumentError("loss weights must be >= 0");
    if (lambda_lpips > 0.0) {
        throw ArgumentError("LPIPS needs a pretrained feature network and is not supported");
    }
    if (!(anchor_mix >= 0.0 && anchor_mix <= 1.0)) throw ArgumentError("anchor_mix must lie in [0, 1]");
    if (anchor_k < 1) throw ArgumentError("anchor_k must be >= 1");
    if (!(geometry_fd_step > 0.0)) throw ArgumentError("geometry_fd_step must be positive");
}

RenderConfig ablated(const RenderConfig& base, const Ablation& ablation) {
    RenderConfig rc = base;
    if (ablation.no_disentangle) rc.disentangle = false;
    if (ablation.no_anisotropy) rc.anisotropy_enabled = false;
    return rc;
}

LossResult composite_loss(const ImageBuffer& pred, const ImageBuffer& target, double lambda_mse,
                          double lambda_ssim) {
    if (!pred.same_shape(target)) throw ArgumentError("composite_loss: image dimensions differ");
    if (!target.all_finite()) throw ArgumentError("composite_loss: target image must be finite");
    LossResult out;
    out.grad = ImageBuffer(pred.width(), pred.height(), pred.channels(), pred.kind());
    if (!pred.all_finite()) {
        out.loss = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    auto g = out.grad.data();
    const auto p = pred.data();
    const auto t = target.data();
    const double n = static_cast<double>(p.size());
    double sq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p[i] - t[i];
        sq += d * d;
        g[i] = lambda_mse * 2.0 * d / n;
    }
    out.loss = lambda_mse * (sq / n);
    if (lambda_ssim > 0.0) {
        std::vector<double> ds(p.size());
        const double s = ssim_with_gradient(pred, target, SsimConfig{}, ds);
        out.loss += lambda_ssim * (1.0 - s);
        for (std::size_t i = 0; i < p.size(); ++i) g[i] -= lambda_ssim * ds[i];
    }
    return out;
}

double scheduled_lr(const FitConfig& cfg, long completed_steps) {
    return cfg.lr * std::pow(0.5, static_cast<double>(completed_steps / cfg.lr_halve_every));
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const FitConfig& cfg) {
    if (params.size() != grads.size()) throw ArgumentError("adam_step: parameter/gradient length mismatch");
    if (state.m.empty() && state.v.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    if (state.m.size() != params.size() || state.v.size() != params.size()) {
        throw ArgumentError("adam_step: optimizer state length mismatch");
    }
    const double lr = scheduled_lr(cfg, state.t);
    state.t += 1;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
        const double m_hat = state.m[i] / c1;
        const double v_hat = state.v[i] / c2;
        params[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon_adam);
    }
}

double FitReport::mean_psnr() const {
    double s = 0.0;
    for (const auto& v : views) s += v.psnr;
    return views.empty() ? 0.0 : s / views.size();
}

double FitReport::mean_ssim() const {
    double s = 0.0;
    for (const auto& v : views) s += v.ssim;
    return views.empty() ? 0.0 : s / views.size();
}

double total_loss(const Scene& scene, const std::vector<FitTarget>& targets, const FitConfig& cfg,
                  const RenderConfig& render_cfg, const MlpParams* mlp) {
    Objective obj(targets, cfg, render_cfg);
    return obj.forward(scene, mlp, false);
}

std::vector<double> appearance_gradient(const Scene& scene, const std::vector<FitTarget>& targets,
                                        const FitConfig& cfg, const RenderConfig& render_cfg,
                                        const MlpParams* mlp, MlpParams* mlp_grad) {
    Objective obj(targets, cfg, render_cfg);
    obj.forward(scene, mlp, true);
    std::vector<double> grad(scene.size() * detail::kGradStride, 0.0);
    if (mlp && mlp_grad) *mlp_grad = MlpParams::zeros(mlp->embed_dim);
    const auto picks = obj.all_pixels();
    obj.backward(scene, mlp, picks, grad, mlp_grad);
    return grad;
}

FitResult fit_scene(const Scene& scene, const std::vector<FitTarget>& targets, const FitConfig& cfg,
                    const RenderConfig& render_cfg, std::optional<MlpParams> mlp) {
    cfg.validate();
    render_cfg.validate();
    if (!validate_scene(scene).empty()) throw ArgumentError("fit: input scene is invalid");
    if (mlp) mlp->validate();
    const auto started = std::chrono::steady_clock::now();

    const RenderConfig rcfg = ablated(render_cfg, cfg.ablation);
    const bool fused = mlp.has_value() && !cfg.ablation.no_dual_branch;
    Parameterization param(scene, fused ? &*mlp : nullptr, cfg.optimize_geometry);
    Objective obj(targets, cfg, rcfg);
    const bool full_batch = cfg.rays_per_step <= 0 ||
                            static_cast<std::size_t>(cfg.rays_per_step) >= obj.total_pixels();
    const auto all_picks = full_batch ? obj.all_pixels() : std::vector<Pick>{};

    FitReport report;
    AdamState adam;
    Rng rng(cfg.seed);
    auto& z = param.latent();
    MlpParams current_mlp = fused ? *mlp : MlpParams{};
    const std::size_t n = scene.size();
    const std::size_t stride = param.stride();

    for (int it = 0; it < cfg.iters; ++it) {
        const Scene current = param.decode(z);
        if (fused) param.decode_mlp(z, current_mlp);
        const MlpParams* mlp_ptr = fused ? &current_mlp : nullptr;

        const double loss = obj.forward(current, mlp_ptr, true);
        report.loss_trace.push_back(loss);
        report.iterations = it + 1;
        if (!std::isfinite(loss)) {
            report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            throw FitAborted("fit: non-finite loss at iteration " + std::to_string(it + 1), report);
        }

        const auto picks = full_batch ? all_picks : obj.sample_pixels(rng);
        std::vector<double> raw(n * detail::kGradStride, 0.0);
        MlpParams mlp_grad = fused ? MlpParams::zeros(current_mlp.embed_dim) : MlpParams{};
        obj.backward(current, mlp_ptr, picks, raw, fused ? &mlp_grad : nullptr);

        std::vector<double> grad(z.size(), 0.0);
        param.chain(current, raw, grad);
        if (fused) {
            const auto flat = mlp_grad.flat();
            std::copy(flat.begin(), flat.end(), grad.begin() + static_cast<std::ptrdiff_t>(param.mlp_offset()));
        }
        if (cfg.optimize_geometry) {
            // Central differences: sorting by depth makes geometry piecewise smooth.
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = kAppearanceLatents; j < stride; ++j) {
                    const std::size_t idx = i * stride + j;
                    const double saved = z[idx];
                    z[idx] = saved + cfg.geometry_fd_step;
                    const double up = obj.forward(param.decode(z), mlp_ptr, false);
                    z[idx] = saved - cfg.geometry_fd_step;
                    const double down = obj.forward(param.decode(z), mlp_ptr, false);
                    z[idx] = saved;
                    grad[idx] = (up - down) / (2.0 * cfg.geometry_fd_step);
                }
            }
        }
        adam_step(z, grad, adam, cfg);
        param.project(z);
    }

    FitResult result{param.decode(z), std::nullopt, {}};
    if (mlp) {
        result.mlp = *mlp;
        if (fused) param.decode_mlp(z, *result.mlp);
    }
    const MlpParams* final_mlp = fused ? &*result.mlp : nullptr;
    report.final_loss = obj.forward(result.scene, final_mlp, false);
    for (std::size_t v = 0; v < targets.size(); ++v) {
        const auto& pred = obj.pred(v);
        const bool ssim_defined = pred.width() >= SsimConfig{}.window && pred.height() >= SsimConfig{}.window;
        report.views.push_back({psnr(pred, targets[v].image), ssim_defined ? ssim(pred, targets[v].image) : 0.0});
    }
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.report = std::move(report);
    return result;
}

} // namespace splat360
