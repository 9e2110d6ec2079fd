// SPDX-License-Identifier: Apache-2.0

#include "splat360/renderer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "render_kernels.hpp"
#include "splat360/error.hpp"
#include "splat360/fusion.hpp"
#include "splat360/parallel.hpp"
#include "splat360/phase.hpp"

namespace splat360 {

void RenderConfig::validate() const {
    if (!(termination_epsilon > 0.0 && termination_epsilon < 1.0)) {
        throw ArgumentError("termination_epsilon must lie in (0, 1)");
    }
    if (!(cutoff_sigma > 0.0)) throw ArgumentError("cutoff_sigma must be positive");
}

namespace detail {
namespace {

auto content_key(const GaussianPrimitive& p) {
    return std::array<double, 23>{p.mu.x(),      p.mu.y(),      p.mu.z(),      p.cov(0, 0),
                                  p.cov(0, 1),   p.cov(0, 2),   p.cov(1, 1),   p.cov(1, 2),
                                  p.cov(2, 2),   p.alpha,       p.l_iso.x(),   p.l_iso.y(),
                                  p.l_iso.z(),   p.l_aniso.x(), p.l_aniso.y(), p.l_aniso.z(),
                                  p.normal.x(),  p.normal.y(),  p.normal.z(),  p.g,
                                  p.cov(1, 0),   p.cov(2, 0),   p.cov(2, 1)};
}

} // namespace

PreparedScene::PreparedScene(const Scene& scene, const Vec3& origin, const RenderConfig& cfg)
    : background_(scene.background()), origin_(origin) {
    const auto& gs = scene.gaussians();
    std::vector<std::size_t> order(gs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return content_key(gs[a]) < content_key(gs[b]); });

    prims_.reserve(gs.size());
    for (std::size_t src : order) {
        const auto& p = gs[src];
        Eigen::SelfAdjointEigenSolver<Mat3> solver(p.cov, Eigen::EigenvaluesOnly);
        if (!p.cov.allFinite() || solver.eigenvalues().minCoeff() < 1e-12) {
            throw InvalidPrimitiveError("primitive " + std::to_string(src) +
                                        ": covariance is singular or not positive definite");
        }
        const Mat3 a = p.cov.inverse();
        PreparedGaussian q;
        q.source = src;
        q.a00 = a(0, 0);
        q.a01 = 0.5 * (a(0, 1) + a(1, 0));
        q.a02 = 0.5 * (a(0, 2) + a(2, 0));
        q.a11 = a(1, 1);
        q.a12 = 0.5 * (a(1, 2) + a(2, 1));
        q.a22 = a(2, 2);
        const Vec3 m = p.mu - origin;
        q.b = Vec3(q.a00 * m.x() + q.a01 * m.y() + q.a02 * m.z(),
                   q.a01 * m.x() + q.a11 * m.y() + q.a12 * m.z(),
                   q.a02 * m.x() + q.a12 * m.y() + q.a22 * m.z());
        q.c0 = m.dot(q.b);
        q.alpha = p.alpha;
        q.l_iso = p.l_iso;
        q.l_aniso = p.l_aniso;
        q.normal = p.normal;
        q.g = p.g;
        q.mu = p.mu;
        q.half_extent = cfg.cutoff_sigma * p.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
        prims_.push_back(q);
    }
}

namespace {

inline bool evaluate(const PreparedGaussian& q, const Vec3& d, double near, double cut2, double& t,
                     double& k) {
    const double ad0 = q.a00 * d.x() + q.a01 * d.y() + q.a02 * d.z();
    const double ad1 = q.a01 * d.x() + q.a11 * d.y() + q.a12 * d.z();
    const double ad2 = q.a02 * d.x() + q.a12 * d.y() + q.a22 * d.z();
    const double dad = d.x() * ad0 + d.y() * ad1 + d.z() * ad2;
    const double dam = d.dot(q.b);
    t = dam / dad;
    if (!(t >= near)) return false;
    const double m2 = std::max(0.0, q.c0 - dam * t);
    if (m2 > cut2) return false;
    k = std::exp(-0.5 * m2);
    return true;
}

} // namespace

Trace trace_ray(const PreparedScene& ps, std::span<const std::uint32_t> candidates, const Vec3& dir,
                const RenderConfig& cfg, double near, std::vector<Sample>& samples) {
    const auto prims = ps.prims();
    const double cut2 = cfg.cutoff_sigma * cfg.cutoff_sigma;
    samples.clear();
    for (std::uint32_t c : candidates) {
        double t = 0.0;
        double k = 0.0;
        if (!evaluate(prims[c], dir, near, cut2, t, k)) continue;
        const double w = std::min(prims[c].alpha * k, 1.0);
        if (!(w > 0.0)) continue;
        samples.push_back({c, t, w, 1.0, k, 0.0, 0.0});
    }
    std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) {
        return std::tie(a.t, a.prim) < std::tie(b.t, b.prim);
    });

    Trace out;
    double T = 1.0;
    double depth_num = 0.0;
    double weight_sum = 0.0;
    std::size_t n = 0;
    for (auto& s : samples) {
        const auto& q = prims[s.prim];
        if (!cfg.anisotropy_enabled) {
            s.f = 0.0;
        } else if (!cfg.disentangle) {
            s.f = 1.0;
        } else {
            const double cos_theta = dir.dot(q.normal);
            s.f = phase_factor(cos_theta, q.g);
            s.dfdg = phase_factor_dg(cos_theta, q.g);
        }
        s.T = T;
        const double tw = T * s.w;
        out.iso += tw * q.l_iso;
        out.aniso += (tw * s.f) * q.l_aniso;
        depth_num += tw * s.t;
        weight_sum += tw;
        T *= 1.0 - s.w;
        ++n;
        if (T < cfg.termination_epsilon) break;
    }
    samples.resize(n);
    out.iso += T * ps.background();
    out.final_T = T;
    out.depth = weight_sum > 0.0 ? depth_num / weight_sum : 0.0;
    return out;
}

Trace trace_ray_all(const PreparedScene& ps, const Vec3& dir, const RenderConfig& cfg, double near,
                    std::vector<Sample>& samples) {
    std::vector<std::uint32_t> all(ps.prims().size());
    std::iota(all.begin(), all.end(), std::uint32_t{0});
    return trace_ray(ps, all, dir, cfg, near, samples);
}

void backprop_ray(const PreparedScene& ps, std::span<const Sample> samples, const Vec3& g_iso,
                  const Vec3& g_aniso, std::span<double> grad) {
    const auto prims = ps.prims();
    Vec3 rest_iso = ps.background(); // radiance composited behind the current sample
    Vec3 rest_aniso = Vec3::Zero();
    for (std::size_t i = samples.size(); i-- > 0;) {
        const Sample& s = samples[i];
        const auto& q = prims[s.prim];
        const Vec3 c_aniso = s.f * q.l_aniso;
        const double d_w = s.T * (g_iso.dot(q.l_iso - rest_iso) + g_aniso.dot(c_aniso - rest_aniso));
        const double tw = s.T * s.w;
        double* gq = grad.data() + q.source * kGradStride;
        if (q.alpha * s.k < 1.0) gq[kGradAlpha] += d_w * s.k;
        for (int c = 0; c < 3; ++c) {
            gq[kGradIso + c] += tw * g_iso[c];
            gq[kGradAniso + c] += tw * s.f * g_aniso[c];
        }
        gq[kGradG] += tw * s.dfdg * g_aniso.dot(q.l_aniso);
        rest_iso = s.w * q.l_iso + (1.0 - s.w) * rest_iso;
        rest_aniso = s.w * c_aniso + (1.0 - s.w) * rest_aniso;
    }
}

TileGrid bin_tiles(const PreparedScene& ps, const Camera& cam, int tile) {
    TileGrid grid;
    grid.tile = tile;
    grid.tiles_x = (cam.width + tile - 1) / tile;
    grid.tiles_y = (cam.height + tile - 1) / tile;
    grid.lists.resize(static_cast<std::size_t>(grid.tiles_x) * grid.tiles_y);

    const auto prims = ps.prims();
    for (std::uint32_t i = 0; i < prims.size(); ++i) {
        const auto& q = prims[i];
        double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
        int in_front = 0;
        bool straddles = false;
        for (int corner = 0; corner < 8; ++corner) {
            const Vec3 offset((corner & 1) ? q.half_extent.x() : -q.half_extent.x(),
                              (corner & 2) ? q.half_extent.y() : -q.half_extent.y(),
                              (corner & 4) ? q.half_extent.z() : -q.half_extent.z());
            double x = 0.0, y = 0.0;
            const double z = cam.project(q.mu + offset, x, y);
            if (z > 0.0) ++in_front;
            if (!(z > 1e-9)) {
                straddles = true;
                continue;
            }
            min_x = std::min(min_x, x);
            max_x = std::max(max_x, x);
            min_y = std::min(min_y, y);
            max_y = std::max(max_y, y);
        }
        // Entirely behind the camera: every point has t <= 0 < near.
        if (in_front == 0) continue;
        int c0 = 0, c1 = cam.width - 1, r0 = 0, r1 = cam.height - 1;
        if (!straddles) {
            // Pixel centers sit at integer + 0.5; keep one pixel of slack.
            c0 = std::max(c0, static_cast<int>(std::floor(std::max(min_x - 1.5, -1.0))));
            c1 = std::min(c1, static_cast<int>(std::ceil(std::min(max_x + 0.5, cam.width + 1.0))));
            r0 = std::max(r0, static_cast<int>(std::floor(std::max(min_y - 1.5, -1.0))));
            r1 = std::min(r1, static_cast<int>(std::ceil(std::min(max_y + 0.5, cam.height + 1.0))));
            if (c0 > c1 || r0 > r1) continue;
        }
        for (int ty = r0 / tile; ty <= r1 / tile; ++ty) {
            for (int tx = c0 / tile; tx <= c1 / tile; ++tx) {
                grid.lists[static_cast<std::size_t>(ty) * grid.tiles_x + tx].push_back(i);
            }
        }
    }
    return grid;
}

} // namespace detail

GaussianHit ray_gaussian_weight(const GaussianPrimitive& p, const Ray& r, double near,
                                double cutoff_sigma) {
    Eigen::SelfAdjointEigenSolver<Mat3> solver(p.cov, Eigen::EigenvaluesOnly);
    if (!p.cov.allFinite() || solver.eigenvalues().minCoeff() < 1e-12) {
        throw InvalidPrimitiveError("covariance is singular or not positive definite");
    }
    const Mat3 a = p.cov.inverse();
    const Vec3 m = p.mu - r.origin;
    const double dad = r.dir.dot(a * r.dir);
    if (!(dad > 0.0)) throw InvalidPrimitiveError("degenerate direction quadratic form");
    const double dam = r.dir.dot(a * m);
    GaussianHit hit;
    hit.t_star = dam / dad;
    const double m2 = std::max(0.0, m.dot(a * m) - dam * hit.t_star);
    if (hit.t_star < near || m2 > cutoff_sigma * cutoff_sigma) return hit;
    hit.weight = std::clamp(p.alpha * std::exp(-0.5 * m2), 0.0, 1.0);
    return hit;
}

RayResult composite_ray(const Scene& scene, const Ray& r, const RenderConfig& cfg, double near) {
    cfg.validate();
    const detail::PreparedScene ps(scene, r.origin, cfg);
    std::vector<detail::Sample> samples;
    const auto tr = detail::trace_ray_all(ps, r.dir, cfg, near, samples);
    RayResult out;
    out.iso_sum = tr.iso;
    out.aniso_sum = tr.aniso;
    out.color = tr.iso + tr.aniso;
    out.depth = tr.depth;
    out.final_T = tr.final_T;
    out.samples.reserve(samples.size());
    for (const auto& s : samples) out.samples.push_back({ps.prims()[s.prim].source, s.t, s.w, s.T});
    return out;
}

RenderOutput render(const Scene& scene, const Camera& cam, const RenderConfig& cfg,
                    const ExecPolicy& exec, const MlpParams* fusion) {
    cfg.validate();
    cam.validate();
    if (exec.tile_size < 1) throw ArgumentError("tile_size must be positive");

    const detail::PreparedScene ps(scene, cam.position, cfg);
    const detail::TileGrid grid = detail::bin_tiles(ps, cam, exec.tile_size);

    RenderOutput out{ImageBuffer(cam.width, cam.height, 3, ImageKind::radiance),
                     ImageBuffer(cam.width, cam.height, 1, ImageKind::depth),
                     ImageBuffer(cam.width, cam.height, 1, ImageKind::transmittance)};
    CameraEmbedding embedding;
    if (fusion) {
        fusion->validate();
        embedding = embed_camera(cam, scene.center(), scene.radius(), fusion->embed_dim);
    }

    const std::size_t tiles = grid.lists.size();
    parallel_for(tiles, resolve_workers(exec.workers), [&](std::size_t tile_index) {
        thread_local std::vector<detail::Sample> samples;
        const int ty = static_cast<int>(tile_index) / grid.tiles_x;
        const int tx = static_cast<int>(tile_index) % grid.tiles_x;
        const auto& list = grid.lists[tile_index];
        const int row_end = std::min(cam.height, (ty + 1) * grid.tile);
        const int col_end = std::min(cam.width, (tx + 1) * grid.tile);
        for (int row = ty * grid.tile; row < row_end; ++row) {
            for (int col = tx * grid.tile; col < col_end; ++col) {
                const Ray ray = cam.pixel_ray(row, col);
                const auto tr = detail::trace_ray(ps, list, ray.dir, cfg, cam.near, samples);
                const Vec3 color = fusion ? fuse(tr.iso, tr.aniso, embedding, ray.dir, *fusion)
                                          : Vec3(tr.iso + tr.aniso);
                for (int c = 0; c < 3; ++c) out.color.at(row, col, c) = color[c];
                out.depth.at(row, col) = tr.depth;
                out.transmittance.at(row, col) = tr.final_T;
            }
        }
    });
    return out;
}

} // namespace splat360
