// SPDX-License-Identifier: Apache-2.0

#include "splat360/metrics.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include "splat360/error.hpp"
#include "splat360/parallel.hpp"

namespace splat360 {
namespace {

void require_same_shape(const ImageBuffer& a, const ImageBuffer& b, const char* what) {
    if (!a.same_shape(b)) throw ArgumentError(std::string(what) + ": image dimensions differ");
}

using Plane = std::vector<double>;

// Valid correlation with the separable window: (h - n + 1) x (w - n + 1) output.
Plane filter_valid(const Plane& in, int w, int h, const std::vector<double>& k) {
    const int n = static_cast<int>(k.size());
    const int ow = w - n + 1;
    const int oh = h - n + 1;
    Plane tmp(static_cast<std::size_t>(h) * ow);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < ow; ++c) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += k[j] * in[static_cast<std::size_t>(r) * w + c + j];
            tmp[static_cast<std::size_t>(r) * ow + c] = s;
        }
    }
    Plane out(static_cast<std::size_t>(oh) * ow);
    for (int r = 0; r < oh; ++r) {
        for (int c = 0; c < ow; ++c) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += k[i] * tmp[static_cast<std::size_t>(r + i) * ow + c];
            out[static_cast<std::size_t>(r) * ow + c] = s;
        }
    }
    return out;
}

// Adjoint of filter_valid: scatters an (oh x ow) map back onto the full h x w grid.
Plane filter_adjoint(const Plane& in, int w, int h, const std::vector<double>& k) {
    const int n = static_cast<int>(k.size());
    const int ow = w - n + 1;
    const int oh = h - n + 1;
    Plane tmp(static_cast<std::size_t>(h) * ow, 0.0);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < ow; ++c) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
                const int src = r - i;
                if (src >= 0 && src < oh) s += k[i] * in[static_cast<std::size_t>(src) * ow + c];
            }
            tmp[static_cast<std::size_t>(r) * ow + c] = s;
        }
    }
    Plane out(static_cast<std::size_t>(h) * w, 0.0);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) {
                const int src = c - j;
                if (src >= 0 && src < ow) s += k[j] * tmp[static_cast<std::size_t>(r) * ow + src];
            }
            out[static_cast<std::size_t>(r) * w + c] = s;
        }
    }
    return out;
}

} // namespace

std::vector<double> SsimConfig::taps() const {
    std::vector<double> k(window);
    const double center = 0.5 * (window - 1);
    double total = 0.0;
    for (int i = 0; i < window; ++i) {
        const double d = i - center;
        k[i] = std::exp(-0.5 * d * d / (sigma * sigma));
        total += k[i];
    }
    for (double& v : k) v /= total;
    return k;
}

void SsimConfig::validate() const {
    if (window < 1) throw ArgumentError("SSIM window must be positive");
    if (!(sigma > 0.0) || !(k1 > 0.0) || !(k2 > 0.0) || !(dynamic_range > 0.0)) {
        throw ArgumentError("SSIM constants must be positive");
    }
}

double mse(const ImageBuffer& a, const ImageBuffer& b) {
    require_same_shape(a, b, "mse");
    const auto da = a.data();
    const auto db = b.data();
    double s = 0.0;
    for (std::size_t i = 0; i < da.size(); ++i) {
        const double d = da[i] - db[i];
        s += d * d;
    }
    return s / static_cast<double>(da.size());
}

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
    const double m = mse(a, b);
    if (m == 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(1.0 / m));
}

double ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimConfig& cfg) {
    return ssim_with_gradient(a, b, cfg, {});
}

double ssim_with_gradient(const ImageBuffer& pred, const ImageBuffer& target, const SsimConfig& cfg,
                          std::span<double> grad) {
    require_same_shape(pred, target, "ssim");
    cfg.validate();
    const int w = pred.width();
    const int h = pred.height();
    const int ch = pred.channels();
    if (w < cfg.window || h < cfg.window) throw ArgumentError("ssim: image smaller than the window");
    if (!grad.empty() && grad.size() != pred.size()) throw ArgumentError("ssim: gradient buffer size");

    const auto k = cfg.taps();
    const double c1 = (cfg.k1 * cfg.dynamic_range) * (cfg.k1 * cfg.dynamic_range);
    const double c2 = (cfg.k2 * cfg.dynamic_range) * (cfg.k2 * cfg.dynamic_range);
    const int ow = w - cfg.window + 1;
    const int oh = h - cfg.window + 1;
    const std::size_t positions = static_cast<std::size_t>(ow) * oh;
    const std::size_t npx = static_cast<std::size_t>(w) * h;
    const double scale = 1.0 / (static_cast<double>(positions) * ch);

    const auto pd = pred.data();
    const auto td = target.data();
    double total = 0.0;
    for (int c = 0; c < ch; ++c) {
        Plane x(npx), y(npx), xx(npx), yy(npx), xy(npx);
        for (std::size_t i = 0; i < npx; ++i) {
            x[i] = pd[i * ch + c];
            y[i] = td[i * ch + c];
            xx[i] = x[i] * x[i];
            yy[i] = y[i] * y[i];
            xy[i] = x[i] * y[i];
        }
        const Plane mx = filter_valid(x, w, h, k);
        const Plane my = filter_valid(y, w, h, k);
        const Plane exx = filter_valid(xx, w, h, k);
        const Plane eyy = filter_valid(yy, w, h, k);
        const Plane exy = filter_valid(xy, w, h, k);

        Plane coef_a, coef_b, coef_c;
        if (!grad.empty()) {
            coef_a.resize(positions);
            coef_b.resize(positions);
            coef_c.resize(positions);
        }
        double channel_sum = 0.0;
        for (std::size_t p = 0; p < positions; ++p) {
            const double mux = mx[p];
            const double muy = my[p];
            const double sxx = exx[p] - mux * mux;
            const double syy = eyy[p] - muy * muy;
            const double sxy = exy[p] - mux * muy;
            const double n1 = 2.0 * mux * muy + c1;
            const double d1 = mux * mux + muy * muy + c1;
            const double n2 = 2.0 * sxy + c2;
            const double d2 = sxx + syy + c2;
            const double s = (n1 * n2) / (d1 * d2);
            channel_sum += s;
            if (!grad.empty()) {
                // dS/dx_q = w(q - p) * (A + B x_q + C y_q)
                const double ds_dmux = s * (2.0 * muy / n1 - 2.0 * mux / d1);
                const double s_d2 = s / d2;
                const double s_n2 = s / n2;
                coef_a[p] = scale * (ds_dmux + (2.0 * mux) * s_d2 - (2.0 * muy) * s_n2);
                coef_b[p] = scale * (-2.0 * s_d2);
                coef_c[p] = scale * (2.0 * s_n2);
            }
        }
        total += channel_sum / static_cast<double>(positions);
        if (!grad.empty()) {
            const Plane ga = filter_adjoint(coef_a, w, h, k);
            const Plane gb = filter_adjoint(coef_b, w, h, k);
            const Plane gc = filter_adjoint(coef_c, w, h, k);
            for (std::size_t i = 0; i < npx; ++i) {
                grad[i * ch + c] = ga[i] + (gb[i] * x[i] + gc[i] * y[i]);
            }
        }
    }
    return total / ch;
}

std::string host_cpu_name() {
    std::ifstream in("/proc/cpuinfo");
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("model name", 0) == 0) {
            const auto colon = line.find(':');
            if (colon != std::string::npos) {
                auto name = line.substr(colon + 1);
                const auto first = name.find_first_not_of(' ');
                return first == std::string::npos ? name : name.substr(first);
            }
        }
    }
    return "unknown";
}

RuntimeReport measure_runtime(const Scene& scene, const std::vector<Camera>& cams,
                              const RenderConfig& cfg, int workers) {
    if (cams.empty()) throw ArgumentError("measure_runtime: at least one camera is required");
    RuntimeReport report;
    report.width = cams.front().width;
    report.height = cams.front().height;
    report.frames = static_cast<int>(cams.size());
    report.workers = resolve_workers(workers);
    report.hardware_threads = std::thread::hardware_concurrency();
    report.cpu = host_cpu_name();

    const ExecPolicy exec{report.workers, 16};
    (void)render(scene, cams.front(), cfg, exec); // warm-up, untimed
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    for (const auto& cam : cams) (void)render(scene, cam, cfg, exec);
    report.total_seconds = std::chrono::duration<double>(clock::now() - start).count();
    report.ms_per_frame = report.total_seconds * 1000.0 / report.frames;
    report.fps = report.total_seconds > 0.0 ? report.frames / report.total_seconds : 0.0;
    return report;
}

} // namespace splat360
