// SPDX-License-Identifier: Apache-2.0

#include "splat360/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "splat360/error.hpp"

namespace splat360 {
namespace {

constexpr double kMinEigenvalue = 1e-12;
constexpr double kSymmetryTol = 1e-12;
constexpr double kUnitTol = 1e-9;

bool finite(const Vec3& v) { return v.allFinite(); }

double min_eigenvalue(const Mat3& cov) {
    Eigen::SelfAdjointEigenSolver<Mat3> solver(cov, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

} // namespace

double eval_gaussian(const GaussianPrimitive& p, const Vec3& x) {
    if (!p.cov.allFinite() || min_eigenvalue(p.cov) < kMinEigenvalue) {
        throw InvalidPrimitiveError("covariance is singular or not positive definite");
    }
    const Vec3 d = x - p.mu;
    const double m2 = d.dot(p.cov.inverse() * d);
    return p.alpha * std::exp(-0.5 * m2);
}

std::vector<std::string> check_primitive(const GaussianPrimitive& p) {
    std::vector<std::string> rules;
    if (!finite(p.mu) || !p.cov.allFinite() || !finite(p.l_iso) || !finite(p.l_aniso) ||
        !finite(p.normal) || !std::isfinite(p.alpha) || !std::isfinite(p.g)) {
        rules.emplace_back("non-finite value");
        return rules;
    }
    const double scale = std::max(1.0, p.cov.cwiseAbs().maxCoeff());
    if ((p.cov - p.cov.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
        rules.emplace_back("cov not symmetric");
    } else if (min_eigenvalue(p.cov) < kMinEigenvalue) {
        rules.emplace_back("cov not positive definite");
    }
    if (!(p.alpha > 0.0 && p.alpha <= 1.0)) rules.emplace_back("alpha out of range");
    if (!(p.g > -1.0 && p.g < 1.0)) rules.emplace_back("g out of range");
    if (std::abs(p.normal.norm() - 1.0) > kUnitTol) rules.emplace_back("normal not unit length");
    if (p.l_iso.minCoeff() < 0.0 || p.l_iso.maxCoeff() > 1.0) rules.emplace_back("l_iso out of range");
    if (p.l_aniso.minCoeff() < 0.0) rules.emplace_back("l_aniso negative");
    return rules;
}

Scene::Scene(std::vector<GaussianPrimitive> gaussians, Vec3 background)
    : gaussians_(std::move(gaussians)), background_(std::move(background)) {
    recompute_bounds();
}

void Scene::set_gaussians(std::vector<GaussianPrimitive> gaussians) {
    gaussians_ = std::move(gaussians);
    recompute_bounds();
}

void Scene::recompute_bounds() {
    if (gaussians_.empty()) {
        bounds_ = {};
        center_ = Vec3::Zero();
        radius_ = 1.0;
        return;
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    Vec3 lo = Vec3::Constant(inf);
    Vec3 hi = Vec3::Constant(-inf);
    std::vector<double> extent(gaussians_.size());
    for (std::size_t i = 0; i < gaussians_.size(); ++i) {
        const auto& p = gaussians_[i];
        // 3 sigma of the largest principal axis; tolerate invalid covariances here.
        const Mat3 sym = 0.5 * (p.cov + p.cov.transpose());
        Eigen::SelfAdjointEigenSolver<Mat3> solver(sym, Eigen::EigenvaluesOnly);
        const double lmax = std::max(0.0, solver.eigenvalues().maxCoeff());
        extent[i] = 3.0 * std::sqrt(lmax);
        lo = lo.cwiseMin(p.mu - Vec3::Constant(extent[i]));
        hi = hi.cwiseMax(p.mu + Vec3::Constant(extent[i]));
    }
    bounds_ = {lo, hi};
    center_ = 0.5 * (lo + hi);
    double r = 0.0;
    for (std::size_t i = 0; i < gaussians_.size(); ++i) {
        r = std::max(r, (gaussians_[i].mu - center_).norm() + extent[i]);
    }
    radius_ = r > 0.0 ? r : 1.0;
}

std::vector<Violation> validate_scene(const Scene& s) {
    std::vector<Violation> out;
    for (std::size_t i = 0; i < s.gaussians().size(); ++i) {
        for (auto& rule : check_primitive(s.gaussians()[i])) out.push_back({i, std::move(rule)});
    }
    return out;
}

} // namespace splat360
