// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include <gtest/gtest.h>

#include "splat360/error.hpp"
#include "splat360/io.hpp"
#include "splat360/scene.hpp"
#include "splat360/synthetic.hpp"

using namespace splat360;

namespace {

GaussianPrimitive isotropic(const Vec3& mu, double sigma, double alpha) {
    GaussianPrimitive p;
    p.mu = mu;
    p.cov = Mat3::Identity() * sigma * sigma;
    p.alpha = alpha;
    p.l_iso = Vec3(0.5, 0.5, 0.5);
    return p;
}

bool has_rule(const std::vector<std::string>& rules, const std::string& rule) {
    return std::find(rules.begin(), rules.end(), rule) != rules.end();
}

} // namespace

TEST(EvalGaussian, PeakEqualsAlpha) {
    const auto p = isotropic(Vec3(1, 2, 3), 0.5, 0.7);
    EXPECT_DOUBLE_EQ(eval_gaussian(p, p.mu), 0.7);
}

TEST(EvalGaussian, OneSigmaAlongPrincipalAxis) {
    GaussianPrimitive p;
    p.cov = Vec3(0.04, 0.25, 1.0).asDiagonal();
    p.alpha = 0.8;
    EXPECT_NEAR(eval_gaussian(p, Vec3(0.2, 0, 0)), 0.8 * std::exp(-0.5), 1e-15);
    EXPECT_NEAR(eval_gaussian(p, Vec3(0, 0.5, 0)), 0.8 * std::exp(-0.5), 1e-15);
    EXPECT_NEAR(eval_gaussian(p, Vec3(0, 0, 2.0)), 0.8 * std::exp(-2.0), 1e-15);
}

TEST(EvalGaussian, SingularCovarianceThrows) {
    GaussianPrimitive p;
    p.cov = Vec3(1.0, 1.0, 0.0).asDiagonal();
    EXPECT_THROW(eval_gaussian(p, Vec3::Zero()), InvalidPrimitiveError);
}

TEST(CheckPrimitive, ValidPrimitiveHasNoViolations) {
    EXPECT_TRUE(check_primitive(isotropic(Vec3::Zero(), 0.1, 0.5)).empty());
}

TEST(CheckPrimitive, ReportsEachRule) {
    auto p = isotropic(Vec3::Zero(), 0.1, 0.5);
    p.g = 1.0;
    EXPECT_TRUE(has_rule(check_primitive(p), "g out of range"));

    p = isotropic(Vec3::Zero(), 0.1, 0.5);
    p.cov(0, 1) = 0.001;
    EXPECT_TRUE(has_rule(check_primitive(p), "cov not symmetric"));

    p = isotropic(Vec3::Zero(), 0.1, 0.5);
    p.cov(2, 2) = -1.0;
    EXPECT_TRUE(has_rule(check_primitive(p), "cov not positive definite"));

    p = isotropic(Vec3::Zero(), 0.1, 0.0);
    EXPECT_TRUE(has_rule(check_primitive(p), "alpha out of range"));

    p = isotropic(Vec3::Zero(), 0.1, 0.5);
    p.normal = Vec3(1, 1, 0);
    EXPECT_TRUE(has_rule(check_primitive(p), "normal not unit length"));

    p = isotropic(Vec3::Zero(), 0.1, 0.5);
    p.l_iso.x() = 1.5;
    EXPECT_TRUE(has_rule(check_primitive(p), "l_iso out of range"));

    p = isotropic(Vec3::Zero(), 0.1, 0.5);
    p.l_aniso.y() = -0.1;
    EXPECT_TRUE(has_rule(check_primitive(p), "l_aniso negative"));

    p = isotropic(Vec3::Zero(), 0.1, 0.5);
    p.mu.x() = std::nan("");
    EXPECT_TRUE(has_rule(check_primitive(p), "non-finite value"));
}

TEST(ValidateScene, ReportsIndexOfOffender) {
    auto bad = isotropic(Vec3::Zero(), 0.1, 0.5);
    bad.g = -1.5;
    const Scene s({isotropic(Vec3::Zero(), 0.1, 0.5), bad});
    const auto v = validate_scene(s);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].index, 1u);
    EXPECT_EQ(v[0].rule, "g out of range");
}

TEST(SceneBounds, ThreeSigmaOfLargestAxis) {
    GaussianPrimitive p;
    p.mu = Vec3(1, -1, 2);
    p.cov = Vec3(0.01, 0.04, 0.09).asDiagonal();
    const Scene s({p});
    for (int a = 0; a < 3; ++a) {
        EXPECT_NEAR(s.bounds().lo[a], p.mu[a] - 0.9, 1e-12);
        EXPECT_NEAR(s.bounds().hi[a], p.mu[a] + 0.9, 1e-12);
    }
    EXPECT_TRUE(s.center().isApprox(p.mu));
}

TEST(SceneBounds, EmptySceneHasUnitRadius) {
    const Scene s;
    EXPECT_TRUE(s.empty());
    EXPECT_DOUBLE_EQ(s.radius(), 1.0);
}

TEST(SceneJson, RoundTripIsExact) {
    const Scene s = random_scene(7, 3);
    const Scene back = parse_scene_json(scene_to_json(s));
    ASSERT_EQ(back.size(), s.size());
    EXPECT_EQ(back.background(), s.background());
    for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_EQ(back.gaussians()[i].mu, s.gaussians()[i].mu);
        EXPECT_EQ(back.gaussians()[i].cov, s.gaussians()[i].cov);
        EXPECT_EQ(back.gaussians()[i].alpha, s.gaussians()[i].alpha);
        EXPECT_EQ(back.gaussians()[i].g, s.gaussians()[i].g);
    }
    EXPECT_EQ(scene_to_json(back), scene_to_json(s));
}

TEST(SceneJson, UnknownKeyRejectedWithFieldPath) {
    const std::string text = R"({"background":[0,0,0],"gaussians":[{"mu":[0,0,0],"cov":[1,0,0,1,0,1],
        "alpha":0.5,"l_iso":[0,0,0],"l_aniso":[0,0,0],"normal":[0,0,1],"g":0,"colour":1}]})";
    try {
        parse_scene_json(text);
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("scene.gaussians[0]"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);
    }
}

TEST(SceneJson, InvalidPrimitiveRejected) {
    const std::string text = R"({"background":[0,0,0],"gaussians":[{"mu":[0,0,0],"cov":[1,0,0,1,0,1],
        "alpha":0.5,"l_iso":[0,0,0],"l_aniso":[0,0,0],"normal":[0,0,1],"g":1.2}]})";
    try {
        parse_scene_json(text);
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("g out of range"), std::string::npos);
    }
}
