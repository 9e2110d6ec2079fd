// SPDX-License-Identifier: Apache-2.0
// Regenerates the bundled data set: demo scene, CT phantoms and golden renders.
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "splat360/io.hpp"
#include "splat360/synthetic.hpp"

namespace fs = std::filesystem;
using namespace splat360;

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: splat360_fixtures <data-dir>\n";
        return 2;
    }
    const fs::path data(argv[1]);
    try {
        fs::create_directories(data / "phantoms");
        save_scene(data / "demo_scene.json", random_scene(24, 7));
        save_scene(data / "toy_scene.json", toy_recovery_scene());
        save_volume(data / "phantoms" / "air.hdr",
                    VoxelVolume::filled({16, 16, 16}, Vec3::Constant(2.0), Vec3::Constant(-15.0), kAirHu));
        save_volume(data / "phantoms" / "water_sphere.hdr", water_sphere_phantom(64, 1.5, 30.0));

        fs::remove_all(data / "golden");
        std::ostringstream out;
        std::ostringstream err;
        const std::vector<std::string> args{"render", "--scene", (data / "demo_scene.json").string(), "--orbit",
                                            "ring:4", "--res", "64", "--depth", "--transmittance", "--workers", "1",
                                            "--out", (data / "golden").string()};
        const int code = cli::run(args, out, err);
        if (code != 0) {
            std::cerr << err.str();
            return code;
        }
        fs::remove(data / "golden" / "manifest.json");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cout << "fixtures written to " << data.string() << "\n";
    return 0;
}
