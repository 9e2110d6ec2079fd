// SPDX-License-Identifier: Apache-2.0

#include "splat360/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "splat360/error.hpp"

namespace splat360 {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw FormatError(where + ": " + what);
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(where, "expected a finite number");
    return v;
}

std::vector<double> numbers(const json& j, std::size_t n, const std::string& where) {
    if (!j.is_array() || j.size() != n) fail(where, "expected an array of " + std::to_string(n) + " numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

Vec3 vec3(const json& j, const std::string& where) {
    const auto v = numbers(j, 3, where);
    return {v[0], v[1], v[2]};
}

int integer(const json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(where, "expected an integer");
    return j.get<int>();
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) fail(where, "expected an object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) fail(where, "unknown key '" + key + "'");
    }
    for (const auto& key : allowed) {
        if (!obj.contains(key)) fail(where, "missing key '" + key + "'");
    }
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("JSON parse error: ") + e.what());
    }
}

json arr(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

std::string take_token(std::istringstream& in, const char* what) {
    std::string tok;
    if (!(in >> tok)) throw FormatError(std::string("image header: missing ") + what);
    return tok;
}

int parse_dim(const std::string& tok, const char* what) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used != tok.size() || v < 1) throw FormatError("");
        return v;
    } catch (const std::exception&) {
        throw FormatError(std::string("image header: invalid ") + what + " '" + tok + "'");
    }
}

// Splits "P6\n<w> <h>\n255\n" style headers: returns the offset of the payload.
std::size_t header_end(const std::string& bytes, int fields) {
    std::size_t pos = 0;
    int seen = 0;
    while (seen < fields) {
        while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
        if (pos < bytes.size() && bytes[pos] == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            continue;
        }
        if (pos >= bytes.size()) throw FormatError("image header: truncated");
        while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
        ++seen;
    }
    if (pos >= bytes.size()) throw FormatError("image header: truncated");
    return pos + 1; // exactly one whitespace byte separates header and payload
}

} // namespace

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
    const auto text = read_text(path);
    return {text.begin(), text.end()};
}

void write_file_atomic(const fs::path& path, const std::string& bytes) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

Scene parse_scene_json(const std::string& text) {
    const json j = parse_json(text);
    reject_unknown(j, {"background", "gaussians"}, "scene");
    const Vec3 background = vec3(j["background"], "scene.background");
    const json& list = j["gaussians"];
    if (!list.is_array()) fail("scene.gaussians", "expected an array");
    std::vector<GaussianPrimitive> gs;
    gs.reserve(list.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string where = "scene.gaussians[" + std::to_string(i) + "]";
        const json& o = list[i];
        reject_unknown(o, {"mu", "cov", "alpha", "l_iso", "l_aniso", "normal", "g"}, where);
        GaussianPrimitive p;
        p.mu = vec3(o["mu"], where + ".mu");
        const auto c = numbers(o["cov"], 6, where + ".cov");
        p.cov << c[0], c[1], c[2], c[1], c[3], c[4], c[2], c[4], c[5];
        p.alpha = number(o["alpha"], where + ".alpha");
        p.l_iso = vec3(o["l_iso"], where + ".l_iso");
        p.l_aniso = vec3(o["l_aniso"], where + ".l_aniso");
        p.normal = vec3(o["normal"], where + ".normal");
        p.g = number(o["g"], where + ".g");
        const auto violations = check_primitive(p);
        if (!violations.empty()) {
            std::string msg;
            for (const auto& v : violations) msg += (msg.empty() ? "" : "; ") + v;
            fail(where, msg);
        }
        gs.push_back(p);
    }
    return Scene(std::move(gs), background);
}

std::string scene_to_json(const Scene& scene) {
    ordered_json j;
    j["background"] = arr(scene.background());
    j["gaussians"] = ordered_json::array();
    for (const auto& p : scene.gaussians()) {
        ordered_json o;
        o["mu"] = arr(p.mu);
        o["cov"] = {p.cov(0, 0), p.cov(0, 1), p.cov(0, 2), p.cov(1, 1), p.cov(1, 2), p.cov(2, 2)};
        o["alpha"] = p.alpha;
        o["l_iso"] = arr(p.l_iso);
        o["l_aniso"] = arr(p.l_aniso);
        o["normal"] = arr(p.normal);
        o["g"] = p.g;
        j["gaussians"].push_back(o);
    }
    return j.dump(2) + "\n";
}

Scene load_scene(const fs::path& path) {
    try {
        return parse_scene_json(read_text(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void save_scene(const fs::path& path, const Scene& scene) { write_file_atomic(path, scene_to_json(scene)); }

Camera parse_camera_json(const std::string& text) {
    const json j = parse_json(text);
    reject_unknown(j, {"position", "forward", "up", "fov_y", "width", "height", "near"}, "camera");
    Camera cam;
    cam.position = vec3(j["position"], "camera.position");
    cam.forward = vec3(j["forward"], "camera.forward");
    cam.up = vec3(j["up"], "camera.up");
    cam.right = cam.forward.cross(cam.up);
    cam.fov_y = number(j["fov_y"], "camera.fov_y");
    cam.width = integer(j["width"], "camera.width");
    cam.height = integer(j["height"], "camera.height");
    cam.near = number(j["near"], "camera.near");
    try {
        cam.validate();
    } catch (const ArgumentError& e) {
        throw FormatError(std::string("camera: ") + e.what());
    }
    return cam;
}

std::string camera_to_json(const Camera& cam) {
    ordered_json j;
    j["position"] = arr(cam.position);
    j["forward"] = arr(cam.forward);
    j["up"] = arr(cam.up);
    j["fov_y"] = cam.fov_y;
    j["width"] = cam.width;
    j["height"] = cam.height;
    j["near"] = cam.near;
    return j.dump(2) + "\n";
}

std::uint8_t gamma_encode(double linear) {
    const double v = std::clamp(std::isfinite(linear) ? linear : 0.0, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(255.0 * std::pow(v, 1.0 / 2.2)));
}

double gamma_decode(std::uint8_t value) { return std::pow(value / 255.0, 2.2); }

std::string encode_ppm(const ImageBuffer& img) {
    std::string out = "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    const std::size_t header = out.size();
    out.resize(header + img.pixel_count() * 3);
    std::size_t k = header;
    for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) {
            for (int ch = 0; ch < 3; ++ch) {
                const int src = img.channels() == 1 ? 0 : ch;
                out[k++] = static_cast<char>(gamma_encode(img.at(r, c, src)));
            }
        }
    }
    return out;
}

ImageBuffer decode_ppm(const std::string& bytes) {
    if (bytes.rfind("P6", 0) != 0) throw FormatError("PPM: expected P6 magic");
    const std::size_t payload = header_end(bytes, 4);
    std::istringstream hdr(bytes.substr(2, payload - 2));
    const int w = parse_dim(take_token(hdr, "width"), "width");
    const int h = parse_dim(take_token(hdr, "height"), "height");
    if (take_token(hdr, "maxval") != "255") throw FormatError("PPM: only maxval 255 is supported");
    const std::size_t expected = static_cast<std::size_t>(w) * h * 3;
    if (bytes.size() - payload != expected) {
        throw FormatError("PPM: expected " + std::to_string(expected) + " payload bytes, found " +
                          std::to_string(bytes.size() - payload));
    }
    ImageBuffer img(w, h, 3, ImageKind::radiance);
    auto d = img.data();
    for (std::size_t i = 0; i < expected; ++i) d[i] = gamma_decode(static_cast<std::uint8_t>(bytes[payload + i]));
    return img;
}

std::string encode_pfm(const ImageBuffer& img) {
    const int ch = img.channels();
    std::string out = std::string(ch == 3 ? "PF" : "Pf") + "\n" + std::to_string(img.width()) + " " +
                      std::to_string(img.height()) + "\n-1.0\n";
    const std::size_t header = out.size();
    out.resize(header + img.size() * sizeof(float));
    std::size_t k = header;
    for (int r = img.height() - 1; r >= 0; --r) {
        for (int c = 0; c < img.width(); ++c) {
            for (int i = 0; i < ch; ++i) {
                const float v = static_cast<float>(img.at(r, c, i));
                std::memcpy(out.data() + k, &v, sizeof v);
                k += sizeof v;
            }
        }
    }
    return out;
}

ImageBuffer decode_pfm(const std::string& bytes, ImageKind kind) {
    int ch;
    if (bytes.rfind("PF", 0) == 0) ch = 3;
    else if (bytes.rfind("Pf", 0) == 0) ch = 1;
    else throw FormatError("PFM: expected PF or Pf magic");
    const std::size_t payload = header_end(bytes, 4);
    std::istringstream hdr(bytes.substr(2, payload - 2));
    const int w = parse_dim(take_token(hdr, "width"), "width");
    const int h = parse_dim(take_token(hdr, "height"), "height");
    const std::string scale_tok = take_token(hdr, "scale");
    double scale = 0.0;
    try {
        scale = std::stod(scale_tok);
    } catch (const std::exception&) {
        throw FormatError("PFM: invalid scale '" + scale_tok + "'");
    }
    if (!(scale < 0.0)) throw FormatError("PFM: only little-endian files (negative scale) are supported");
    const std::size_t expected = static_cast<std::size_t>(w) * h * ch * sizeof(float);
    if (bytes.size() - payload != expected) {
        throw FormatError("PFM: expected " + std::to_string(expected) + " payload bytes, found " +
                          std::to_string(bytes.size() - payload));
    }
    ImageBuffer img(w, h, ch, kind);
    std::size_t k = payload;
    for (int r = h - 1; r >= 0; --r) {
        for (int c = 0; c < w; ++c) {
            for (int i = 0; i < ch; ++i) {
                float v;
                std::memcpy(&v, bytes.data() + k, sizeof v);
                k += sizeof v;
                img.at(r, c, i) = v;
            }
        }
    }
    return img;
}

void write_ppm(const fs::path& path, const ImageBuffer& img) { write_file_atomic(path, encode_ppm(img)); }
void write_pfm(const fs::path& path, const ImageBuffer& img) { write_file_atomic(path, encode_pfm(img)); }

ImageBuffer read_image(const fs::path& path) {
    const auto bytes = read_text(path);
    try {
        if (bytes.rfind("P6", 0) == 0) return decode_ppm(bytes);
        return decode_pfm(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

VoxelVolume load_volume(const fs::path& header_path) {
    const auto text = read_text(header_path);
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw FormatError(header_path.string() + ":" + std::to_string(line_no) + ": expected key=value");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const auto key = trim(line.substr(0, eq));
        static const std::set<std::string> known{"dims", "spacing", "origin", "data", "dtype"};
        if (!known.count(key)) {
            throw FormatError(header_path.string() + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        kv[key] = trim(line.substr(eq + 1));
    }
    for (const char* key : {"dims", "spacing", "origin", "data", "dtype"}) {
        if (!kv.count(key)) throw FormatError(header_path.string() + ": missing key '" + key + "'");
    }
    if (kv["dtype"] != "int16le") {
        throw FormatError(header_path.string() + ": unsupported dtype '" + kv["dtype"] + "' (expected int16le)");
    }
    auto triple = [&](const std::string& key) {
        std::istringstream ss(kv[key]);
        double a, b, c;
        std::string extra;
        if (!(ss >> a >> b >> c) || (ss >> extra)) {
            throw FormatError(header_path.string() + ": '" + key + "' needs three numbers");
        }
        return Vec3(a, b, c);
    };
    VoxelVolume vol;
    const Vec3 dims = triple("dims");
    for (int a = 0; a < 3; ++a) {
        if (dims[a] < 1 || dims[a] != std::floor(dims[a])) {
            throw FormatError(header_path.string() + ": dims must be positive integers");
        }
        vol.dims[a] = static_cast<int>(dims[a]);
    }
    vol.spacing = triple("spacing");
    vol.origin = triple("origin");
    const fs::path raw_path = header_path.parent_path() / kv["data"];
    const auto raw = read_text(raw_path);
    const std::size_t expected = vol.voxel_count() * 2;
    if (raw.size() != expected) {
        throw FormatError(raw_path.string() + ": expected " + std::to_string(expected) + " bytes, found " +
                          std::to_string(raw.size()));
    }
    vol.hu.resize(vol.voxel_count());
    for (std::size_t i = 0; i < vol.hu.size(); ++i) {
        std::int16_t v;
        std::memcpy(&v, raw.data() + 2 * i, 2);
        vol.hu[i] = v;
    }
    try {
        vol.validate();
    } catch (const ArgumentError& e) {
        throw FormatError(header_path.string() + ": " + e.what());
    }
    return vol;
}

void save_volume(const fs::path& header_path, const VoxelVolume& vol) {
    vol.validate();
    fs::path raw_name = header_path.filename();
    raw_name.replace_extension(".raw");
    std::string raw(vol.voxel_count() * 2, '\0');
    for (std::size_t i = 0; i < vol.hu.size(); ++i) {
        const double r = std::round(vol.hu[i]);
        if (r < -32768.0 || r > 32767.0) throw ArgumentError("save_volume: HU value outside int16 range");
        const auto v = static_cast<std::int16_t>(r);
        std::memcpy(raw.data() + 2 * i, &v, 2);
    }
    std::ostringstream hdr;
    hdr.precision(17);
    hdr << "dims=" << vol.dims[0] << ' ' << vol.dims[1] << ' ' << vol.dims[2] << '\n'
        << "spacing=" << vol.spacing.x() << ' ' << vol.spacing.y() << ' ' << vol.spacing.z() << '\n'
        << "origin=" << vol.origin.x() << ' ' << vol.origin.y() << ' ' << vol.origin.z() << '\n'
        << "data=" << raw_name.string() << '\n'
        << "dtype=int16le\n";
    write_file_atomic(header_path.parent_path() / raw_name, raw);
    write_file_atomic(header_path, hdr.str());
}

std::string encode_mlp(const MlpParams& mlp) {
    mlp.validate();
    std::string layers;
    for (int s : mlp.layer_sizes()) layers += (layers.empty() ? "" : ",") + std::to_string(s);
    const auto flat = mlp.flat();
    std::string out = "splat360-mlp\nlayers=" + layers + "\nd=" + std::to_string(mlp.embed_dim) +
                      "\nseed=" + std::to_string(mlp.seed) + "\ncount=" + std::to_string(flat.size()) + "\ndata\n";
    const std::size_t header = out.size();
    out.resize(header + flat.size() * sizeof(double));
    std::memcpy(out.data() + header, flat.data(), flat.size() * sizeof(double));
    return out;
}

MlpParams decode_mlp(const std::string& bytes) {
    std::map<std::string, std::string> kv;
    std::size_t pos = 0;
    auto next_line = [&]() {
        const auto nl = bytes.find('\n', pos);
        if (nl == std::string::npos) throw FormatError("MLP file: truncated header");
        auto line = bytes.substr(pos, nl - pos);
        pos = nl + 1;
        return line;
    };
    if (next_line() != "splat360-mlp") throw FormatError("MLP file: bad magic");
    for (;;) {
        const auto line = next_line();
        if (line == "data") break;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("MLP file: bad header line '" + line + "'");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    for (const char* key : {"layers", "d", "seed", "count"}) {
        if (!kv.count(key)) throw FormatError(std::string("MLP file: missing '") + key + "'");
    }
    MlpParams mlp;
    try {
        mlp = MlpParams::zeros(std::stoi(kv["d"]));
        mlp.seed = std::stoull(kv["seed"]);
    } catch (const std::exception& e) {
        throw FormatError(std::string("MLP file: ") + e.what());
    }
    std::string layers;
    for (int s : mlp.layer_sizes()) layers += (layers.empty() ? "" : ",") + std::to_string(s);
    if (kv["layers"] != layers) throw FormatError("MLP file: layers '" + kv["layers"] + "' do not match d");
    const std::size_t count = mlp.parameter_count();
    if (kv["count"] != std::to_string(count)) throw FormatError("MLP file: count does not match layers");
    if (bytes.size() - pos != count * sizeof(double)) {
        throw FormatError("MLP file: expected " + std::to_string(count * sizeof(double)) + " data bytes, found " +
                          std::to_string(bytes.size() - pos));
    }
    std::vector<double> flat(count);
    std::memcpy(flat.data(), bytes.data() + pos, count * sizeof(double));
    mlp.assign(flat);
    try {
        mlp.validate();
    } catch (const ArgumentError& e) {
        throw FormatError(std::string("MLP file: ") + e.what());
    }
    return mlp;
}

void save_mlp(const fs::path& path, const MlpParams& mlp) { write_file_atomic(path, encode_mlp(mlp)); }
MlpParams load_mlp(const fs::path& path) { return decode_mlp(read_text(path)); }

std::string anchors_to_json(const AnchorSet& set, std::uint64_t seed, const std::vector<std::size_t>& samples) {
    ordered_json j;
    j["beta"] = set.beta;
    j["seed"] = seed;
    j["k"] = set.k;
    j["suppression_radius"] = set.suppression_radius;
    j["anchors"] = ordered_json::array();
    for (const auto& a : set.anchors) {
        j["anchors"].push_back({{"row", a.row}, {"col", a.col}, {"grad", a.grad}, {"prob", a.prob}});
    }
    if (!samples.empty()) j["samples"] = samples;
    return j.dump(2) + "\n";
}

std::string fit_report_to_json(const FitReport& report) {
    ordered_json j;
    j["iterations"] = report.iterations;
    j["final_loss"] = report.final_loss;
    j["seconds"] = report.seconds;
    j["mean_psnr"] = report.mean_psnr();
    j["mean_ssim"] = report.mean_ssim();
    j["views"] = ordered_json::array();
    for (const auto& v : report.views) j["views"].push_back({{"psnr", v.psnr}, {"ssim", v.ssim}});
    j["loss_trace"] = report.loss_trace;
    return j.dump(2) + "\n";
}

std::string runtime_report_to_json(const RuntimeReport& report) {
    ordered_json j;
    j["width"] = report.width;
    j["height"] = report.height;
    j["frames"] = report.frames;
    j["total_seconds"] = report.total_seconds;
    j["fps"] = report.fps;
    j["ms_per_frame"] = report.ms_per_frame;
    j["workers"] = report.workers;
    j["hardware_threads"] = report.hardware_threads;
    j["cpu"] = report.cpu;
    return j.dump(2) + "\n";
}

} // namespace splat360
