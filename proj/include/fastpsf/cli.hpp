#pragma once

// Command-line driver: psf | compare | render | bench.
// Exit codes: 0 success, 2 flag/format errors, 3 numeric-domain failures.

#include "fastpsf/baselines.hpp"
#include "fastpsf/bench.hpp"
#include "fastpsf/closed_form.hpp"
#include "fastpsf/dof_render.hpp"
#include "fastpsf/errors.hpp"
#include "fastpsf/field.hpp"
#include "fastpsf/io.hpp"
#include "fastpsf/metrics.hpp"
#include "fastpsf/pupil.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <sys/utsname.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fastpsf {

inline constexpr const char* kVersion = "0.1.0";

namespace cli {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

inline std::int64_t elapsed_ns(Clock::time_point since)
{
    return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - since).count();
}

inline json machine_descriptor()
{
    json m;
    utsname u{};
    if (uname(&u) == 0) {
        m["sysname"] = u.sysname;
        m["release"] = u.release;
        m["machine"] = u.machine;
    }
    m["hardware_concurrency"] = std::thread::hardware_concurrency();
#ifdef __VERSION__
    m["compiler"] = __VERSION__;
#endif
    return m;
}

inline json manifest_skeleton(const std::string& subcommand)
{
    return json{{"subcommand", subcommand}, {"version", kVersion}, {"machine", machine_descriptor()}};
}

// Every parameter that influences psf outputs. Stored fully resolved in the
// manifest, so replaying it reproduces the outputs bit for bit.
struct PsfParams {
    std::string method = "closed";
    double cd = 0.0;
    double cs = 0.0;
    double radius = 1e-3;
    double lambda = 500e-9;
    int n = static_cast<int>(kDefaultRadialSamples);
    double alpha = 100.0;
    int segments = 5;
    double k_max = 0.0; // 0 selects default_k_max
    std::string pupil_fit = "least_squares";
    std::string partition = "uniform_r2";
    bool adaptive_alpha = false;
    double focus = 0.4;
    double sensor = 12.37e-3;
    double pixel_pitch = 2e-6;
    int size = 0; // 0 covers [0, k_max] on the sensor grid
    int nr = 4096;
    int fft_grid = 2048;
    double fft_pad = 4.0;
    unsigned threads = 1;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PsfParams, method, cd, cs, radius, lambda, n, alpha, segments, k_max,
                                                pupil_fit, partition, adaptive_alpha, focus, sensor, pixel_pitch,
                                                size, nr, fft_grid, fft_pad, threads)

inline OpticalConfig optics_of(const PsfParams& p)
{
    OpticalConfig o;
    o.R = p.radius;
    o.lambda = p.lambda;
    o.z_f = p.focus;
    o.s = p.sensor;
    o.pixel_pitch = p.pixel_pitch;
    return o;
}

inline PupilFitOptions fit_of(const std::string& fit, const std::string& partition)
{
    PupilFitOptions f;
    if (fit == "quadratic_only" || fit == "quadratic-only") f.fit = PupilFit::quadratic_only;
    else if (fit != "least_squares" && fit != "least-squares")
        throw ConfigError("--pupil-fit: expected least-squares|quadratic-only");
    if (partition == "uniform_r" || partition == "uniform-r") f.partition = PupilPartition::uniform_r;
    else if (partition != "uniform_r2" && partition != "uniform-r2")
        throw ConfigError("--partition: expected uniform-r2|uniform-r");
    return f;
}

struct PsfResult {
    RadialPsf radial;
    Psf2D raster;
    std::int64_t simulate_ns = 0;
    std::int64_t raster_ns = 0;
};

/// Runs the selected simulator; resolves k_max and size in place.
inline PsfResult simulate(PsfParams& p)
{
    const Method method = parse_method(p.method);
    const OpticalConfig optics = optics_of(p);
    optics.validate();
    const AberrationState ab{p.cd, p.cs, p.radius};
    ab.validate();
    const PupilFitOptions fit = fit_of(p.pupil_fit, p.partition);
    if (p.k_max == 0.0) p.k_max = default_k_max(ab);
    detail::require_config(p.k_max > 0.0, "--k-max must be > 0");
    const double pitch = optics.k_pitch();
    if (p.size == 0) p.size = 2 * static_cast<int>(std::ceil(p.k_max / pitch)) + 1;
    detail::require_config(p.size >= 1 && p.size <= 8193, "--size must lie in [1, 8193]");
    const auto k = uniform_k_grid(p.k_max, static_cast<std::size_t>(p.n));

    PsfResult r;
    auto t0 = Clock::now();
    std::optional<Psf2D> native;
    switch (method) {
    case Method::closed_form: {
        ClosedFormOptions o;
        o.alpha = p.alpha;
        o.adaptive_alpha = p.adaptive_alpha;
        o.threads = p.threads;
        r.radial = radial_psf_spherical(ab, p.segments, k, o, fit);
        break;
    }
    case Method::hankel: {
        QuadratureSpec q;
        q.n_r = p.nr;
        r.radial = hankel_psf(ab, k, q, p.threads);
        break;
    }
    case Method::fft: {
        FftSpec f;
        f.grid = p.fft_grid;
        f.pad_factor = p.fft_pad;
        native = fft_psf(ab, f);
        r.radial = resample(azimuthal_average(*native), k);
        r.radial.meta = {"fft", p.cd, p.cs, 0.0, 0};
        break;
    }
    case Method::geometric: r.radial = geometric_radial(p.cd, ab, k); break;
    }
    r.simulate_ns = elapsed_ns(t0);

    t0 = Clock::now();
    switch (method) {
    case Method::closed_form:
    case Method::hankel: r.raster = radial_to_2d(r.radial, p.size, pitch); break;
    case Method::fft: r.raster = resample_2d(*native, p.size, pitch); break;
    case Method::geometric: {
        // unit-sum disk rescaled to the wave simulators' energy pi R^2
        r.raster = geometric_psf_from_defocus(p.cd, optics, p.size);
        const double scale = std::numbers::pi * p.radius * p.radius / (pitch * pitch);
        for (auto& v : r.raster.data) v *= scale;
        break;
    }
    }
    r.raster_ns = elapsed_ns(t0);
    return r;
}

// Minimal look-ahead so a manifest can seed defaults before flags override them.
inline std::optional<std::string> find_flag_value(int argc, const char* const* argv, const std::string& flag)
{
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == flag && i + 1 < argc) return std::string(argv[i + 1]);
        if (a.rfind(flag + "=", 0) == 0) return a.substr(flag.size() + 1);
    }
    return std::nullopt;
}

inline void add_optics_flags(CLI::App* sub, double& radius, double& lambda, double& focus, double& sensor,
                             double& pitch)
{
    sub->add_option("--radius", radius, "aperture radius R (m)")->check(CLI::PositiveNumber);
    sub->add_option("--lambda", lambda, "wavelength (m)")->check(CLI::PositiveNumber);
    sub->add_option("--focus", focus, "focal distance z_f (m)")->check(CLI::PositiveNumber);
    sub->add_option("--sensor", sensor, "lens-to-sensor distance s (m)")->check(CLI::PositiveNumber);
    sub->add_option("--pixel-pitch", pitch, "sensor pixel pitch (m)")->check(CLI::PositiveNumber);
}

inline const std::vector<std::string> kMethodNames = {"closed", "closed_form", "hankel", "fft", "geometric"};

inline int cmd_psf(PsfParams p, const std::string& prefix, const std::optional<std::string>& from, std::ostream& out)
{
    const auto t0 = Clock::now();
    PsfResult r = simulate(p);
    auto t1 = Clock::now();
    const std::string csv = prefix + ".radial.csv";
    const std::string pfm = prefix + ".psf.pfm";
    const std::string pgm = prefix + ".preview.pgm";
    const std::string man = prefix + ".manifest.json";
    io::write_radial_csv(csv, r.radial);
    io::write_pfm(pfm, r.raster);
    io::write_pgm(pgm, io::preview(r.raster));
    const std::int64_t write_ns = elapsed_ns(t1);

    json m = manifest_skeleton("psf");
    m["parameters"] = p;
    m["derived"] = {{"k_pitch", optics_of(p).k_pitch()}, {"energy", radial_energy(r.radial)}};
    if (from) m["from_manifest"] = *from;
    m["outputs"] = {{"radial_csv", csv}, {"psf_pfm", pfm}, {"preview_pgm", pgm}};
    m["timings_ns"] = {{"simulate", r.simulate_ns}, {"raster", r.raster_ns}, {"write", write_ns}, {"total", elapsed_ns(t0)}};
    io::write_json(man, m);
    out << "psf: method=" << p.method << " C_d=" << p.cd << " C_s=" << p.cs << " n=" << p.n << " size=" << p.size
        << " -> " << csv << "\n";
    return 0;
}

inline std::optional<json> try_manifest(const std::string& prefix)
{
    const std::string path = prefix + ".manifest.json";
    if (!std::filesystem::exists(path)) return std::nullopt;
    return io::read_json(path);
}

inline Psf2D raster_to_psf(const Raster& r, double pitch)
{
    detail::require_config(r.width == r.height, "PSF raster must be square");
    Psf2D p(r.width, pitch);
    p.data = r.data;
    return p;
}

inline int cmd_compare(const std::string& a, const std::string& b, const std::string& out_prefix,
                       const std::string& quantity, std::ostream& out)
{
    const auto t0 = Clock::now();
    const RadialPsf ra = io::read_radial_csv(a + ".radial.csv");
    const RadialPsf rb = io::read_radial_csv(b + ".radial.csv");
    detail::require_config(ra.k == rb.k, "compare: k grids of '" + a + "' and '" + b +
                                             "' differ; regenerate both with the same --n and --k-max");
    const ProfileQuantity q = quantity == "amplitude" ? ProfileQuantity::amplitude : ProfileQuantity::intensity;
    MetricsReport rep = compare_radial(ra, rb, q);

    // SSIM needs two 2D rasters on the same sensor grid.
    const auto ma = try_manifest(a);
    const auto mb = try_manifest(b);
    std::string ssim_note = "no manifests";
    if (ma && mb && ma->contains("derived") && mb->contains("derived")) {
        const double pa = (*ma)["derived"].value("k_pitch", 0.0);
        const double pb = (*mb)["derived"].value("k_pitch", 0.0);
        const Raster xa = io::read_pfm(a + ".psf.pfm");
        const Raster xb = io::read_pfm(b + ".psf.pfm");
        if (pa != pb || xa.width != xb.width || xa.height != xb.height) {
            ssim_note = "rasters differ in size or pitch";
        } else if (xa.width < 11 || xa.width != xa.height) {
            ssim_note = "rasters smaller than the SSIM window";
        } else {
            rep.ssim = ssim_2d(raster_to_psf(xa, pa), raster_to_psf(xb, pb));
            ssim_note = "computed";
        }
    }

    const std::string txt = out_prefix + ".metrics.txt";
    const std::string js = out_prefix + ".metrics.json";
    io::detail::write_file(txt, rep.to_text());
    json j = {{"rmse", rep.rmse},
              {"psnr_db", std::isinf(rep.psnr_db) ? json("inf") : json(rep.psnr_db)},
              {"pearson", rep.pearson},
              {"energy_deviation", rep.energy_deviation},
              {"quantity", quantity},
              {"ssim", rep.ssim ? json(*rep.ssim) : json(nullptr)},
              {"ssim_note", ssim_note}};
    io::write_json(js, j);

    json m = manifest_skeleton("compare");
    m["parameters"] = {{"a", a}, {"b", b}, {"quantity", quantity}};
    m["outputs"] = {{"metrics_txt", txt}, {"metrics_json", js}};
    m["timings_ns"] = {{"total", elapsed_ns(t0)}};
    io::write_json(out_prefix + ".manifest.json", m);

    out << std::setprecision(6) << "compare " << a << " vs " << b << " (baseline)\n"
        << "  rmse             " << rep.rmse << "\n"
        << "  psnr_db          " << rep.psnr_db << "\n"
        << "  pearson          " << rep.pearson << "\n"
        << "  energy_deviation " << rep.energy_deviation << "\n"
        << "  ssim             " << (rep.ssim ? std::to_string(*rep.ssim) : "n/a (" + ssim_note + ")") << "\n";
    return 0;
}

inline bool is_pgm(const std::string& path)
{
    const std::string bytes = io::detail::read_file(path);
    return bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5';
}

struct RenderArgs {
    std::string image;
    std::string depth;
    std::string out_prefix;
    std::string method = "closed";
    double depth_scale = 0.0;
    double depth_offset = 0.0;
    int buckets = 64;
    int kernel_cap = 255;
    int segments = 5;
    double alpha = 100.0;
    double cs = 0.0;
    double radius = 1e-3;
    double lambda = 500e-9;
    double focus = 0.4;
    double sensor = 12.37e-3;
    double pixel_pitch = 2e-6;
    int nr = 4096;
    int fft_grid = 2048;
    double fft_pad = 4.0;
    unsigned threads = 1;
};

inline int cmd_render(const RenderArgs& a, std::ostream& out)
{
    const auto t0 = Clock::now();
    const Raster image = is_pgm(a.image) ? io::pgm_to_raster(io::read_pgm(a.image)) : io::read_pfm(a.image);
    Raster depth;
    if (is_pgm(a.depth)) {
        detail::require_config(a.depth_scale != 0.0, "--depth-scale: required when the depth map is a PGM");
        depth = io::pgm_to_raster(io::read_pgm(a.depth), RasterKind::depth, a.depth_scale, a.depth_offset);
    } else {
        depth = io::read_pfm(a.depth, RasterKind::depth);
    }
    detail::require_config(image.width == depth.width && image.height == depth.height,
                           "render: image is " + std::to_string(image.width) + "x" + std::to_string(image.height) +
                               " but depth is " + std::to_string(depth.width) + "x" + std::to_string(depth.height));

    RenderConfig rc;
    rc.optics.R = a.radius;
    rc.optics.lambda = a.lambda;
    rc.optics.z_f = a.focus;
    rc.optics.s = a.sensor;
    rc.optics.pixel_pitch = a.pixel_pitch;
    rc.method = parse_method(a.method);
    rc.depth_buckets = a.buckets;
    rc.kernel_cap = a.kernel_cap;
    rc.segments = a.segments;
    rc.alpha = a.alpha;
    rc.C_s = a.cs;
    rc.quadrature.n_r = a.nr;
    rc.fft.grid = a.fft_grid;
    rc.fft.pad_factor = a.fft_pad;
    rc.threads = a.threads;

    RenderStats stats;
    const auto tr = Clock::now();
    const Raster result = render_dof(image, depth, rc, &stats);
    const std::int64_t render_ns = elapsed_ns(tr);

    const std::string pfm = a.out_prefix + ".render.pfm";
    const std::string pgm = a.out_prefix + ".render.pgm";
    io::write_pfm(pfm, result);
    io::write_pgm(pgm, io::preview(result));

    json m = manifest_skeleton("render");
    m["parameters"] = {{"image", a.image},         {"depth", a.depth},         {"method", a.method},
                       {"depth_scale", a.depth_scale}, {"depth_offset", a.depth_offset}, {"buckets", a.buckets},
                       {"kernel_cap", a.kernel_cap}, {"segments", a.segments},   {"alpha", a.alpha},
                       {"cs", a.cs},               {"radius", a.radius},       {"lambda", a.lambda},
                       {"focus", a.focus},         {"sensor", a.sensor},       {"pixel_pitch", a.pixel_pitch},
                       {"nr", a.nr},               {"fft_grid", a.fft_grid},   {"fft_pad", a.fft_pad},
                       {"threads", a.threads}};
    m["outputs"] = {{"render_pfm", pfm}, {"preview_pgm", pgm}};
    m["stats"] = {{"buckets_used", stats.buckets_used}, {"flux_in", image.sum()}, {"flux_out", result.sum()}};
    m["timings_ns"] = {{"psf", stats.psf_ns}, {"scatter", stats.scatter_ns}, {"render", render_ns}, {"total", elapsed_ns(t0)}};
    io::write_json(a.out_prefix + ".manifest.json", m);
    out << "render: " << image.width << "x" << image.height << " method=" << a.method << " buckets=" << stats.buckets_used
        << " wall=" << render_ns / 1e6 << " ms -> " << pfm << "\n";
    return 0;
}

struct BenchArgs {
    std::vector<std::string> methods = {"closed", "hankel"};
    std::vector<int> sizes = {256, 512, 1024, 2048, 4096};
    int repeats = 9;
    int warmup = 2;
    double cd = 5.0;
    double cs = 0.0;
    double radius = 1e-3;
    int segments = 5;
    double alpha = 100.0;
    unsigned threads = 1;
    std::string out_prefix;
};

inline int cmd_bench(const BenchArgs& a, std::ostream& out)
{
    const auto t0 = Clock::now();
    const AberrationState ab{a.cd, a.cs, a.radius};
    ab.validate();
    std::ostringstream table;
    table << "method,N,median_ns,min_ns,max_ns\n";
    std::ostringstream slopes;
    slopes << "method,slope\n";
    json summary = json::object();
    out << "method      N      median_ms\n";
    for (const auto& name : a.methods) {
        const Method method = parse_method(name);
        std::vector<double> xs;
        std::vector<double> ys;
        for (int N : a.sizes) {
            const Timing t = time_repeated(bench_workload(method, ab, N, a.segments, a.alpha, a.threads), a.repeats, a.warmup);
            table << to_string(method) << "," << N << "," << t.median_ns << "," << t.min_ns << "," << t.max_ns << "\n";
            out << std::left << std::setw(10) << to_string(method) << std::right << std::setw(6) << N << "  "
                << std::setw(12) << std::fixed << std::setprecision(3) << t.median_ns / 1e6 << "\n";
            xs.push_back(N);
            ys.push_back(static_cast<double>(std::max<std::int64_t>(t.median_ns, 1)));
        }
        if (xs.size() >= 2) {
            const double s = loglog_slope(xs, ys);
            slopes << to_string(method) << "," << std::setprecision(6) << s << "\n";
            summary[to_string(method)] = s;
            out << "  slope(" << to_string(method) << ") = " << std::setprecision(3) << s << "\n";
        }
    }
    const std::string csv = a.out_prefix + ".bench.csv";
    const std::string scsv = a.out_prefix + ".slopes.csv";
    io::detail::write_file(csv, table.str());
    io::detail::write_file(scsv, slopes.str());
    json m = manifest_skeleton("bench");
    m["parameters"] = {{"methods", a.methods}, {"sizes", a.sizes}, {"repeats", a.repeats}, {"warmup", a.warmup},
                       {"cd", a.cd},           {"cs", a.cs},       {"radius", a.radius},   {"segments", a.segments},
                       {"alpha", a.alpha},     {"threads", a.threads}};
    m["slopes"] = summary;
    m["outputs"] = {{"bench_csv", csv}, {"slopes_csv", scsv}};
    m["timings_ns"] = {{"total", elapsed_ns(t0)}};
    io::write_json(a.out_prefix + ".manifest.json", m);
    return 0;
}

} // namespace cli

/// Entry point shared by the binary and the tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    using namespace cli;
    CLI::App app{"fastpsf: closed-form and reference PSF simulators"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    // psf
    PsfParams psf;
    std::string psf_prefix;
    std::optional<std::string> from;
    int exit_code = 0;
    try {
        from = find_flag_value(argc, argv, "--from-manifest");
        if (from && argc > 1 && std::strcmp(argv[1], "psf") == 0) {
            const json m = io::read_json(*from);
            if (!m.contains("parameters")) throw ConfigError("--from-manifest: '" + *from + "' has no parameters");
            psf = m["parameters"].get<PsfParams>();
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        err << "error: --from-manifest: " << e.what() << "\n";
        return 2;
    }
    std::string from_flag;
    auto* s_psf = app.add_subcommand("psf", "simulate one PSF and write CSV/PFM/PGM/manifest");
    s_psf->add_option("--method", psf.method, "closed|hankel|fft|geometric")->check(CLI::IsMember(kMethodNames));
    s_psf->add_option("--cd", psf.cd, "defocus coefficient C_d");
    s_psf->add_option("--cs", psf.cs, "spherical aberration coefficient C_s");
    s_psf->add_option("--n", psf.n, "radial samples")->check(CLI::Range(2, 1 << 20));
    s_psf->add_option("--alpha", psf.alpha, "Bessel split parameter")->check(CLI::PositiveNumber);
    s_psf->add_option("--segments", psf.segments, "pupil annuli M")->check(CLI::Range(1, 4096));
    s_psf->add_option("--out-prefix", psf_prefix, "output path prefix")->required();
    s_psf->add_option("--k-max", psf.k_max, "largest k (1/m); 0 = automatic")->check(CLI::NonNegativeNumber);
    s_psf->add_option("--pupil-fit", psf.pupil_fit, "least_squares|quadratic_only")
        ->check(CLI::IsMember({"least_squares", "least-squares", "quadratic_only", "quadratic-only"}));
    s_psf->add_option("--partition", psf.partition, "uniform_r2|uniform_r")->check(CLI::IsMember({"uniform_r2", "uniform-r2", "uniform_r", "uniform-r"}));
    s_psf->add_flag("--adaptive-alpha", psf.adaptive_alpha, "alpha = max(1, pi k R) per sample");
    add_optics_flags(s_psf, psf.radius, psf.lambda, psf.focus, psf.sensor, psf.pixel_pitch);
    s_psf->add_option("--size", psf.size, "2D raster size in pixels; 0 = automatic")->check(CLI::Range(0, 8193));
    s_psf->add_option("--nr", psf.nr, "Hankel quadrature nodes")->check(CLI::Range(64, 1 << 22));
    s_psf->add_option("--fft-grid", psf.fft_grid, "FFT grid size (power of two)");
    s_psf->add_option("--fft-pad", psf.fft_pad, "FFT zero-padding factor");
    s_psf->add_option("--threads", psf.threads, "worker threads")->check(CLI::Range(1u, 256u));
    s_psf->add_option("--from-manifest", from_flag, "seed parameters from a previous manifest");

    // compare
    std::string cmp_a, cmp_b, cmp_out, cmp_quantity = "intensity";
    auto* s_cmp = app.add_subcommand("compare", "metrics of prefix A against baseline prefix B");
    s_cmp->add_option("a", cmp_a, "candidate prefix")->required();
    s_cmp->add_option("b", cmp_b, "baseline prefix")->required();
    s_cmp->add_option("--out", cmp_out, "report prefix (default: A_vs_<basename B>)");
    s_cmp->add_option("--quantity", cmp_quantity, "intensity|amplitude")->check(CLI::IsMember({"intensity", "amplitude"}));

    // render
    RenderArgs ra;
    auto* s_ren = app.add_subcommand("render", "depth-of-field render of an image and depth map");
    s_ren->add_option("--image", ra.image, "PGM (8/16-bit) or PFM image")->required()->check(CLI::ExistingFile);
    s_ren->add_option("--depth", ra.depth, "PFM depth (m) or 16-bit PGM with --depth-scale")->required()->check(CLI::ExistingFile);
    s_ren->add_option("--out-prefix", ra.out_prefix, "output path prefix")->required();
    s_ren->add_option("--method", ra.method, "closed|hankel|fft|geometric")->check(CLI::IsMember(kMethodNames));
    s_ren->add_option("--depth-scale", ra.depth_scale, "meters per PGM depth unit");
    s_ren->add_option("--depth-offset", ra.depth_offset, "depth offset (m)");
    s_ren->add_option("--buckets", ra.buckets, "defocus buckets")->check(CLI::Range(1, 65536));
    s_ren->add_option("--kernel-cap", ra.kernel_cap, "largest kernel side (odd)");
    s_ren->add_option("--segments", ra.segments, "pupil annuli M")->check(CLI::Range(1, 4096));
    s_ren->add_option("--alpha", ra.alpha, "Bessel split parameter")->check(CLI::PositiveNumber);
    s_ren->add_option("--cs", ra.cs, "spherical aberration coefficient C_s");
    add_optics_flags(s_ren, ra.radius, ra.lambda, ra.focus, ra.sensor, ra.pixel_pitch);
    s_ren->add_option("--nr", ra.nr, "Hankel quadrature nodes")->check(CLI::Range(64, 1 << 22));
    s_ren->add_option("--fft-grid", ra.fft_grid, "FFT grid size (power of two)");
    s_ren->add_option("--fft-pad", ra.fft_pad, "FFT zero-padding factor");
    s_ren->add_option("--threads", ra.threads, "worker threads")->check(CLI::Range(1u, 256u));

    // bench
    BenchArgs ba;
    auto* s_bench = app.add_subcommand("bench", "runtime scaling table");
    s_bench->add_option("--methods", ba.methods, "comma-separated methods")->delimiter(',')->check(CLI::IsMember(kMethodNames));
    s_bench->add_option("--sizes", ba.sizes, "comma-separated N values")->delimiter(',')->check(CLI::Range(2, 1 << 16));
    s_bench->add_option("--repeats", ba.repeats, "timed repeats")->check(CLI::Range(1, 1000));
    s_bench->add_option("--warmup", ba.warmup, "discarded warm-up runs")->check(CLI::Range(0, 1000));
    s_bench->add_option("--cd", ba.cd, "defocus coefficient C_d");
    s_bench->add_option("--cs", ba.cs, "spherical aberration coefficient C_s");
    s_bench->add_option("--radius", ba.radius, "aperture radius R (m)")->check(CLI::PositiveNumber);
    s_bench->add_option("--segments", ba.segments, "pupil annuli M")->check(CLI::Range(1, 4096));
    s_bench->add_option("--alpha", ba.alpha, "Bessel split parameter")->check(CLI::PositiveNumber);
    s_bench->add_option("--threads", ba.threads, "worker threads")->check(CLI::Range(1u, 256u));
    s_bench->add_option("--out-prefix", ba.out_prefix, "output path prefix")->required();

    try {
        app.parse(argc, argv);
        if (*s_psf) exit_code = cmd_psf(psf, psf_prefix, from, out);
        else if (*s_cmp) exit_code = cmd_compare(cmp_a, cmp_b, cmp_out.empty() ? cmp_a + "_vs_" + std::filesystem::path(cmp_b).filename().string() : cmp_out, cmp_quantity, out);
        else if (*s_ren) exit_code = cmd_render(ra, out);
        else if (*s_bench) exit_code = cmd_bench(ba, out);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        err << "numeric domain error: " << e.what() << "\n";
        return 3;
    } catch (const DegenerateError& e) {
        err << "numeric domain error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}

} // namespace fastpsf
