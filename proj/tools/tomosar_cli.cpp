// tomosar: simulate stacks, invert them into point clouds and assess the result.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tomosar/doppler.hpp"
#include "tomosar/io.hpp"
#include "tomosar/metrology.hpp"
#include "tomosar/pipeline.hpp"
#include "tomosar/plane_fit.hpp"

using namespace tomosar;
using nlohmann::json;

namespace {

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InvalidArgument("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InvalidArgument("cannot open '" + path + "' for writing");
    return out;
}

void emit(const json& doc, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << doc.dump(2) << '\n';
        return;
    }
    auto out = open_out(path);
    out << doc.dump(2) << '\n';
}

void add_axis(CLI::App* app, const std::string& name, AxisSpec& axis, const std::string& unit) {
    app->add_option("--" + name + "-min", axis.start, name + " axis start (" + unit + ")");
    app->add_option("--" + name + "-max", axis.stop, name + " axis stop (" + unit + ")");
    app->add_option("--" + name + "-step", axis.step, name + " axis spacing (" + unit + ")");
}

struct InvertArgs {
    PipelineConfig config;
    std::string stack;
    std::string cloud_out = "cloud.csv";
    std::string stats_out = "stats.json";
    std::string solver = "tikhonov";
    std::optional<double> penalty;
    std::optional<double> delta;
    std::optional<double> epsilon;
    std::optional<double> area;
};

void add_inversion_options(CLI::App* app, InvertArgs& a) {
    auto& c = a.config;
    app->add_option("--solver", a.solver, "Spectrum estimator: tikhonov or l1")
        ->check(CLI::IsMember({"tikhonov", "l1"}));
    app->add_option("--delta", a.delta, "Tikhonov regularization (default: noise variance)");
    app->add_option("--epsilon", a.epsilon, "l1 regularization (default: 2 sigma sqrt(N ln L))");
    app->add_option("--l1-tol", c.l1_tol, "Relative duality-gap tolerance of the l1 solver");
    app->add_option("--max-scatterers", c.max_scatterers, "1 or 2")->check(CLI::Range(1, 2));
    app->add_option("--candidates", c.candidate_count, "Spectrum peaks seeding the pair search");
    app->add_option("--oversample", c.oversample_factor, "Off-grid refinement factor");
    app->add_option("--target-fpr", c.target_fpr, "Double-scatterer false-positive target");
    app->add_option("--penalty", a.penalty, "Penalty coefficient (skips calibration)");
    app->add_option("--calibration-trials", c.calibration_trials, "0: ceil(10 / target_fpr)");
    app->add_option("--calibration-seed", c.calibration_seed);
    app->add_option("--calibration-snr-min", c.calibration_snr_db_min, "dB");
    app->add_option("--calibration-snr-max", c.calibration_snr_db_max, "dB");
    add_axis(app, "s", c.s_axis, "m");
    add_axis(app, "v", c.v_axis, "mm/year");
    add_axis(app, "a", c.a_axis, "mm");
    app->add_option("--threads", c.threads, "Worker threads (0: all)");
}

void finish_config(InvertArgs& a) {
    a.config.solver = solver_from_string(a.solver);
    a.config.penalty_coefficient = a.penalty;
    a.config.delta = a.delta;
    a.config.epsilon = a.epsilon;
    a.config.area_km2 = a.area;
}

json stats_document(const PipelineResult& r) {
    json doc = {{"format_version", kFormatVersion},
                {"candidates", r.candidates.indices.size()},
                {"retained_fraction", r.candidates.retained_fraction},
                {"penalty_coefficient", r.penalty.coefficient},
                {"stats", to_json(r.stats)}};
    if (r.scoring)
        doc["scoring"] = to_json(*r.scoring);
    return doc;
}

int run_invert(InvertArgs& a) {
    finish_config(a);
    auto in = open_in(a.stack);
    const auto stack = read_stack(in);
    const auto result = run_pipeline(stack, a.config);
    {
        auto out = open_out(a.cloud_out);
        write_point_cloud_csv(out, result.points);
    }
    emit(stats_document(result), a.stats_out);
    return 0;
}

struct CalibrateArgs {
    InvertArgs inv;
    std::size_t validation_trials = 0;
    std::uint64_t validation_seed = 2;
    std::string out;
};

int run_calibrate(CalibrateArgs& a) {
    finish_config(a.inv);
    auto in = open_in(a.inv.stack);
    const auto stack = read_stack(in);
    const auto& c = a.inv.config;
    c.validate();
    DictionaryOptions dopts;
    dopts.threads = c.threads;
    const auto dict = build_dictionary(stack.geometry, c.grid(stack.seasonal), dopts);
    CalibrationOptions opts;
    opts.target_fpr = c.target_fpr;
    opts.trials = c.calibration_trials > 0
                      ? c.calibration_trials
                      : static_cast<std::size_t>(std::ceil(10.0 / c.target_fpr));
    opts.seed = c.calibration_seed;
    opts.snr_db_min = c.calibration_snr_db_min;
    opts.snr_db_max = c.calibration_snr_db_max;
    opts.inversion = c.inversion();
    opts.threads = c.threads;
    const auto result = calibrate_penalty(dict, opts);
    json doc = {{"format_version", kFormatVersion},
                {"penalty_coefficient", result.penalty.coefficient},
                {"target_fpr", c.target_fpr},
                {"training_fpr", result.training_fpr},
                {"training_trials", result.trials}};
    if (a.validation_trials > 0) {
        auto val = opts;
        val.trials = a.validation_trials;
        val.seed = a.validation_seed;
        doc["validation_fpr"] = double_false_positive_rate(dict, result.penalty, val);
        doc["validation_trials"] = a.validation_trials;
    }
    emit(doc, a.out);
    return 0;
}

struct PlaneArgs {
    std::string cloud;
    std::string out;
    std::string distances;
    AdmmOptions admm;
};

int run_plane_fit(PlaneArgs& a) {
    auto in = open_in(a.cloud);
    const auto cloud = read_xyz_csv(in);
    const auto plane = fit_plane_l1(cloud, a.admm);
    const auto vertical = vertical_residuals(cloud, plane);
    const auto normal = signed_distances(cloud, plane);
    json doc = {{"format_version", kFormatVersion},
                {"plane", to_json(plane)},
                {"points", cloud.size()},
                {"vertical_accuracy", to_json(accuracy_report(vertical))},
                {"distance_accuracy", to_json(accuracy_report(normal))}};
    if (!a.distances.empty()) {
        auto out = open_out(a.distances);
        out << "# format_version=" << kFormatVersion << "\nx,y,z,vertical_residual,distance\n";
        for (std::size_t i = 0; i < cloud.size(); ++i)
            out << format_double(cloud.x[i]) << ',' << format_double(cloud.y[i]) << ','
                << format_double(cloud.z[i]) << ',' << format_double(vertical[i]) << ','
                << format_double(normal[i]) << '\n';
    }
    emit(doc, a.out);
    return 0;
}

struct StatsArgs {
    std::string cloud;
    double area = 0.0;
    std::string compare;
    double compare_area = 0.0;
    std::vector<std::size_t> counts;         // singles, doubles
    std::vector<std::size_t> compare_counts; // singles, doubles
    std::string names = "first,second";
    bool table = false;
    std::string out;
};

CloudStats load_stats(const std::string& path, const std::vector<std::size_t>& counts,
                      double area) {
    if (!path.empty()) {
        auto in = open_in(path);
        const auto points = read_point_cloud_csv(in);
        const auto per_pixel = surviving_counts(points);
        return cloud_stats_from_counts(per_pixel, area);
    }
    if (counts.size() != 2)
        throw InvalidArgument("give a point cloud or exactly two counts (singles doubles)");
    std::vector<std::size_t> per_pixel(counts[0], 1);
    per_pixel.insert(per_pixel.end(), counts[1], 2);
    return cloud_stats_from_counts(per_pixel, area);
}

int run_stats(StatsArgs& a) {
    const auto lhs = load_stats(a.cloud, a.counts, a.area);
    json doc = {{"format_version", kFormatVersion}, {"stats", to_json(lhs)}};
    const bool comparing = !a.compare.empty() || !a.compare_counts.empty();
    if (comparing) {
        const auto rhs = load_stats(a.compare, a.compare_counts,
                                    a.compare_area > 0.0 ? a.compare_area : a.area);
        doc["compare"] = to_json(rhs);
        if (a.table) {
            const auto comma = a.names.find(',');
            const auto left = a.names.substr(0, comma);
            const auto right = comma == std::string::npos ? "second" : a.names.substr(comma + 1);
            std::cout << render_comparison(left, right, cloud_rows(lhs, rhs));
            return 0;
        }
    }
    emit(doc, a.out);
    return 0;
}

struct CrlbArgs {
    double wavelength = 0.031;
    double range = 661820.0;
    std::optional<double> aperture;
    std::optional<double> sigma_b;
    std::size_t images = 41;
    double snr_db = 2.0;
    std::string acquisitions;
    std::string out;
};

int run_crlb(CrlbArgs& a) {
    if (!a.acquisitions.empty()) {
        auto in = open_in(a.acquisitions);
        const auto geo = geometry_from_records(parse_acquisitions(in), a.wavelength, a.range);
        a.images = geo.size();
        if (!a.aperture)
            a.aperture = geo.elevation_aperture();
        if (!a.sigma_b)
            a.sigma_b = geo.baseline_std();
    }
    if (!a.aperture || !a.sigma_b)
        throw InvalidArgument("give --aperture and --sigma-b, or an acquisition file");
    const double rho = elevation_resolution(a.wavelength, a.range, *a.aperture);
    const double sigma =
        crlb_elevation(a.wavelength, a.range, a.images, db_to_linear(a.snr_db), *a.sigma_b);
    emit({{"format_version", kFormatVersion},
          {"elevation_resolution_m", rho},
          {"crlb_elevation_m", sigma},
          {"crlb_to_resolution", sigma / rho},
          {"n_images", a.images},
          {"snr_db", a.snr_db},
          {"aperture_m", *a.aperture},
          {"sigma_b_m", *a.sigma_b}},
         a.out);
    return 0;
}

struct DopplerArgs {
    std::string grid;
    std::optional<double> time;
    std::optional<double> range;
    bool allow_extrapolation = false;
    std::optional<double> raw_time;
    DopplerPolynomial poly;
    double fm_rate = -5301.0;
    std::optional<double> beam_sweep_rate;
    std::string out;
};

int run_doppler(DopplerArgs& a) {
    json doc = {{"format_version", kFormatVersion}};
    if (a.raw_time) {
        TimeConversionOptions opts;
        opts.beam_sweep_rate = a.beam_sweep_rate;
        doc["image_time_s"] = raw_to_image_time(*a.raw_time, a.poly, a.fm_rate, opts);
    }
    if (!a.grid.empty()) {
        if (!a.time || !a.range)
            throw InvalidArgument("grid queries need --time and --range");
        auto in = open_in(a.grid);
        const auto grids = read_doppler_grids(in);
        json bursts = json::array();
        for (const auto& g : grids) {
            const auto s = interpolate_fdc(g, *a.time, *a.range,
                                           a.allow_extrapolation ? Extrapolation::allow
                                                                 : Extrapolation::reject);
            bursts.push_back({{"fdc_hz", s.value}, {"extrapolated", s.extrapolated}});
        }
        doc["bursts"] = std::move(bursts);
    }
    if (doc.size() == 1)
        throw InvalidArgument("nothing to do: give --raw-time and/or --grid");
    emit(doc, a.out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multibaseline SAR tomography: simulation, inversion and point-cloud metrology"};
    app.set_config("--config", "", "TOML/INI file; flags override its values");
    app.require_subcommand(1);

    // simulate
    SceneOptions scene;
    std::string sim_out = "stack.json";
    bool noise_free = false;
    auto* sim = app.add_subcommand("simulate", "Write a synthetic stack with ground truth");
    sim->add_option("-o,--out", sim_out, "Stack file");
    sim->add_option("--rows", scene.rows);
    sim->add_option("--cols", scene.cols);
    sim->add_option("--images", scene.n_images, "Number of acquisitions");
    sim->add_option("--baseline-span", scene.baseline_span, "Baselines drawn in +-span (m)");
    sim->add_option("--wavelength", scene.wavelength, "m");
    sim->add_option("--range", scene.master_range, "Master slant range (m)");
    sim->add_option("--interval-days", scene.interval_days, "Repeat interval");
    sim->add_option("--snr-db", scene.snr_db, "Per-scatterer SNR");
    sim->add_flag("--noise-free", noise_free, "Disable noise");
    sim->add_option("--seed", scene.seed);
    sim->add_option("--candidate-fraction", scene.candidate_fraction);
    sim->add_option("--sidelobe-fraction", scene.sidelobe_fraction);
    sim->add_option("--double-fraction", scene.double_fraction);
    sim->add_flag("--on-grid", scene.on_grid, "Place ground truth on grid nodes");
    sim->add_option("--aps-std", scene.aps_std, "APS ramp std (rad)");
    sim->add_option("--pixel-spacing", scene.pixel_spacing, "m");
    sim->add_option("--seasonal-offset", scene.seasonal.phase_offset, "rad");
    add_axis(sim, "s", scene.s_axis, "m");
    add_axis(sim, "v", scene.v_axis, "mm/year");
    add_axis(sim, "a", scene.a_axis, "mm");

    // invert
    InvertArgs inv;
    auto* invert = app.add_subcommand("invert", "Invert a stack into a point cloud");
    invert->add_option("--stack", inv.stack, "Stack file")->required();
    invert->add_option("--cloud-out", inv.cloud_out, "Point-cloud CSV");
    invert->add_option("--stats-out", inv.stats_out, "Statistics JSON ('-' for stdout)");
    invert->add_option("--scr-threshold", inv.config.scr_threshold_db, "dB");
    invert->add_option("--sidelobe-threshold", inv.config.sidelobe_threshold);
    invert->add_option("--coherence-threshold", inv.config.coherence_threshold);
    invert->add_option("--area", inv.area, "Scene area (km^2), overrides the stack");
    add_inversion_options(invert, inv);

    // calibrate
    CalibrateArgs cal;
    auto* calibrate = app.add_subcommand("calibrate", "Calibrate the model-selection penalty");
    calibrate->add_option("--stack", cal.inv.stack, "Stack file (geometry source)")->required();
    calibrate->add_option("-o,--out", cal.out, "Result JSON (default stdout)");
    calibrate->add_option("--validation-trials", cal.validation_trials);
    calibrate->add_option("--validation-seed", cal.validation_seed);
    add_inversion_options(calibrate, cal.inv);

    // plane-fit
    PlaneArgs plane;
    auto* pf = app.add_subcommand("plane-fit", "Least-absolute-deviation plane fit by ADMM");
    pf->add_option("--cloud", plane.cloud, "Point-cloud CSV or x,y,z CSV")->required();
    pf->add_option("-o,--out", plane.out, "Result JSON (default stdout)");
    pf->add_option("--distances", plane.distances, "Per-point residual CSV");
    pf->add_option("--rho", plane.admm.rho);
    pf->add_option("--abs-tol", plane.admm.abs_tol);
    pf->add_option("--rel-tol", plane.admm.rel_tol);
    pf->add_option("--max-iter", plane.admm.max_iter);

    // stats
    StatsArgs st;
    auto* stats = app.add_subcommand("stats", "Point-cloud counts, density and comparisons");
    stats->add_option("--cloud", st.cloud, "Point-cloud CSV");
    stats->add_option("--counts", st.counts, "Singles and doubles instead of a cloud")
        ->expected(2);
    stats->add_option("--area", st.area, "km^2")->required();
    stats->add_option("--compare", st.compare, "Second point-cloud CSV");
    stats->add_option("--compare-counts", st.compare_counts)->expected(2);
    stats->add_option("--compare-area", st.compare_area, "km^2 (default: --area)");
    stats->add_option("--names", st.names, "Column names, comma separated");
    stats->add_flag("--table", st.table, "Print an aligned comparison table");
    stats->add_option("-o,--out", st.out);

    // crlb
    CrlbArgs cr;
    auto* crlb = app.add_subcommand("crlb", "Elevation resolution and single-scatterer bound");
    crlb->add_option("--wavelength", cr.wavelength, "m");
    crlb->add_option("--range", cr.range, "m");
    crlb->add_option("--aperture", cr.aperture, "Baseline span (m)");
    crlb->add_option("--sigma-b", cr.sigma_b, "Baseline std (m)");
    crlb->add_option("--images", cr.images);
    crlb->add_option("--snr-db", cr.snr_db);
    crlb->add_option("--acquisitions", cr.acquisitions, "Lines of: date baseline [master]");
    crlb->add_option("-o,--out", cr.out);

    // doppler
    DopplerArgs dp;
    auto* doppler = app.add_subcommand("doppler", "Time conversion and Doppler grid queries");
    doppler->add_option("--grid", dp.grid, "Grid file: 15 numbers per burst");
    doppler->add_option("--time", dp.time, "Image time (s)");
    doppler->add_option("--range", dp.range, "Slant range (m)");
    doppler->add_flag("--allow-extrapolation", dp.allow_extrapolation);
    doppler->add_option("--raw-time", dp.raw_time, "Raw data time (s)");
    doppler->add_option("--fdc-c0", dp.poly.c0, "Hz");
    doppler->add_option("--fdc-c1", dp.poly.c1, "Hz/s");
    doppler->add_option("--fdc-t0", dp.poly.reference_time, "s");
    doppler->add_option("--fm-rate", dp.fm_rate, "Hz/s");
    doppler->add_option("--beam-sweep-rate", dp.beam_sweep_rate, "Hz/s, enables the staring guard");
    doppler->add_option("-o,--out", dp.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e);
        std::cerr << error_record("arguments", std::nullopt, e.what()).dump() << '\n';
        return 2;
    }

    try {
        if (*sim) {
            if (noise_free)
                scene.snr_db.reset();
            auto out = open_out(sim_out);
            write_stack(out, simulate_scene(scene));
            return 0;
        }
        if (*invert)
            return run_invert(inv);
        if (*calibrate)
            return run_calibrate(cal);
        if (*pf)
            return run_plane_fit(plane);
        if (*stats)
            return run_stats(st);
        if (*crlb)
            return run_crlb(cr);
        if (*doppler)
            return run_doppler(dp);
    } catch (const PipelineError& e) {
        std::cerr << error_record(e.stage(), e.pixel(), e.detail()).dump() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << error_record(app.get_subcommands().front()->get_name(), std::nullopt, e.what())
                         .dump()
                  << '\n';
        return 1;
    }
    return 1;
}
