#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "salbench/density_io.hpp"
#include "salbench/errors.hpp"
#include "salbench/experiments.hpp"
#include "salbench/image_io.hpp"
#include "salbench/imaging.hpp"
#include "salbench/report.hpp"
#include "salbench/synthetic.hpp"
#include "salbench/text.hpp"

namespace salbench::cli {
namespace {

namespace fs = std::filesystem;
using experiments::kSchemaVersion;
using fixmap::DensityMap;
using fixmap::FixationSet;
using json = nlohmann::ordered_json;

// A config entry that failed validation; `field` is its dotted key path.
class ConfigError : public ValidationError {
public:
    ConfigError(const std::string& field, const std::string& what)
        : ValidationError(field + ": " + what), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct Failure {
    std::string item;
    std::string message;
};

struct Globals {
    std::string config;
    std::uint64_t seed = 0;
    std::size_t jobs = 0;
    std::string output_dir = ".";
    std::string format = "csv";
};

struct Ctx {
    const Globals& g;
    std::ostream& out;
    std::ostream& err;
    fs::path out_dir;
    std::vector<Failure> failures;

    bool json_output() const { return g.format == "json"; }
    void fail(std::string item, std::string message) { failures.push_back({std::move(item), std::move(message)}); }
};

void write_text(const fs::path& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    f << body;
    f.close();
    if (!f) throw IoError("cannot write " + path.string());
}

std::string csv_text(auto&& writer) {
    std::ostringstream s;
    writer(s);
    return s.str();
}

fixmap::BlurDomain parse_domain(const std::string& s) {
    return s == "fourier" ? fixmap::BlurDomain::Fourier : fixmap::BlurDomain::Spatial;
}

std::optional<fixmap::Size> parse_size(const std::string& s) {
    if (s.empty()) return std::nullopt;
    const auto x = s.find('x');
    fixmap::Size size;
    if (x == std::string::npos || !text::parse_size(std::string_view(s).substr(0, x), size.width) ||
        !text::parse_size(std::string_view(s).substr(x + 1), size.height) || size.width == 0 || size.height == 0) {
        throw ValidationError("size must look like WIDTHxHEIGHT, got '" + s + "'");
    }
    return size;
}

// Ids end up in file names.
void require_safe_id(const std::string& id) {
    const bool ok = !id.empty() && id != "." && id != ".." &&
                    std::all_of(id.begin(), id.end(), [](unsigned char c) {
                        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
                    });
    if (!ok) throw ValidationError("stimulus id '" + id + "' is not usable as a file name");
}

experiments::Dataset require_dataset(const std::string& root, const char* command) {
    if (root.empty()) throw ValidationError(std::string(command) + ": dataset directory is required");
    return experiments::load_dataset(root);
}

// ---- config -------------------------------------------------------------

std::string dashed(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

std::string scalar_text(const json& v, const std::string& path) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_float()) return text::format_double(v.get<double>());
    throw ConfigError(path, "expected a string, number or boolean");
}

void apply_value(CLI::App& app, const std::string& path, const std::string& key, const json& v) {
    CLI::Option* opt = nullptr;
    if (key != "config" && key != "help") {
        opt = app.get_option_no_throw("--" + dashed(key));
        if (!opt) opt = app.get_option_no_throw(key);
    }
    if (!opt) throw ConfigError(path, "unknown key");
    if (opt->count() > 0) return;  // command line wins

    std::vector<std::string> inputs;
    if (v.is_array()) {
        if (opt->get_items_expected_max() <= 1) throw ConfigError(path, "expected a single value, got a list");
        for (std::size_t i = 0; i < v.size(); ++i) inputs.push_back(scalar_text(v[i], path + "[" + std::to_string(i) + "]"));
    } else {
        inputs.push_back(scalar_text(v, path));
    }
    try {
        opt->clear();
        for (auto& s : inputs) opt->add_result(s);
        opt->run_callback();
    } catch (const CLI::Error& e) {
        throw ConfigError(path, e.what());
    }
}

// Keys map onto option names: top-level keys onto global flags, a section
// named after a subcommand onto that subcommand's options ("sigma_min" ->
// --sigma-min, positionals by name). Anything else is rejected.
void apply_config(CLI::App& app, const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), "cannot open");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string(), e.what());
    }
    if (!j.is_object()) throw ConfigError(path.string(), "top level must be an object");
    for (const auto& [key, value] : j.items()) {
        CLI::App* sub = nullptr;
        try {
            sub = app.get_subcommand(key);
        } catch (const CLI::OptionNotFound&) {
        }
        if (sub) {
            if (!value.is_object()) throw ConfigError(key, "expected an object");
            for (const auto& [k2, v2] : value.items()) apply_value(*sub, key + "." + k2, k2, v2);
        } else {
            apply_value(app, key, key, value);
        }
    }
}

// ---- preprocess ---------------------------------------------------------

struct PreprocessOpts {
    std::string input_dir;
    std::size_t height = 64;
    std::size_t width = 0;  // 0 keeps the aspect ratio
    bool keep_linear = false;
};

bool is_image_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp" || ext == ".pgm";
}

void cmd_preprocess(Ctx& c, const PreprocessOpts& o) {
    const auto policy = o.width ? imaging::ResizePolicy::fixed(o.width, o.height)
                                : imaging::ResizePolicy::preserve(o.height);
    policy.validate();
    if (o.input_dir.empty()) throw ValidationError("preprocess: input directory is required");
    const fs::path in_dir = o.input_dir;
    if (!fs::is_directory(in_dir)) throw IoError("preprocess: not a directory: " + in_dir.string());
    fs::create_directories(c.out_dir);
    if (fs::equivalent(in_dir, c.out_dir)) throw ValidationError("preprocess: output directory equals input directory");

    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(in_dir)) {
        if (e.is_regular_file() && is_image_file(e.path())) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) c.err << "warning: no images found in " << in_dir.string() << '\n';

    json entries = json::array();
    json errors = json::array();
    std::set<std::string> used;
    std::size_t total_in = 0, total_out = 0;
    for (const fs::path& f : files) {
        const std::string name = f.filename().string();
        try {
            const std::string out_name = f.stem().string() + ".png";
            if (!used.insert(out_name).second) throw ValidationError("output name " + out_name + " already used");
            const imaging::RasterImage hc = io::read_srgb_image(f);
            const imaging::RasterImage lg = imaging::hc_to_lg(hc, policy);
            io::write_png(c.out_dir / out_name,
                          io::Image8{lg.width(), lg.height(), 1, imaging::to_gray8(lg, o.keep_linear)});
            const std::size_t in_bytes = hc.width() * hc.height() * 3;
            const std::size_t out_bytes = lg.width() * lg.height();
            total_in += in_bytes;
            total_out += out_bytes;
            entries.push_back({{"input", name},
                               {"output", out_name},
                               {"original", {{"width", hc.width()}, {"height", hc.height()}}},
                               {"lg", {{"width", lg.width()}, {"height", lg.height()}}},
                               {"original_bytes", in_bytes},
                               {"lg_bytes", out_bytes},
                               {"size_ratio", static_cast<double>(out_bytes) / static_cast<double>(in_bytes)}});
        } catch (const Error& e) {
            errors.push_back({{"input", name}, {"message", e.what()}});
            c.fail(name, e.what());
        }
    }

    json m;
    m["schema_version"] = kSchemaVersion;
    m["command"] = "preprocess";
    m["policy"] = {{"target_height", policy.target_height},
                   {"fixed_width", policy.fixed_width ? json(*policy.fixed_width) : json(nullptr)},
                   {"keep_linear", o.keep_linear}};
    m["files"] = entries;
    m["errors"] = errors;
    m["total"] = {{"original_bytes", total_in},
                  {"lg_bytes", total_out},
                  {"size_ratio", total_in ? json(static_cast<double>(total_out) / static_cast<double>(total_in))
                                          : json(nullptr)}};
    const std::string manifest = m.dump(2) + '\n';
    write_text(c.out_dir / "manifest.json", manifest);

    if (c.json_output()) {
        c.out << manifest;
        return;
    }
    c.out << "input,output,original_width,original_height,lg_width,lg_height,size_ratio\n";
    for (const auto& e : entries) {
        c.out << e["input"].get<std::string>() << ',' << e["output"].get<std::string>() << ','
              << e["original"]["width"] << ',' << e["original"]["height"] << ',' << e["lg"]["width"] << ','
              << e["lg"]["height"] << ',' << text::format_double(e["size_ratio"].get<double>()) << '\n';
    }
}

// ---- density ------------------------------------------------------------

struct DensityOpts {
    std::string dataset;
    std::string fixations;
    std::string size;
    std::string condition = "hc";
    double sigma = 30.0;
    std::string blur = "spatial";
};

void cmd_density(Ctx& c, const DensityOpts& o) {
    const fixmap::BlurSpec blur{o.sigma, parse_domain(o.blur)};
    blur.validate();
    std::vector<FixationSet> sets;
    if (!o.fixations.empty()) {
        fixmap::StimulusSizes sizes;
        if (!o.dataset.empty()) sizes = experiments::load_dataset(o.dataset).sizes();
        sizes.fallback = parse_size(o.size);
        sets = fixmap::parse_fixations_file(o.fixations, sizes);
    } else {
        const auto ds = require_dataset(o.dataset, "density");
        sets = o.condition == "lg" ? ds.lg : ds.hc;
    }

    std::vector<std::string> order;
    std::map<std::string, std::vector<FixationSet>> by_stimulus;
    for (auto& s : sets) {
        auto& bucket = by_stimulus[s.stimulus_id];
        if (bucket.empty()) order.push_back(s.stimulus_id);
        bucket.push_back(std::move(s));
    }
    fs::create_directories(c.out_dir);

    json rows = json::array();
    for (const std::string& id : order) {
        try {
            require_safe_id(id);
            const auto& group = by_stimulus[id];
            const FixationSet pooled = fixmap::aggregate(group);
            const DensityMap map = fixmap::blur_density(fixmap::rasterize(pooled), blur);
            io::write_npy(c.out_dir / (id + ".npy"), map);
            io::write_density_png(c.out_dir / (id + ".png"), map);
            rows.push_back({{"stimulus_id", id},
                            {"observers", group.size()},
                            {"fixations", pooled.points.size()},
                            {"width", map.width()},
                            {"height", map.height()},
                            {"file", id + ".npy"}});
        } catch (const Error& e) {
            c.fail(id, e.what());
        }
    }
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = "density";
    doc["sigma"] = o.sigma;
    doc["maps"] = rows;
    write_text(c.out_dir / "density.json", doc.dump(2) + '\n');
    if (c.json_output()) {
        c.out << doc.dump(2) << '\n';
        return;
    }
    c.out << "stimulus_id,observers,fixations,width,height,file\n";
    for (const auto& r : rows) {
        c.out << r["stimulus_id"].get<std::string>() << ',' << r["observers"] << ',' << r["fixations"] << ','
              << r["width"] << ',' << r["height"] << ',' << r["file"].get<std::string>() << '\n';
    }
}

// ---- score --------------------------------------------------------------

struct ScoreOpts {
    std::string pred;
    std::string gt_fix;
    std::string gt_map;
    std::string negatives;
    std::string negatives_size;
    std::string stimulus;
    double sigma = 30.0;
    std::string blur = "spatial";
};

void cmd_score(Ctx& c, const ScoreOpts& o) {
    if (o.pred.empty()) throw ValidationError("score: --pred is required");
    if (o.gt_fix.empty()) throw ValidationError("score: --gt-fix is required");
    const fixmap::BlurSpec blur{o.sigma, parse_domain(o.blur)};
    blur.validate();
    const auto neg_size = parse_size(o.negatives_size);

    const DensityMap pred = io::read_density(o.pred);
    const fixmap::Size frame = pred.size();
    fixmap::StimulusSizes sizes;
    sizes.fallback = frame;
    const auto gt_sets = fixmap::parse_fixations_file(o.gt_fix, sizes);

    std::string stimulus = o.stimulus;
    if (stimulus.empty()) {
        for (const auto& s : gt_sets) {
            if (stimulus.empty()) {
                stimulus = s.stimulus_id;
            } else if (s.stimulus_id != stimulus) {
                throw ValidationError("score: ground-truth fixations cover several stimuli; pass --stimulus");
            }
        }
    }
    std::vector<FixationSet> own;
    for (const auto& s : gt_sets) {
        if (s.stimulus_id == stimulus) own.push_back(s);
    }
    if (own.empty()) throw ValidationError("score: no ground-truth fixations for stimulus '" + stimulus + "'");
    const FixationSet gt_fix = fixmap::aggregate(own);

    const DensityMap gt_map = o.gt_map.empty() ? fixmap::blur_density(fixmap::rasterize(gt_fix), blur)
                                               : io::read_density(o.gt_map);

    // Shuffled-AUC negatives: other stimuli's fixations, mapped into this frame.
    FixationSet negatives{stimulus, "negatives", {}, frame};
    std::vector<FixationSet> pool;
    if (!o.negatives.empty()) {
        fixmap::StimulusSizes nsizes;
        nsizes.fallback = neg_size ? *neg_size : frame;
        pool = fixmap::parse_fixations_file(o.negatives, nsizes);
    } else {
        pool = gt_sets;
    }
    for (const auto& s : pool) {
        if (s.stimulus_id == stimulus) continue;
        const auto r = fixmap::rescale_fixations(s, frame);
        negatives.points.insert(negatives.points.end(), r.points.begin(), r.points.end());
    }

    const metrics::MetricReport rep = metrics::score_pair(pred, gt_fix, gt_map, negatives, c.g.seed);
    fs::create_directories(c.out_dir);
    std::string body;
    if (c.json_output()) {
        json j;
        j["schema_version"] = kSchemaVersion;
        j["stimulus_id"] = stimulus;
        j["seed"] = c.g.seed;
        j["scores"] = json::parse(metrics::to_json(rep));
        body = j.dump(2) + '\n';
        write_text(c.out_dir / "score.json", body);
    } else {
        body = "schema_version,stimulus_id," + metrics::csv_header() + '\n' + std::to_string(kSchemaVersion) + ',' +
               stimulus + ',' + metrics::to_csv_row(rep) + '\n';
        write_text(c.out_dir / "score.csv", body);
    }
    c.out << body;
    for (const auto& issue : rep.issues) c.err << "note: " << issue.metric << ": " << issue.message << '\n';
}

// ---- sweep --------------------------------------------------------------

struct SweepOpts {
    std::string dataset;
    double sigma_min = 1.0;
    double sigma_max = 100.0;
    double sigma_step = 1.0;
    std::string blur = "spatial";
    bool pairs = false;
    bool svg = true;
};

void cmd_sweep(Ctx& c, const SweepOpts& o) {
    experiments::SweepConfig cfg;
    cfg.sigmas = experiments::sigma_grid(o.sigma_min, o.sigma_max, o.sigma_step);
    cfg.domain = parse_domain(o.blur);
    cfg.seed = c.g.seed;
    cfg.jobs = c.g.jobs;
    const auto ds = require_dataset(o.dataset, "sweep");
    const auto r = experiments::run_sigma_sweep(ds, cfg);

    fs::create_directories(c.out_dir);
    write_text(c.out_dir / "sweep.csv", csv_text([&](std::ostream& s) { report::write_sweep_csv(s, r); }));
    const std::string summary = report::sweep_summary_json(r, c.g.seed);
    write_text(c.out_dir / "summary.json", summary);
    if (o.svg) write_text(c.out_dir / "sweep.svg", report::sweep_svg(r));
    if (o.pairs) {
        write_text(c.out_dir / "sweep_pairs.csv", csv_text([&](std::ostream& s) { report::write_sweep_pairs_csv(s, r); }));
    }

    if (c.json_output()) {
        c.out << summary;
        return;
    }
    c.out << "metric,median_sigma_" << text::format_double(r.sigmas.front()) << ",median_sigma_"
          << text::format_double(r.sigmas.back()) << '\n';
    for (std::size_t m = 0; m < experiments::kMetricCount; ++m) {
        c.out << metrics::kMetricNames[m] << ',' << text::format_fixed(r.curves[m].median.front(), 4) << ','
              << text::format_fixed(r.curves[m].median.back(), 4) << '\n';
    }
}

// ---- congruency ---------------------------------------------------------

struct CongruencyOpts {
    std::string dataset;
    double sigma = 30.0;
    std::string blur = "spatial";
};

void cmd_congruency(Ctx& c, const CongruencyOpts& o) {
    experiments::CongruencyConfig cfg;
    cfg.sigma = o.sigma;
    cfg.domain = parse_domain(o.blur);
    cfg.seed = c.g.seed;
    cfg.jobs = c.g.jobs;
    const auto ds = require_dataset(o.dataset, "congruency");
    const auto r = experiments::run_congruency(ds, cfg);

    fs::create_directories(c.out_dir);
    write_text(c.out_dir / "congruency.csv", csv_text([&](std::ostream& s) { report::write_congruency_csv(s, r); }));
    const std::string table = report::congruency_table(r);
    write_text(c.out_dir / "congruency_table.csv", table);
    const std::string summary = report::congruency_summary_json(r, c.g.seed);
    write_text(c.out_dir / "summary.json", summary);
    c.out << (c.json_output() ? summary : table);
}

// ---- eval ---------------------------------------------------------------

struct EvalOpts {
    std::string dataset;
    std::string pred;
    std::string compare;
    std::vector<std::string> labels;
    double sigma = 30.0;
    std::string blur = "spatial";
};

void cmd_eval(Ctx& c, const EvalOpts& o) {
    if (o.pred.empty()) throw ValidationError("eval: --pred is required");
    const std::size_t runs_wanted = o.compare.empty() ? 1 : 2;
    if (!o.labels.empty() && o.labels.size() != runs_wanted) {
        throw ValidationError("eval: --labels needs " + std::to_string(runs_wanted) + " value(s)");
    }
    const auto label = [&](std::size_t i) {
        if (!o.labels.empty()) return o.labels[i];
        return std::string(i == 0 ? "a" : "b");
    };
    experiments::EvalConfig cfg;
    cfg.sigma = o.sigma;
    cfg.domain = parse_domain(o.blur);
    cfg.jobs = c.g.jobs;
    const auto ds = require_dataset(o.dataset, "eval");

    std::vector<experiments::ModelEvalResult> runs;
    runs.push_back(experiments::evaluate_model_outputs(o.pred, ds, cfg, label(0)));
    std::optional<experiments::ModelComparison> cmp;
    if (!o.compare.empty()) {
        runs.push_back(experiments::evaluate_model_outputs(o.compare, ds, cfg, label(1)));
        cmp = experiments::compare_models(runs[0], runs[1]);
    }
    for (const auto& run : runs) {
        for (const auto& im : run.images) {
            for (const auto& issue : im.report.issues) {
                c.err << "note: " << run.label << '/' << im.image_id << ": " << issue.metric << ": " << issue.message
                      << '\n';
            }
        }
    }

    fs::create_directories(c.out_dir);
    write_text(c.out_dir / "model_eval.csv", csv_text([&](std::ostream& s) { report::write_model_eval_csv(s, runs); }));
    const std::string summary = report::eval_summary_json(runs, cmp);
    write_text(c.out_dir / "summary.json", summary);
    std::string table;
    if (cmp) {
        table = csv_text([&](std::ostream& s) { report::write_ttest_csv(s, *cmp); });
        write_text(c.out_dir / "ttest.csv", table);
    } else {
        table = "run,metric,mean,sd\n";
        const auto& run = runs.front();
        for (std::size_t k = 0; k < experiments::kAccuracyMetrics.size(); ++k) {
            table += run.label + ',' + std::string(metrics::kMetricNames[experiments::kAccuracyMetrics[k]]) + ',' +
                     text::format_double(run.mean[k]) + ',' + text::format_double(run.sd[k]) + '\n';
        }
    }
    c.out << (c.json_output() ? summary : table);
}

// ---- synth --------------------------------------------------------------

struct SynthOpts {
    experiments::SyntheticSpec spec;
    bool null_model = false;
};

void cmd_synth(Ctx& c, const SynthOpts& o) {
    o.spec.validate();
    fs::create_directories(c.out_dir);
    const auto ds = experiments::write_synthetic_dataset(c.out_dir, o.spec, c.g.seed, o.null_model);
    std::size_t fix = 0;
    for (const auto& s : ds.hc) fix += s.points.size();
    if (c.json_output()) {
        json j;
        j["schema_version"] = kSchemaVersion;
        j["command"] = "synth";
        j["seed"] = c.g.seed;
        j["stimuli"] = ds.stimuli.size();
        j["hc_sets"] = ds.hc.size();
        j["lg_sets"] = ds.lg.size();
        j["hc_fixations"] = fix;
        c.out << j.dump(2) << '\n';
    } else {
        c.out << "stimuli,hc_sets,lg_sets,hc_fixations\n"
              << ds.stimuli.size() << ',' << ds.hc.size() << ',' << ds.lg.size() << ',' << fix << '\n';
    }
}

// ---- driver -------------------------------------------------------------

void write_error_log(const fs::path& dir, const std::string& command, const std::vector<Failure>& failures) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = command;
    json list = json::array();
    for (const auto& f : failures) list.push_back({{"item", f.item}, {"message", f.message}});
    j["errors"] = std::move(list);
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream(dir / "errors.json", std::ios::binary) << j.dump(2) << '\n';
}

void add_blur_option(CLI::App* sub, std::string& target) {
    sub->add_option("--blur", target, "Blur domain")->check(CLI::IsMember({"spatial", "fourier"}))->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Saliency benchmark toolkit", "salbench"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--config", g.config, "JSON config file");
    app.add_option("--seed", g.seed, "Seed for every random draw")->capture_default_str();
    app.add_option("--jobs", g.jobs, "Worker threads (0 = all cores)")->capture_default_str();
    app.add_option("--output-dir", g.output_dir, "Directory for result files")->capture_default_str();
    app.add_option("--format", g.format, "Console and score output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    PreprocessOpts pre;
    auto* s_pre = app.add_subcommand("preprocess", "Convert HC images to LG (gray, 64 px high)");
    s_pre->add_option("input_dir", pre.input_dir, "Directory of source images");
    s_pre->add_option("--height", pre.height, "Target height")->capture_default_str();
    s_pre->add_option("--width", pre.width, "Fixed target width (0 keeps aspect)")->capture_default_str();
    s_pre->add_flag("--keep-linear", pre.keep_linear, "Store linear luminance instead of sRGB-encoded gray");

    DensityOpts den;
    auto* s_den = app.add_subcommand("density", "Blurred fixation maps per stimulus (NPY + PNG)");
    s_den->add_option("dataset", den.dataset, "Dataset directory");
    s_den->add_option("--fixations", den.fixations, "Fixation CSV instead of the dataset's own");
    s_den->add_option("--size", den.size, "Stimulus size WIDTHxHEIGHT for ids without one");
    s_den->add_option("--condition", den.condition, "Dataset condition")
        ->check(CLI::IsMember({"hc", "lg"}))
        ->capture_default_str();
    s_den->add_option("--sigma", den.sigma, "Gaussian sigma in pixels")->capture_default_str();
    add_blur_option(s_den, den.blur);

    ScoreOpts sc;
    auto* s_sc = app.add_subcommand("score", "Score one saliency map against fixations");
    s_sc->add_option("--pred", sc.pred, "Predicted map (.npy or image)");
    s_sc->add_option("--gt-fix", sc.gt_fix, "Ground-truth fixation CSV");
    s_sc->add_option("--gt-map", sc.gt_map, "Ground-truth density map (default: blurred --gt-fix)");
    s_sc->add_option("--negatives", sc.negatives, "Fixation CSV for shuffled-AUC negatives");
    s_sc->add_option("--negatives-size", sc.negatives_size, "Frame WIDTHxHEIGHT of the negatives");
    s_sc->add_option("--stimulus", sc.stimulus, "Stimulus id to score");
    s_sc->add_option("--sigma", sc.sigma, "Sigma for the ground-truth map")->capture_default_str();
    add_blur_option(s_sc, sc.blur);

    SweepOpts sw;
    auto* s_sw = app.add_subcommand("sweep", "Blur sigma sweep of LG vs HC fixation maps");
    s_sw->add_option("dataset", sw.dataset, "Dataset directory");
    s_sw->add_option("--sigma-min", sw.sigma_min)->capture_default_str();
    s_sw->add_option("--sigma-max", sw.sigma_max)->capture_default_str();
    s_sw->add_option("--sigma-step", sw.sigma_step)->capture_default_str();
    s_sw->add_flag("--pairs", sw.pairs, "Also write per-pair scores");
    s_sw->add_flag("--svg,!--no-svg", sw.svg, "Write sweep.svg");
    add_blur_option(s_sw, sw.blur);

    CongruencyOpts co;
    auto* s_co = app.add_subcommand("congruency", "Leave-one-out inter-observer congruency");
    s_co->add_option("dataset", co.dataset, "Dataset directory");
    s_co->add_option("--sigma", co.sigma)->capture_default_str();
    add_blur_option(s_co, co.blur);

    EvalOpts ev;
    auto* s_ev = app.add_subcommand("eval", "Score model predictions, optionally comparing two runs");
    s_ev->add_option("dataset", ev.dataset, "Dataset directory");
    s_ev->add_option("--pred", ev.pred, "Prediction directory");
    s_ev->add_option("--compare", ev.compare, "Second prediction directory");
    s_ev->add_option("--labels", ev.labels, "Run labels")->delimiter(',');
    s_ev->add_option("--sigma", ev.sigma, "Ground-truth map sigma")->capture_default_str();
    add_blur_option(s_ev, ev.blur);

    SynthOpts sy;
    auto* s_sy = app.add_subcommand("synth", "Write a seeded synthetic dataset");
    s_sy->add_option("--stimuli", sy.spec.stimuli)->capture_default_str();
    s_sy->add_option("--observers", sy.spec.observers)->capture_default_str();
    s_sy->add_option("--fixations", sy.spec.fixations_per_observer, "Fixations per observer")->capture_default_str();
    s_sy->add_option("--jitter", sy.spec.jitter_px, "LG jitter in pixels")->capture_default_str();
    s_sy->add_option("--loci", sy.spec.loci)->capture_default_str();
    s_sy->add_option("--loci-min", sy.spec.loci_min)->capture_default_str();
    s_sy->add_option("--width", sy.spec.width)->capture_default_str();
    s_sy->add_option("--height", sy.spec.height)->capture_default_str();
    s_sy->add_option("--spread-min", sy.spec.spread_min_px)->capture_default_str();
    s_sy->add_option("--spread-max", sy.spec.spread_max_px)->capture_default_str();
    s_sy->add_flag("--images,!--no-images", sy.spec.render_images, "Render stimulus PNGs");
    s_sy->add_flag("--null", sy.null_model, "Sample LG independently from the same layouts");

    std::string command = "salbench";
    std::vector<Failure> failures;
    int code = kExitOk;
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        command = app.get_subcommands().front()->get_name();
        if (!g.config.empty()) apply_config(app, g.config);

        Ctx ctx{g, out, err, fs::path(g.output_dir), {}};
        if (command == "preprocess") cmd_preprocess(ctx, pre);
        else if (command == "density") cmd_density(ctx, den);
        else if (command == "score") cmd_score(ctx, sc);
        else if (command == "sweep") cmd_sweep(ctx, sw);
        else if (command == "congruency") cmd_congruency(ctx, co);
        else if (command == "eval") cmd_eval(ctx, ev);
        else if (command == "synth") cmd_synth(ctx, sy);
        failures = std::move(ctx.failures);
        if (!failures.empty()) code = kExitFailure;
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        failures.push_back({"command line", e.what()});
        code = kExitUsage;
    } catch (const ConfigError& e) {
        failures.push_back({"config", e.what()});
        code = kExitFailure;
    } catch (const std::exception& e) {
        failures.push_back({command, e.what()});
        code = kExitFailure;
    }

    const fs::path out_dir(g.output_dir);
    if (code == kExitOk) {
        std::error_code ec;
        fs::remove(out_dir / "errors.json", ec);
        return code;
    }
    for (const auto& f : failures) {
        err << "error: " << (f.item == command ? std::string() : f.item + ": ") << f.message << '\n';
    }
    write_error_log(out_dir, command, failures);
    return code;
}

}  // namespace salbench::cli
