#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "devpool/devpool.hpp"

namespace devpool::cli {

enum ExitCode : int { ok = 0, runtime_error = 1, usage_error = 2 };

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Index selection plus the per-run override flags shared by `score` and `evaluate`.
struct IndexOptions {
    std::string index_name;
    std::string index_config;
    std::optional<std::string> pooling;
    std::optional<double> alpha;
    std::optional<double> rho;
    std::optional<std::string> mct;
    std::optional<double> c;
    bool no_downsample = false;

    void attach(CLI::App& cmd)
    {
        auto* name = cmd.add_option("--index,-i", index_name, "built-in index name (see README)");
        auto* cfg = cmd.add_option("--index-config", index_config, "JSON file defining a custom index");
        name->excludes(cfg);
        cmd.add_option("--pooling", pooling, "override pooling: mean, sd, mad, dd, minkowski")
            ->check(CLI::IsMember({"mean", "sd", "mad", "dd", "minkowski"}));
        cmd.add_option("--alpha", alpha, "DD blend weight in [0, 1]")->check(CLI::Range(0.0, 1.0));
        cmd.add_option("--rho", rho, "Minkowski deviation order, >= 1");
        cmd.add_option("--mct", mct, "Minkowski central tendency: mean or median")
            ->check(CLI::IsMember({"mean", "median"}));
        cmd.add_option("--c", c, "GMS stability constant, > 0");
        cmd.add_flag("--no-downsample", no_downsample, "skip the 2x downsampling step");
    }

    /// Resolves the index and applies overrides; inconsistent combinations are usage errors.
    [[nodiscard]] IndexSpec resolve() const
    {
        IndexSpec spec;
        if (!index_config.empty()) {
            try {
                spec = load_index_config(index_config);
            } catch (InvalidInput const& e) {
                throw UsageError(e.what());
            }
        } else {
            std::string const name = index_name.empty() ? "gmsd" : index_name;
            auto found = find_index(name);
            if (!found) {
                throw UsageError("unknown index '" + name + "'");
            }
            spec = std::move(*found);
        }

        std::vector<std::string> changes;
        if (pooling) {
            spec.pooling.strategy = parse_strategy(*pooling);
            changes.push_back("pooling=" + *pooling);
        }
        Strategy const strategy = spec.pooling.strategy;
        if (alpha) {
            if (strategy != Strategy::DD) {
                throw UsageError("--alpha only applies to dd pooling");
            }
            spec.pooling.alpha = *alpha;
            changes.push_back("alpha=" + format(*alpha));
        }
        if (rho || mct) {
            if (strategy != Strategy::MinkowskiDeviation) {
                throw UsageError("--rho and --mct only apply to minkowski pooling");
            }
            if (rho) {
                if (!(*rho >= 1.0)) {
                    throw UsageError("--rho must be >= 1");
                }
                spec.pooling.rho = *rho;
                changes.push_back("rho=" + format(*rho));
            }
            if (mct) {
                spec.pooling.mct = parse_central_tendency(*mct);
                changes.push_back("mct=" + *mct);
            }
        }
        if (c) {
            auto* gms = std::get_if<GmsParams>(&spec.map_params);
            if (gms == nullptr) {
                throw UsageError("--c only applies to GMS-based indices");
            }
            if (!(*c > 0.0)) {
                throw UsageError("--c must be positive");
            }
            gms->c = *c;
            changes.push_back("c=" + format(*c));
        }
        if (no_downsample) {
            spec.preprocess.downsample2 = false;
            changes.push_back("no-downsample");
        }
        if (!changes.empty()) {
            std::string suffix;
            for (auto const& ch : changes) {
                suffix += (suffix.empty() ? "" : ",") + ch;
            }
            spec.name += "[" + suffix + "]";
            spec.polarity = expected_polarity(spec.map_kind, spec.pooling.strategy);
        }
        spec.validate();
        return spec;
    }

    static std::string format(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", v);
        return buf;
    }
};

inline std::string format_score(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_stat(std::optional<double> v)
{
    if (!v) {
        return "n/a";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", *v);
    return buf;
}

inline std::vector<std::size_t> parse_sizes(std::string const& text)
{
    std::vector<std::size_t> sizes;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            unsigned long long v = 0;
            if (auto caret = item.find('^'); caret != std::string::npos) {
                unsigned long long const base = std::stoull(item.substr(0, caret), &used);
                unsigned long long const exp = std::stoull(item.substr(caret + 1));
                if (used != caret || exp > 62) {
                    throw std::invalid_argument(item);
                }
                v = 1;
                for (unsigned long long i = 0; i < exp; ++i) {
                    v *= base;
                }
            } else {
                v = std::stoull(item, &used);
                if (used != item.size()) {
                    throw std::invalid_argument(item);
                }
            }
            sizes.push_back(static_cast<std::size_t>(v));
        } catch (std::exception const&) {
            throw UsageError("invalid size '" + item + "'");
        }
    }
    return sizes;
}

inline int cmd_score(std::string const& ref, std::string const& dist, IndexOptions const& idx, std::ostream& out)
{
    IndexSpec const spec = idx.resolve();
    QualityScore const s = score_files(ref, dist, spec);
    out << s.index_name << '\t' << format_score(s.value) << '\t' << to_string(spec.polarity) << '\n';
    return ok;
}

struct EvaluateOptions {
    std::string manifest;
    std::string output;
    std::string csv;
    std::string mos_polarity = "higher";
    unsigned jobs = 0;
};

inline int cmd_evaluate(EvaluateOptions const& o, IndexOptions const& idx, std::ostream& out, std::ostream& err)
{
    IndexSpec const spec = idx.resolve();
    DatasetManifest manifest;
    try {
        manifest = load_manifest(o.manifest);
    } catch (InvalidInput const& e) {
        throw DatasetError(e.what());
    }
    manifest.mos_polarity = parse_polarity(o.mos_polarity);
    for (auto const& bad : manifest.malformed_rows) {
        err << "row " << bad.row << ": " << bad.reason << '\n';
    }
    EvaluationReport const report = evaluate_dataset(manifest, spec, EvaluationOptions{o.jobs});
    for (auto const& ex : report.exclusions) {
        if (std::none_of(manifest.malformed_rows.begin(), manifest.malformed_rows.end(),
                         [&](Exclusion const& m) { return m.row == ex.row; })) {
            err << "row " << ex.row << ": excluded: " << ex.reason << '\n';
        }
    }
    if (!o.output.empty()) {
        std::ofstream f(o.output);
        f << to_json(report).dump(2) << '\n';
        if (!f) {
            throw Error("cannot write '" + o.output + "'");
        }
    }
    if (!o.csv.empty()) {
        std::ofstream f(o.csv);
        write_scores_csv(f, report);
        if (!f) {
            throw Error("cannot write '" + o.csv + "'");
        }
    }
    out << "index=" << report.index_name << " n=" << report.scores.size() << " excluded=" << report.exclusions.size()
        << " SRC=" << format_stat(report.src) << " PCC=" << format_stat(report.pcc)
        << " RMSE=" << format_stat(report.rmse) << " fit="
        << (report.logistic ? (report.logistic->converged ? "converged" : "not-converged") : "failed") << '\n';
    return ok;
}

inline int cmd_bench(std::string const& sizes, std::size_t runs, std::uint64_t seed, std::string const& output,
                     std::ostream& out)
{
    BenchOptions opt;
    if (!sizes.empty()) {
        opt.sizes = parse_sizes(sizes);
    }
    opt.runs = runs;
    opt.seed = seed;
    try {
        validate_bench_options(opt);
    } catch (InvalidInput const& e) {
        throw UsageError(e.what());
    }
    BenchResult const r = run_pooling_bench(opt);
    if (output.empty()) {
        write_bench_csv(out, r);
    } else {
        std::ofstream f(output);
        write_bench_csv(f, r);
        if (!f) {
            throw Error("cannot write '" + output + "'");
        }
    }
    return ok;
}

/// Sum(w_i * SRC_i) / Sum(w_i), likewise for PCC, over evaluation reports given as PATH:WEIGHT.
inline int cmd_weighted_avg(std::vector<std::string> const& items, std::ostream& out)
{
    double wsum = 0.0;
    double src = 0.0;
    double pcc = 0.0;
    for (auto const& item : items) {
        auto const colon = item.rfind(':');
        if (colon == std::string::npos || colon == 0) {
            throw UsageError("expected REPORT:WEIGHT, got '" + item + "'");
        }
        double w = 0.0;
        try {
            std::size_t used = 0;
            w = std::stod(item.substr(colon + 1), &used);
            if (used != item.size() - colon - 1) {
                throw std::invalid_argument(item);
            }
        } catch (std::exception const&) {
            throw UsageError("invalid weight in '" + item + "'");
        }
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw UsageError("weights must be positive: '" + item + "'");
        }
        std::string const path = item.substr(0, colon);
        std::ifstream in(path);
        if (!in) {
            throw Error("cannot open report '" + path + "'");
        }
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
        } catch (nlohmann::json::exception const& e) {
            throw Error("'" + path + "': " + e.what());
        }
        for (char const* key : {"src", "pcc"}) {
            if (!doc.contains(key) || !doc[key].is_number()) {
                throw Error("'" + path + "': missing numeric field '" + key + "'");
            }
        }
        src += w * doc["src"].get<double>();
        pcc += w * doc["pcc"].get<double>();
        wsum += w;
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "weighted SRC=%.6f PCC=%.6f total_weight=%g\n", src / wsum, pcc / wsum, wsum);
    out << buf;
    return ok;
}

/// Entry point shared by the executable and the tests. Returns the process exit code.
inline int run(int argc, char const* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Full-reference image quality scoring with deviation pooling"};
    app.require_subcommand(1);

    IndexOptions score_idx;
    std::string ref_path;
    std::string dist_path;
    auto* score = app.add_subcommand("score", "score one reference/distorted pair");
    score->add_option("reference", ref_path, "reference image (PNG or BMP)")->required();
    score->add_option("distorted", dist_path, "distorted image (PNG or BMP)")->required();
    score_idx.attach(*score);

    IndexOptions eval_idx;
    EvaluateOptions eval;
    auto* evaluate = app.add_subcommand("evaluate", "score a manifest and compute SRC/PCC/RMSE");
    evaluate->add_option("manifest", eval.manifest, "CSV with header ref,dist,mos[,tag]")->required();
    evaluate->add_option("--output,-o", eval.output, "write the JSON report here");
    evaluate->add_option("--csv", eval.csv, "write per-entry scores as CSV here");
    evaluate->add_option("--mos-polarity", eval.mos_polarity, "higher (MOS) or lower (DMOS)")
        ->check(CLI::IsMember({"higher", "lower"}));
    evaluate->add_option("--jobs,-j", eval.jobs, "scoring threads (0 = all cores)");
    eval_idx.attach(*evaluate);

    std::string sizes;
    std::size_t runs = 20;
    std::uint64_t seed = BenchOptions{}.seed;
    std::string bench_out;
    auto* bench = app.add_subcommand("bench", "time mean/SD/MAD/DD-joint pooling versus LS size");
    bench->add_option("--sizes", sizes, "comma-separated element counts, e.g. 2^20,2^22 (default 2^20..2^24)");
    bench->add_option("--runs", runs, "timed runs per size and strategy (>= 5)");
    bench->add_option("--seed", seed, "seed of the synthetic LS buffer");
    bench->add_option("--output,-o", bench_out, "write CSV here instead of stdout");

    std::vector<std::string> reports;
    auto* wavg = app.add_subcommand("weighted-avg", "weight SRC/PCC of several reports, e.g. by image count");
    wavg->add_option("reports", reports, "REPORT.json:WEIGHT items")->required();

    try {
        app.parse(argc, argv);
    } catch (CLI::CallForHelp const&) {
        out << app.help();
        return ok;
    } catch (CLI::ParseError const& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return ok;
        }
        err << "error: " << e.what() << '\n';
        return usage_error;
    }

    try {
        if (*score) {
            return cmd_score(ref_path, dist_path, score_idx, out);
        }
        if (*evaluate) {
            return cmd_evaluate(eval, eval_idx, out, err);
        }
        if (*bench) {
            return cmd_bench(sizes, runs, seed, bench_out, out);
        }
        return cmd_weighted_avg(reports, out);
    } catch (UsageError const& e) {
        err << "usage error: " << e.what() << '\n';
        return usage_error;
    } catch (std::exception const& e) {
        err << "error: " << e.what() << '\n';
        return runtime_error;
    }
}

} // namespace devpool::cli
