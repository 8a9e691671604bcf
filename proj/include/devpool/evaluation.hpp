#pragma once

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "devpool/error.hpp"
#include "devpool/index.hpp"
#include "devpool/logistic.hpp"
#include "devpool/statistics.hpp"

namespace devpool {

struct ManifestEntry {
    std::filesystem::path ref_path;
    std::filesystem::path dist_path;
    double mos = 0.0;
    std::string distortion_tag; // empty when the manifest has no tag
    std::size_t row = 0;        // 1-based line number in the source file
};

/// A row that could not be used, with the reason.
struct Exclusion {
    std::size_t row = 0;
    std::string reason;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    Polarity mos_polarity = Polarity::HigherIsBetter;
    std::vector<Exclusion> malformed_rows;
};

struct EntryScore {
    ManifestEntry entry;
    double score = 0.0;
    std::optional<double> mapped; // absent when no logistic could be fitted
};

struct DistortionSummary {
    std::map<std::string, double> src_by_tag;
    std::optional<double> avg;
    std::optional<double> min;
    std::optional<double> std; // population standard deviation across tags
};

struct EvaluationReport {
    std::string index_name;
    Polarity index_polarity = Polarity::LowerIsBetter;
    Polarity mos_polarity = Polarity::HigherIsBetter;
    std::vector<EntryScore> scores;
    std::vector<Exclusion> exclusions;
    std::optional<double> src; // |Spearman| of raw scores vs MOS
    std::optional<double> pcc; // Pearson of logistic-mapped scores vs MOS
    std::optional<double> rmse;
    std::optional<LogisticParams> logistic;
    std::string fit_error; // why no logistic was fitted, if none was
    DistortionSummary per_distortion;
};

struct EvaluationOptions {
    /// Worker threads for scoring; 0 picks the hardware concurrency.
    unsigned jobs = 0;
};

namespace detail {

// Splits one CSV line; fields may be double-quoted with "" as an escaped quote.
inline std::vector<std::string> split_csv_line(std::string const& line)
{
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char const ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                fields.back() += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.emplace_back();
        } else {
            fields.back() += ch;
        }
    }
    if (quoted) {
        throw InvalidInput("unterminated quote");
    }
    for (auto& f : fields) {
        auto const b = f.find_first_not_of(" \t");
        auto const e = f.find_last_not_of(" \t");
        f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
    }
    return fields;
}

inline double parse_finite(std::string const& text)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (std::exception const&) {
        throw InvalidInput("'" + text + "' is not a number");
    }
    if (used != text.size() || !std::isfinite(v)) {
        throw InvalidInput("'" + text + "' is not a finite number");
    }
    return v;
}

inline double population_std_of(std::vector<double> const& v)
{
    double const m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) {
        ss += (x - m) * (x - m);
    }
    return std::sqrt(ss / static_cast<double>(v.size()));
}

} // namespace detail

/*!
    Parses a manifest with header `ref,dist,mos[,tag]`. Paths are resolved
    relative to base_dir. Malformed data rows are collected in
    malformed_rows rather than aborting the parse; a bad header throws.
*/
inline DatasetManifest parse_manifest(std::istream& in, std::filesystem::path const& base_dir = {})
{
    DatasetManifest manifest;
    std::string line;
    std::size_t row = 0;
    bool have_header = false;
    bool have_tag = false;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        std::vector<std::string> fields;
        try {
            fields = detail::split_csv_line(line);
        } catch (InvalidInput const& e) {
            if (!have_header) {
                throw InvalidInput("manifest header: " + std::string(e.what()));
            }
            manifest.malformed_rows.push_back({row, e.what()});
            continue;
        }
        if (!have_header) {
            bool const ok = (fields.size() == 3 || fields.size() == 4) && fields[0] == "ref" && fields[1] == "dist" &&
                            fields[2] == "mos" && (fields.size() == 3 || fields[3] == "tag");
            if (!ok) {
                throw InvalidInput("manifest header must be 'ref,dist,mos' or 'ref,dist,mos,tag'");
            }
            have_header = true;
            have_tag = fields.size() == 4;
            continue;
        }
        std::size_t const expected = have_tag ? 4 : 3;
        if (fields.size() != expected && !(have_tag && fields.size() == 3)) {
            manifest.malformed_rows.push_back({row, "expected " + std::to_string(expected) + " fields, found " +
                                                        std::to_string(fields.size())});
            continue;
        }
        if (fields[0].empty() || fields[1].empty()) {
            manifest.malformed_rows.push_back({row, "empty image path"});
            continue;
        }
        try {
            ManifestEntry e;
            e.ref_path = base_dir / fields[0];
            e.dist_path = base_dir / fields[1];
            e.mos = detail::parse_finite(fields[2]);
            e.distortion_tag = fields.size() == 4 ? fields[3] : std::string{};
            e.row = row;
            manifest.entries.push_back(std::move(e));
        } catch (InvalidInput const& err) {
            manifest.malformed_rows.push_back({row, std::string("mos: ") + err.what()});
        }
    }
    if (!have_header) {
        throw InvalidInput("manifest is empty");
    }
    return manifest;
}

inline DatasetManifest load_manifest(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("cannot open manifest '" + path.string() + "'");
    }
    return parse_manifest(in, path.parent_path());
}

/// Mean, minimum and population std of the per-tag SRC values.
inline DistortionSummary summarize_distortions(std::map<std::string, double> src_by_tag)
{
    DistortionSummary out;
    out.src_by_tag = std::move(src_by_tag);
    if (out.src_by_tag.empty()) {
        return out;
    }
    std::vector<double> v;
    for (auto const& [tag, src] : out.src_by_tag) {
        v.push_back(src);
    }
    out.avg = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    out.min = *std::min_element(v.begin(), v.end());
    out.std = detail::population_std_of(v);
    return out;
}

/*!
    Scores every manifest entry with `spec` and computes the dataset statistics.

    SRC is rank-based on the raw scores and reported as an absolute value.
    PCC and RMSE compare MOS with the logistic-mapped scores. Entries whose
    images cannot be decoded or scored are excluded and listed; if fewer than
    two usable entries remain, DatasetError is thrown.
*/
inline EvaluationReport evaluate_dataset(DatasetManifest const& manifest, IndexSpec const& spec,
                                         EvaluationOptions const& options = {})
{
    spec.validate();
    EvaluationReport report;
    report.index_name = spec.name;
    report.index_polarity = spec.polarity;
    report.mos_polarity = manifest.mos_polarity;
    report.exclusions = manifest.malformed_rows;

    std::size_t const n = manifest.entries.size();
    std::vector<std::optional<double>> scores(n);
    std::vector<std::string> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            auto const& e = manifest.entries[i];
            try {
                scores[i] = score_files(e.ref_path, e.dist_path, spec).value;
            } catch (Error const& err) {
                errors[i] = err.what();
            }
        }
    };
    unsigned jobs = options.jobs != 0 ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1)));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < jobs; ++t) {
            pool.emplace_back(worker);
        }
        worker();
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (scores[i]) {
            report.scores.push_back({manifest.entries[i], *scores[i], std::nullopt});
        } else {
            report.exclusions.push_back({manifest.entries[i].row, errors[i]});
        }
    }
    std::sort(report.exclusions.begin(), report.exclusions.end(),
              [](Exclusion const& a, Exclusion const& b) { return a.row < b.row; });
    if (report.scores.size() < 2) {
        throw DatasetError("only " + std::to_string(report.scores.size()) + " usable entries out of " +
                           std::to_string(n + manifest.malformed_rows.size()) + "; need at least 2");
    }

    std::vector<double> obj;
    std::vector<double> mos;
    for (auto const& s : report.scores) {
        obj.push_back(s.score);
        mos.push_back(s.entry.mos);
    }
    try {
        report.src = std::abs(spearman(obj, mos));
    } catch (UndefinedCorrelation const&) {
        report.src.reset();
    }

    try {
        LogisticParams const fit = fit_logistic(obj, mos);
        report.logistic = fit;
        auto const mapped = fit.map(obj);
        for (std::size_t i = 0; i < mapped.size(); ++i) {
            report.scores[i].mapped = mapped[i];
        }
        report.rmse = rmse(mapped, mos);
        try {
            report.pcc = pearson(mapped, mos);
        } catch (UndefinedCorrelation const&) {
            report.pcc.reset();
        }
    } catch (InvalidInput const& e) {
        report.fit_error = e.what();
    }

    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_tag;
    for (auto const& s : report.scores) {
        if (!s.entry.distortion_tag.empty()) {
            auto& [o, m] = by_tag[s.entry.distortion_tag];
            o.push_back(s.score);
            m.push_back(s.entry.mos);
        }
    }
    std::map<std::string, double> src_by_tag;
    for (auto const& [tag, om] : by_tag) {
        if (om.first.size() < 2) {
            continue;
        }
        try {
            src_by_tag[tag] = std::abs(spearman(om.first, om.second));
        } catch (UndefinedCorrelation const&) {
        }
    }
    report.per_distortion = summarize_distortions(std::move(src_by_tag));
    return report;
}

inline nlohmann::json to_json(EvaluationReport const& r)
{
    using nlohmann::json;
    auto opt = [](std::optional<double> const& v) { return v ? json(*v) : json(nullptr); };
    json doc;
    doc["index"] = r.index_name;
    doc["index_polarity"] = std::string(to_string(r.index_polarity));
    doc["mos_polarity"] = std::string(to_string(r.mos_polarity));
    doc["n_scored"] = r.scores.size();
    doc["n_excluded"] = r.exclusions.size();
    doc["src"] = opt(r.src);
    doc["pcc"] = opt(r.pcc);
    doc["rmse"] = opt(r.rmse);
    if (r.logistic) {
        doc["logistic"] = {{"beta1", r.logistic->beta[0]},
                           {"beta2", r.logistic->beta[1]},
                           {"beta3", r.logistic->beta[2]},
                           {"beta4", r.logistic->beta[3]},
                           {"converged", r.logistic->converged},
                           {"iterations", r.logistic->iterations}};
    } else {
        doc["logistic"] = {{"converged", false}, {"error", r.fit_error}};
    }
    json tags = json::object();
    for (auto const& [tag, src] : r.per_distortion.src_by_tag) {
        tags[tag] = src;
    }
    doc["per_distortion"] = {{"src", tags},
                             {"avg", opt(r.per_distortion.avg)},
                             {"min", opt(r.per_distortion.min)},
                             {"std", opt(r.per_distortion.std)}};
    json scores = json::array();
    for (auto const& s : r.scores) {
        scores.push_back({{"row", s.entry.row},
                          {"ref", s.entry.ref_path.string()},
                          {"dist", s.entry.dist_path.string()},
                          {"mos", s.entry.mos},
                          {"tag", s.entry.distortion_tag},
                          {"score", s.score},
                          {"mapped", opt(s.mapped)}});
    }
    doc["scores"] = std::move(scores);
    json excl = json::array();
    for (auto const& e : r.exclusions) {
        excl.push_back({{"row", e.row}, {"reason", e.reason}});
    }
    doc["exclusions"] = std::move(excl);
    return doc;
}

/// Flat per-entry table: row,ref,dist,mos,tag,score,mapped
inline void write_scores_csv(std::ostream& out, EvaluationReport const& r)
{
    auto quote = [](std::string const& s) {
        if (s.find_first_of(",\"") == std::string::npos) {
            return s;
        }
        std::string q = "\"";
        for (char c : s) {
            q += c == '"' ? std::string("\"\"") : std::string(1, c);
        }
        return q + "\"";
    };
    out << "row,ref,dist,mos,tag,score,mapped\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (auto const& s : r.scores) {
        out << s.entry.row << ',' << quote(s.entry.ref_path.string()) << ',' << quote(s.entry.dist_path.string())
            << ',' << num(s.entry.mos) << ',' << quote(s.entry.distortion_tag) << ',' << num(s.score) << ','
            << (s.mapped ? num(*s.mapped) : std::string{}) << '\n';
    }
}

} // namespace devpool
