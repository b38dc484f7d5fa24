#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ogseg/baseline.hpp"
#include "ogseg/detail/parallel.hpp"
#include "ogseg/error.hpp"
#include "ogseg/image_io.hpp"
#include "ogseg/segmentation.hpp"

namespace ogseg {

struct Confusion {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;

    Confusion& operator+=(const Confusion& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
    friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct MaskMetrics {
    Confusion counts;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Foreground is the positive class.
inline Confusion confusion(const BinaryMask& pred, const BinaryMask& truth) {
    if (pred.width != truth.width || pred.height != truth.height)
        throw Error(ErrorCode::dimension_mismatch, "prediction and ground truth differ in size");
    Confusion c;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred.data[i];
        const bool t = truth.data[i];
        c.tp += p && t;
        c.fp += p && !t;
        c.fn += !p && t;
    }
    return c;
}

inline double harmonic_f1(double precision, double recall) {
    if (precision <= 0.0 || recall <= 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

// An empty prediction against an empty truth scores 1 across the board.
// Otherwise an undefined ratio scores 0.
inline MaskMetrics metrics(const Confusion& c) {
    if (c.tp < 0 || c.fp < 0 || c.fn < 0) throw Error(ErrorCode::invalid_argument, "confusion counts must be nonnegative");
    MaskMetrics m;
    m.counts = c;
    const bool nothing = c.tp == 0 && c.fp == 0 && c.fn == 0;
    if (nothing) {
        m.precision = m.recall = m.f1 = 1.0;
        return m;
    }
    m.precision = c.tp + c.fp > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
    m.recall = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
    m.f1 = harmonic_f1(m.precision, m.recall);
    return m;
}

inline MaskMetrics metrics(std::int64_t tp, std::int64_t fp, std::int64_t fn) { return metrics(Confusion{tp, fp, fn}); }

// ---------------------------------------------------------------------------
// Manifest: one `<image>\t<mask>[\t<label>]` entry per line, '#' starts a comment line.
// Relative paths are resolved against the manifest's directory.

struct ManifestEntry {
    std::filesystem::path image;
    std::filesystem::path mask;
    std::string label;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
};

inline DatasetManifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir = {}) {
    DatasetManifest manifest;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (std::size_t tab; (tab = line.find('\t', start)) != std::string::npos; start = tab + 1)
            fields.push_back(line.substr(start, tab - start));
        fields.push_back(line.substr(start));
        if (fields.size() < 2 || fields.size() > 3 || fields[0].empty() || fields[1].empty())
            throw Error(ErrorCode::invalid_argument, "manifest line " + std::to_string(lineno) +
                                                         " must be <image>TAB<mask>[TAB<label>]");
        ManifestEntry e;
        e.image = std::filesystem::path(fields[0]);
        e.mask = std::filesystem::path(fields[1]);
        if (e.image.is_relative()) e.image = base_dir / e.image;
        if (e.mask.is_relative()) e.mask = base_dir / e.mask;
        if (fields.size() == 3) e.label = fields[2];
        manifest.entries.push_back(std::move(e));
    }
    return manifest;
}

inline DatasetManifest load_manifest(const std::filesystem::path& path) {
    return parse_manifest(detail::read_file(path), path.parent_path());
}

// ---------------------------------------------------------------------------

enum class Method { proposed, kmeans2 };

inline std::optional<Method> parse_method(const std::string& name) {
    if (name == "proposed") return Method::proposed;
    if (name == "kmeans2") return Method::kmeans2;
    return std::nullopt;
}

inline const char* to_string(Method m) { return m == Method::proposed ? "proposed" : "kmeans2"; }

struct EntryResult {
    std::string path;
    std::string label;
    MaskMetrics metrics;
};

struct EntryFailure {
    std::string path;
    std::string message;
};

struct EvaluationReport {
    Method method = Method::proposed;
    std::vector<EntryResult> entries;  // sorted by path
    std::vector<EntryFailure> failures;
    MaskMetrics micro;  // pooled counts
    MaskMetrics macro;  // mean of per-entry ratios; counts hold the pooled totals

    bool ok() const noexcept { return failures.empty(); }
};

/// Sorts entries by path, then fills micro (pooled counts) and macro (mean of per-entry ratios).
inline void aggregate(EvaluationReport& report) {
    std::sort(report.entries.begin(), report.entries.end(),
              [](const EntryResult& a, const EntryResult& b) { return a.path < b.path; });
    Confusion pooled;
    double p = 0.0, r = 0.0, f = 0.0;
    for (const auto& e : report.entries) {
        pooled += e.metrics.counts;
        p += e.metrics.precision;
        r += e.metrics.recall;
        f += e.metrics.f1;
    }
    report.micro = metrics(pooled);
    report.macro = MaskMetrics{};
    report.macro.counts = pooled;
    if (!report.entries.empty()) {
        const auto count = static_cast<double>(report.entries.size());
        report.macro.precision = p / count;
        report.macro.recall = r / count;
        report.macro.f1 = f / count;
    }
}

inline BinaryMask run_method(Method method, const GrayImage& img, const SegmentationConfig& cfg) {
    if (method == Method::kmeans2) return kmeans2_image(img, cfg.block_size, cfg.threads);
    return segment_image(img, cfg);
}

/// Unreadable or mismatched entries are recorded as failures and left out of the aggregates.
inline EvaluationReport evaluate_dataset(const DatasetManifest& manifest, Method method, const SegmentationConfig& cfg) {
    if (manifest.entries.empty()) throw Error(ErrorCode::invalid_argument, "manifest has no entries");
    cfg.validate();

    struct Slot {
        std::optional<MaskMetrics> metrics;
        std::string error;
    };
    std::vector<Slot> slots(manifest.entries.size());
    SegmentationConfig inner = cfg;
    inner.threads = 1;
    detail::parallel_for(slots.size(), cfg.threads, [&](std::size_t i) {
        const ManifestEntry& e = manifest.entries[i];
        try {
            const GrayImage img = load_gray(e.image);
            const BinaryMask truth = load_mask(e.mask);
            slots[i].metrics = metrics(confusion(run_method(method, img, inner), truth));
        } catch (const std::exception& ex) {
            slots[i].error = ex.what();
        }
    });

    EvaluationReport report;
    report.method = method;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const std::string path = manifest.entries[i].image.string();
        if (slots[i].metrics) {
            report.entries.push_back({path, manifest.entries[i].label, *slots[i].metrics});
        } else {
            report.failures.push_back({path, slots[i].error});
        }
    }
    aggregate(report);
    return report;
}

inline nlohmann::json to_json(const MaskMetrics& m) {
    return {{"tp", m.counts.tp}, {"fp", m.counts.fp},   {"fn", m.counts.fn},
            {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

inline nlohmann::json to_json(const EvaluationReport& report) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : report.entries) {
        nlohmann::json j = to_json(e.metrics);
        j["path"] = e.path;
        if (!e.label.empty()) j["label"] = e.label;
        entries.push_back(std::move(j));
    }
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& fl : report.failures) failures.push_back({{"path", fl.path}, {"error", fl.message}});
    nlohmann::json macro = {{"precision", report.macro.precision}, {"recall", report.macro.recall}, {"f1", report.macro.f1}};
    return {{"method", to_string(report.method)},
            {"entries", std::move(entries)},
            {"micro", to_json(report.micro)},
            {"macro", std::move(macro)},
            {"failures", std::move(failures)}};
}

}  // namespace ogseg
