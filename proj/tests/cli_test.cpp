#include "cli.hpp"

#include <gtest/gtest.h>

#include <regex>
#include <sstream>

#include "test_util.hpp"

namespace ogseg {
namespace {

using testing::slurp;
using testing::TempDir;

struct CliResult {
    int status = -1;
    std::string out;
    std::string err;
};

CliResult run(std::vector<std::string> args) {
    std::ostringstream out, err;
    CliResult r;
    r.status = cli::run(std::move(args), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

/// Writes a two-block synthetic image and returns its path.
std::string synthetic_image(const TempDir& dir) {
    GrayImage img(128, 64);
    for (int b = 0; b < 2; ++b) {
        SynthSpec spec;
        spec.seed = 31 + b;
        const SynthBlock blk = gen_block(spec);
        for (int y = 0; y < 64; ++y)
            for (int x = 0; x < 64; ++x) img.at(64 * b + x, y) = blk.f[y * 64 + x];
    }
    const auto path = dir / "in.pgm";
    save_gray(img, path);
    return path.string();
}

double max_primal(const std::string& log) {
    const std::regex re("max_primal_residual ([0-9.eE+-]+)");
    std::smatch m;
    if (!std::regex_search(log, m, re)) return -1.0;
    return std::stod(m[1]);
}

TEST(CliSegment, DefaultsWriteMask) {
    TempDir dir;
    const std::string in = synthetic_image(dir);
    const CliResult r = run({"segment", "--input", in, "--mask-out", (dir / "m.pbm").string()});
    ASSERT_EQ(r.status, 0) << r.err;
    const BinaryMask m = load_mask(dir / "m.pbm");
    EXPECT_EQ(m.width, 128);
    EXPECT_EQ(m.height, 64);
    EXPECT_GT(count_set(m), 0U);
    EXPECT_EQ(m, segment_image(load_gray(in), SegmentationConfig{}));
}

TEST(CliSegment, RepeatedRunsAreBitIdentical) {
    TempDir dir;
    const std::string in = synthetic_image(dir);
    ASSERT_EQ(run({"segment", "--input", in, "--mask-out", (dir / "a.pbm").string()}).status, 0);
    ASSERT_EQ(run({"segment", "--input", in, "--mask-out", (dir / "b.pbm").string(), "--threads", "3"}).status, 0);
    EXPECT_EQ(slurp(dir / "a.pbm"), slurp(dir / "b.pbm"));
}

TEST(CliSegment, HugeThresholdGivesEmptyMask) {
    TempDir dir;
    const std::string in = synthetic_image(dir);
    ASSERT_EQ(run({"segment", "--input", in, "--mask-out", (dir / "m.pbm").string(), "--fg-threshold", "1e9"}).status, 0);
    EXPECT_EQ(count_set(load_mask(dir / "m.pbm")), 0U);
}

TEST(CliSegment, MoreIterationsLowerVerboseResidual) {
    TempDir dir;
    const std::string in = synthetic_image(dir);
    const CliResult short_run = run({"segment", "--input", in, "--mask-out", (dir / "m.pbm").string(), "--verbose"});
    const CliResult long_run =
        run({"segment", "--input", in, "--mask-out", (dir / "m.pbm").string(), "--verbose", "--iters", "500"});
    ASSERT_EQ(short_run.status, 0);
    ASSERT_EQ(long_run.status, 0);
    EXPECT_NE(short_run.out.find("iter\tr_primal\tr_beta\tr_y\tr_z"), std::string::npos);
    EXPECT_NE(short_run.out.find("\n50\t"), std::string::npos);
    EXPECT_LT(max_primal(long_run.out), max_primal(short_run.out));
    EXPECT_GE(max_primal(long_run.out), 0.0);
}

TEST(CliSegment, WritesLayers) {
    TempDir dir;
    const std::string in = synthetic_image(dir);
    const CliResult r = run({"segment", "--input", in, "--mask-out", (dir / "m.pbm").string(), "--fg-out",
                       (dir / "fg.pgm").string(), "--bg-out", (dir / "bg.pgm").string(), "--lambda1", "100",
                       "--lambda2", "2", "--rho", "1,1,1,1", "--block", "64", "--k", "10"});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(load_gray(dir / "fg.pgm").width, 128);
    EXPECT_EQ(load_gray(dir / "bg.pgm").height, 64);
}

TEST(CliSegment, UsageAndRuntimeErrors) {
    TempDir dir;
    EXPECT_EQ(run({"segment", "--input", "x.pgm"}).status, 1);
    EXPECT_EQ(run({}).status, 1);
    EXPECT_EQ(run({"segment", "--input", "x.pgm", "--mask-out", "m.pbm", "--rho", "1,1"}).status, 1);
    EXPECT_EQ(run({"segment", "--input", "x.pgm", "--mask-out", "m.pbm", "--lambda1", "-3"}).status, 1);
    const CliResult missing = run({"segment", "--input", (dir / "nope.pgm").string(), "--mask-out", (dir / "m.pbm").string()});
    EXPECT_EQ(missing.status, 2);
    EXPECT_NE(missing.err.find("io"), std::string::npos);
    EXPECT_EQ(run({"--help"}).status, 0);
}

TEST(CliSynth, DeterministicOutput) {
    TempDir dir;
    ASSERT_EQ(run({"synth", "--out-dir", (dir / "a").string(), "--count", "20", "--seed", "1"}).status, 0);
    ASSERT_EQ(run({"synth", "--out-dir", (dir / "b").string(), "--count", "20", "--seed", "1"}).status, 0);
    int files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir / "a")) {
        const auto name = entry.path().filename();
        EXPECT_EQ(slurp(entry.path()), slurp(dir / "b" / name)) << name;
        ++files;
    }
    EXPECT_EQ(files, 41);
    const GrayImage img = load_gray(dir / "a/synth_0007.pgm");
    EXPECT_EQ(img.width, 64);
    EXPECT_EQ(img.height, 64);
}

TEST(CliSynth, ZeroCount) {
    TempDir dir;
    const CliResult r = run({"synth", "--out-dir", dir.path().string(), "--count", "0", "--seed", "5"});
    EXPECT_EQ(r.status, 0);
    EXPECT_TRUE(std::filesystem::exists(dir / "manifest.tsv"));
}

TEST(CliSynth, UnwritableDirectory) {
    const CliResult r = run({"synth", "--out-dir", "/proc/ogseg-not-here", "--count", "1", "--seed", "5"});
    EXPECT_EQ(r.status, 2);
}

TEST(CliEvaluate, ProposedOnSyntheticManifest) {
    TempDir dir;
    ASSERT_EQ(run({"synth", "--out-dir", dir.path().string(), "--count", "10", "--seed", "3"}).status, 0);
    const CliResult r = run({"evaluate", "--manifest", (dir / "manifest.tsv").string(), "--method", "proposed", "--report",
                       (dir / "report.json").string()});
    ASSERT_EQ(r.status, 0) << r.err;
    const std::regex re("precision ([0-9.]+)% recall ([0-9.]+)% f1 ([0-9.]+)%");
    std::smatch m;
    ASSERT_TRUE(std::regex_search(r.out, m, re)) << r.out;
    EXPECT_GE(std::stod(m[3]), 90.0);
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    EXPECT_EQ(report["entries"].size(), 10U);
    EXPECT_GE(report["micro"]["f1"].get<double>(), 0.9);
}

TEST(CliEvaluate, BaselineProducesReport) {
    TempDir dir;
    ASSERT_EQ(run({"synth", "--out-dir", dir.path().string(), "--count", "5", "--seed", "3"}).status, 0);
    const CliResult r = run({"evaluate", "--manifest", (dir / "manifest.tsv").string(), "--method", "kmeans2", "--report",
                       (dir / "km.json").string()});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto report = nlohmann::json::parse(slurp(dir / "km.json"));
    EXPECT_EQ(report["method"], "kmeans2");
}

TEST(CliEvaluate, EmptyOrMissingManifestFails) {
    TempDir dir;
    testing::spit(dir / "empty.tsv", "# nothing here\n");
    EXPECT_NE(run({"evaluate", "--manifest", (dir / "empty.tsv").string(), "--report", (dir / "r.json").string()}).status, 0);
    EXPECT_NE(run({"evaluate", "--manifest", (dir / "none.tsv").string(), "--report", (dir / "r.json").string()}).status, 0);
    EXPECT_EQ(run({"evaluate", "--manifest", "m.tsv", "--report", "r.json", "--method", "spec"}).status, 1);
}

TEST(CliEvaluate, MissingEntryIsNonzeroButReportWritten) {
    TempDir dir;
    ASSERT_EQ(run({"synth", "--out-dir", dir.path().string(), "--count", "2", "--seed", "3"}).status, 0);
    std::string text = slurp(dir / "manifest.tsv");
    text += "gone.pgm\tgone.pbm\n";
    testing::spit(dir / "manifest.tsv", text);
    const CliResult r = run({"evaluate", "--manifest", (dir / "manifest.tsv").string(), "--report", (dir / "r.json").string()});
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.err.find("gone.pgm"), std::string::npos);
    EXPECT_EQ(nlohmann::json::parse(slurp(dir / "r.json"))["failures"].size(), 1U);
}

}  // namespace
}  // namespace ogseg
