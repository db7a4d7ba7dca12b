#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <sys/wait.h>

#include "fixtures.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Run run(const fs::path& dir, const std::string& args) {
    const auto out = dir / "stdout.txt";
    const auto err = dir / "stderr.txt";
    const std::string cmd = std::string(NNEC_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

fs::path six_csv(const fs::path& dir) {
    fixture::write(dir / "six.csv", "0\n1\n2\n10\n11\n12\n");
    return dir / "six.csv";
}

fs::path blobs_csv(const fs::path& dir) {
    const auto path = dir / "blobs.csv";
    fixture::write(path, nnec::to_csv(nnec::sample_mixture(nnec::MixtureSpec::five_blobs(), 1)));
    return path;
}

}  // namespace

TEST(CliFit, SixPointFixedMode) {
    const auto dir = fixture::scratch("cli_fit_six");
    const auto r = run(dir, "fit " + six_csv(dir).string() + " --mode fixed --k 2 --lambda 1.0 --labels-out " +
                                (dir / "labels.txt").string());
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(dir / "labels.txt"), "0\n0\n0\n1\n1\n1\n");
    const auto report = nlohmann::json::parse(r.out);
    EXPECT_EQ(report["cluster_count"], 2);
    EXPECT_EQ(report["criterion"], 1.0);
    EXPECT_EQ(report["schema_version"], 1);
}

TEST(CliFit, FullGridOnBlobs) {
    const auto dir = fixture::scratch("cli_fit_blobs");
    const auto r = run(dir, "fit " + blobs_csv(dir).string() + " --header --label-column label --selection " +
                                (dir / "sel.json").string() + " --report " + (dir / "rep.json").string());
    ASSERT_EQ(r.code, 0) << r.err;
    const auto sel = nlohmann::json::parse(slurp(dir / "sel.json"));
    EXPECT_EQ(sel["entries"].size(), 44u);
    EXPECT_EQ(sel["evaluated"], 44);
    const auto rep = nlohmann::json::parse(slurp(dir / "rep.json"));
    EXPECT_EQ(rep["cluster_count"], 5);
    EXPECT_GE(rep["metrics"]["ari"].get<double>(), 0.9);
}

TEST(CliFit, RefinedMode) {
    const auto dir = fixture::scratch("cli_fit_refined");
    const auto r = run(dir, "fit " + blobs_csv(dir).string() + " --header --label-column label --mode refined --selection " +
                                (dir / "sel.json").string() + " --report " + (dir / "rep.json").string());
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(nlohmann::json::parse(slurp(dir / "sel.json"))["entries"].size(), 17u);
    EXPECT_EQ(nlohmann::json::parse(slurp(dir / "rep.json"))["params"]["k"], 14);
}

TEST(CliFit, WorkersDoNotChangeOutput) {
    const auto dir = fixture::scratch("cli_workers");
    const auto input = blobs_csv(dir);
    std::string outputs[2];
    for (int w = 0; w < 2; ++w) {
        const auto tag = std::to_string(w);
        const auto r = run(dir, "fit " + input.string() + " --header --label-column label --workers " + (w ? "8" : "1") +
                                    " --labels-out " + (dir / ("l" + tag)).string() + " --report " + (dir / ("r" + tag)).string() +
                                    " --selection " + (dir / ("s" + tag)).string());
        ASSERT_EQ(r.code, 0) << r.err;
        outputs[w] = slurp(dir / ("l" + tag)) + slurp(dir / ("r" + tag)) + slurp(dir / ("s" + tag));
    }
    EXPECT_EQ(outputs[0], outputs[1]);
}

TEST(CliFit, GraphCacheAndTrace) {
    const auto dir = fixture::scratch("cli_cache");
    const auto input = six_csv(dir);
    const auto cache = dir / "graph.json";
    const std::string args = "fit " + input.string() + " --mode fixed --k 2 --lambda 1 --graph-cache " + cache.string() +
                             " --trace " + (dir / "trace.jsonl").string();
    const auto first = run(dir, args);
    ASSERT_EQ(first.code, 0) << first.err;
    ASSERT_TRUE(fs::exists(cache));
    const auto second = run(dir, args);
    ASSERT_EQ(second.code, 0) << second.err;
    EXPECT_EQ(first.out, second.out);
    const auto trace = slurp(dir / "trace.jsonl");
    // Two growths of three sweeps each.
    EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), 6);
    EXPECT_EQ(nlohmann::json::parse(trace.substr(0, trace.find('\n')))["size"], 2);
}

TEST(CliFit, Errors) {
    const auto dir = fixture::scratch("cli_errors");
    const auto missing = run(dir, "fit " + (dir / "nope.csv").string());
    EXPECT_EQ(missing.code, 3);
    EXPECT_NE(missing.err.find("nope.csv"), std::string::npos);
    EXPECT_EQ(nlohmann::json::parse(missing.err)["error"]["kind"], "io");

    const auto input = six_csv(dir);
    EXPECT_EQ(run(dir, "fit " + input.string() + " --mode fixed --k 2 --lambda 0.5").code, 2);
    EXPECT_EQ(run(dir, "fit " + input.string() + " --mode fixed --k 2 --lambda 0.5 --allow-lambda-below-one").code, 0);
    EXPECT_EQ(run(dir, "fit " + input.string() + " --mode fixed --k 6").code, 2);
    EXPECT_EQ(run(dir, "fit " + input.string() + " --mode sideways").code, 2);
    EXPECT_EQ(run(dir, "fit " + input.string() + " --mode fixed --k 2 --lambda x").code, 2);
    EXPECT_EQ(run(dir, "fit " + input.string() + " --k notanumber").code, 2);
    EXPECT_EQ(run(dir, "").code, 2);

    fixture::write(dir / "bad.csv", "1,2\n3,abc\n");
    const auto bad = run(dir, "fit " + (dir / "bad.csv").string());
    EXPECT_EQ(bad.code, 2);
    EXPECT_NE(bad.err.find("row 2"), std::string::npos) << bad.err;
}

TEST(CliEval, Examples) {
    const auto dir = fixture::scratch("cli_eval");
    fixture::write(dir / "a.txt", "0\n0\n1\n1\n");
    fixture::write(dir / "b.txt", "0\n1\n0\n1\n");
    fixture::write(dir / "c.txt", "0\n1\n");
    const auto same = run(dir, "eval " + (dir / "a.txt").string() + " " + (dir / "a.txt").string());
    ASSERT_EQ(same.code, 0) << same.err;
    const auto j = nlohmann::json::parse(same.out);
    EXPECT_EQ(j["ami"], 1.0);
    EXPECT_EQ(j["ari"], 1.0);
    EXPECT_EQ(j["accuracy"], 1.0);
    const auto cross = run(dir, "eval " + (dir / "a.txt").string() + " " + (dir / "b.txt").string());
    EXPECT_DOUBLE_EQ(nlohmann::json::parse(cross.out)["ari"].get<double>(), -0.5);
    EXPECT_EQ(run(dir, "eval " + (dir / "a.txt").string() + " " + (dir / "c.txt").string()).code, 2);
    EXPECT_EQ(run(dir, "eval " + (dir / "a.txt").string() + " " + (dir / "zz.txt").string()).code, 3);
}

TEST(CliSynth, PresetAndSpec) {
    const auto dir = fixture::scratch("cli_synth");
    ASSERT_EQ(run(dir, "synth --seed 5 --out " + (dir / "a.csv").string()).code, 0);
    ASSERT_EQ(run(dir, "synth --seed 5 --out " + (dir / "b.csv").string()).code, 0);
    EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
    const auto text = slurp(dir / "a.csv");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1001);

    fixture::write(dir / "one.json", R"({"components":[{"mean":[1,1],"scale":1,"count":30}]})");
    const auto one = run(dir, "synth --spec " + (dir / "one.json").string());
    ASSERT_EQ(one.code, 0) << one.err;
    nnec::LoadOptions opt;
    opt.has_header = true;
    opt.label_column = std::string("label");
    const auto d = nnec::parse_delimited(one.out, opt);
    EXPECT_EQ(d.n(), 30u);
    EXPECT_EQ(std::set<int>(d.labels->begin(), d.labels->end()).size(), 1u);

    fixture::write(dir / "broken.json", "{");
    EXPECT_EQ(run(dir, "synth --spec " + (dir / "broken.json").string()).code, 2);
    EXPECT_EQ(run(dir, "synth --preset nothing").code, 2);
}

TEST(CliBench, AggregatesToyMatrix) {
    const auto dir = fixture::scratch("cli_bench_toy");
    const auto r = run(dir, std::string("bench --results ami=") + NNEC_TEST_DATA + "/toy_results.csv");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    const auto& t = j["aggregate"]["ami"];
    EXPECT_EQ(t["rank"][0], (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(t["mean_rank"].size(), 3u);
}

TEST(CliBench, ManifestRun) {
    const auto dir = fixture::scratch("cli_bench_manifest");
    const auto blobs = nnec::sample_mixture(nnec::MixtureSpec::five_blobs(), 1);
    nnec::Dataset unlabelled{blobs.points, std::nullopt};
    fixture::write(dir / "blobs.csv", nnec::to_csv(unlabelled));
    std::string labels;
    for (int l : *blobs.labels) {
        labels += "c" + std::to_string(l) + "\n";
    }
    fixture::write(dir / "blobs_labels.txt", labels);
    fixture::write(dir / "manifest.json",
                   R"({"datasets":[{"name":"blobs","path":"blobs.csv","header":true,"labels":"blobs_labels.txt"}]})");
    for (const char* m : {"ami", "ari", "accuracy"}) {
        fixture::write(dir / "base" / (std::string(m) + ".csv"), "dataset,X\nblobs,0.5\n");
    }
    const auto r = run(dir, "bench --manifest " + (dir / "manifest.json").string() + " --mode fixed --baseline-dir " +
                                (dir / "base").string() + " --out-dir " + (dir / "out").string());
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_GT(j["runs"][0]["ari"].get<double>(), 0.5);
    EXPECT_EQ(j["aggregate"]["ari"]["methods"], (std::vector<std::string>{"X", "NNEC"}));
    EXPECT_EQ(j["aggregate"]["ari"]["rank"][0], (std::vector<double>{1, 2}));
    EXPECT_EQ(j["aggregate"]["ari"]["minmax"][0], (std::vector<double>{0, 1}));
    EXPECT_TRUE(fs::exists(dir / "out" / "bench.json"));
    EXPECT_EQ(slurp(dir / "out" / "ari.csv").substr(0, 16), "dataset,X,NNEC\nb");
}

TEST(CliBench, NeedsInput) {
    const auto dir = fixture::scratch("cli_bench_empty");
    EXPECT_EQ(run(dir, "bench").code, 2);
    EXPECT_EQ(run(dir, "bench --results ami=" + (dir / "none.csv").string()).code, 3);
}
