#include <doctest.h>

#include <benchcast/dataset.hpp>
#include <benchcast/schema.hpp>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "test_support.hpp"

namespace ts = test_support;
namespace fs = std::filesystem;

namespace {

const char* kStockHeader =
    "id_exec,id_cl,bench,exe_time,net,disk,maps,iosf,replicas,iofilebuf,"
    "compression,blk_size,datanodes,vm_cores,vm_ram,validated,version";

struct CliResult {
    int exit_code = -1;
    std::string out;
};

CliResult run_cli(const fs::path& dir, const std::string& args) {
    fs::path out_file = dir / "cli_stdout.txt";
    std::string cmd = std::string(BENCHCAST_CLI_PATH) + " " + args + " > " +
                      out_file.string() + " 2>&1";
    int status = std::system(cmd.c_str());
    CliResult res;
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    res.out = ss.str();
    return res;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("ingest exit codes follow the data quality") {
    auto dir = ts::scratch_dir("cli_ingest");
    auto good = ts::write_file(
        dir, "good.csv",
        std::string(kStockHeader) +
            "\n1,3,terasort,472.0,ETH,HDD,8,10,1,65536,None,64,9,10,128,1,1\n");
    CliResult ok = run_cli(dir, "ingest " + good.string() + " --out " +
                                    (dir / "good").string());
    CHECK(ok.exit_code == 0);
    CHECK(ok.out.find("1 records loaded") != std::string::npos);

    auto bad = ts::write_file(
        dir, "bad.csv",
        std::string(kStockHeader) +
            "\n1,3,terasort,472.0,ETH,HDD,8,10,1,65536,None,64,9,10,128,1,1"
            "\n2,3,terasort,-4,ETH,HDD,8,10,1,65536,None,64,9,10,128,1,1"
            "\n3,3,terasort,470.0,ETH,HDD,8,10,1,65536,None,64,9,10,128,1,1\n");
    CliResult findings = run_cli(dir, "ingest " + bad.string() + " --out " +
                                          (dir / "bad").string());
    CHECK(findings.exit_code == 1);
    CHECK(findings.out.find("line 3") != std::string::npos);

    CliResult missing_schema =
        run_cli(dir, "ingest " + good.string() + " --schema " +
                         (dir / "nope.json").string());
    CHECK(missing_schema.exit_code == 2);

    CliResult usage = run_cli(dir, "ingest");
    CHECK(usage.exit_code == 2);
}

TEST_CASE("a full pipeline runs and is byte-identical on re-run") {
    auto dir = ts::scratch_dir("cli_pipeline");
    auto d1 = dir / "run1";
    auto d2 = dir / "run2";
    fs::create_directories(d1);
    fs::create_directories(d2);

    auto pipeline = [&](const fs::path& d) {
        CliResult synth = run_cli(
            d, "synth --n 300 --seed 9 --out " + (d / "data").string());
        REQUIRE(synth.exit_code == 0);

        CliResult train = run_cli(
            d, "train " + (d / "data.csv").string() + " --schema " +
                   (d / "data.schema.json").string() +
                   " --family tree --grid min_instances=1,2,4 --seed 5 --out " +
                   (d / "model.json").string());
        REQUIRE(train.exit_code == 0);

        CliResult predict = run_cli(
            d, "predict " + (d / "model.json").string() + " " +
                   (d / "data.csv").string() + " --out " + (d / "pred.csv").string());
        REQUIRE(predict.exit_code == 0);

        CliResult detect = run_cli(
            d, "detect " + (d / "model.json").string() + " " +
                   (d / "data.csv").string() + " --min-time 0 --out " +
                   (d / "anom").string());
        REQUIRE((detect.exit_code == 0 || detect.exit_code == 1));

        CliResult recommend = run_cli(
            d, "recommend " + (d / "data.csv").string() + " --schema " +
                   (d / "data.schema.json").string() +
                   " --k-range 5:15:5 --family tree --hp min_instances=1 "
                   "--seed 3 --out " +
                   (d / "rec").string());
        REQUIRE(recommend.exit_code == 0);
    };
    pipeline(d1);
    pipeline(d2);

    // primary outputs are byte-identical; manifests differ only in timing
    for (const char* name :
         {"data.csv", "data.truth.csv", "data.anomalies.txt", "data.schema.json",
          "model.json", "model.selection.json", "pred.csv", "anom.jsonl",
          "anom.summary.json", "rec.ksweep.json", "rec.plan.csv"}) {
        INFO("file: " << name);
        CHECK(slurp(d1 / name) == slurp(d2 / name));
    }
}

TEST_CASE("predict output matches the input row count and is re-runnable") {
    auto dir = ts::scratch_dir("cli_predict");
    REQUIRE(run_cli(dir, "synth --n 120 --seed 4 --out " + (dir / "d").string())
                .exit_code == 0);
    REQUIRE(run_cli(dir, "train " + (dir / "d.csv").string() + " --schema " +
                             (dir / "d.schema.json").string() +
                             " --family knn --grid k=1,3 --seed 2 --out " +
                             (dir / "m.json").string())
                .exit_code == 0);
    REQUIRE(run_cli(dir, "predict " + (dir / "m.json").string() + " " +
                             (dir / "d.csv").string() + " --out " +
                             (dir / "p.csv").string())
                .exit_code == 0);

    auto count_lines = [](const fs::path& p) {
        std::ifstream in(p);
        std::string line;
        std::size_t n = 0;
        while (std::getline(in, line))
            if (!line.empty()) ++n;
        return n;
    };
    CHECK(count_lines(dir / "p.csv") == count_lines(dir / "d.csv"));

    std::string head = slurp(dir / "p.csv").substr(0, 300);
    CHECK(head.find("predicted_seconds") != std::string::npos);
}

TEST_CASE("train rejects an out-of-range polynomial degree at parse time") {
    auto dir = ts::scratch_dir("cli_degree");
    REQUIRE(run_cli(dir, "synth --n 60 --seed 4 --out " + (dir / "d").string())
                .exit_code == 0);
    CliResult res = run_cli(dir, "train " + (dir / "d.csv").string() +
                                     " --schema " + (dir / "d.schema.json").string() +
                                     " --family poly --grid degree=4 --out " +
                                     (dir / "m.json").string());
    CHECK(res.exit_code == 2);
    CHECK(res.out.find("degree") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "m.json"));
}

TEST_CASE("detect defaults and monotonicity in n") {
    auto dir = ts::scratch_dir("cli_detect");
    REQUIRE(run_cli(dir, "synth --n 400 --seed 11 --out " + (dir / "d").string())
                .exit_code == 0);
    REQUIRE(run_cli(dir, "train " + (dir / "d.csv").string() + " --schema " +
                             (dir / "d.schema.json").string() +
                             " --family tree --grid min_instances=4 --seed 2 " +
                             "--out " + (dir / "m.json").string())
                .exit_code == 0);

    CliResult n3 = run_cli(dir, "detect " + (dir / "m.json").string() + " " +
                                    (dir / "d.csv").string() +
                                    " --min-time 0 --n 3 --out " +
                                    (dir / "n3").string());
    CliResult n1 = run_cli(dir, "detect " + (dir / "m.json").string() + " " +
                                    (dir / "d.csv").string() +
                                    " --min-time 0 --n 1 --out " +
                                    (dir / "n1").string());
    REQUIRE((n3.exit_code == 0 || n3.exit_code == 1));
    REQUIRE((n1.exit_code == 0 || n1.exit_code == 1));

    // n=1 must flag a warning-condition superset of n=3
    auto warning_ids = [](const fs::path& p) {
        std::ifstream in(p);
        std::string line;
        std::set<std::string> ids;
        while (std::getline(in, line)) {
            auto j = nlohmann::json::parse(line);
            if (j.at("warning_condition").get<bool>())
                ids.insert(j.at("id").get<std::string>());
        }
        return ids;
    };
    auto w3 = warning_ids(dir / "n3.jsonl");
    auto w1 = warning_ids(dir / "n1.jsonl");
    for (const auto& id : w3) CHECK(w1.count(id) == 1);
    CHECK(w1.size() >= w3.size());
}

TEST_CASE("recommend emits a plan that ingests cleanly") {
    auto dir = ts::scratch_dir("cli_rec_closure");
    REQUIRE(run_cli(dir, "synth --n 250 --seed 6 --out " + (dir / "d").string())
                .exit_code == 0);
    REQUIRE(run_cli(dir, "recommend " + (dir / "d.csv").string() + " --schema " +
                             (dir / "d.schema.json").string() +
                             " --k-range 5:10:5 --family tree --hp "
                             "min_instances=1 --seed 3 --out " +
                             (dir / "rec").string())
                .exit_code == 0);
    CliResult ingest = run_cli(dir, "ingest " + (dir / "rec.plan.csv").string() +
                                        " --schema " +
                                        (dir / "d.schema.json").string() +
                                        " --out " + (dir / "plan_ingest").string());
    CHECK(ingest.exit_code == 0);  // format closure

    SUBCASE("single-k range emits a single plan") {
        REQUIRE(run_cli(dir, "recommend " + (dir / "d.csv").string() +
                                 " --schema " + (dir / "d.schema.json").string() +
                                 " --k-range 5:5:1 --family tree --hp "
                                 "min_instances=1 --seed 3 --out " +
                                 (dir / "one").string())
                    .exit_code == 0);
        auto j = nlohmann::json::parse(slurp(dir / "one.ksweep.json"));
        CHECK(j.at("plans").size() == 1);
    }
}

TEST_CASE("rank renders the descriptive tree and the gini table") {
    auto dir = ts::scratch_dir("cli_rank");
    REQUIRE(run_cli(dir, "synth --n 300 --seed 8 --out " + (dir / "d").string())
                .exit_code == 0);
    REQUIRE(run_cli(dir, "train " + (dir / "d.csv").string() + " --schema " +
                             (dir / "d.schema.json").string() +
                             " --family tree --grid min_instances=1,2 --seed 2 " +
                             "--out " + (dir / "m.json").string())
                .exit_code == 0);

    nlohmann::json space{
        {"free",
         {{"net", {"ETH", "IB"}}, {"disk", {"SSD", "HDD"}},
          {"iofilebuf", {65536.0, 131072.0}}}},
        {"fixed",
         {{"bench", "sortlike"}, {"maps", 8.0}, {"iosf", 10.0}, {"replicas", 1.0},
          {"compression", "None"}, {"blk_size", 64.0}, {"datanodes", 8.0},
          {"vm_cores", 8.0}, {"vm_ram", 64.0}}}};
    ts::write_file(dir, "space.json", space.dump());

    CliResult ls = run_cli(dir, "rank " + (dir / "m.json").string() + " --space " +
                                    (dir / "space.json").string() +
                                    " --method least-splits --out " +
                                    (dir / "ls").string());
    REQUIRE(ls.exit_code == 0);
    CHECK(fs::exists(dir / "ls.table.csv"));
    CHECK(fs::exists(dir / "ls.tree.txt"));
    CHECK(fs::exists(dir / "ls.tree.json"));
    CHECK(slurp(dir / "ls.table.csv").find("predicted_seconds") !=
          std::string::npos);

    CliResult gini = run_cli(dir, "rank " + (dir / "m.json").string() +
                                      " --space " + (dir / "space.json").string() +
                                      " --method gini --out " +
                                      (dir / "gi").string());
    REQUIRE(gini.exit_code == 0);
    std::string table = slurp(dir / "gi.gini.csv");
    CHECK(table.find("variable,gini_score") != std::string::npos);
    CHECK(std::count(table.begin(), table.end(), '\n') == 4);  // header + 3 vars

    SUBCASE("over-cap spaces report the product size") {
        CliResult capped = run_cli(
            dir, "rank " + (dir / "m.json").string() + " --space " +
                     (dir / "space.json").string() + " --cap 4 --out " +
                     (dir / "cap").string());
        CHECK(capped.exit_code == 2);
        CHECK(capped.out.find("8") != std::string::npos);
    }
}

TEST_CASE("synth is deterministic per seed and its output ingests") {
    auto dir = ts::scratch_dir("cli_synth");
    REQUIRE(run_cli(dir, "synth --n 100 --seed 21 --out " + (dir / "a").string())
                .exit_code == 0);
    REQUIRE(run_cli(dir, "synth --n 100 --seed 21 --out " + (dir / "b").string())
                .exit_code == 0);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(slurp(dir / "a.truth.csv") == slurp(dir / "b.truth.csv"));

    REQUIRE(run_cli(dir, "synth --n 100 --seed 22 --out " + (dir / "c").string())
                .exit_code == 0);
    CHECK(slurp(dir / "a.csv") != slurp(dir / "c.csv"));

    CliResult ingest = run_cli(dir, "ingest " + (dir / "a.csv").string() +
                                        " --schema " + (dir / "a.schema.json").string() +
                                        " --out " + (dir / "a_ingest").string());
    CHECK(ingest.exit_code == 0);
}

TEST_CASE("every command writes exactly one manifest") {
    auto dir = ts::scratch_dir("cli_manifest");
    REQUIRE(run_cli(dir, "synth --n 50 --seed 2 --out " + (dir / "d").string())
                .exit_code == 0);
    auto j = nlohmann::json::parse(slurp(dir / "d.manifest.json"));
    CHECK(j.at("command") == "synth");
    CHECK(j.at("toolkit_version") == "0.1.0");
    CHECK(j.at("outputs").size() == 4);
    CHECK(j.contains("written_at"));
}

TEST_CASE("the stock repository layout runs the whole pipeline") {
    auto dir = ts::scratch_dir("cli_stock");
    // a small hand-built file in the stock 17-column layout
    std::ostringstream csv;
    csv << kStockHeader << "\n";
    int id = 0;
    for (const char* bench : {"terasort", "sort"})
        for (const char* net : {"ETH", "IB"})
            for (const char* disk : {"SSD", "HDD"})
                for (int maps : {4, 8, 16})
                    for (int rep = 0; rep < 2; ++rep) {
                        double t = (std::string(bench) == "terasort" ? 400.0 : 250.0);
                        t *= std::string(disk) == "HDD" ? 1.6 : 1.0;
                        t *= std::string(net) == "ETH" ? 1.25 : 1.0;
                        t *= std::pow(maps / 8.0, -0.2);
                        t *= 1.0 + 0.01 * rep;  // mild repeat-to-repeat wobble
                        csv << ++id << ",3," << bench << "," << t << "," << net
                            << "," << disk << "," << maps
                            << ",10,1,65536,None,64,9,10,128,1,1\n";
                    }
    auto path = ts::write_file(dir, "repo.csv", csv.str());

    // no --schema flag: the built-in layout applies
    CliResult ingest = run_cli(dir, "ingest " + path.string() + " --out " +
                                        (dir / "ing").string());
    CHECK(ingest.exit_code == 0);

    CliResult train = run_cli(
        dir, "train " + path.string() +
                 " --family knn --grid k=1,3 --seed 7 --bench terasort --out " +
                 (dir / "m.json").string());
    CHECK(train.exit_code == 0);
    CHECK(train.out.find("test:") != std::string::npos);

    CliResult predict = run_cli(dir, "predict " + (dir / "m.json").string() + " " +
                                         path.string() + " --out " +
                                         (dir / "p.csv").string());
    CHECK(predict.exit_code == 0);

    CliResult detect =
        run_cli(dir, "detect " + (dir / "m.json").string() + " " + path.string() +
                         " --out " + (dir / "a").string());
    CHECK((detect.exit_code == 0 || detect.exit_code == 1));

    nlohmann::json space{
        {"free",
         {{"net", {"ETH", "IB"}},
          {"disk", {"SSD", "HDD"}},
          {"iofilebuf", {65536.0, 131072.0}}}},
        {"fixed",
         {{"bench", "terasort"}, {"maps", 4.0}, {"iosf", 10.0}, {"replicas", 1.0},
          {"compression", "None"}, {"blk_size", 64.0}, {"datanodes", 3.0},
          {"vm_cores", 12.0}, {"vm_ram", 128.0}}}};
    ts::write_file(dir, "space.json", space.dump());
    CliResult rank = run_cli(dir, "rank " + (dir / "m.json").string() + " --space " +
                                      (dir / "space.json").string() + " --out " +
                                      (dir / "r").string());
    CHECK(rank.exit_code == 0);
    std::string tree = slurp(dir / "r.tree.txt");
    CHECK(tree.find("disk=") != std::string::npos);  // disk drives the split
}
