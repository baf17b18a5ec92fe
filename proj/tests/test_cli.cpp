#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <algorithm>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "ctsynth_cli_test";

int run(const std::string& args) {
    const std::string cmd = "cd '" + kWork.string() + "' && '" CTSYNTH_CLI_PATH "' " + args + " >out.txt 2>err.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(kWork / p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream(kWork / p, std::ios::binary) << text;
}

class Cli : public ::testing::Test {
  protected:
    static void SetUpTestSuite() {
        fs::remove_all(kWork);
        fs::create_directories(kWork);
    }
};

}  // namespace

TEST_F(Cli, AggregateFromCsv) {
    write("micro.csv", "age,lang\nold,en\nyoung,cy\nold,en\n");
    ASSERT_EQ(run("aggregate -i micro.csv -o agg.json"), 0) << slurp("err.txt");
    const std::string table = slurp("agg.json");
    EXPECT_NE(table.find("\"counts\""), std::string::npos);
    write("bad.csv", "age,lang\nold\n");
    EXPECT_EQ(run("aggregate -i bad.csv"), 2);
}

TEST_F(Cli, PipelineAndExitCodes) {
    ASSERT_EQ(run("fixture --dims 2,2,500 --seed 3 -o t.json"), 0) << slurp("err.txt");
    ASSERT_EQ(run("synthesize -t t.json --sigma 0.5 -m 4 --seed 11 -o ens"), 0) << slurp("err.txt");
    ASSERT_TRUE(fs::exists(kWork / "ens" / "manifest.json"));

    ASSERT_EQ(run("risk -t t.json -e ens/manifest.json --k 1 --k 2 --d 0.5 --json risk.json"), 0);
    const std::string csv = slurp("out.txt");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "k,d,sigma,m,tau3,tau4,mode");
    EXPECT_NE(csv.find("\n1,0.5,0.5,4,"), std::string::npos);

    ASSERT_EQ(run("risk --analytic -t t.json --sigma 0.5 -m 30 --k 1 --d 0.1 --d 0.2"), 0) << slurp("err.txt");
    EXPECT_NE(slurp("out.txt").find("analytic"), std::string::npos);

    EXPECT_EQ(run("risk -t t.json -e ens/manifest.json --k 900 --d 0"), 3);
    EXPECT_EQ(run("synthesize -t t.json --sigma -1 -o x"), 2);
    EXPECT_EQ(run("synthesize -t missing.json -o x"), 2);
    EXPECT_EQ(run("risk --bogus"), 2);

    write("spec.json", R"({"row": {"variable": "v1", "ones": ["1"], "zeros": ["0"]},
                           "col": {"variable": "v2", "ones": ["1"], "zeros": ["0"]}})");
    ASSERT_EQ(run("analyze -e ens/manifest.json --analysis spec.json -o est.json --csv acc.csv"), 0)
        << slurp("err.txt");
    EXPECT_NE(slurp("out.txt").find("T_p"), std::string::npos);
    EXPECT_NE(slurp("est.json").find("\"estimator\": \"tp\""), std::string::npos);
    ASSERT_EQ(run("analyze -e ens/manifest.json --analysis spec.json --mode averaged --estimator ts --csv acc.csv"), 0);
    const std::string acc = slurp("acc.csv");
    EXPECT_EQ(std::count(acc.begin(), acc.end(), '\n'), 3);
    EXPECT_EQ(run("analyze -e ens/manifest.json --analysis spec.json --mode averaged --estimator tp"), 2);

    ASSERT_EQ(run("utility -t t.json -e ens/manifest.json --analysis spec.json"), 0) << slurp("err.txt");
    EXPECT_EQ(slurp("out.txt").substr(0, 36), "sigma,m,hellinger,euclidean,ci_overl");
}

TEST_F(Cli, ByteIdenticalAcrossRunsAndWorkers) {
    ASSERT_EQ(run("fixture --cells 40000 --seed 5 -o big.json"), 0);
    write("grid.json", R"({"sigmas": [0, 0.5, 2], "ms": [1, 2, 5], "bands": [[1, 0.1]],
                           "replications": 2, "seed": 8})");
    ASSERT_EQ(run("tradeoff -t big.json -g grid.json --workers 1 -o a.csv"), 0) << slurp("err.txt");
    ASSERT_EQ(run("tradeoff -t big.json -g grid.json --workers 3 -o b.csv"), 0);
    ASSERT_EQ(run("tradeoff -t big.json -g grid.json --workers 1 -o c.csv"), 0);
    EXPECT_EQ(slurp("a.csv"), slurp("b.csv"));
    EXPECT_EQ(slurp("a.csv"), slurp("c.csv"));
    const std::string a = slurp("a.csv");
    EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 10);

    ASSERT_EQ(run("synthesize -t big.json --sigma 2 -m 3 --seed 1 --workers 1 --format csv -o e1"), 0);
    ASSERT_EQ(run("synthesize -t big.json --sigma 2 -m 3 --seed 1 --workers 4 --format csv -o e2"), 0);
    EXPECT_EQ(slurp("e1/replicates.csv"), slurp("e2/replicates.csv"));

    ASSERT_EQ(run("tradeoff --analytic --spectrum /dev/null -o x.csv"), 2);
    write("census.json", R"({"proportions": {"0": 0.9038, "1": 0.0346, "2": 0.0148, "3": 0.0075,
                            "4": 0.0056, "5": 0.0038, "6+": 0.0299}})");
    ASSERT_EQ(run("tradeoff --analytic --spectrum census.json -o an.csv"), 0) << slurp("err.txt");
    EXPECT_NE(slurp("an.csv").find(",analytic,0"), std::string::npos);
}
