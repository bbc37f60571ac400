#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "mcsched/io.hpp"

using namespace mcsched;
using Catch::Matchers::ContainsSubstring;

namespace {

struct CmdResult {
    int code = -1;
    std::string output;  // stdout and stderr combined
};

CmdResult run_cli(const std::string& args) {
    static int counter = 0;
    const std::string capture = "cli_capture_" + std::to_string(counter++) + ".txt";
    const std::string cmd =
        std::string("\"") + MCSCHED_CLI_PATH + "\" " + args + " > " + capture + " 2>&1";
    const int raw = std::system(cmd.c_str());
    CmdResult r;
    if (raw != -1 && WIFEXITED(raw)) r.code = WEXITSTATUS(raw);
    std::ifstream in(capture);
    std::ostringstream buf;
    buf << in.rdbuf();
    r.output = buf.str();
    std::remove(capture.c_str());
    return r;
}

struct Scratch {
    std::vector<std::string> paths;
    std::string operator()(const std::string& name) {
        paths.push_back("cli_scratch_" + name);
        return paths.back();
    }
    ~Scratch() {
        for (const std::string& p : paths) std::remove(p.c_str());
    }
};

}  // namespace

TEST_CASE("cli pipeline: gen, solve, verify") {
    Scratch scratch;
    const std::string inst = scratch("pipe_inst.json");
    const std::string sched = scratch("pipe_sched.json");

    CmdResult gen = run_cli("gen --sources 2 --group-size 2 --seed 58 --out " + inst);
    REQUIRE(gen.code == 0);
    CHECK_THAT(gen.output, ContainsSubstring("2 sources"));

    CmdResult solve = run_cli("solve --instance " + inst +
                              " --scheme dmc-opt --slots 2 --demand 1 --out " + sched);
    REQUIRE(solve.code == 0);
    CHECK_THAT(solve.output, ContainsSubstring("status: optimal"));
    CHECK_THAT(solve.output, ContainsSubstring("throughput: 4"));

    CmdResult verify = run_cli("verify --instance " + inst + " --schedule " + sched +
                               " --demand 1");
    CHECK(verify.code == 0);
    CHECK_THAT(verify.output, ContainsSubstring("all_ok: yes"));

    // the written schedule is loadable and correctly shaped
    const Schedule s = load_schedule(sched);
    CHECK(s.num_slots() == 2);
    CHECK(s.num_sources() == 2);
}

TEST_CASE("cli solve separates infeasible demands from bad input") {
    Scratch scratch;
    const std::string inst = scratch("err_inst.json");
    REQUIRE(run_cli("gen --sources 2 --group-size 2 --seed 1 --out " + inst).code == 0);

    // one link per slot cannot carry demand 2 x 2 destinations in 2 slots
    CmdResult infeasible = run_cli("solve --instance " + inst +
                                   " --scheme uni-all --slots 2 --demand 2");
    CHECK(infeasible.code == 3);
    CHECK_THAT(infeasible.output, ContainsSubstring("error:"));

    CmdResult missing = run_cli("solve --instance nowhere.json --scheme dmc-opt");
    CHECK(missing.code == 2);

    CmdResult usage = run_cli("solve --scheme dmc-opt");
    CHECK(usage.code == 1);

    CmdResult badscheme = run_cli("solve --instance " + inst + " --scheme nonsense");
    CHECK(badscheme.code == 2);
}

TEST_CASE("cli gen rejects degenerate configurations") {
    CHECK(run_cli("gen --sources 0").code == 2);
    CHECK(run_cli("gen --dmin 0").code == 2);
}

TEST_CASE("cli sweep is reproducible and honors overrides") {
    Scratch scratch;
    const std::string cfg = scratch("sweep_cfg.json");
    const std::string out_a = scratch("sweep_a.csv");
    const std::string agg_a = scratch("sweep_a_mean.csv");
    const std::string out_b = scratch("sweep_b.csv");
    const std::string agg_b = scratch("sweep_b_mean.csv");

    std::ofstream(cfg) << "{\"sources\": [2], \"slots\": 2, \"demand\": 1, "
                          "\"schemes\": [\"dmc-opt\"], \"trials\": 1, \"seed\": 9}";

    CmdResult a = run_cli("sweep " + cfg + " --trials 2 --out " + out_a);
    REQUIRE(a.code == 0);
    CHECK_THAT(a.output, ContainsSubstring("2 records"));

    CmdResult b = run_cli("sweep " + cfg + " --trials 2 --out " + out_b);
    REQUIRE(b.code == 0);

    auto slurp = [](const std::string& p) {
        std::ifstream in(p);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    CHECK(slurp(out_a) == slurp(out_b));
    CHECK(slurp(agg_a) == slurp(agg_b));

    const std::vector<ResultRecord> records = parse_results_csv(out_a);
    REQUIRE(records.size() == 2);
    for (const ResultRecord& r : records) {
        CHECK(r.scheme == Scheme::DmcOpt);
        CHECK(r.N == 2);
        CHECK(r.T == 2);
        CHECK(r.B == 1);
        CHECK(r.seconds == 0.0);
    }
    CHECK(records[0].seed != records[1].seed);  // distinct trials
}

TEST_CASE("cli help exits cleanly") {
    CHECK(run_cli("--help").code == 0);
    CHECK(run_cli("sweep --help").code == 0);
}
