#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "commands.hpp"

using namespace graftlab;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<const char*> args) {
    args.insert(args.begin(), "graftlab");
    std::ostringstream out, err;
    int code = cli::run(static_cast<int>(args.size()), args.data(), out, err);
    return {code, out.str(), err.str()};
}

const char* kGenus2 = R"({"kind": "genus2", "lengths": [2, 2, 2], "twists": [0, 0, 0]})";

}  // namespace

TEST(Cli, KernelOnHourglassCore) {
    auto r = run({"kernel", "--gamma", "g", "--r", "0,1"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    std::string header, row0, row1;
    std::getline(in, header);
    std::getline(in, row0);
    std::getline(in, row1);
    EXPECT_EQ(header, "surface_id,gamma_word,x_t,x_r,value,tail_bound,truncation_radius");
    auto value = [](const std::string& row) {
        std::vector<std::string> cells;
        std::stringstream ss(row);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        return std::stod(cells.at(4));
    };
    EXPECT_NEAR(value(row0), -1.0 / std::numbers::pi, 1e-15);
    EXPECT_NEAR(value(row1), -0.0545747430708595, 1e-13);
}

TEST(Cli, EmptyGridGivesHeaderOnly) {
    auto r = run({"kernel", "--gamma", "g"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "surface_id,gamma_word,x_t,x_r,value,tail_bound,truncation_radius\n");
}

TEST(Cli, BadWordIsUsageError) {
    auto r = run({"kernel", "--gamma", "x3", "--r", "1"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("x3"), std::string::npos);
    EXPECT_TRUE(r.out.empty());
}

TEST(Cli, DerivativeGraftOnHourglass) {
    auto r = run({"--surface", R"({"kind": "hourglass", "core_length": 2})", "derivative", "--gamma", "g",
                  "--gamma-prime", "g"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = io::json::parse(r.out);
    EXPECT_NEAR(j["total"].get<double>(), -2.0 / std::numbers::pi, 1e-12);
    EXPECT_TRUE(j.contains("tail_bound"));
}

TEST(Cli, DerivativeQuakeOnItselfIsZero) {
    auto r = run({"derivative", "--surface", kGenus2, "--gamma", "a1", "--gamma-prime", "a1", "--mode", "quake"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(io::json::parse(r.out)["derivative"].get<double>(), 0.0);
}

TEST(Cli, DisjointPairReportsDecay) {
    auto r = run({"derivative", "--surface", kGenus2, "--truncation-radius", "10", "--gamma", "a1", "--gamma-prime",
                  "a2"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = io::json::parse(r.out);
    ASSERT_TRUE(j.contains("distance"));
    ASSERT_TRUE(j.contains("decay_bound"));
    EXPECT_LE(std::abs(j["total"].get<double>()), j["decay_bound"].get<double>());
}

TEST(Cli, VerifySuites) {
    auto ok = run({"verify", "--suite", "graft-oracle", "--truncation-radius", "12"});
    EXPECT_EQ(ok.code, 0) << ok.out;
    auto j = io::json::parse(ok.out);
    EXPECT_TRUE(j["passed"].get<bool>());
    EXPECT_GT(j["checks"].size(), 4u);
    EXPECT_EQ(run({"verify", "--suite", "nope"}).code, 2);
    auto ode = run({"verify", "--suite", "greens-ode"});
    EXPECT_EQ(ode.code, 0);
}

TEST(Cli, FailedAssertionExitsOne) {
    // A radius this small leaves certified tails far above the 1e-5 budget.
    auto r = run({"verify", "--suite", "greens-fubini", "--truncation-radius", "3", "--seed", "1"});
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(io::json::parse(r.out)["passed"].get<bool>());
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"derivative", "--gamma", "g", "--gamma-prime", "g", "--mode", "bend"}).code, 2);
    EXPECT_EQ(run({"--surface", "{\"kind\": 3}", "kernel", "--gamma", "g"}).code, 2);
    EXPECT_EQ(run({"--profile", "nonsense", "kernel", "--gamma", "g"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, Deterministic) {
    std::vector<const char*> args{"--surface", kGenus2, "--truncation-radius", "8", "kernel", "--gamma", "a1b1",
                                  "--t", "0.1,0.7", "--r", "-0.4,0.3"};
    auto a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
}
