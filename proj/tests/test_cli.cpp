#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result cli(const std::string& args) {
    const std::string cmd = std::string(PHYSCOMP_CLI) + " " + args + " 2>/dev/null";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    if (p == nullptr) {
        return r;
    }
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), buf.size(), p) != nullptr) {
        r.out += buf.data();
    }
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string demo(const std::string& name) { return std::string(PHYSCOMP_DEMOS) + "/" + name; }

}  // namespace

TEST(Validate, ExitCodes) {
    EXPECT_EQ(cli("validate " + demo("binary_digits.phys")).code, 0);
    EXPECT_EQ(cli("validate " + demo("ternary_advice.phys")).code, 0);
    const Result bad = cli("validate " + demo("conflict.phys"));
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.out.find("conflicting-outcomes"), std::string::npos);
    EXPECT_EQ(cli("validate " + demo("broken.phys")).code, 3);
    EXPECT_EQ(cli("validate " + demo("missing.phys")).code, 3);
}

TEST(Run, ExitCodesFollowOutcome) {
    const Result acc = cli("run " + demo("binary_digits.phys"));
    EXPECT_EQ(acc.code, 0);
    EXPECT_NE(acc.out.find("tape: 10100[0]"), std::string::npos);
    EXPECT_EQ(cli("run " + demo("palindrome.phys") + " -i 0110").code, 0);
    EXPECT_EQ(cli("run " + demo("palindrome.phys") + " -i 011").code, 1);
    EXPECT_EQ(cli("run " + demo("spin.phys") + " --steps 50").code, 2);
    EXPECT_EQ(cli("run " + demo("broken.phys")).code, 3);
    EXPECT_EQ(cli("run " + demo("binary_digits.phys") + " -i 2").code, 4);
    EXPECT_EQ(cli("run " + demo("hz_undefined.phys")).code, 4);
}

TEST(Run, TraceIsJsonLines) {
    const Result r = cli("run " + demo("ternary_advice.phys") + " --trace -");
    ASSERT_EQ(r.code, 0);
    std::size_t lines = 0;
    std::size_t pos = 0;
    while (true) {
        const auto end = r.out.find('\n', pos);
        const std::string line = r.out.substr(pos, end - pos);
        if (line.rfind("{", 0) != 0) {
            break;
        }
        const auto j = nlohmann::json::parse(line);
        EXPECT_TRUE(j.contains("elapsed"));
        ++lines;
        pos = end + 1;
    }
    EXPECT_GT(lines, 10U);
}

TEST(Run, UntimedFlagDropsTimingFields) {
    const Result r = cli("run " + demo("binary_digits.phys") + " --trace -");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.find("\"elapsed\""), std::string::npos);
}

TEST(Render, IsAFixedPoint) {
    const Result once = cli("render " + demo("timing_search.phys"));
    ASSERT_EQ(once.code, 0);
    const std::string path = ::testing::TempDir() + "rendered.phys";
    {
        std::ofstream out(path);
        out << once.out;
    }
    EXPECT_EQ(cli("render " + path).out, once.out);
    std::remove(path.c_str());
}

TEST(Gallery, ListShowRun) {
    const Result list = cli("gallery list");
    EXPECT_EQ(list.code, 0);
    EXPECT_NE(list.out.find("advice-decide"), std::string::npos);
    EXPECT_EQ(cli("gallery show cphi digits=4").code, 0);
    const Result run = cli("gallery run dg advice=01 repeat=10 bits=5");
    EXPECT_EQ(run.code, 0);
    EXPECT_NE(run.out.find("tape: 0110[1]"), std::string::npos);
    EXPECT_EQ(cli("gallery run c2 predicate=even-ones -i 11").code, 0);
    EXPECT_EQ(cli("gallery run c2 predicate=even-ones -i 10").code, 1);
    EXPECT_EQ(cli("gallery run nope").code, 3);
    EXPECT_EQ(cli("gallery show cphi phi=oops").code, 3);
}
