#include <doctest.h>

#include "liftchroma/asymptotics.hpp"
#include "liftchroma/coloring.hpp"
#include "liftchroma/errors.hpp"
#include "liftchroma/experiments.hpp"
#include "liftchroma/moments_exact.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace liftchroma;

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string temp_prefix(const std::string& tag)
{
    auto dir = std::filesystem::temp_directory_path() / "liftchroma_tests";
    std::filesystem::create_directories(dir);
    return (dir / tag).string();
}

CampaignConfig small_campaign(const std::string& out)
{
    CampaignConfig c;
    c.graph = "K4";
    c.n = {50, 100, 200};
    c.k = 3;
    c.statistics = {"Z_3"};
    c.samples = 400;
    c.seed = 20240611;
    c.output = out;
    return c;
}

} // namespace

TEST_CASE("statistic names")
{
    CHECK(parse_statistic("Z_3").kind == StatisticKind::Z);
    CHECK(parse_statistic("Z_3").j == 3);
    CHECK(parse_statistic("chi").kind == StatisticKind::chi);
    CHECK(parse_statistic("Y").kind == StatisticKind::Y);
    CHECK(parse_statistic("X").kind == StatisticKind::X);
    auto yz = parse_statistic("Y*Z_4");
    CHECK(yz.kind == StatisticKind::YZ);
    CHECK(yz.j == 4);
    CHECK(parse_statistic("YZ_5").j == 5);
    for (auto bad : {"Z", "Z_1", "Z_13", "W", "chi2", ""})
        CHECK_THROWS_AS(parse_statistic(bad), invalid_config);
}

TEST_CASE("triangle mean on K4 lifts")
{
    auto r = mc_expectation(make_complete_graph(4), 100, 3, parse_statistic("Z_3"), 2000, 7);
    CHECK(r.samples == 2000);
    CHECK(r.censored == 0);
    CHECK(std::abs(r.mean - 4.0) < 3 * r.stderr_);
}

TEST_CASE("monte carlo converges to the enumeration value")
{
    auto g = make_complete_graph(3);
    auto stat = parse_statistic("Z_3");
    CHECK(exact_expectation(g, 2, 3, stat) == 1);
    auto r = mc_expectation(g, 2, 3, stat, 100000, 99);
    CHECK(std::abs(r.mean - 1.0) < 3 * r.stderr_);
    CHECK(exact_expectation(g, 2, 3, parse_statistic("X")) == 51);
}

TEST_CASE("chromatic numbers of K4 lifts concentrate on 3")
{
    auto r = mc_expectation(make_complete_graph(4), 50, 3, parse_statistic("chi"), 100, 5);
    CHECK(r.censored == 0);
    CHECK(r.mean == 3.0);
    CHECK(r.stderr_ == 0.0);
}

TEST_CASE("results do not depend on the thread count")
{
    auto g = make_complete_graph(4);
    auto stat = parse_statistic("Z_4");
    StatOptions one, four;
    one.threads = 1;
    four.threads = 4;
    auto a = mc_expectation(g, 30, 3, stat, 300, 1234, one);
    auto b = mc_expectation(g, 30, 3, stat, 300, 1234, four);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_ == b.stderr_);
}

TEST_CASE("censored samples are counted, not averaged")
{
    auto g = make_complete_graph(3);
    StatOptions opt;
    opt.count_cap = 5;
    CHECK_THROWS_AS(mc_expectation(g, 3, 3, parse_statistic("Y"), 10, 1, opt), std::runtime_error);
}

TEST_CASE("joint ratio")
{
    auto g = make_complete_graph(3);
    auto yz = brute_force_moment(g, 3, [](const Lift& l) {
        mpq_class y(count_strongly_equitable(l, 3));
        return mpq_class(y * static_cast<unsigned long>(count_cycles(expand(l), 3)));
    });
    auto y = brute_force_moment(g, 3, [](const Lift& l) {
        return mpq_class(count_strongly_equitable(l, 3));
    });
    mpq_class want = yz / y;
    CHECK(joint_ratio_exact(g, 3, 3, 3) == want);
    CHECK(exact_expectation(g, 3, 3, parse_statistic("Y*Z_3")) == yz);
    CHECK_THROWS_AS(joint_ratio_estimate(g, 2, 3, 3, 50, 1), undefined_ratio);
    CHECK_THROWS_AS(joint_ratio_exact(g, 2, 3, 3), undefined_ratio);

    auto est = joint_ratio_estimate(make_complete_graph(4), 6, 3, 3, 2000, 3);
    CHECK(est.samples == 2000);
    CHECK(est.stderr_ > 0);
    CHECK(est.ratio > 0);
}

TEST_CASE("campaign configs")
{
    auto c = small_campaign("");
    auto j = config_to_json(c);
    auto back = config_from_json(j);
    CHECK(config_to_json(back) == j);
    CHECK(config_hash(back) == config_hash(c));
    CHECK(config_hash(c).size() == 16);

    auto unknown = j;
    unknown["colour"] = 3;
    CHECK_THROWS_AS(config_from_json(unknown), invalid_config);
    auto bad_stat = j;
    bad_stat["statistics"] = {"Q_3"};
    CHECK_THROWS_AS(config_from_json(bad_stat), invalid_config);
    auto no_samples = j;
    no_samples["samples"] = 0;
    CHECK_THROWS_AS(config_from_json(no_samples), invalid_config);
    auto wrong_type = j;
    wrong_type["n"] = "many";
    CHECK_THROWS_AS(config_from_json(wrong_type), invalid_config);
}

TEST_CASE("campaign output is reproducible byte for byte")
{
    auto a = temp_prefix("camp_a"), b = temp_prefix("camp_b");
    auto ra = run_campaign(small_campaign(a));
    run_campaign(small_campaign(b));
    REQUIRE(ra.size() == 3);
    for (const auto& r : ra)
        CHECK(std::abs(r.mean - 4.0) < 3 * r.stderr_);
    CHECK(slurp(a + ".csv") == slurp(b + ".csv"));
    // the jsonl carries the output path, so replay into the same prefix
    auto ja = slurp(a + ".jsonl");
    run_campaign(small_campaign(a));
    CHECK(slurp(a + ".jsonl") == ja);

    std::istringstream csv(slurp(a + ".csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "statistic,n,k,mean,stderr,samples,censored,seconds");
    int rows = 0;
    while (std::getline(csv, line))
        ++rows;
    CHECK(rows == 3);
}

TEST_CASE("csv rows")
{
    EstimateRecord r{"Z_3", 100, 3, 4.0, 0.05, 2000, 0, 0.0};
    CHECK(to_csv_row(r) == "Z_3,100,3,4,0.050000000000000003,2000,0,0.000000");
}
