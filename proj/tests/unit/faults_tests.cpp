#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "relsim/faults.hpp"
#include "relsim/stats.hpp"
#include "test_helpers.hpp"

using namespace relsim;

TEST_CASE("bundled fault table expands to the 14 annotations") {
    const auto& table = testutil::epas_faults();
    REQUIRE(table.size() == 14);

    int det = 0, latent = 0, shutdown = 0;
    for (const auto& row : table.rows) {
        if (row.event == "det") {
            ++det;
            REQUIRE(row.distribution.kind == Distribution::Kind::exponential);
            REQUIRE(row.distribution.rate == 1.0e-8);
            REQUIRE(row.from_state == "Ok");
            REQUIRE(row.to_state == "Off");
        } else if (row.event == "latent") {
            ++latent;
            REQUIRE(row.distribution.rate == 1.0e-9);
        } else {
            ++shutdown;
            REQUIRE(row.distribution.kind == Distribution::Kind::weibull);
            REQUIRE(row.distribution.shape == 1.5);
            // published characteristic value carried verbatim, scale interpreted
            REQUIRE(row.distribution.raw_char_rate == 0.1e-9);
            REQUIRE(row.distribution.scale_h == Catch::Approx(1.0e10));
        }
    }
    REQUIRE(det == 6);
    REQUIRE(latent == 6);
    REQUIRE(shutdown == 2);
    // delivery resolved through the bound system ports
    REQUIRE(table.rows[0].instance == "S1A");
    REQUIRE(table.rows[0].system_port == "S1AFault");
}

TEST_CASE("header-only table parses to an empty fault table") {
    const auto& model = testutil::epas_model();
    auto unit = make_source_unit(
        "empty.faults.csv", "instance,port,event,dist,param1,param2,from_state,to_state\n");
    auto table = parse_fault_table(unit, *model.composite, model.library);
    REQUIRE(table.empty());
}

TEST_CASE("negative rate is a positioned parameter error") {
    const auto& model = testutil::epas_model();
    auto unit = make_source_unit("bad.faults.csv",
                                 "instance,port,event,dist,param1,param2,from_state,to_state\n"
                                 "S1A,HWFault,det,exp,-1,,Ok,Off\n");
    try {
        parse_fault_table(unit, *model.composite, model.library);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        REQUIRE(e.pos().line == 2);
        REQUIRE_THAT(e.message(), Catch::Matchers::ContainsSubstring("must be > 0"));
    }
}

TEST_CASE("glob patterns expand in instance declaration order") {
    const auto& model = testutil::epas_model();
    auto unit = make_source_unit("g.faults.csv",
                                 "instance,port,event,dist,param1,param2,from_state,to_state\n"
                                 "S*A,HWFault,det,exp,1e-8,,Ok,Off\n");
    auto table = parse_fault_table(unit, *model.composite, model.library);
    REQUIRE(table.size() == 3);
    REQUIRE(table.rows[0].instance == "S1A");
    REQUIRE(table.rows[1].instance == "S2A");
    REQUIRE(table.rows[2].instance == "S3A");
}

TEST_CASE("table rejects unknown targets, duplicates and unmatched patterns") {
    const auto& model = testutil::epas_model();
    auto parse = [&](const std::string& row) {
        auto unit = make_source_unit(
            "x.faults.csv",
            "instance,port,event,dist,param1,param2,from_state,to_state\n" + row + "\n");
        return parse_fault_table(unit, *model.composite, model.library);
    };
    REQUIRE_THROWS_WITH(parse("S9X,HWFault,det,exp,1e-8,,Ok,Off"),
                        Catch::Matchers::ContainsSubstring("matches no instance"));
    REQUIRE_THROWS_WITH(parse("S1A,NoPort,det,exp,1e-8,,Ok,Off"),
                        Catch::Matchers::ContainsSubstring("unknown port"));
    REQUIRE_THROWS_WITH(parse("S1A,HWFault,nope,exp,1e-8,,Ok,Off"),
                        Catch::Matchers::ContainsSubstring("unknown event"));
    REQUIRE_THROWS_WITH(parse("Ev,Eval,SS,exp,1e-8,,Operation,SelfSteering"),
                        Catch::Matchers::ContainsSubstring("not an input"));
    REQUIRE_THROWS_WITH(parse("S1A,HWFault,det,exp,1e-8,,Ok,Off\nS*A,HWFault,det,exp,1e-8,,Ok,Off"),
                        Catch::Matchers::ContainsSubstring("duplicate fault row"));
    REQUIRE_THROWS_WITH(parse("S1A,HWFault,det,gauss,1e-8,,Ok,Off"),
                        Catch::Matchers::ContainsSubstring("unknown distribution"));
}

TEST_CASE("closed-form inverse-CDF samples") {
    auto exp2 = Distribution::exponential(2.0);
    REQUIRE(exp2.sample_from_unit(0.5) == Catch::Approx(std::log(2.0) / 2.0).epsilon(1e-12));
    // 0.34657...
    REQUIRE(exp2.sample_from_unit(0.5) == Catch::Approx(0.34657359).epsilon(1e-6));
    // u = 1 maps to time 0 for both kinds
    REQUIRE(exp2.sample_from_unit(1.0) == 0.0);
    REQUIRE(Distribution::weibull(2.0, 100.0).sample_from_unit(1.0) == 0.0);
}

TEST_CASE("inverse-CDF sampling satisfies CDF(sample(u)) == 1 - u within 4 ulp") {
    auto check = [](const Distribution& d) {
        for (int i = 1; i <= 1000; ++i) {
            double u = static_cast<double>(i) / 1000.0;
            double t = d.sample_from_unit(u);
            double back = d.cdf(t);
            double target = 1.0 - u;
            double ulp =
                std::nextafter(target, std::numeric_limits<double>::infinity()) - target;
            REQUIRE(std::abs(back - target) <= 4.0 * ulp);
        }
    };
    check(Distribution::exponential(3.7e-5));
    check(Distribution::weibull(1.5, 1.0e10));
    check(Distribution::weibull(0.7, 12.0));
}

TEST_CASE("weibull with shape one is the matching exponential (two-sample KS)") {
    const double scale = 5000.0;
    auto w = Distribution::weibull(1.0, scale);
    auto e = Distribution::exponential(1.0 / scale);
    const std::size_t n = 100000;
    std::vector<double> ws, es;
    CounterRng rw(101), re(202);
    for (std::size_t i = 0; i < n; ++i) {
        ws.push_back(w.sample(rw));
        es.push_back(e.sample(re));
    }
    double d = ks_two_sample(ws, es);
    REQUIRE(d < ks_two_sample_threshold(n, n, 0.01));
}

TEST_CASE("sample means agree with the analytic means within one percent") {
    const std::size_t n = 1000000;
    {
        auto d = Distribution::exponential(1.0e-8);
        CounterRng rng(7);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += d.sample(rng);
        REQUIRE(sum / n == Catch::Approx(1.0e8).epsilon(0.01));
    }
    {
        auto d = Distribution::weibull(1.5, 2000.0);
        CounterRng rng(8);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += d.sample(rng);
        REQUIRE(sum / n == Catch::Approx(d.mean()).epsilon(0.01));
        REQUIRE(d.mean() == Catch::Approx(2000.0 * std::tgamma(1.0 + 1.0 / 1.5)).epsilon(1e-12));
    }
}

TEST_CASE("equal seeds give identical sample streams") {
    auto d = Distribution::weibull(1.5, 1.0e10);
    CounterRng a(99), b(99);
    for (int i = 0; i < 1000; ++i)
        REQUIRE(sample_fault_time(d, a) == sample_fault_time(d, b));
}

TEST_CASE("all-exponential variant preserves means and scales rates") {
    const auto& table = testutil::epas_faults();
    auto exp_table = make_all_exponential(table, 1.0e6);
    REQUIRE(exp_table.size() == table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        REQUIRE(exp_table.rows[i].distribution.kind == Distribution::Kind::exponential);
        REQUIRE(exp_table.rows[i].distribution.mean() ==
                Catch::Approx(table.rows[i].distribution.mean() / 1.0e6));
    }
    // and the bundled scaled variant file matches the computed one
    const auto& bundled = testutil::epas_exp_faults();
    for (std::size_t i = 0; i < bundled.size(); ++i)
        REQUIRE(bundled.rows[i].distribution.rate ==
                Catch::Approx(exp_table.rows[i].distribution.rate).epsilon(1e-12));
}

TEST_CASE("distribution parameter validation") {
    REQUIRE_THROWS_AS(Distribution::exponential(0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(Distribution::weibull(-1.0, 10.0), std::invalid_argument);
    REQUIRE_THROWS_AS(Distribution::weibull(1.0, 0.0), std::invalid_argument);
}
