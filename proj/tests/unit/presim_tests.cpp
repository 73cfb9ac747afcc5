#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "relsim/presim.hpp"
#include "test_helpers.hpp"

using namespace relsim;

namespace {

bool outcome_equal(const SimOutcome& a, const SimOutcome& b) {
    if (a.failure_time_h != b.failure_time_h || a.failure_mode != b.failure_mode ||
        a.consumed_faults.size() != b.consumed_faults.size())
        return false;
    for (std::size_t i = 0; i < a.consumed_faults.size(); ++i)
        if (a.consumed_faults[i].time_h != b.consumed_faults[i].time_h ||
            a.consumed_faults[i].row != b.consumed_faults[i].row)
            return false;
    return true;
}

}  // namespace

TEST_CASE("fault series holds one sorted event per table row") {
    const auto& table = testutil::epas_faults();
    auto series = generate_fault_series(table, 42, 0);
    REQUIRE(series.size() == 14);
    for (std::size_t i = 1; i < series.size(); ++i)
        REQUIRE(series[i - 1].time_h <= series[i].time_h);
    std::set<std::uint32_t> rows;
    for (const auto& e : series) rows.insert(e.row);
    REQUIRE(rows.size() == 14);
}

TEST_CASE("single-row table gives a singleton series") {
    auto [composite, library] = testutil::two_mode_toy();
    auto table = testutil::toy_fault_table(composite, 1e-3, 0.0);
    auto series = generate_fault_series(table, 1, 0);
    REQUIRE(series.size() == 1);
    REQUIRE(series[0].row == 0);
}

TEST_CASE("empty table is rejected") {
    FaultTable table;
    REQUIRE_THROWS_AS(generate_fault_series(table, 1, 0), SimulationError);
}

TEST_CASE("equal times break ties by table row index") {
    const auto& table = testutil::epas_faults();
    auto series = generate_fault_series(table, [](std::size_t) { return 7.0; });
    REQUIRE(series.size() == 14);
    for (std::size_t i = 0; i < series.size(); ++i) {
        REQUIRE(series[i].time_h == 7.0);
        REQUIRE(series[i].row == i);
    }
}

TEST_CASE("simulation always reaches a failure on the bundled model") {
    const auto& system = testutil::epas_system();
    const auto& table = testutil::epas_faults();
    for (std::uint64_t seed : {1ull, 99ull, 31337ull}) {
        auto outcome = simulate(system, table, seed, 0);
        REQUIRE(outcome.failure_mode.has_value());
        REQUIRE(outcome.failure_time_h > 0.0);
        REQUIRE(std::isfinite(outcome.failure_time_h));
        REQUIRE(outcome.consumed_faults.size() <= 14);
    }
}

TEST_CASE("forced latent pair self-steers at the second fault time") {
    const auto& system = testutil::epas_system();
    const auto& table = testutil::epas_faults();
    std::vector<FaultEvent> series;
    double far = 1.0e6;
    for (std::uint32_t i = 0; i < table.size(); ++i) {
        const auto& row = table.rows[i];
        if (row.instance == "S1A" && row.event == "latent")
            series.push_back({1.0, i});
        else if (row.instance == "S2A" && row.event == "latent")
            series.push_back({2.0, i});
        else
            series.push_back({far += 1.0, i});
    }
    std::sort(series.begin(), series.end(),
              [](const FaultEvent& a, const FaultEvent& b) { return a.time_h < b.time_h; });
    auto outcome = simulate_with_series(system, table, series);
    REQUIRE(outcome.failure_mode == FailureMode::self_steering);
    REQUIRE(outcome.failure_time_h == 2.0);
    REQUIRE(outcome.consumed_faults.size() == 2);
}

TEST_CASE("forced uC pair loses assist at the second fault time") {
    const auto& system = testutil::epas_system();
    const auto& table = testutil::epas_faults();
    std::vector<FaultEvent> series;
    double far = 1.0e6;
    for (std::uint32_t i = 0; i < table.size(); ++i) {
        const auto& row = table.rows[i];
        if (row.instance == "UCA")
            series.push_back({1.0, i});
        else if (row.instance == "UCB")
            series.push_back({2.0, i});
        else
            series.push_back({far += 1.0, i});
    }
    std::sort(series.begin(), series.end(),
              [](const FaultEvent& a, const FaultEvent& b) { return a.time_h < b.time_h; });
    auto outcome = simulate_with_series(system, table, series);
    REQUIRE(outcome.failure_mode == FailureMode::loss_of_assist);
    REQUIRE(outcome.failure_time_h == 2.0);
}

TEST_CASE("failure time equals the last consumed fault time") {
    const auto& system = testutil::epas_system();
    const auto& table = testutil::epas_faults();
    for (std::uint64_t replica = 0; replica < 200; ++replica) {
        auto outcome = simulate(system, table, 5, replica);
        REQUIRE(!outcome.consumed_faults.empty());
        REQUIRE(outcome.failure_time_h == outcome.consumed_faults.back().time_h);
        for (std::size_t i = 1; i < outcome.consumed_faults.size(); ++i)
            REQUIRE(outcome.consumed_faults[i - 1].time_h <=
                    outcome.consumed_faults[i].time_h);
    }
}

TEST_CASE("batches are deterministic and replica-indexed") {
    const auto& system = testutil::epas_system();
    const auto& table = testutil::epas_faults();
    auto batch = run_batch(system, table, 123, 500);
    auto again = run_batch(system, table, 123, 500);
    REQUIRE(batch.size() == 500);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        REQUIRE(outcome_equal(batch[i], again[i]));
        REQUIRE(batch[i].replica == i);
    }
    // n = 1 equals a bare simulate call for replica 0
    auto one = run_batch(system, table, 123, 1);
    REQUIRE(outcome_equal(one[0], simulate(system, table, 123, 0)));
}

TEST_CASE("batch halves concatenate to the full batch") {
    const auto& system = testutil::epas_system();
    const auto& table = testutil::epas_faults();
    auto full = run_batch(system, table, 9, 400);
    auto first = run_batch(system, table, 9, 200, std::nullopt, 1, 0);
    auto second = run_batch(system, table, 9, 200, std::nullopt, 1, 200);
    for (std::size_t i = 0; i < 200; ++i) {
        REQUIRE(outcome_equal(full[i], first[i]));
        REQUIRE(outcome_equal(full[200 + i], second[i]));
    }
}

TEST_CASE("outcomes are invariant to the worker count") {
    const auto& system = testutil::epas_system();
    const auto& table = testutil::epas_faults();
    auto serial = run_batch(system, table, 77, 300, std::nullopt, 1);
    auto parallel = run_batch(system, table, 77, 300, std::nullopt, 4);
    for (std::size_t i = 0; i < serial.size(); ++i)
        REQUIRE(outcome_equal(serial[i], parallel[i]));
}

TEST_CASE("table row order does not change outcomes") {
    const auto& system = testutil::epas_system();
    FaultTable shuffled = testutil::epas_faults();
    std::reverse(shuffled.rows.begin(), shuffled.rows.end());
    auto original = run_batch(system, testutil::epas_faults(), 55, 100);
    auto reversed = run_batch(system, shuffled, 55, 100);
    for (std::size_t i = 0; i < original.size(); ++i) {
        REQUIRE(original[i].failure_time_h == reversed[i].failure_time_h);
        REQUIRE(original[i].failure_mode == reversed[i].failure_mode);
    }
}

TEST_CASE("a mission horizon truncates the series and reports survival") {
    const auto& system = testutil::epas_system();
    const auto& table = testutil::epas_faults();
    // The bundled rates make failures before one hour essentially impossible.
    auto outcomes = run_batch(system, table, 3, 50, 1.0);
    for (const auto& o : outcomes) {
        REQUIRE(o.survived());
        REQUIRE(o.failure_time_h == 1.0);
    }
    auto summaryless = run_batch(system, table, 3, 50);
    for (const auto& o : summaryless) REQUIRE(!o.survived());
}

TEST_CASE("a model that cannot fail reports the terminal system state") {
    // Toy chart whose failure state is unreachable from the fault events.
    ModelLibrary library;
    auto interfaces = parse_interfaces(
        make_source_unit("i.gi", "interface F { out event hit }"));
    library.interfaces.emplace("F", interfaces[0]);
    auto chart = parse_statechart(
        make_source_unit("c.gsc",
                         "statechart C [ port HW: requires F ] {\n"
                         "  region main { initial Up state Up { on HW.hit -> Dinged }\n"
                         "    state Dinged { } state Dead { } } }"),
        library);
    library.statecharts.emplace("C", chart);
    auto composite = parse_composite(
        make_source_unit("c.gcd",
                         "cascade T [ port Fault: requires F ] {\n"
                         "  component X: C\n  bind Fault->X.HW\n"
                         "  evaluation X { Dead -> LossOfAssist }\n}"),
        library);
    CompiledSystem system(composite, library);
    FaultTable table;
    FaultAnnotation row;
    row.instance = "X";
    row.port = "HW";
    row.event = "hit";
    row.system_port = "Fault";
    row.distribution = Distribution::exponential(1.0);
    row.identity = fault_row_identity("X", "HW", "hit");
    table.rows.push_back(row);
    try {
        simulate(system, table, 1, 0);
        FAIL("expected SimulationError");
    } catch (const SimulationError& e) {
        REQUIRE_THAT(e.what(), Catch::Matchers::ContainsSubstring("non-absorbing model"));
        REQUIRE_THAT(e.what(), Catch::Matchers::ContainsSubstring("X:Dinged"));
    }
}
