#include <catch2/catch.hpp>

#include "streamcore/diagram.hpp"
#include "streamcore/evaluator.hpp"
#include "streamcore/testkit.hpp"
#include "streamcore/trace_io.hpp"

#include "fixtures.hpp"

using namespace streamcore;

TEST_CASE("CSV parsing of the sensor trace") {
    TraceFile file = read_csv_trace(
        "time,battery_level,temperature\n"
        "0,,\n"
        "1,100,\n"
        "2,,48\n"
        "3,97,52\n"
        "4,,55\n"
        "5,95,\n");
    CHECK(file.header == std::vector<std::string>{"battery_level", "temperature"});
    REQUIRE(file.horizon() == 6);
    CHECK(file.rows[1][0] == OptValue(100));
    CHECK_FALSE(file.rows[1][1].has_value());
    CHECK(file.rows[3][1] == OptValue(52));

    Specification spec = fixtures::parse(fixtures::kTempSync);
    CHECK(to_stream_trace(file, spec) == fixtures::sensor_trace());
}

TEST_CASE("CSV format errors") {
    CHECK_THROWS_AS(read_csv_trace(""), TraceFormatError);
    CHECK_THROWS_AS(read_csv_trace("t,x\n0,1\n"), TraceFormatError);          // bad first column
    CHECK_THROWS_AS(read_csv_trace("time,x\n1,1\n"), TraceFormatError);       // time gap
    CHECK_THROWS_AS(read_csv_trace("time,x\n0,1\n2,2\n"), TraceFormatError);  // time gap
    CHECK_THROWS_AS(read_csv_trace("time,x\n0\n"), TraceFormatError);         // ragged row
    CHECK_THROWS_AS(read_csv_trace("time,x\n0,abc\n"), TraceFormatError);     // non-integer
    CHECK_THROWS_AS(read_csv_trace("time,x,x\n0,1,2\n"), TraceFormatError);   // duplicate
    CHECK_THROWS_AS(read_csv_trace("time,9x\n0,1\n"), TraceFormatError);      // bad name

    try {
        read_csv_trace("time,x\n0,1\n1,oops\n");
    } catch (const TraceFormatError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("CSV round-trip on random trace files") {
    testkit::Rng rng(90210);
    const std::vector<std::string> names{"a", "b", "c", "quiet"};
    for (int iter = 0; iter < 200; ++iter) {
        TraceFile file;
        size_t streams = 1 + rng.below(4);
        for (size_t i = 0; i < streams; ++i) file.header.push_back(names[i]);
        size_t horizon = rng.below(12);
        for (size_t n = 0; n < horizon; ++n) {
            std::vector<OptValue> row(streams);
            for (size_t i = 0; i < streams; ++i) {
                // "quiet" stays an all-absent column
                if (i + 1 < streams && rng.chance(0.6)) row[i] = rng.value_in(-1000, 1000);
            }
            file.rows.push_back(row);
        }
        CHECK(read_csv_trace(write_csv_trace(file)) == file);
    }
}

TEST_CASE("JSON-lines traces") {
    TraceFile file = read_jsonl_trace(
        R"({"time":0,"values":{"battery_level":100}})"
        "\n"
        R"({"time":1,"values":{}})"
        "\n"
        R"({"time":2,"values":{"temperature":48,"battery_level":97}})"
        "\n");
    CHECK(file.header == std::vector<std::string>{"battery_level", "temperature"});
    REQUIRE(file.horizon() == 3);
    CHECK(file.rows[0][0] == OptValue(100));
    CHECK_FALSE(file.rows[0][1].has_value());
    CHECK(file.rows[2][1] == OptValue(48));

    CHECK_THROWS_AS(read_jsonl_trace(R"({"time":1,"values":{}})"), TraceFormatError);
    CHECK_THROWS_AS(read_jsonl_trace("not json\n"), TraceFormatError);
    CHECK_THROWS_AS(read_jsonl_trace(R"({"time":0,"values":{"x":1.5}})"), TraceFormatError);
}

TEST_CASE("stream resolution rejects undeclared names") {
    Specification spec = fixtures::parse(fixtures::kPowerDraw);
    TraceFile file;
    file.header = {"battery_level", "mystery"};
    file.rows = {{OptValue(1), OptValue(2)}};
    CHECK_THROWS_AS(to_stream_trace(file, spec), TraceFormatError);
}

TEST_CASE("run output serializes in declaration order") {
    Specification spec = fixtures::parse(fixtures::kPowerDraw);
    RunResult r = run(spec, fixtures::battery_trace());
    REQUIRE(r.ok());
    TraceFile file = to_trace_file(*r.trace, spec);
    CHECK(file.header == std::vector<std::string>{"battery_level", "drain", "warning"});
    CHECK(write_csv_trace(file) ==
          "time,battery_level,drain,warning\n"
          "0,100,0,0\n"
          "1,98,2,0\n"
          "2,95,3,0\n");
}

TEST_CASE("ascii diagram bytes are frozen and deterministic") {
    Specification spec = fixtures::parse(fixtures::kTempSync);
    RunResult r = run(spec, fixtures::sensor_trace());
    REQUIRE(r.ok());
    TraceFile file = to_trace_file(*r.trace, spec);

    DiagramSpec dspec;
    std::string rendered = render_diagram(file, dspec);
    CHECK(rendered ==
          "time          |   0   1   2   3   4   5 |\n"
          "battery_level |   . 100   .  97   .  95 |\n"
          "temperature   |   .   .  48  52  55   . |\n"
          "drain         |   .   0   .   3   .   2 |\n"
          "temp_warning  |   .   .   .   0   .   . |\n");
    CHECK(render_diagram(file, dspec) == rendered);

    // temp_warning row carries exactly one marker (time 3)
    size_t markers = 0;
    for (size_t n = 0; n < file.horizon(); ++n)
        if (file.rows[n][3].has_value()) ++markers;
    CHECK(markers == 1);
}

TEST_CASE("diagram stream selection and time windows") {
    TraceFile file;
    file.header = {"a", "b"};
    file.rows = {{OptValue(1), std::nullopt},
                 {std::nullopt, OptValue(2)},
                 {OptValue(3), OptValue(4)}};

    DiagramSpec spec;
    spec.streams = {"b"};
    spec.from = 1;
    spec.to = 2;
    CHECK(render_ascii_diagram(file, spec) ==
          "time | 1 2 |\n"
          "b    | 2 4 |\n");

    spec.streams = {"nope"};
    CHECK_THROWS_AS(render_ascii_diagram(file, spec), std::invalid_argument);
}

TEST_CASE("empty traces render as a header-only diagram") {
    TraceFile file;
    file.header = {"a"};
    DiagramSpec spec;
    CHECK(render_ascii_diagram(file, spec) ==
          "time | |\n"
          "a    | |\n");
}

TEST_CASE("svg diagrams mark present cells only") {
    TraceFile file;
    file.header = {"a"};
    file.rows = {{OptValue(7)}, {std::nullopt}, {OptValue(9)}};
    DiagramSpec spec;
    spec.style = DiagramSpec::Style::Svg;
    std::string svg = render_svg_diagram(file, spec);
    CHECK(svg.find("<svg") == 0);
    CHECK(std::count(svg.begin(), svg.end(), '\n') > 3);
    size_t circles = 0;
    for (size_t pos = 0; (pos = svg.find("<circle", pos)) != std::string::npos; ++pos) ++circles;
    CHECK(circles == 2);
    CHECK(svg.find(">7</text>") != std::string::npos);
    CHECK(svg.find(">9</text>") != std::string::npos);
    CHECK(render_svg_diagram(file, spec) == svg);
}
