#pragma once

// Canonical example specifications and traces shared across the test suites.
// These mirror the files under specs/ and traces/.

#include <string_view>
#include <vector>

#include "streamcore/parser.hpp"
#include "streamcore/trace.hpp"

namespace fixtures {

inline constexpr std::string_view kPowerDraw = R"(
input battery_level
output drain @battery_level := battery_level.prev(or: battery_level) - battery_level
output warning @battery_level := drain > 5
)";

inline constexpr std::string_view kTempSync = R"(
input battery_level: Int
input temperature: Int
output drain @battery_level := battery_level.prev(or: battery_level) - battery_level
output temp_warning @battery_level & temperature := drain < 0 && temperature > 50
)";

inline constexpr std::string_view kTempHold = R"(
input battery_level: Int
input temperature: Int
output drain @battery_level := battery_level.prev(or: battery_level) - battery_level
output temp_warning @battery_level := drain < 0 && temperature.hold(or: 0) > 50
)";

inline constexpr std::string_view kTempDisjunctive = R"(
input battery_level: Int
input temperature: Int
output drain @battery_level := battery_level.prev(or: battery_level) - battery_level
output temp_warning @battery_level | temperature := drain.hold(or: 0) < 0 && temperature.hold(or: 0) > 50
)";

inline constexpr std::string_view kInvalid = R"(
input a: Int
input b: Int
output x @b := b
output y @a := x
)";

inline constexpr std::string_view kOrderingWrong = R"(
input i: Int
output x @i := y
output y @i := i
)";

inline constexpr std::string_view kRunningAverage = R"(
input i: Int
output count @i := count.prev(or: 0) + 1
output sum @i := sum.prev(or: 0) + i
output average @i := sum / count
)";

inline streamcore::Specification parse(std::string_view text) {
    return streamcore::parse_spec(text);
}

inline streamcore::StreamTrace::Column column(std::vector<streamcore::OptValue> cells) {
    return cells;
}

/// battery_level present at {1,3,5}, temperature present at {2,3,4},
/// horizon 6 — the asynchronous sensor trace used by the timing examples.
inline streamcore::StreamTrace sensor_trace() {
    using streamcore::OptValue;
    streamcore::StreamTrace t(6);
    t.set_column(streamcore::input_var("battery_level"),
                 {std::nullopt, OptValue(100), std::nullopt, OptValue(97), std::nullopt,
                  OptValue(95)});
    t.set_column(streamcore::input_var("temperature"),
                 {std::nullopt, std::nullopt, OptValue(48), OptValue(52), OptValue(55),
                  std::nullopt});
    return t;
}

inline streamcore::StreamTrace battery_trace() {
    using streamcore::OptValue;
    streamcore::StreamTrace t(3);
    t.set_column(streamcore::input_var("battery_level"),
                 {OptValue(100), OptValue(98), OptValue(95)});
    return t;
}

inline streamcore::StreamTrace counter_trace() {
    using streamcore::OptValue;
    streamcore::StreamTrace t(3);
    t.set_column(streamcore::input_var("i"), {OptValue(4), OptValue(6), OptValue(10)});
    return t;
}

}  // namespace fixtures
