// streamcore — type-check, run, and visualize stream monitor specifications.
//
// Exit codes: 0 success, 1 type error, 2 input format error (specification
// syntax or trace format), 3 I/O error, 4 runtime arithmetic diagnostics.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "streamcore/streamcore.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitTypeError = 1;
constexpr int kExitFormatError = 2;
constexpr int kExitIoError = 3;
constexpr int kExitArithmetic = 4;

bool color_enabled() {
    const char* env = std::getenv("STREAMCORE_COLOR");
    return env != nullptr && std::string(env) == "1";
}

std::string paint(const std::string& text, const char* code) {
    if (!color_enabled()) return text;
    return std::string("\033[") + code + "m" + text + "\033[0m";
}

std::string red(const std::string& t) { return paint(t, "31"); }
std::string green(const std::string& t) { return paint(t, "32"); }

struct IoError {
    std::string message;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError{"cannot open '" + path + "' for reading"};
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError{"failed while reading '" + path + "'"};
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError{"cannot open '" + path + "' for writing"};
    out << content;
    if (!out) throw IoError{"failed while writing '" + path + "'"};
}

streamcore::TypeMode parse_mode(const std::string& mode) {
    return mode == "v1" ? streamcore::TypeMode::V1 : streamcore::TypeMode::V2;
}

std::string describe_witness(const std::map<streamcore::StreamVar, bool>& witness) {
    std::string out = "{";
    bool first = true;
    for (const auto& [var, present] : witness) {
        if (!first) out += ", ";
        first = false;
        out += var.name + ":" + (present ? "present" : "absent");
    }
    return out + "}";
}

void print_type_error(const streamcore::TypeError& e) {
    using Kind = streamcore::TypeError::Kind;
    std::ostringstream msg;
    if (e.span.valid()) msg << "line " << e.span.line << ", column " << e.span.column << ": ";
    msg << "[" << e.rule << "] ";
    switch (e.kind) {
        case Kind::UnboundOutput:
            msg << "in '" << e.output.name << "' (" << e.path << "): access to output '"
                << e.subject << "' which is not bound at this point";
            break;
        case Kind::SelfAccessForbidden:
            msg << "in '" << e.output.name << "' (" << e.path << "): stream '" << e.subject
                << "' may not access its own current value";
            break;
        case Kind::RefinementFailure:
            msg << "in '" << e.output.name << "' (" << e.path << "): access to '" << e.subject
                << "' requires " << streamcore::format_pacing(e.tau_must) << " ⊭ "
                << streamcore::format_pacing(e.tau_can)
                << " to hold; counterexample " << describe_witness(e.witness);
            break;
        case Kind::DependencyCycle: {
            msg << "dependency cycle between streams:";
            for (const auto& v : e.cycle) msg << " " << v.name;
            break;
        }
        case Kind::DuplicateEquation:
            msg << "output '" << e.subject << "' has more than one equation";
            break;
    }
    std::cerr << red("error: ") << msg.str() << "\n";
}

struct CommonFlags {
    std::string mode = "v2";
    bool no_reorder = false;
};

int do_check(const std::string& spec_path, const CommonFlags& flags) {
    streamcore::Specification spec = streamcore::parse_spec(read_file(spec_path));
    streamcore::TypingReport report =
        streamcore::check_spec(spec, parse_mode(flags.mode), !flags.no_reorder);
    if (report.ok()) {
        std::cout << green("well-typed") << " (" << to_string(report.mode) << ", "
                  << spec.equations.size() << " equation"
                  << (spec.equations.size() == 1 ? "" : "s")
                  << (report.reordered ? ", reordered" : "") << ")\n";
        return kExitOk;
    }
    for (const auto& e : report.errors) print_type_error(e);
    return kExitTypeError;
}

int do_run(const std::string& spec_path, const std::string& trace_path,
           const std::string& format, const std::string& out_path, const CommonFlags& flags) {
    streamcore::Specification spec = streamcore::parse_spec(read_file(spec_path));

    std::string trace_text = read_file(trace_path);
    streamcore::TraceFile in_file = format == "jsonl"
                                        ? streamcore::read_jsonl_trace(trace_text)
                                        : streamcore::read_csv_trace(trace_text);
    if (format != "jsonl") {
        for (const auto& in : spec.inputs) {
            if (!in_file.has_stream(in.name))
                throw streamcore::TraceFormatError(1, "trace is missing a column for input '" +
                                                          in.name + "'");
        }
    }
    streamcore::StreamTrace inputs = streamcore::to_stream_trace(in_file, spec);
    // jsonl rows omit absent streams, so inputs that never appear are
    // all-absent columns.
    for (const auto& in : spec.inputs)
        if (!inputs.contains(in))
            inputs.set_column(in, streamcore::StreamTrace::Column(inputs.horizon()));

    streamcore::RunResult result =
        streamcore::run(spec, inputs, parse_mode(flags.mode), !flags.no_reorder);
    if (!result.ok()) {
        for (const auto& e : result.report.errors) print_type_error(e);
        return kExitTypeError;
    }

    std::string csv = streamcore::write_csv_trace(streamcore::to_trace_file(*result.trace, spec));
    if (out_path.empty())
        std::cout << csv;
    else
        write_file(out_path, csv);

    if (!result.diagnostics.empty()) {
        for (const auto& d : result.diagnostics)
            std::cerr << red("runtime error: ") << "stream '" << d.output.name << "' at time "
                      << d.time << ": " << d.message << "\n";
        return kExitArithmetic;
    }
    return kExitOk;
}

int do_diagram(const std::string& trace_path, const std::vector<std::string>& streams,
               size_t from, std::int64_t to, const std::string& style,
               const std::string& out_path) {
    streamcore::TraceFile file = streamcore::read_csv_trace(read_file(trace_path));
    streamcore::DiagramSpec spec;
    spec.streams = streams;
    spec.from = from;
    if (to >= 0) spec.to = static_cast<size_t>(to);
    spec.style = style == "svg" ? streamcore::DiagramSpec::Style::Svg
                                : streamcore::DiagramSpec::Style::Ascii;
    std::string rendered;
    try {
        rendered = streamcore::render_diagram(file, spec);
    } catch (const std::invalid_argument& e) {
        throw streamcore::TraceFormatError(1, e.what());
    }
    if (out_path.empty())
        std::cout << rendered;
    else
        write_file(out_path, rendered);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"streamcore — asynchronous stream monitor toolkit"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--mode", flags.mode, "pacing type system: v1 or v2 (default v2)")
            ->check(CLI::IsMember({"v1", "v2"}));
        cmd->add_flag("--no-reorder", flags.no_reorder,
                      "type-check in declaration order (no permutation rule)");
    };

    std::string spec_path, trace_path, out_path;
    std::string format = "csv";

    CLI::App* check = app.add_subcommand("check", "type-check a specification");
    check->add_option("spec", spec_path, "specification file (.sc)")->required();
    add_common(check);

    CLI::App* run = app.add_subcommand("run", "evaluate a specification over a trace");
    run->add_option("spec", spec_path, "specification file (.sc)")->required();
    run->add_option("--trace", trace_path, "input trace file")->required();
    run->add_option("--format", format, "input trace format: csv or jsonl (default csv)")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    run->add_option("--out", out_path, "output CSV path (default: stdout)");
    add_common(run);

    std::vector<std::string> diagram_streams;
    size_t diagram_from = 0;
    std::int64_t diagram_to = -1;
    std::string diagram_style = "ascii";

    CLI::App* diagram = app.add_subcommand("diagram", "render a trace as a timing diagram");
    diagram->add_option("trace", trace_path, "trace CSV file (e.g. output of run)")->required();
    diagram->add_option("--streams", diagram_streams, "streams to display (default: all)")
        ->delimiter(',');
    diagram->add_option("--from", diagram_from, "first time index to display");
    diagram->add_option("--to", diagram_to, "last time index to display");
    diagram->add_option("--style", diagram_style, "ascii or svg (default ascii)")
        ->check(CLI::IsMember({"ascii", "svg"}));
    diagram->add_option("--out", out_path, "output path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return do_check(spec_path, flags);
        if (run->parsed()) return do_run(spec_path, trace_path, format, out_path, flags);
        if (diagram->parsed())
            return do_diagram(trace_path, diagram_streams, diagram_from, diagram_to,
                              diagram_style, out_path);
    } catch (const streamcore::ParseError& e) {
        std::cerr << red("parse error: ") << e.what() << "\n";
        return kExitFormatError;
    } catch (const streamcore::TraceFormatError& e) {
        std::cerr << red("trace error: ") << e.what() << "\n";
        return kExitFormatError;
    } catch (const IoError& e) {
        std::cerr << red("io error: ") << e.message << "\n";
        return kExitIoError;
    } catch (const std::exception& e) {
        std::cerr << red("error: ") << e.what() << "\n";
        return kExitIoError;
    }
    return kExitOk;
}
