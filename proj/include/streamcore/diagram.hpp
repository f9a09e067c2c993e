#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "streamcore/trace_io.hpp"

namespace streamcore {

/// What to render: which streams (empty = all, in file order), which time
/// window (inclusive; `to` defaults to the last index), and the style.
struct DiagramSpec {
    enum class Style { Ascii, Svg };

    std::vector<std::string> streams;
    size_t from = 0;
    std::optional<size_t> to;
    Style style = Style::Ascii;
};

namespace detail {

struct DiagramLayout {
    std::vector<size_t> columns;  // indices into file.header
    size_t t_begin = 0;
    size_t t_end = 0;  // exclusive
};

inline DiagramLayout diagram_layout(const TraceFile& file, const DiagramSpec& spec) {
    DiagramLayout layout;
    if (spec.streams.empty()) {
        for (size_t i = 0; i < file.header.size(); ++i) layout.columns.push_back(i);
    } else {
        for (const auto& name : spec.streams) {
            auto it = std::find(file.header.begin(), file.header.end(), name);
            if (it == file.header.end())
                throw std::invalid_argument("unknown stream '" + name + "'");
            layout.columns.push_back(static_cast<size_t>(it - file.header.begin()));
        }
    }
    size_t last = file.horizon() == 0 ? 0 : file.horizon() - 1;
    size_t to = std::min(spec.to.value_or(last), last);
    layout.t_begin = std::min(spec.from, file.horizon());
    layout.t_end = file.horizon() == 0 ? 0 : std::min(to + 1, file.horizon());
    if (layout.t_begin > layout.t_end) layout.t_begin = layout.t_end;
    return layout;
}

inline std::string cell_text(const OptValue& v) {
    return v.has_value() ? std::to_string(*v) : ".";
}

}  // namespace detail

/// Renders one row per stream and one fixed-width column per time point;
/// present cells show the value, absent cells show a dot. Output is
/// deterministic byte-for-byte for fixed inputs.
inline std::string render_ascii_diagram(const TraceFile& file, const DiagramSpec& spec) {
    detail::DiagramLayout layout = detail::diagram_layout(file, spec);

    size_t name_width = 4;  // "time"
    for (size_t c : layout.columns) name_width = std::max(name_width, file.header[c].size());
    size_t cell_width = 1;
    for (size_t t = layout.t_begin; t < layout.t_end; ++t) {
        cell_width = std::max(cell_width, std::to_string(t).size());
        for (size_t c : layout.columns)
            cell_width = std::max(cell_width, detail::cell_text(file.rows[t][c]).size());
    }

    auto pad_left = [](const std::string& s, size_t width) {
        return std::string(width - s.size(), ' ') + s;
    };
    auto pad_right = [](const std::string& s, size_t width) {
        return s + std::string(width - s.size(), ' ');
    };

    std::string out = pad_right("time", name_width) + " |";
    for (size_t t = layout.t_begin; t < layout.t_end; ++t)
        out += " " + pad_left(std::to_string(t), cell_width);
    out += " |\n";
    for (size_t c : layout.columns) {
        out += pad_right(file.header[c], name_width) + " |";
        for (size_t t = layout.t_begin; t < layout.t_end; ++t)
            out += " " + pad_left(detail::cell_text(file.rows[t][c]), cell_width);
        out += " |\n";
    }
    return out;
}

/// Dot-style SVG: one horizontal lane per stream, a filled dot per present
/// value with the value printed above it.
inline std::string render_svg_diagram(const TraceFile& file, const DiagramSpec& spec) {
    detail::DiagramLayout layout = detail::diagram_layout(file, spec);

    size_t max_name = 4;
    for (size_t c : layout.columns) max_name = std::max(max_name, file.header[c].size());
    const size_t label_w = 10 + 8 * max_name;
    const size_t col_w = 48;
    const size_t row_h = 36;
    const size_t steps = layout.t_end - layout.t_begin;
    const size_t width = label_w + col_w * std::max<size_t>(steps, 1) + 16;
    const size_t height = row_h * (layout.columns.size() + 1) + 16;

    auto x_of = [&](size_t t) { return label_w + col_w * (t - layout.t_begin) + col_w / 2; };
    auto y_of = [&](size_t lane) { return row_h * (lane + 1) + 8; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\" font-family=\"monospace\" font-size=\"12\">\n";
    for (size_t t = layout.t_begin; t < layout.t_end; ++t) {
        svg += "  <text x=\"" + std::to_string(x_of(t)) + "\" y=\"" + std::to_string(row_h / 2 + 8) +
               "\" text-anchor=\"middle\" fill=\"#888\">" + std::to_string(t) + "</text>\n";
    }
    for (size_t lane = 0; lane < layout.columns.size(); ++lane) {
        size_t c = layout.columns[lane];
        size_t y = y_of(lane);
        svg += "  <text x=\"8\" y=\"" + std::to_string(y + 4) + "\">" + file.header[c] +
               "</text>\n";
        if (steps > 0) {
            svg += "  <line x1=\"" + std::to_string(x_of(layout.t_begin)) + "\" y1=\"" +
                   std::to_string(y) + "\" x2=\"" + std::to_string(x_of(layout.t_end - 1)) +
                   "\" y2=\"" + std::to_string(y) + "\" stroke=\"#ccc\"/>\n";
        }
        for (size_t t = layout.t_begin; t < layout.t_end; ++t) {
            const OptValue& v = file.rows[t][c];
            if (!v.has_value()) continue;
            svg += "  <circle cx=\"" + std::to_string(x_of(t)) + "\" cy=\"" + std::to_string(y) +
                   "\" r=\"5\" fill=\"#444\"/>\n";
            svg += "  <text x=\"" + std::to_string(x_of(t)) + "\" y=\"" + std::to_string(y - 10) +
                   "\" text-anchor=\"middle\">" + std::to_string(*v) + "</text>\n";
        }
    }
    svg += "</svg>\n";
    return svg;
}

inline std::string render_diagram(const TraceFile& file, const DiagramSpec& spec) {
    return spec.style == DiagramSpec::Style::Svg ? render_svg_diagram(file, spec)
                                                 : render_ascii_diagram(file, spec);
}

}  // namespace streamcore
