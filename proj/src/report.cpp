#include "codeevo/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>

#include "format.hpp"
#include "svg.hpp"

namespace codeevo {

namespace {

using detail::format_fixed;
using detail::format_shortest;
using detail::palette_color;
using detail::SvgWriter;

struct Range {
    double lo = 0;
    double hi = 1;

    static Range of(const std::vector<double>& v, double pad_fraction, double min_half_width) {
        auto [mn, mx] = std::minmax_element(v.begin(), v.end());
        Range r{*mn, *mx};
        if (r.hi - r.lo <= 0) {
            r.lo -= min_half_width;
            r.hi += min_half_width;
        } else {
            const double pad = (r.hi - r.lo) * pad_fraction;
            r.lo -= pad;
            r.hi += pad;
        }
        return r;
    }

    double map(double v, double out_lo, double out_hi) const { return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo); }
};

struct FlatNode {
    const EvolutionGraph* graph;
    const CegNode* node;
};

std::vector<FlatNode> flatten(const std::vector<EvolutionGraph>& cegs) {
    std::vector<FlatNode> out;
    for (const auto& g : cegs) {
        if (g.feature_names != cegs.front().feature_names) {
            throw InvalidArgument("graphs do not share one feature-name list");
        }
        for (const auto& n : g.nodes) out.push_back({&g, &n});
    }
    return out;
}

std::vector<Eigen::Index> select_columns(const std::vector<std::string>& names, const std::vector<std::string>& wanted) {
    std::vector<Eigen::Index> cols;
    if (wanted.empty()) {
        for (std::size_t i = 0; i < names.size(); ++i) cols.push_back(static_cast<Eigen::Index>(i));
        return cols;
    }
    for (const auto& w : wanted) {
        auto it = std::find(names.begin(), names.end(), w);
        if (it == names.end()) throw InvalidArgument("unknown feature '" + w + "'");
        cols.push_back(it - names.begin());
    }
    return cols;
}

Eigen::MatrixXd standardized_matrix(const std::vector<FlatNode>& nodes, const std::vector<Eigen::Index>& cols) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(nodes.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = nodes[i].node->features_std(cols[c]);
        }
    }
    return X;
}

std::string hex_color(double r, double g, double b) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s = "#";
    for (double c : {r, g, b}) {
        const int v = static_cast<int>(std::lround(std::clamp(c, 0.0, 255.0)));
        s += digits[v / 16];
        s += digits[v % 16];
    }
    return s;
}

/// Diverging scale: -1 blue, 0 light grey, +1 red.
std::string diverging_color(double rho) {
    constexpr std::array<double, 3> neg{33, 102, 172};
    constexpr std::array<double, 3> mid{247, 247, 247};
    constexpr std::array<double, 3> pos{178, 24, 43};
    const double t = std::clamp(std::abs(rho), 0.0, 1.0);
    const auto& end = rho < 0 ? neg : pos;
    return hex_color(mid[0] + (end[0] - mid[0]) * t, mid[1] + (end[1] - mid[1]) * t, mid[2] + (end[2] - mid[2]) * t);
}

constexpr std::array<const char*, 6> kShapes = {"circle", "square", "triangle", "diamond", "triangle-down", "pentagon"};

void draw_glyph(SvgWriter& svg, std::size_t shape, double x, double y, double r, const std::string& fill,
                const std::string& stroke, detail::SvgAttrs extra) {
    extra.emplace_back("data-shape", kShapes[shape]);
    extra.emplace_back("fill", fill);
    extra.emplace_back("stroke", stroke);
    if (shape == 0) {
        extra.insert(extra.begin(), {{"cx", SvgWriter::num(x)}, {"cy", SvgWriter::num(y)}, {"r", SvgWriter::num(r)}});
        svg.element("circle", extra);
        return;
    }
    int vertices = 4;
    double rotation = 0;
    switch (shape) {
        case 1: vertices = 4; rotation = std::numbers::pi / 4; break;
        case 2: vertices = 3; rotation = -std::numbers::pi / 2; break;
        case 3: vertices = 4; rotation = 0; break;
        case 4: vertices = 3; rotation = std::numbers::pi / 2; break;
        default: vertices = 5; rotation = -std::numbers::pi / 2; break;
    }
    std::string points;
    for (int k = 0; k < vertices; ++k) {
        const double a = rotation + 2 * std::numbers::pi * k / vertices;
        if (k) points += ' ';
        points += SvgWriter::num(x + r * std::cos(a)) + "," + SvgWriter::num(y + r * std::sin(a));
    }
    extra.insert(extra.begin(), {"points", points});
    svg.element("polygon", extra);
}

}  // namespace

YAxis YAxis::parse(std::string_view text) {
    if (text == "pc1") return {Kind::Pc1, {}};
    if (text == "tokens" || text == "token_total") return {Kind::TokenTotal, {}};
    constexpr std::string_view prefix = "feature:";
    if (text.starts_with(prefix) && text.size() > prefix.size()) {
        return {Kind::Feature, std::string(text.substr(prefix.size()))};
    }
    throw InvalidArgument("unknown y axis '" + std::string(text) + "' (expected pc1, tokens or feature:<name>)");
}

std::string YAxis::tag() const {
    switch (kind) {
        case Kind::Pc1: return "pc1";
        case Kind::TokenTotal: return "tokens";
        case Kind::Feature: break;
    }
    return feature;
}

std::string YAxis::title() const {
    switch (kind) {
        case Kind::Pc1: return "PC1 of standardized AST features";
        case Kind::TokenTotal: return "Total token count";
        case Kind::Feature: break;
    }
    return feature;
}

RenderedFigure render_ceg(const std::vector<EvolutionGraph>& cegs, const CegFigureSpec& spec) {
    const std::vector<FlatNode> nodes = cegs.empty() ? std::vector<FlatNode>{} : flatten(cegs);
    if (nodes.empty()) throw InvalidArgument("render_ceg: empty node set");
    const auto& names = cegs.front().feature_names;

    RenderedFigure fig;
    std::vector<double> ys(nodes.size());
    if (spec.y_axis.kind == YAxis::Kind::Pc1) {
        const Eigen::MatrixXd X = standardized_matrix(nodes, select_columns(names, spec.pca_features));
        const auto p = pca(X, 1);
        for (std::size_t i = 0; i < nodes.size(); ++i) ys[i] = p.projected(static_cast<Eigen::Index>(i), 0);
        fig.explained_variance = p.explained_variance_ratio(0);
    } else {
        const std::string name = spec.y_axis.kind == YAxis::Kind::TokenTotal ? "token_total" : spec.y_axis.feature;
        const Eigen::Index col = select_columns(names, {name}).front();
        for (std::size_t i = 0; i < nodes.size(); ++i) ys[i] = nodes[i].node->features_raw(col);
    }
    std::vector<double> xs(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) xs[i] = static_cast<double>(nodes[i].node->evaluation_index);
    const Range xr = Range::of(xs, 0.04, 1.0);
    const Range yr = Range::of(ys, 0.08, 1.0);

    // Grid layout.
    std::vector<GroupKey> groups;
    std::vector<std::vector<const EvolutionGraph*>> rows;
    for (const auto& g : cegs) {
        auto it = std::find(groups.begin(), groups.end(), g.group_key);
        if (it == groups.end()) {
            groups.push_back(g.group_key);
            rows.emplace_back();
            it = groups.end() - 1;
        }
        rows[static_cast<std::size_t>(it - groups.begin())].push_back(&g);
    }
    std::size_t columns = 0;
    for (const auto& r : rows) columns = std::max(columns, r.size());

    const double left = 170;
    const double top = 72;
    const double legend_h = 18.0 * static_cast<double>(groups.size() + 1) + 10;
    const double width = left + static_cast<double>(columns) * spec.cell_width + 20;
    const double height = top + static_cast<double>(rows.size()) * spec.cell_height + legend_h + 24;
    SvgWriter svg(width, height);

    svg.text(left, 22, "Code Evolution Graphs", {{"font-size", "15"}, {"font-weight", "bold"}});
    svg.text(left, 42, "x: evaluation index; y: " + spec.y_axis.title(), {{"font-size", "11"}});
    if (fig.explained_variance) {
        svg.text(left, 58, "PC1 explained variance: " + format_fixed(*fig.explained_variance, 2),
                 {{"class", "annotation"}, {"font-size", "11"}});
    }

    for (std::size_t ri = 0; ri < rows.size(); ++ri) {
        const double y0 = top + static_cast<double>(ri) * spec.cell_height;
        const std::string color = palette_color(ri);
        svg.text(10, y0 + spec.cell_height / 2, groups[ri].label(), {{"class", "row-label"}, {"font-size", "11"}});
        for (std::size_t ci = 0; ci < rows[ri].size(); ++ci) {
            const EvolutionGraph& g = *rows[ri][ci];
            const double x0 = left + static_cast<double>(ci) * spec.cell_width;
            const double px0 = x0 + 46;
            const double px1 = x0 + spec.cell_width - 12;
            const double py0 = y0 + 24;
            const double py1 = y0 + spec.cell_height - 26;
            svg.open_group({{"class", "run"}, {"data-run", g.run_id}, {"data-group", g.group_key.label()}});
            svg.element("rect", {{"class", "frame"},
                                 {"x", SvgWriter::num(px0)},
                                 {"y", SvgWriter::num(py0)},
                                 {"width", SvgWriter::num(px1 - px0)},
                                 {"height", SvgWriter::num(py1 - py0)},
                                 {"fill", "none"},
                                 {"stroke", "#bbbbbb"}});
            svg.text((px0 + px1) / 2, y0 + 16, g.run_id, {{"font-size", "11"}, {"text-anchor", "middle"}});
            svg.text(px0 - 4, py1, format_fixed(yr.lo, 2), {{"font-size", "9"}, {"text-anchor", "end"}});
            svg.text(px0 - 4, py0 + 8, format_fixed(yr.hi, 2), {{"font-size", "9"}, {"text-anchor", "end"}});
            svg.text(px0, py1 + 12, format_fixed(xr.lo, 0), {{"font-size", "9"}});
            svg.text(px1, py1 + 12, format_fixed(xr.hi, 0), {{"font-size", "9"}, {"text-anchor", "end"}});

            // Node positions of this graph; flatten() visits graphs in input order.
            std::size_t base = 0;
            for (const auto& other : cegs) {
                if (&other == &g) break;
                base += other.nodes.size();
            }
            std::vector<std::pair<double, double>> pos(g.nodes.size());
            for (std::size_t k = 0; k < g.nodes.size(); ++k) {
                pos[k] = {xr.map(xs[base + k], px0, px1), yr.map(ys[base + k], py1, py0)};
            }
            for (const auto& [parent, child] : g.edges) {
                const auto a = pos[static_cast<std::size_t>(g.index_of(parent))];
                const auto b = pos[static_cast<std::size_t>(g.index_of(child))];
                svg.element("line", {{"class", "edge"},
                                     {"x1", SvgWriter::num(a.first)},
                                     {"y1", SvgWriter::num(a.second)},
                                     {"x2", SvgWriter::num(b.first)},
                                     {"y2", SvgWriter::num(b.second)},
                                     {"stroke", color},
                                     {"stroke-opacity", "0.45"},
                                     {"stroke-width", "1"}});
            }
            for (std::size_t k = 0; k < g.nodes.size(); ++k) {
                const CegNode& n = g.nodes[k];
                const double r = spec.node_radius * (1.0 + n.parent_frequency);
                detail::SvgAttrs attrs = {{"class", "node"},
                                          {"cx", SvgWriter::num(pos[k].first)},
                                          {"cy", SvgWriter::num(pos[k].second)},
                                          {"r", SvgWriter::num(r)},
                                          {"data-id", n.sample_id},
                                          {"data-x", std::to_string(n.evaluation_index)},
                                          {"data-y", format_shortest(ys[base + k])}};
                if (n.fitness_norm) {
                    attrs.emplace_back("data-fitness", format_shortest(*n.fitness_norm));
                    attrs.emplace_back("fill", color);
                    attrs.emplace_back("fill-opacity", format_fixed(0.25 + 0.75 * *n.fitness_norm, 2));
                    attrs.emplace_back("stroke", color);
                } else {
                    attrs.emplace_back("fill", "none");
                    attrs.emplace_back("stroke", color);
                }
                svg.element("circle", attrs);
            }
            svg.close_group();
        }
        fig.legend.push_back({groups[ri].label(), color, "circle"});
    }

    double ly = height - legend_h;
    const double lx = 16;
    for (const auto& entry : fig.legend) {
        svg.element("circle", {{"class", "legend"},
                               {"cx", SvgWriter::num(lx + 5)},
                               {"cy", SvgWriter::num(ly)},
                               {"r", "5.00"},
                               {"fill", entry.color}});
        svg.text(lx + 16, ly + 4, entry.label, {{"font-size", "11"}});
        ly += 18;
    }
    svg.text(lx, ly + 4, "radius = r0 (1 + parent frequency); hollow = no fitness", {{"font-size", "10"}});
    fig.svg = svg.finish();
    return fig;
}

RenderedFigure render_tsne(const std::vector<EvolutionGraph>& cegs, const TsneFigureSpec& spec) {
    const std::vector<FlatNode> nodes = cegs.empty() ? std::vector<FlatNode>{} : flatten(cegs);
    if (nodes.size() < 4) throw InvalidArgument("render_tsne needs at least 4 samples");
    const Eigen::MatrixXd X = standardized_matrix(nodes, select_columns(cegs.front().feature_names, spec.features));
    const auto result = tsne(X, spec.tsne);

    // Colour per method/llm, shape per run position within its group.
    std::vector<std::string> methods;
    std::vector<std::size_t> color_of(nodes.size());
    std::vector<std::size_t> shape_of(nodes.size());
    std::vector<std::pair<GroupKey, std::vector<std::string>>> runs_per_group;
    std::size_t max_runs = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const EvolutionGraph& g = *nodes[i].graph;
        const std::string m = g.group_key.llm.empty() ? g.group_key.method : g.group_key.method + "/" + g.group_key.llm;
        auto mit = std::find(methods.begin(), methods.end(), m);
        if (mit == methods.end()) mit = methods.insert(methods.end(), m);
        color_of[i] = static_cast<std::size_t>(mit - methods.begin());

        auto git = std::find_if(runs_per_group.begin(), runs_per_group.end(),
                                [&](const auto& e) { return e.first == g.group_key; });
        if (git == runs_per_group.end()) git = runs_per_group.insert(runs_per_group.end(), {g.group_key, {}});
        auto& runs = git->second;
        auto rit = std::find(runs.begin(), runs.end(), g.run_id);
        if (rit == runs.end()) rit = runs.insert(runs.end(), g.run_id);
        shape_of[i] = static_cast<std::size_t>(rit - runs.begin());
        max_runs = std::max(max_runs, runs.size());
    }

    std::vector<double> cx(nodes.size());
    std::vector<double> cy(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        cx[i] = result.coords(static_cast<Eigen::Index>(i), 0);
        cy[i] = result.coords(static_cast<Eigen::Index>(i), 1);
    }
    auto [xmin, xmax] = std::minmax_element(cx.begin(), cx.end());
    auto [ymin, ymax] = std::minmax_element(cy.begin(), cy.end());
    double span = std::max(*xmax - *xmin, *ymax - *ymin);
    if (!(span > 0)) span = 1.0;
    const double xmid = (*xmin + *xmax) / 2;
    const double ymid = (*ymin + *ymax) / 2;

    const double margin = 30;
    const double plot = spec.size;
    const double legend_w = 220;
    const double width = plot + 2 * margin + legend_w;
    const double height = plot + 2 * margin + 20;
    SvgWriter svg(width, height);
    svg.text(margin, 22, "t-SNE of code features (perplexity " + format_fixed(spec.tsne.perplexity, 2) + ", seed " +
                             std::to_string(spec.tsne.seed) + ")",
             {{"font-size", "13"}, {"font-weight", "bold"}});
    const double inner = plot - 2 * spec.max_radius;
    const double ox = margin + spec.max_radius;
    const double oy = margin + 20 + spec.max_radius;
    svg.element("rect", {{"class", "frame"},
                         {"x", SvgWriter::num(margin)},
                         {"y", SvgWriter::num(margin + 20)},
                         {"width", SvgWriter::num(plot)},
                         {"height", SvgWriter::num(plot)},
                         {"fill", "none"},
                         {"stroke", "#bbbbbb"}});
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double px = ox + inner / 2 + (cx[i] - xmid) / span * inner;
        const double py = oy + inner / 2 - (cy[i] - ymid) / span * inner;
        const auto& fit = nodes[i].node->fitness_norm;
        const double r = fit ? spec.min_radius + (spec.max_radius - spec.min_radius) * *fit : spec.min_radius;
        const std::string color = palette_color(color_of[i]);
        detail::SvgAttrs attrs = {{"class", "point"}, {"data-id", nodes[i].node->sample_id}};
        if (fit) attrs.emplace_back("fill-opacity", "0.75");
        draw_glyph(svg, shape_of[i] % kShapes.size(), px, py, r, fit ? color : "none", color, attrs);
    }

    double ly = margin + 40;
    const double lx = margin + plot + 24;
    svg.text(lx, ly - 12, "method", {{"font-size", "11"}, {"font-weight", "bold"}});
    for (std::size_t m = 0; m < methods.size(); ++m) {
        draw_glyph(svg, 0, lx + 6, ly, 5, palette_color(m), palette_color(m), {{"class", "legend"}});
        svg.text(lx + 16, ly + 4, methods[m], {{"font-size", "11"}});
        ly += 18;
    }
    ly += 14;
    svg.text(lx, ly - 12, "run", {{"font-size", "11"}, {"font-weight", "bold"}});
    const std::size_t shapes_used = std::min(max_runs, kShapes.size());
    for (std::size_t s = 0; s < shapes_used; ++s) {
        draw_glyph(svg, s, lx + 6, ly, 5, "#777777", "#777777", {{"class", "legend"}});
        std::string label = "run " + std::to_string(s + 1);
        for (std::size_t extra = s + kShapes.size(); extra < max_runs; extra += kShapes.size()) {
            label += ", " + std::to_string(extra + 1);
        }
        svg.text(lx + 16, ly + 4, label, {{"font-size", "11"}});
        ly += 18;
    }
    svg.text(lx, ly + 8, "size: normalized fitness", {{"font-size", "10"}});

    RenderedFigure fig;
    for (std::size_t m = 0; m < methods.size(); ++m) fig.legend.push_back({methods[m], palette_color(m), ""});
    for (std::size_t s = 0; s < shapes_used; ++s) {
        fig.legend.push_back({"run " + std::to_string(s + 1), "", kShapes[s]});
    }
    fig.svg = svg.finish();
    return fig;
}

RenderedFigure render_heatmap(const CorrelationTable& table) {
    if (table.groups.empty() || table.features.empty()) throw InvalidArgument("render_heatmap: empty table");
    const double cw = 38;
    const double ch = 26;
    std::size_t label_len = 0;
    for (const auto& g : table.groups) label_len = std::max(label_len, g.label().size());
    std::size_t feature_len = 0;
    for (const auto& f : table.features) feature_len = std::max(feature_len, f.size());
    const double left = 16 + 6.5 * static_cast<double>(label_len);
    const double top = 40 + 5.2 * static_cast<double>(feature_len);
    const double width = left + cw * static_cast<double>(table.features.size()) + 40;
    const double height = top + ch * static_cast<double>(table.groups.size()) + 70;

    SvgWriter svg(width, height);
    svg.text(10, 20, "Spearman correlation with normalized fitness", {{"font-size", "13"}, {"font-weight", "bold"}});
    for (std::size_t c = 0; c < table.features.size(); ++c) {
        const double x = left + cw * (static_cast<double>(c) + 0.5);
        const double y = top - 6;
        svg.text(x, y, table.features[c],
                 {{"class", "column-label"},
                  {"font-size", "10"},
                  {"transform", "rotate(-60 " + SvgWriter::num(x) + " " + SvgWriter::num(y) + ")"}});
    }
    for (std::size_t r = 0; r < table.groups.size(); ++r) {
        const double y = top + ch * static_cast<double>(r);
        svg.text(left - 6, y + ch / 2 + 4, table.groups[r].label(),
                 {{"class", "row-label"}, {"font-size", "10"}, {"text-anchor", "end"}});
        for (std::size_t c = 0; c < table.features.size(); ++c) {
            const double x = left + cw * static_cast<double>(c);
            const auto& rho = table.rho[r][c];
            svg.element("rect", {{"class", "cell"},
                                 {"x", SvgWriter::num(x)},
                                 {"y", SvgWriter::num(y)},
                                 {"width", SvgWriter::num(cw)},
                                 {"height", SvgWriter::num(ch)},
                                 {"fill", rho ? diverging_color(*rho) : "#ffffff"},
                                 {"stroke", "#ffffff"},
                                 {"data-row", std::to_string(r)},
                                 {"data-col", std::to_string(c)}});
            if (rho) {
                svg.text(x + cw / 2, y + ch / 2 + 3.5, format_fixed(*rho, 2),
                         {{"class", "label"},
                          {"data-row", std::to_string(r)},
                          {"data-col", std::to_string(c)},
                          {"font-size", "9"},
                          {"text-anchor", "middle"},
                          {"fill", std::abs(*rho) > 0.6 ? "#ffffff" : "#222222"}});
            }
        }
    }

    // Colour bar from -1 to +1.
    const double by = top + ch * static_cast<double>(table.groups.size()) + 24;
    const int steps = 20;
    const double bw = 10;
    for (int s = 0; s <= steps; ++s) {
        const double v = -1.0 + 2.0 * s / steps;
        svg.element("rect", {{"class", "scale"},
                             {"x", SvgWriter::num(left + bw * s)},
                             {"y", SvgWriter::num(by)},
                             {"width", SvgWriter::num(bw)},
                             {"height", "10.00"},
                             {"fill", diverging_color(v)}});
    }
    svg.text(left, by + 24, "-1", {{"font-size", "9"}, {"text-anchor", "middle"}});
    svg.text(left + bw * steps / 2 + bw / 2, by + 24, "0", {{"font-size", "9"}, {"text-anchor", "middle"}});
    svg.text(left + bw * (steps + 1), by + 24, "+1", {{"font-size", "9"}, {"text-anchor", "middle"}});

    RenderedFigure fig;
    fig.legend = {{"-1", diverging_color(-1), ""}, {"0", diverging_color(0), ""}, {"+1", diverging_color(1), ""}};
    fig.svg = svg.finish();
    return fig;
}

std::string features_csv(const Dataset& dataset, const FeatureTable& table, bool include_eigencentrality) {
    const auto names = canonical_feature_names(include_eigencentrality);
    std::vector<Eigen::Index> cols;
    for (const auto& n : names) {
        const Eigen::Index c = table.column_of(n);
        if (c < 0) throw InvalidArgument("feature table lacks column '" + n + "'");
        cols.push_back(c);
    }
    std::string out = "id,run_id,benchmark,method,llm,evaluation_index,fitness";
    for (const auto& n : names) out += "," + n;
    out += '\n';
    for (std::size_t r = 0; r < table.sample_ids.size(); ++r) {
        const auto idx = dataset.find(table.sample_ids[r]);
        if (!idx) throw InvalidArgument("feature row for unknown sample '" + table.sample_ids[r] + "'");
        const CodeSample& s = dataset.samples()[*idx];
        out += detail::csv_field(s.id) + ',' + detail::csv_field(s.run_id) + ',' + detail::csv_field(s.benchmark) + ',' +
               detail::csv_field(s.method) + ',' + detail::csv_field(s.llm) + ',' + std::to_string(s.evaluation_index) +
               ',';
        if (s.fitness_raw) out += format_shortest(*s.fitness_raw);
        for (Eigen::Index c : cols) out += ',' + format_shortest(table.values(static_cast<Eigen::Index>(r), c));
        out += '\n';
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace codeevo
