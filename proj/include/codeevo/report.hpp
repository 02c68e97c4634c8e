#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codeevo/ceg.hpp"
#include "codeevo/embed.hpp"
#include "codeevo/features.hpp"
#include "codeevo/ingest.hpp"

namespace codeevo {

/// Quantity plotted on the y axis of a CEG figure.
struct YAxis {
    enum class Kind { Pc1, TokenTotal, Feature };
    Kind kind = Kind::Pc1;
    /// Feature name for Kind::Feature.
    std::string feature;

    /// Accepts "pc1", "tokens" (or "token_total") and "feature:<name>".
    static YAxis parse(std::string_view text);
    /// File-name friendly tag: "pc1", "tokens" or the feature name.
    std::string tag() const;
    std::string title() const;
};

struct LegendEntry {
    std::string label;
    std::string color;
    /// Glyph shape name; empty for colour-only entries.
    std::string shape;
};

struct RenderedFigure {
    std::string svg;
    std::vector<LegendEntry> legend;
    /// Explained-variance fraction of PC1 when the y axis is pc1.
    std::optional<double> explained_variance;
};

struct CegFigureSpec {
    YAxis y_axis;
    /// Columns fed to PCA for the pc1 axis; empty means every feature.
    std::vector<std::string> pca_features;
    /// Base node radius r0; a node is drawn with radius r0 * (1 + parent_frequency).
    double node_radius = 3.0;
    double cell_width = 360.0;
    double cell_height = 240.0;
};

/// CEG grid: one row per group, one column per run of that group. Nodes sit
/// at (evaluation_index, y); edges run parent -> child.
RenderedFigure render_ceg(const std::vector<EvolutionGraph>& cegs, const CegFigureSpec& spec);

struct TsneFigureSpec {
    /// Standardized columns embedded by t-SNE; empty means every feature.
    std::vector<std::string> features;
    TsneOptions tsne;
    double min_radius = 2.5;
    double max_radius = 9.0;
    double size = 560.0;
};

/// t-SNE scatter of all nodes: colour = method/llm, shape = run within its
/// group, radius grows with fitness_norm.
RenderedFigure render_tsne(const std::vector<EvolutionGraph>& cegs, const TsneFigureSpec& spec);

/// Diverging heatmap of a correlation table with two-decimal cell labels.
RenderedFigure render_heatmap(const CorrelationTable& table);

/// features.csv: sample metadata followed by the canonical feature columns.
std::string features_csv(const Dataset& dataset, const FeatureTable& table, bool include_eigencentrality = false);

/// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace codeevo
