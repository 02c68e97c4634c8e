#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace codeevo::detail {

using SvgAttrs = std::vector<std::pair<std::string_view, std::string>>;

/// Minimal SVG 1.1 writer with locale-independent number formatting.
class SvgWriter {
public:
    SvgWriter(double width, double height);

    void element(std::string_view tag, const SvgAttrs& attrs);
    void text(double x, double y, std::string_view content, const SvgAttrs& attrs = {});
    void open_group(const SvgAttrs& attrs = {});
    void close_group();
    std::string finish();

    /// Coordinates are written with two decimals.
    static std::string num(double v);
    static std::string escape(std::string_view text);

private:
    void write_attrs(const SvgAttrs& attrs);
    void indent();

    std::string out_;
    int depth_ = 1;
};

/// Categorical palette entry, cycled for indices beyond its length.
std::string palette_color(std::size_t index);

}  // namespace codeevo::detail
