#include "svg.hpp"

#include <array>

#include "format.hpp"

namespace codeevo::detail {

SvgWriter::SvgWriter(double width, double height) {
    out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(width) + "\" height=\"" +
            num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) +
            "\" font-family=\"Helvetica, Arial, sans-serif\">\n";
    element("rect", {{"x", "0"}, {"y", "0"}, {"width", num(width)}, {"height", num(height)}, {"fill", "#ffffff"}});
}

void SvgWriter::indent() { out_.append(static_cast<std::size_t>(depth_) * 2, ' '); }

void SvgWriter::write_attrs(const SvgAttrs& attrs) {
    for (const auto& [key, value] : attrs) {
        out_ += ' ';
        out_ += key;
        out_ += "=\"";
        out_ += escape(value);
        out_ += '"';
    }
}

void SvgWriter::element(std::string_view tag, const SvgAttrs& attrs) {
    indent();
    out_ += '<';
    out_ += tag;
    write_attrs(attrs);
    out_ += "/>\n";
}

void SvgWriter::text(double x, double y, std::string_view content, const SvgAttrs& attrs) {
    indent();
    out_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\"";
    write_attrs(attrs);
    out_ += '>';
    out_ += escape(content);
    out_ += "</text>\n";
}

void SvgWriter::open_group(const SvgAttrs& attrs) {
    indent();
    out_ += "<g";
    write_attrs(attrs);
    out_ += ">\n";
    ++depth_;
}

void SvgWriter::close_group() {
    --depth_;
    indent();
    out_ += "</g>\n";
}

std::string SvgWriter::finish() {
    while (depth_ > 1) close_group();
    out_ += "</svg>\n";
    return std::move(out_);
}

std::string SvgWriter::num(double v) { return format_fixed(v, 2); }

std::string SvgWriter::escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string palette_color(std::size_t index) {
    static constexpr std::array<const char*, 10> colors = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return colors[index % colors.size()];
}

}  // namespace codeevo::detail
