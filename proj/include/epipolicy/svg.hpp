#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "epipolicy/dates.hpp"
#include "epipolicy/effectiveness.hpp"
#include "epipolicy/errors.hpp"
#include "epipolicy/esir.hpp"
#include "epipolicy/timeseries.hpp"

namespace epipolicy {

namespace svg_detail {

inline std::string xml_escape(std::string_view text) {
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

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string num4(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

}  // namespace svg_detail

// Small append-only SVG document builder producing deterministic output.
class SvgDoc {
  public:
    SvgDoc(double width, double height) : width_(width), height_(height) {}

    void comment(const std::string& text) { body_ += "<!-- " + text + " -->\n"; }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double stroke_width = 1.0, const std::string& dash = "") {
        using svg_detail::num;
        body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
                 "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
                 num(stroke_width) + "\"";
        if (!dash.empty()) body_ += " stroke-dasharray=\"" + dash + "\"";
        body_ += "/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                  double stroke_width, const std::string& cls, const std::string& dash = "") {
        body_ += "<polyline class=\"" + cls + "\" fill=\"none\" stroke=\"" + stroke +
                 "\" stroke-width=\"" + svg_detail::num(stroke_width) + "\"";
        if (!dash.empty()) body_ += " stroke-dasharray=\"" + dash + "\"";
        body_ += " points=\"";
        for (const auto& [x, y] : pts) body_ += svg_detail::num(x) + "," + svg_detail::num(y) + " ";
        body_ += "\"/>\n";
    }

    void polygon(const std::vector<std::pair<double, double>>& pts, const std::string& fill,
                 double opacity, const std::string& cls) {
        body_ += "<polygon class=\"" + cls + "\" fill=\"" + fill + "\" fill-opacity=\"" +
                 svg_detail::num(opacity) + "\" stroke=\"none\" points=\"";
        for (const auto& [x, y] : pts) body_ += svg_detail::num(x) + "," + svg_detail::num(y) + " ";
        body_ += "\"/>\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& cls = "") {
        using svg_detail::num;
        body_ += "<rect";
        if (!cls.empty()) body_ += " class=\"" + cls + "\"";
        body_ += " x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" +
                 num(h) + "\" fill=\"" + fill + "\"/>\n";
    }

    void text(double x, double y, const std::string& content, double size,
              const std::string& anchor = "start", const std::string& fill = "#333333") {
        using svg_detail::num;
        body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + num(size) +
                 "\" font-family=\"sans-serif\" text-anchor=\"" + anchor + "\" fill=\"" + fill +
                 "\">" + svg_detail::xml_escape(content) + "</text>\n";
    }

    std::string str() const {
        std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + svg_detail::num(width_) +
               "\" height=\"" + svg_detail::num(height_) + "\" viewBox=\"0 0 " +
               svg_detail::num(width_) + " " + svg_detail::num(height_) + "\">\n";
        out += body_;
        out += "</svg>\n";
        return out;
    }

  private:
    double width_;
    double height_;
    std::string body_;
};

// Prediction figure: actual infection proportion as a green dotted curve,
// posterior-predictive median as a red curve with a shaded credible band,
// and vertical rules at the first (blue) and last (green) prediction day.
inline std::string figure_prediction(const CompartmentSeries& actual,
                                     const PredictiveSummary& predicted,
                                     const std::string& title) {
    if (actual.rows.empty() || predicted.dates.empty()) {
        throw EmptyInputError("figure_prediction: empty series");
    }
    const double width = 760, height = 420;
    const double left = 86, right = width - 30, top = 56, bottom = height - 66;

    const int x_min = actual.rows.front().date.serial();
    const int x_max = std::max(actual.rows.back().date.serial(), predicted.dates.back().serial());
    double y_max = 0.0;
    for (const auto& row : actual.rows) y_max = std::max(y_max, row.i);
    for (double v : predicted.upper_i) y_max = std::max(y_max, v);
    if (y_max <= 0.0) y_max = 1e-6;
    y_max *= 1.08;

    auto px = [&](Date d) {
        return left + (right - left) * (d.serial() - x_min) / std::max(1, x_max - x_min);
    };
    auto py = [&](double v) { return bottom - (bottom - top) * (v / y_max); };

    SvgDoc doc(width, height);
    doc.comment("epipolicy prediction figure");
    doc.rect(0, 0, width, height, "#ffffff");
    doc.text(width / 2, 28, title, 15, "middle", "#111111");

    // axes and ticks
    doc.line(left, top, left, bottom, "#444444");
    doc.line(left, bottom, right, bottom, "#444444");
    for (int k = 0; k <= 5; ++k) {
        const double v = y_max * k / 5.0;
        doc.line(left - 4, py(v), left, py(v), "#444444");
        doc.text(left - 8, py(v) + 4, svg_detail::num4(v), 10, "end");
    }
    const int span_days = std::max(1, x_max - x_min);
    const int tick_step = std::max(1, span_days / 6);
    for (int d = 0; d <= span_days; d += tick_step) {
        const Date date = Date(x_min) + d;
        doc.line(px(date), bottom, px(date), bottom + 4, "#444444");
        doc.text(px(date), bottom + 18, date.to_string(), 9, "middle");
    }
    doc.text(24, (top + bottom) / 2, "infection proportion", 11, "middle");

    // credible band
    std::vector<std::pair<double, double>> band;
    for (std::size_t k = 0; k < predicted.dates.size(); ++k) {
        band.emplace_back(px(predicted.dates[k]), py(predicted.upper_i[k]));
    }
    for (std::size_t k = predicted.dates.size(); k-- > 0;) {
        band.emplace_back(px(predicted.dates[k]), py(predicted.lower_i[k]));
    }
    doc.polygon(band, "#e06666", 0.3, "credible-band");

    // prediction window rules
    doc.line(px(predicted.dates.front()), top, px(predicted.dates.front()), bottom, "#1f4ecc",
             1.5);
    doc.line(px(predicted.dates.back()), top, px(predicted.dates.back()), bottom, "#2e8b2e", 1.5);

    // actual and predicted curves
    std::vector<std::pair<double, double>> actual_pts;
    for (const auto& row : actual.rows) actual_pts.emplace_back(px(row.date), py(row.i));
    doc.polyline(actual_pts, "#2e8b2e", 1.6, "actual", "2,4");
    std::vector<std::pair<double, double>> median_pts;
    for (std::size_t k = 0; k < predicted.dates.size(); ++k) {
        median_pts.emplace_back(px(predicted.dates[k]), py(predicted.median_i[k]));
    }
    doc.polyline(median_pts, "#cc0000", 1.8, "predicted");

    // legend
    const double lx = left + 12, ly = top + 10;
    doc.line(lx, ly, lx + 26, ly, "#2e8b2e", 1.6, "2,4");
    doc.text(lx + 32, ly + 4, "actual", 10);
    doc.line(lx, ly + 16, lx + 26, ly + 16, "#cc0000", 1.8);
    doc.text(lx + 32, ly + 20, "predicted median", 10);
    doc.rect(lx, ly + 26, 26, 8, "#e06666");
    doc.text(lx + 32, ly + 34, "credible band", 10);
    return doc.str();
}

// Grouped bar chart of effect rates per region, four series per region:
// total mask (blue), total vaccine (orange), max mask (grey), max vaccine
// (yellow). `region_order` controls the x-axis ordering.
inline std::string figure_effect_bars(const std::vector<EffectRateRecord>& records,
                                      const std::vector<std::string>& region_order,
                                      const std::string& title) {
    if (region_order.empty()) throw EmptyInputError("figure_effect_bars: no regions");

    struct Series {
        const char* cls;
        const char* label;
        const char* color;
        PolicyKind kind;
        bool total;
    };
    const Series series[4] = {
        {"series-total-mask", "total mask", "#4472c4", PolicyKind::mask, true},
        {"series-total-vaccine", "total vaccine", "#ed7d31", PolicyKind::vaccine, true},
        {"series-max-mask", "max mask", "#a5a5a5", PolicyKind::mask, false},
        {"series-max-vaccine", "max vaccine", "#ffc000", PolicyKind::vaccine, false},
    };

    auto value_of = [&](const std::string& region, const Series& s) -> const double* {
        for (const auto& rec : records) {
            if (rec.region == region && rec.kind == s.kind) {
                return s.total ? &rec.total_rate : &rec.max_rate;
            }
        }
        return nullptr;
    };

    double v_min = 0.0, v_max = 0.0;
    for (const auto& region : region_order) {
        for (const auto& s : series) {
            if (const double* v = value_of(region, s)) {
                v_min = std::min(v_min, *v);
                v_max = std::max(v_max, *v);
            }
        }
    }
    if (v_max <= v_min) v_max = v_min + 1.0;

    const double width = std::max(760.0, 120.0 + 64.0 * static_cast<double>(region_order.size()));
    const double height = 440;
    const double left = 80, right = width - 30, top = 64, bottom = height - 70;
    const double group_w = (right - left) / static_cast<double>(region_order.size());
    const double bar_w = group_w / 5.5;

    auto py = [&](double v) { return bottom - (bottom - top) * (v - v_min) / (v_max - v_min); };

    SvgDoc doc(width, height);
    doc.comment("epipolicy effect-rate bars");
    doc.rect(0, 0, width, height, "#ffffff");
    doc.text(width / 2, 26, title, 15, "middle", "#111111");
    doc.line(left, top, left, bottom, "#444444");
    for (int k = 0; k <= 5; ++k) {
        const double v = v_min + (v_max - v_min) * k / 5.0;
        doc.line(left - 4, py(v), left, py(v), "#444444");
        doc.text(left - 8, py(v) + 4, svg_detail::num4(v), 10, "end");
    }
    doc.line(left, py(0.0), right, py(0.0), "#444444");  // zero line

    for (std::size_t g = 0; g < region_order.size(); ++g) {
        const double gx = left + group_w * static_cast<double>(g);
        for (int s = 0; s < 4; ++s) {
            const double* v = value_of(region_order[g], series[s]);
            if (!v) continue;
            const double x = gx + bar_w * (0.5 + static_cast<double>(s));
            const double y0 = py(0.0);
            const double y1 = py(*v);
            doc.rect(x, std::min(y0, y1), bar_w * 0.9, std::max(1.0, std::fabs(y1 - y0)),
                     series[s].color, series[s].cls);
        }
        doc.text(gx + group_w / 2.0, bottom + 16, region_order[g], 10, "middle");
    }

    double lx = left + 10;
    for (const auto& s : series) {
        doc.rect(lx, top - 26, 14, 10, s.color, std::string(s.cls) + "-legend");
        doc.text(lx + 18, top - 17, s.label, 10);
        lx += 18.0 + 8.0 * static_cast<double>(std::string(s.label).size());
    }
    return doc.str();
}

}  // namespace epipolicy
