// svg.hpp -- bare-bones line plots (statistic vs n, optionally log-log).
#pragma once

#include <string>
#include <vector>

namespace rwre::io {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

class SvgPlot {
  public:
    SvgPlot(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

    void set_loglog(bool on) { loglog_ = on; }
    void add_series(Series s) { series_.push_back(std::move(s)); }
    // Optional straight reference line y = a + b*x in plot coordinates
    // (after any log transform).
    void add_reference_line(double intercept, double slope, std::string label);

    std::string render() const;
    void write_atomic(const std::string& path) const;

  private:
    std::string title_, x_label_, y_label_;
    bool loglog_ = false;
    std::vector<Series> series_;
    struct RefLine {
        double intercept, slope;
        std::string label;
    };
    std::vector<RefLine> ref_lines_;
};

}  // namespace rwre::io
