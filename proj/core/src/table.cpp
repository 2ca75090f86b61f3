#include "didipw/table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace didipw {

std::string format_fixed(double x, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, x);
    // Normalize "-0.00" to "0.00".
    std::string s(buf);
    if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') {
        s.erase(0, 1);
    }
    return s;
}

std::string format_count(std::size_t n) {
    std::string digits = std::to_string(n);
    std::string out;
    out.reserve(digits.size() + digits.size() / 3);
    const std::size_t lead = digits.size() % 3 == 0 ? 3 : digits.size() % 3;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (i != 0 && (i - lead) % 3 == 0 && i >= lead) out += ',';
        out += digits[i];
    }
    return out;
}

namespace {

std::string format_pvalue(double p, double std_error, const TableFormat& f) {
    const double rounding_floor = 0.5 * std::pow(10.0, -f.p_decimals);
    if (f.mark_tiny_pvalues && std_error > 0.0 && p < rounding_floor) {
        return "<" + format_fixed(std::pow(10.0, -f.p_decimals), f.p_decimals);
    }
    return format_fixed(p, f.p_decimals);
}

using Grid = std::vector<std::vector<std::string>>;

// Pads a grid into aligned text: first column left, the rest right.
std::string render_grid(const Grid& grid, const std::vector<std::string>& full_width_lines_before,
                        const std::vector<std::string>& full_width_lines_after) {
    std::vector<std::size_t> widths;
    for (const auto& row : grid) {
        if (widths.size() < row.size()) widths.resize(row.size(), 0);
        for (std::size_t j = 0; j < row.size(); ++j) {
            widths[j] = std::max(widths[j], row[j].size());
        }
    }
    std::ostringstream out;
    for (const auto& line : full_width_lines_before) out << line << "\n";
    for (const auto& row : grid) {
        std::string line;
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j > 0) line += "  ";
            const std::size_t pad = widths[j] - row[j].size();
            if (j == 0) {
                line += row[j] + std::string(pad, ' ');
            } else {
                line += std::string(pad, ' ') + row[j];
            }
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out << line << "\n";
    }
    for (const auto& line : full_width_lines_after) out << line << "\n";
    return out.str();
}

std::string render_grid_delimited(const Grid& grid, char delimiter) {
    std::ostringstream out;
    for (const auto& row : grid) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j > 0) out << delimiter;
            out << csv_escape(row[j], delimiter);
        }
        out << "\n";
    }
    return out.str();
}

void check_nonempty(const std::vector<ResultsPanel>& panels) {
    std::size_t rows = 0;
    for (const auto& panel : panels) rows += panel.rows.size();
    if (rows == 0) {
        throw ValidationError("results_table: empty effect list");
    }
}

Grid results_header() {
    return {{"", "Effect", "Standard error", "P-value", "Number of observations"}};
}

std::vector<std::string> results_row(const ResultRow& row, const TableFormat& f,
                                     bool delimited) {
    return {row.label, format_fixed(row.inference.effect, f.effect_decimals),
            format_fixed(row.inference.std_error, f.effect_decimals),
            format_pvalue(row.inference.p_value, row.inference.std_error, f),
            delimited ? std::to_string(row.inference.n_obs) : format_count(row.inference.n_obs)};
}

} // namespace

std::string results_table_text(const std::vector<ResultsPanel>& panels, const TableFormat& f) {
    check_nonempty(panels);
    std::ostringstream out;
    for (const auto& panel : panels) {
        Grid grid = results_header();
        for (const auto& row : panel.rows) grid.push_back(results_row(row, f, false));
        std::vector<std::string> before;
        if (!panel.caption.empty()) before.push_back(panel.caption);
        out << render_grid(grid, before, {});
        out << "\n";
    }
    out << "Note: " << (f.clustered ? kClusteredFootnote : kBootstrapFootnote) << "\n";
    return out.str();
}

std::string results_table_delimited(const std::vector<ResultsPanel>& panels, char delimiter,
                                    const TableFormat& f) {
    check_nonempty(panels);
    const bool single_panel = panels.size() == 1;
    Grid grid;
    grid.push_back({single_panel ? "outcome" : "panel", "effect", "std_error", "p_value",
                    "n_obs"});
    if (!single_panel) grid.back().insert(grid.back().begin() + 1, "outcome");
    for (const auto& panel : panels) {
        for (const auto& row : panel.rows) {
            auto cells = results_row(row, f, true);
            if (!single_panel) cells.insert(cells.begin(), panel.caption);
            grid.push_back(std::move(cells));
        }
    }
    return render_grid_delimited(grid, delimiter);
}

std::string descriptives_table_text(const Descriptives& d, const TableFormat& f) {
    Grid grid;
    grid.push_back({"", "Treated", "", "Non-treated", "", "", ""});
    grid.push_back({"", "mean", "std.dev", "mean", "std.dev", "mean difference", "p-value"});
    for (const auto& row : d.rows) {
        grid.push_back({row.variable, format_fixed(row.mean_treated, f.effect_decimals),
                        format_fixed(row.sd_treated, f.effect_decimals),
                        format_fixed(row.mean_control, f.effect_decimals),
                        format_fixed(row.sd_control, f.effect_decimals),
                        format_fixed(row.mean_difference, f.effect_decimals),
                        format_fixed(row.p_value, f.p_decimals)});
    }
    grid.push_back({"Number of observations", format_count(d.n_treated), "",
                    format_count(d.n_control), "", "", ""});
    return render_grid(grid, {}, {});
}

std::string descriptives_table_delimited(const Descriptives& d, char delimiter,
                                         const TableFormat& f) {
    Grid grid;
    grid.push_back({"variable", "mean_treated", "sd_treated", "mean_control", "sd_control",
                    "mean_difference", "p_value"});
    for (const auto& row : d.rows) {
        grid.push_back({row.variable, format_fixed(row.mean_treated, f.effect_decimals),
                        format_fixed(row.sd_treated, f.effect_decimals),
                        format_fixed(row.mean_control, f.effect_decimals),
                        format_fixed(row.sd_control, f.effect_decimals),
                        format_fixed(row.mean_difference, f.effect_decimals),
                        format_fixed(row.p_value, f.p_decimals)});
    }
    grid.push_back({"n", std::to_string(d.n_treated), "", std::to_string(d.n_control), "", "",
                    ""});
    return render_grid_delimited(grid, delimiter);
}

namespace {

Grid simulation_grid(const MonteCarloSummary& s) {
    return {
        {"metric", "value"},
        {"replications", std::to_string(s.replications)},
        {"true_effect", format_fixed(s.true_atet, 4)},
        {"mean_estimate", format_fixed(s.mean_estimate, 4)},
        {"mean_bias", format_fixed(s.mean_bias, 4)},
        {"rmse", format_fixed(s.rmse, 4)},
        {"coverage_95ci", format_fixed(s.coverage95, 4)},
        {"rejection_rate_5pct", format_fixed(s.rejection_rate_5pct, 4)},
        {"mean_std_error", format_fixed(s.mean_std_error, 4)},
    };
}

} // namespace

std::string simulation_table_text(const MonteCarloSummary& s) {
    return render_grid(simulation_grid(s), {}, {});
}

std::string simulation_table_delimited(const MonteCarloSummary& s, char delimiter) {
    return render_grid_delimited(simulation_grid(s), delimiter);
}

} // namespace didipw
