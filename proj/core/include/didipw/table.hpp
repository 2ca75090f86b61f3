#pragma once

#include <string>
#include <vector>

#include "didipw/dgp.hpp"
#include "didipw/inference.hpp"
#include "didipw/ingest.hpp"

namespace didipw {

struct ResultRow {
    std::string label;
    InferenceResult inference;
};

struct ResultsPanel {
    std::string caption; // optional: e.g. "Panel A: ..."
    std::vector<ResultRow> rows;
};

struct TableFormat {
    int effect_decimals = 2;
    int p_decimals = 4;
    // Print a p-value that rounds to zero as "<0.0001" (at 4 decimals) when
    // the standard error is positive; an exact "0.0000" appears only when
    // std_error = 0.
    bool mark_tiny_pvalues = true;
    bool clustered = false; // switches the footnote wording

    // Layout used by the published tables: everything at 2 decimals, rounded
    // zeros printed as-is.
    static TableFormat paper_style() {
        TableFormat f;
        f.p_decimals = 2;
        f.mark_tiny_pvalues = false;
        return f;
    }
};

inline constexpr const char* kBootstrapFootnote = "Standard errors are estimated by bootstrap.";
inline constexpr const char* kClusteredFootnote = "Bootstrapped and clustered standard errors.";

// Results table with the columns Effect, Standard error, P-value, Number of
// observations; one row per outcome, optional panel captions, bootstrap
// footnote. Throws ValidationError when no rows are supplied.
std::string results_table_text(const std::vector<ResultsPanel>& panels,
                               const TableFormat& format = TableFormat{});
std::string results_table_delimited(const std::vector<ResultsPanel>& panels, char delimiter = ',',
                                    const TableFormat& format = TableFormat{});

// Two-group descriptive statistics in the mean / std.dev / mean difference /
// p-value layout, with sample sizes as the final row.
std::string descriptives_table_text(const Descriptives& d,
                                    const TableFormat& format = TableFormat{});
std::string descriptives_table_delimited(const Descriptives& d, char delimiter = ',',
                                         const TableFormat& format = TableFormat{});

// Monte Carlo summary as a metric/value table.
std::string simulation_table_text(const MonteCarloSummary& s);
std::string simulation_table_delimited(const MonteCarloSummary& s, char delimiter = ',');

// Formatting helpers shared by the renderers.
std::string format_fixed(double x, int decimals);
std::string format_count(std::size_t n); // thousands separators: 18712 -> "18,712"

} // namespace didipw
