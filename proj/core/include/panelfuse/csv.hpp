#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "panelfuse/panel.hpp"

namespace panelfuse {

/// A panel read from long-format CSV together with the original unit and
/// period labels; position k in each label list is dense rank k + 1.
struct LabeledPanel {
    PanelData panel;
    std::vector<std::string> individual_labels;
    std::vector<std::string> period_labels;
};

/// Reads `i,t,y,z1,...,z{P-1}`. Labels are ranked numerically when every label
/// parses as a number, lexicographically otherwise. Every (i, t) combination
/// must appear exactly once. Throws ParseError carrying the line number.
LabeledPanel read_panel_csv(std::istream& in);
LabeledPanel ingest_csv(const std::filesystem::path& path);

/// Writes the panel in the same format with 17 significant digits. Labels
/// default to dense 1-based ranks.
void write_panel_csv(std::ostream& out, const PanelData& panel,
                     const std::vector<std::string>& individual_labels = {},
                     const std::vector<std::string>& period_labels = {});
void export_csv(const std::filesystem::path& path, const PanelData& panel);

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

}  // namespace panelfuse
