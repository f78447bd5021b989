#include "panelfuse/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "panelfuse/error.hpp"

namespace panelfuse {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\"");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\"");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::optional<double> parse_double(const std::string& s) {
    double v = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    if (begin != end && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || begin == end) return std::nullopt;
    return v;
}

// Dense ranks for labels: numeric order when all are numbers, else lexicographic.
std::vector<std::string> ordered_labels(const std::map<std::string, std::size_t>& seen) {
    std::vector<std::string> labels;
    labels.reserve(seen.size());
    bool numeric = true;
    for (const auto& [label, line] : seen) {
        labels.push_back(label);
        numeric = numeric && parse_double(label).has_value();
    }
    if (numeric) {
        std::stable_sort(labels.begin(), labels.end(), [](const auto& a, const auto& b) {
            return *parse_double(a) < *parse_double(b);
        });
    }
    return labels;
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

LabeledPanel read_panel_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header = split(line);
            break;
        }
    }
    if (header.size() < 3 || header[0] != "i" || header[1] != "t" || header[2] != "y") {
        throw ParseError("header must start with i,t,y", line_no);
    }
    for (std::size_t k = 3; k < header.size(); ++k) {
        if (header[k] != "z" + std::to_string(k - 2)) {
            throw ParseError("expected column 'z" + std::to_string(k - 2) + "', found '" +
                                 header[k] + "'",
                             line_no);
        }
    }
    const std::size_t n_cols = header.size();

    struct Row {
        std::string unit, period;
        std::vector<double> values;  // y, z1, ...
        std::size_t line;
    };
    std::vector<Row> rows;
    std::map<std::string, std::size_t> units, periods;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split(line);
        if (fields.size() != n_cols) {
            throw ParseError("expected " + std::to_string(n_cols) + " fields, found " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        Row r{fields[0], fields[1], {}, line_no};
        if (r.unit.empty() || r.period.empty()) throw ParseError("empty i or t label", line_no);
        for (std::size_t k = 2; k < n_cols; ++k) {
            const auto v = parse_double(fields[k]);
            if (!v || !std::isfinite(*v)) {
                throw ParseError("column '" + header[k] + "' is not a finite number: '" +
                                     fields[k] + "'",
                                 line_no);
            }
            r.values.push_back(*v);
        }
        units.emplace(r.unit, line_no);
        periods.emplace(r.period, line_no);
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw ParseError("no data rows", line_no);

    LabeledPanel out{PanelData(2, 2, Eigen::VectorXd::Zero(4), Eigen::MatrixXd(0, 4)),
                     ordered_labels(units), ordered_labels(periods)};
    const auto n = static_cast<Index>(out.individual_labels.size());
    const auto tc = static_cast<Index>(out.period_labels.size());
    if (n < 2 || tc < 2) {
        throw ParseError("panel needs at least two individuals and two periods", 0);
    }
    std::map<std::string, Index> unit_rank, period_rank;
    for (Index k = 0; k < n; ++k) unit_rank[out.individual_labels[static_cast<std::size_t>(k)]] = k;
    for (Index k = 0; k < tc; ++k) period_rank[out.period_labels[static_cast<std::size_t>(k)]] = k;

    const PanelShape shape{n, tc, static_cast<Index>(n_cols) - 2};
    Eigen::VectorXd y(shape.n_cells());
    Eigen::MatrixXd z(shape.n_covariates - 1, shape.n_cells());
    std::vector<std::size_t> filled(static_cast<std::size_t>(shape.n_cells()), 0);
    for (const auto& r : rows) {
        const Index c = shape.cell(unit_rank[r.unit], period_rank[r.period]);
        auto& slot = filled[static_cast<std::size_t>(c)];
        if (slot != 0) {
            throw ParseError("duplicate cell (i=" + r.unit + ", t=" + r.period +
                                 "), first seen on line " + std::to_string(slot),
                             r.line);
        }
        slot = r.line;
        y(c) = r.values[0];
        for (Index k = 1; k < shape.n_covariates; ++k) z(k - 1, c) = r.values[static_cast<std::size_t>(k)];
    }
    for (Index c = 0; c < shape.n_cells(); ++c) {
        if (filled[static_cast<std::size_t>(c)] == 0) {
            throw ParseError(
                "missing cell (i=" +
                    out.individual_labels[static_cast<std::size_t>(shape.individual_of(c))] +
                    ", t=" + out.period_labels[static_cast<std::size_t>(shape.period_of(c))] + ")",
                0);
        }
    }
    out.panel = PanelData(n, tc, std::move(y), std::move(z));
    return out;
}

LabeledPanel ingest_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string(), 0);
    return read_panel_csv(in);
}

void write_panel_csv(std::ostream& out, const PanelData& panel,
                     const std::vector<std::string>& individual_labels,
                     const std::vector<std::string>& period_labels) {
    const auto& s = panel.shape();
    auto unit = [&](Index i) {
        return individual_labels.empty() ? std::to_string(i + 1)
                                         : individual_labels.at(static_cast<std::size_t>(i));
    };
    auto period = [&](Index t) {
        return period_labels.empty() ? std::to_string(t + 1)
                                     : period_labels.at(static_cast<std::size_t>(t));
    };
    out << "i,t,y";
    for (Index k = 1; k < s.n_covariates; ++k) out << ",z" << k;
    out << '\n';
    for (Index i = 0; i < s.n_individuals; ++i) {
        for (Index t = 0; t < s.n_periods; ++t) {
            const Index c = s.cell(i, t);
            out << unit(i) << ',' << period(t) << ',' << format_number(panel.outcomes()(c));
            for (Index k = 1; k < s.n_covariates; ++k) {
                out << ',' << format_number(panel.regressors()(k - 1, c));
            }
            out << '\n';
        }
    }
}

void export_csv(const std::filesystem::path& path, const PanelData& panel) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    write_panel_csv(out, panel);
}

}  // namespace panelfuse
