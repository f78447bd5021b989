#include "panelfuse_cli/report.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "panelfuse/csv.hpp"
#include "panelfuse/error.hpp"

namespace panelfuse::cli {

namespace {

json matrix_rows(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(std::move(row));
    }
    return out;
}

json column_list(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Index c = 0; c < m.cols(); ++c) {
        json col = json::array();
        for (Index r = 0; r < m.rows(); ++r) col.push_back(m(r, c));
        out.push_back(std::move(col));
    }
    return out;
}

const json& member(const json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw ParseError(std::string("fit report lacks '") + key + "'", 0);
    }
    return obj.at(key);
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

constexpr std::array<const char*, 12> kPalette = {
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
    "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#1f77b4", "#17becf"};

}  // namespace

std::string AxisLabels::individual(Index i) const {
    return individuals.empty() ? std::to_string(i + 1) : individuals.at(static_cast<std::size_t>(i));
}

std::string AxisLabels::period(Index t) const {
    return periods.empty() ? std::to_string(t + 1) : periods.at(static_cast<std::size_t>(t));
}

json empty_report() {
    return json{{"meta", json::object()},
                {"estimate", json::object()},
                {"partition", json::object()},
                {"inference", json::object()},
                {"diagnostics", json::object()}};
}

json estimate_json(const CoefficientField& beta, const AxisLabels& labels) {
    const auto& shape = beta.shape;
    json ind = json::array();
    json per = json::array();
    for (Index i = 0; i < shape.n_individuals; ++i) ind.push_back(labels.individual(i));
    for (Index t = 0; t < shape.n_periods; ++t) per.push_back(labels.period(t));
    return json{{"n_individuals", shape.n_individuals},
                {"n_periods", shape.n_periods},
                {"n_covariates", shape.n_covariates},
                {"individual_labels", ind},
                {"period_labels", per},
                {"beta", column_list(beta.values)}};
}

json partition_json(const BlockPartition& partition) {
    const auto& shape = partition.shape();
    json labels = json::array();
    for (Index i = 0; i < shape.n_individuals; ++i) {
        json row = json::array();
        for (Index t = 0; t < shape.n_periods; ++t) row.push_back(partition.label(i, t) + 1);
        labels.push_back(std::move(row));
    }
    return json{{"n_blocks", partition.n_blocks()},
                {"labels", labels},
                {"block_sizes", partition.block_sizes()},
                {"block_values", column_list(partition.block_values())}};
}

json inference_json(const PostEstimate& est) {
    const Index p = est.partition.shape().n_covariates;
    const Eigen::VectorXd se = est.standard_errors();
    const Eigen::MatrixXd se_cols = Eigen::Map<const Eigen::MatrixXd>(se.data(), p, est.n_blocks());
    return json{{"available", true},
                {"sigma_hat", est.sigma_hat},
                {"sigma2_hat", est.sigma_hat * est.sigma_hat},
                {"dof", est.dof},
                {"alpha", column_list(est.partition.block_values())},
                {"standard_errors", column_list(se_cols)},
                {"covariance", matrix_rows(est.covariance)}};
}

json path_point_json(const PathPoint& point) {
    json out{{"gamma", point.gamma},         {"lambda", point.lambda},
             {"ok", point.ok},               {"converged", point.converged},
             {"iterations", point.iterations}, {"sse", point.sse},
             {"bic", point.bic},             {"l_hat", point.l_hat}};
    if (!point.error.empty()) out["error"] = point.error;
    return out;
}

PostEstimate post_estimate_from_report(const json& report) {
    try {
        const json& part = member(report, "partition");
        const json& inf = member(report, "inference");
        if (inf.contains("available") && !inf.at("available").get<bool>()) {
            throw ParseError("fit report carries no post estimates", 0);
        }
        const auto rows = member(part, "labels").get<std::vector<std::vector<Index>>>();
        const auto alpha = member(inf, "alpha").get<std::vector<std::vector<double>>>();
        if (rows.empty() || rows.front().empty() || alpha.empty() || alpha.front().empty()) {
            throw ParseError("fit report has an empty partition", 0);
        }
        const Index n = static_cast<Index>(rows.size());
        const Index tc = static_cast<Index>(rows.front().size());
        const Index p = static_cast<Index>(alpha.front().size());
        const Index l = static_cast<Index>(alpha.size());
        const PanelShape shape{n, tc, p};
        std::vector<Index> assignment;
        assignment.reserve(static_cast<std::size_t>(n * tc));
        for (const auto& row : rows) {
            if (static_cast<Index>(row.size()) != tc) throw ParseError("ragged label array", 0);
            for (Index v : row) assignment.push_back(v - 1);
        }
        Eigen::MatrixXd values(p, l);
        for (Index b = 0; b < l; ++b) {
            if (static_cast<Index>(alpha[static_cast<std::size_t>(b)].size()) != p) {
                throw ParseError("ragged alpha array", 0);
            }
            for (Index q = 0; q < p; ++q) values(q, b) = alpha[static_cast<std::size_t>(b)][static_cast<std::size_t>(q)];
        }
        const auto cov = member(inf, "covariance").get<std::vector<std::vector<double>>>();
        if (static_cast<Index>(cov.size()) != l * p) throw ParseError("covariance has the wrong size", 0);
        Eigen::MatrixXd v(l * p, l * p);
        for (Index r = 0; r < l * p; ++r) {
            if (static_cast<Index>(cov[static_cast<std::size_t>(r)].size()) != l * p) {
                throw ParseError("covariance has the wrong size", 0);
            }
            for (Index c = 0; c < l * p; ++c) v(r, c) = cov[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
        PostEstimate est;
        est.partition = BlockPartition(shape, std::move(assignment), std::move(values));
        est.beta = est.partition.expand();
        est.sigma_hat = member(inf, "sigma_hat").get<double>();
        est.dof = member(inf, "dof").get<Index>();
        est.covariance = std::move(v);
        return est;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed fit report: ") + e.what(), 0);
    }
}

Eigen::MatrixXd parse_contrast(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::stringstream all(text);
    std::string row_text;
    while (std::getline(all, row_text, ';')) {
        std::stringstream row_in(row_text);
        std::string cell;
        std::vector<double> row;
        while (std::getline(row_in, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw InvalidArgument("contrast entry '" + cell + "' is not a number");
            }
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InvalidArgument("contrast is empty");
    Eigen::MatrixXd b(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows.front().size()) throw InvalidArgument("contrast rows differ in length");
        for (std::size_t c = 0; c < rows[r].size(); ++c) b(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    }
    return b;
}

std::string heatmap_svg(const BlockPartition& partition, const AxisLabels& labels) {
    const auto& shape = partition.shape();
    const int cell = 14;
    const int margin = 40;
    const int legend_w = 110;
    const int width = margin + static_cast<int>(shape.n_periods) * cell + 20 + legend_w;
    const int grid_h = static_cast<int>(shape.n_individuals) * cell;
    const int legend_h = static_cast<int>(partition.n_blocks()) * 18 + 20;
    const int height = margin + std::max(grid_h, legend_h) + 10;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    svg << "<text x=\"" << margin << "\" y=\"14\" font-size=\"11\">periods (columns) x "
           "individuals (rows)</text>\n";
    svg << "<g id=\"cells\">\n";
    for (Index i = 0; i < shape.n_individuals; ++i) {
        for (Index t = 0; t < shape.n_periods; ++t) {
            const Index l = partition.label(i, t);
            svg << "<rect x=\"" << margin + t * cell << "\" y=\"" << margin + i * cell
                << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
                << kPalette[static_cast<std::size_t>(l) % kPalette.size()]
                << "\" data-block=\"" << l + 1 << "\"><title>"
                << escape_xml(labels.individual(i)) << ", " << escape_xml(labels.period(t))
                << ": block " << l + 1 << "</title></rect>\n";
        }
    }
    svg << "</g>\n<g id=\"legend\">\n";
    const int lx = margin + static_cast<int>(shape.n_periods) * cell + 20;
    for (Index l = 0; l < partition.n_blocks(); ++l) {
        const int ly = margin + static_cast<int>(l) * 18;
        svg << "<rect x=\"" << lx << "\" y=\"" << ly << "\" width=\"12\" height=\"12\" fill=\""
            << kPalette[static_cast<std::size_t>(l) % kPalette.size()] << "\"/>"
            << "<text x=\"" << lx + 18 << "\" y=\"" << ly + 10 << "\" font-size=\"11\">block "
            << l + 1 << "</text>\n";
    }
    svg << "</g>\n</svg>\n";
    return svg.str();
}

std::string bic_surface_csv(const PathResult& path) {
    std::ostringstream out;
    out << "gamma,lambda,ok,converged,iterations,sse,bic,l_hat,error\n";
    for (const auto& p : path.points) {
        std::string err = p.error;
        for (char& ch : err) {
            if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
        }
        out << format_number(p.gamma) << ',' << format_number(p.lambda) << ',' << p.ok << ','
            << p.converged << ',' << p.iterations << ',' << format_number(p.sse) << ','
            << format_number(p.bic) << ',' << p.l_hat << ',' << err << '\n';
    }
    return out.str();
}

std::string coefficient_csv(const CoefficientField& beta, const BlockPartition& partition,
                            const AxisLabels& labels) {
    const auto& shape = beta.shape;
    std::ostringstream out;
    out << "i,t,block";
    for (Index q = 0; q < shape.n_covariates; ++q) out << ",beta" << q;
    out << '\n';
    for (Index i = 0; i < shape.n_individuals; ++i) {
        for (Index t = 0; t < shape.n_periods; ++t) {
            out << labels.individual(i) << ',' << labels.period(t) << ','
                << partition.label(i, t) + 1;
            for (Index q = 0; q < shape.n_covariates; ++q) {
                out << ',' << format_number(beta.at(i, t)(q));
            }
            out << '\n';
        }
    }
    return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    out.close();
    if (!out) throw Error("cannot write " + path.string());
}

void write_json(const std::filesystem::path& path, const json& value) {
    write_text(path, value.dump(2) + "\n");
}

json error_json(const std::exception& e) {
    json err{{"message", e.what()}};
    if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
        err["type"] = "parse_error";
        if (pe->line() > 0) err["line"] = pe->line();
    } else if (const auto* se = dynamic_cast<const SolverError*>(&e)) {
        err["type"] = "solver_error";
        err["residual"] = se->residual();
    } else if (dynamic_cast<const DegenerateFit*>(&e)) {
        err["type"] = "degenerate_fit";
    } else if (dynamic_cast<const InvalidArgument*>(&e)) {
        err["type"] = "invalid_argument";
    } else {
        err["type"] = "error";
    }
    return json{{"error", err}};
}

}  // namespace panelfuse::cli
