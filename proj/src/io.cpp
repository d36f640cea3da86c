#include "volscale/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace volscale::io {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

bool is_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

double parse_number(const std::string& field, const std::string& source, std::size_t line_no,
                    std::size_t col_no) {
    const char* begin = field.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw InvalidInput(source + " line " + std::to_string(line_no) + ": cannot parse '" +
                           field + "' as a number (column " + std::to_string(col_no) + ")");
    if (!std::isfinite(v))
        throw InvalidInput(source + " line " + std::to_string(line_no) +
                           ": non-finite value in column " + std::to_string(col_no));
    return v;
}

}  // namespace

std::string format_sig12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

double round_sig12(double x) {
    if (!std::isfinite(x)) return x;
    return std::strtod(format_sig12(x).c_str(), nullptr);
}

PanelData read_panel_csv(std::istream& in, const std::string& source_name) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.size() < 2)
        throw InvalidInput(source_name + ": expected a header row and at least one data row");

    std::vector<std::string> header = split_csv_line(lines[0]);
    if (header.empty()) throw InvalidInput(source_name + " line 1: empty header");

    bool has_dates = lower(header[0]) == "date" || header[0].empty();
    if (!has_dates && lines.size() > 1) {
        const std::vector<std::string> first = split_csv_line(lines[1]);
        if (!first.empty() && is_iso_date(first[0])) has_dates = true;
    }

    std::vector<std::string> labels(header.begin() + (has_dates ? 1 : 0), header.end());
    if (labels.empty())
        throw InvalidInput(source_name + " line 1: no asset columns in header");
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i].empty())
            throw InvalidInput(source_name + " line 1: empty asset label in column " +
                               std::to_string(i + 1 + (has_dates ? 1 : 0)));

    const std::size_t n = labels.size();
    const std::size_t rows = lines.size() - 1;
    Eigen::MatrixXd values(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(n));
    std::vector<std::string> dates;
    if (has_dates) dates.reserve(rows);

    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t line_no = r + 2;
        const std::vector<std::string> fields = split_csv_line(lines[r + 1]);
        const std::size_t expected = n + (has_dates ? 1 : 0);
        if (fields.size() != expected)
            throw InvalidInput(source_name + " line " + std::to_string(line_no) + ": expected " +
                               std::to_string(expected) + " fields, got " +
                               std::to_string(fields.size()));
        std::size_t off = 0;
        if (has_dates) {
            if (!is_iso_date(fields[0]))
                throw InvalidInput(source_name + " line " + std::to_string(line_no) +
                                   ": '" + fields[0] + "' is not an ISO-8601 date");
            dates.push_back(fields[0]);
            off = 1;
        }
        for (std::size_t c = 0; c < n; ++c)
            values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                parse_number(fields[c + off], source_name, line_no, c + off + 1);
    }

    return PanelData{PanelReturns<double>(std::move(values), std::move(labels), "1 day"),
                     std::move(dates)};
}

PanelData read_panel_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open input file '" + path + "'");
    return read_panel_csv(in, path);
}

void write_panel_csv(std::ostream& out, const PanelReturns<double>& panel,
                     const std::vector<std::string>& dates) {
    const bool with_dates = !dates.empty();
    if (with_dates && dates.size() != static_cast<std::size_t>(panel.periods()))
        throw InvalidInput("write_panel_csv: one date per period required");
    if (with_dates) out << "date";
    for (std::size_t i = 0; i < panel.labels().size(); ++i) {
        if (with_dates || i > 0) out << ',';
        out << panel.labels()[i];
    }
    out << '\n';
    for (Eigen::Index t = 0; t < panel.periods(); ++t) {
        if (with_dates) out << dates[static_cast<std::size_t>(t)];
        for (Eigen::Index i = 0; i < panel.assets(); ++i) {
            if (with_dates || i > 0) out << ',';
            out << format_sig12(panel.values()(t, i));
        }
        out << '\n';
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open input file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool looks_like_json(const std::string& text) {
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        return c == '{';
    }
    return false;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& what) {
    if (!j.is_array() || j.empty())
        throw InvalidInput(what + ": expected a nonempty array of rows");
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    Eigen::MatrixXd m;
    for (std::size_t r = 0; r < rows; ++r) {
        const auto& row = j[r];
        if (!row.is_array() || row.empty())
            throw InvalidInput(what + ": row " + std::to_string(r + 1) +
                               " is not a nonempty array");
        if (r == 0) {
            cols = row.size();
            m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        } else if (row.size() != cols) {
            throw InvalidInput(what + ": row " + std::to_string(r + 1) + " has " +
                               std::to_string(row.size()) + " entries, expected " +
                               std::to_string(cols));
        }
        for (std::size_t c = 0; c < cols; ++c) {
            if (!row[c].is_number())
                throw InvalidInput(what + ": entry (" + std::to_string(r + 1) + "," +
                                   std::to_string(c + 1) + ") is not a number");
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                row[c].get<double>();
        }
    }
    return m;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j, const std::string& what) {
    if (!j.is_array() || j.empty())
        throw InvalidInput(what + ": expected a nonempty array of numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            throw InvalidInput(what + ": entry " + std::to_string(i + 1) + " is not a number");
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(round_sig12(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(round_sig12(v(i)));
    return arr;
}

namespace {

std::vector<std::string> labels_or_default(const nlohmann::json& j, Eigen::Index n,
                                           const std::string& source) {
    std::vector<std::string> labels;
    if (j.contains("labels")) {
        const auto& arr = j.at("labels");
        if (!arr.is_array())
            throw InvalidInput(source + ": 'labels' must be an array of strings");
        for (const auto& item : arr) {
            if (!item.is_string())
                throw InvalidInput(source + ": 'labels' must be an array of strings");
            labels.push_back(item.get<std::string>());
        }
        if (labels.size() != static_cast<std::size_t>(n))
            throw InvalidInput(source + ": expected " + std::to_string(n) + " labels, got " +
                               std::to_string(labels.size()));
    } else {
        for (Eigen::Index i = 0; i < n; ++i) labels.push_back("asset_" + std::to_string(i + 1));
    }
    return labels;
}

}  // namespace

InputDocument parse_input_document(const std::string& text, const std::string& source_name) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput(source_name + ": " + e.what());
    }
    if (!j.is_object())
        throw InvalidInput(source_name + ": expected a JSON object");

    InputDocument doc;
    if (j.contains("gamma0")) {
        doc.kind = InputKind::moments;
        doc.gamma0 = matrix_from_json(j.at("gamma0"), source_name + ": gamma0");
        if (doc.gamma0.rows() != doc.gamma0.cols())
            throw InvalidInput(source_name + ": gamma0 must be square");
        if (j.contains("gamma1")) {
            doc.gamma1 = matrix_from_json(j.at("gamma1"), source_name + ": gamma1");
            if (doc.gamma1.rows() != doc.gamma0.rows() || doc.gamma1.cols() != doc.gamma0.cols())
                throw InvalidInput(source_name + ": gamma1 must match gamma0 in size");
        } else {
            doc.gamma1 = Eigen::MatrixXd::Zero(doc.gamma0.rows(), doc.gamma0.cols());
        }
        doc.labels = labels_or_default(j, doc.gamma0.rows(), source_name);
        return doc;
    }
    if (j.contains("sigma")) {
        doc.kind = InputKind::market;
        doc.sigma = matrix_from_json(j.at("sigma"), source_name + ": sigma");
        if (!j.contains("closing_fractions"))
            throw InvalidInput(source_name + ": 'sigma' requires 'closing_fractions'");
        doc.closing_fractions =
            vector_from_json(j.at("closing_fractions"), source_name + ": closing_fractions");
        doc.labels = labels_or_default(j, doc.sigma.rows(), source_name);
        return doc;
    }
    throw InvalidInput(source_name + ": expected either 'gamma0' (moments) or 'sigma' (market)");
}

void write_matrix_rows_csv(std::ostream& out, const std::string& name, const std::string& lag,
                           const Eigen::MatrixXd& m, const std::vector<std::string>& labels) {
    if (labels.size() != static_cast<std::size_t>(m.rows()) ||
        labels.size() != static_cast<std::size_t>(m.cols()))
        throw InvalidInput("write_matrix_rows_csv: label count must match matrix size");
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            out << name << ',' << lag << ',' << labels[static_cast<std::size_t>(r)] << ','
                << labels[static_cast<std::size_t>(c)] << ',' << format_sig12(m(r, c)) << '\n';
}

}  // namespace volscale::io
