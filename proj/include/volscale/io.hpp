#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "volscale/types.hpp"

namespace volscale::io {

/// Shortest decimal form of x with at most 12 significant digits.
std::string format_sig12(double x);

/// x rounded to 12 significant decimal digits (for JSON number output).
double round_sig12(double x);

/// Return panel plus the optional date column carried through unchanged.
struct PanelData {
    PanelReturns<double> panel;
    std::vector<std::string> dates;  // empty or one ISO-8601 date per row
};

/// CSV panel: first row asset labels, one row per period, decimal returns;
/// an optional leading date column is detected by header name "date" or an
/// ISO-8601 first field. Errors cite the 1-based line number.
PanelData read_panel_csv(std::istream& in, const std::string& source_name);
PanelData read_panel_csv_file(const std::string& path);

void write_panel_csv(std::ostream& out, const PanelReturns<double>& panel,
                     const std::vector<std::string>& dates = {});

/// Whole file as a string; throws InvalidInput on failure.
std::string read_file(const std::string& path);

/// Heuristic: the payload is a JSON document rather than CSV.
bool looks_like_json(const std::string& text);

/// Parsed JSON input: either covariance moments {"gamma0", optional
/// "gamma1", optional "labels"} or a simulation market {"sigma",
/// "closing_fractions", optional "labels"}.
enum class InputKind { moments, market };

struct InputDocument {
    InputKind kind = InputKind::moments;
    Eigen::MatrixXd gamma0;  // moments
    Eigen::MatrixXd gamma1;
    Eigen::MatrixXd sigma;  // market
    Eigen::VectorXd closing_fractions;
    std::vector<std::string> labels;  // defaulted to asset_1.. if absent
};

InputDocument parse_input_document(const std::string& text, const std::string& source_name);

/// Matrix <-> JSON (array of row arrays); numbers rounded to 12 significant
/// digits on the way out.
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
nlohmann::json vector_to_json(const Eigen::VectorXd& v);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& what);
Eigen::VectorXd vector_from_json(const nlohmann::json& j, const std::string& what);

/// Long-format CSV rows "name,lag,row,col,value", one per matrix entry.
void write_matrix_rows_csv(std::ostream& out, const std::string& name, const std::string& lag,
                           const Eigen::MatrixXd& m, const std::vector<std::string>& labels);

}  // namespace volscale::io
