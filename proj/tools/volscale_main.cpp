// volscale: estimate, fit, scale, attribute, simulate, and compare
// portfolio volatility under serially correlated returns.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "volscale/closing_time.hpp"
#include "volscale/contributions.hpp"
#include "volscale/estimation.hpp"
#include "volscale/io.hpp"
#include "volscale/scaling.hpp"
#include "volscale/types.hpp"
#include "volscale/varma.hpp"

namespace {

using nlohmann::json;
using namespace volscale;

struct Options {
    std::string input;
    std::string output;
    std::string config;
    std::string weights;
    std::string horizons = "1,2,5,10,30,90,250";
    std::string model = "empirical";
    std::string format = "csv";
    int max_lag = 1;
    bool demean = true;
    bool annualize = false;
    std::uint64_t seed = 1;
    int steps_per_day = 1440;
    int days = 250;
};

Eigen::VectorXd parse_weights(const std::string& s) {
    std::vector<double> vals;
    std::string field;
    std::istringstream ss(s);
    while (std::getline(ss, field, ',')) {
        const char* begin = field.c_str();
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin || *end != '\0')
            throw InvalidInput("--weights: cannot parse '" + field + "' as a number");
        vals.push_back(v);
    }
    if (vals.empty()) throw InvalidInput("--weights: no values given");
    Eigen::VectorXd w(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) w(static_cast<Eigen::Index>(i)) = vals[i];
    return w;
}

std::vector<int> parse_horizons(const std::string& s) {
    std::vector<int> out;
    std::string field;
    std::istringstream ss(s);
    while (std::getline(ss, field, ',')) {
        try {
            const int d = std::stoi(field);
            if (d < 1) throw std::invalid_argument("nonpositive");
            out.push_back(d);
        } catch (const std::exception&) {
            throw InvalidInput("--horizons: '" + field + "' is not a positive integer");
        }
    }
    if (out.empty()) throw InvalidInput("--horizons: no values given");
    return out;
}

void check_format(const std::string& format) {
    if (format != "csv" && format != "json")
        throw InvalidInput("--format must be 'csv' or 'json'");
}

/// Flat key=value configuration file. Keys mirror the long option names
/// without the leading dashes; values given on the command line win. Keys
/// that belong to another subcommand are tolerated so one file can configure
/// the whole tool, anything unrecognized is rejected as a typo.
void apply_config(const CLI::App& sub, Options& opt) {
    if (opt.config.empty()) return;
    std::ifstream in(opt.config);
    if (!in) throw InvalidInput("cannot open config file '" + opt.config + "'");

    auto trim = [](const std::string& s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    auto to_int = [](const std::string& key, const std::string& v) {
        try {
            std::size_t pos = 0;
            const int n = std::stoi(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return n;
        } catch (const std::exception&) {
            throw InvalidInput("config: " + key + "='" + v + "' is not an integer");
        }
    };
    auto to_bool = [](const std::string& key, const std::string& v) {
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        throw InvalidInput("config: " + key + "='" + v + "' is not a boolean");
    };

    static const char* const known[] = {"input",  "output",    "format",        "weights",
                                        "horizons", "model",   "max-lag",       "demean",
                                        "annualize", "seed",   "steps-per-day", "days"};

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw InvalidInput("config: line " + std::to_string(lineno) +
                               ": expected key=value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key == "config") continue;

        const CLI::Option* o = sub.get_option_no_throw("--" + key);
        if (o == nullptr) {
            const bool recognized = std::any_of(std::begin(known), std::end(known),
                                                [&](const char* k) { return key == k; });
            if (!recognized)
                throw InvalidInput("config: line " + std::to_string(lineno) +
                                   ": unknown key '" + key + "'");
            continue;
        }
        if (o->count() > 0) continue;  // the command line wins

        if (key == "input") opt.input = value;
        else if (key == "output") opt.output = value;
        else if (key == "format") opt.format = value;
        else if (key == "weights") opt.weights = value;
        else if (key == "horizons") opt.horizons = value;
        else if (key == "model") opt.model = value;
        else if (key == "max-lag") opt.max_lag = to_int(key, value);
        else if (key == "demean") opt.demean = to_bool(key, value);
        else if (key == "annualize") opt.annualize = to_bool(key, value);
        else if (key == "days") opt.days = to_int(key, value);
        else if (key == "steps-per-day") opt.steps_per_day = to_int(key, value);
        else if (key == "seed") {
            try {
                std::size_t pos = 0;
                opt.seed = std::stoull(value, &pos);
                if (pos != value.size()) throw std::invalid_argument(value);
            } catch (const std::exception&) {
                throw InvalidInput("config: seed='" + value + "' is not an unsigned integer");
            }
        }
    }
}

struct Loaded {
    std::optional<io::PanelData> panel;
    std::optional<io::InputDocument> doc;
};

Loaded load_input(const std::string& path) {
    if (path.empty()) throw InvalidInput("--input is required");
    const std::string text = io::read_file(path);
    Loaded loaded;
    if (io::looks_like_json(text))
        loaded.doc = io::parse_input_document(text, path);
    else {
        std::istringstream ss(text);
        loaded.panel = io::read_panel_csv(ss, path);
    }
    return loaded;
}

/// Lag-0/1 covariances with labels, from whichever input style was given.
struct Moments {
    Eigen::MatrixXd gamma0;
    Eigen::MatrixXd gamma1;
    std::vector<std::string> labels;
};

Moments get_moments(const Loaded& loaded, const Options& opt) {
    Moments m;
    if (loaded.panel) {
        const auto& panel = loaded.panel->panel;
        const CovSequence<double> cov = sample_acov(panel, std::max(1, opt.max_lag), opt.demean);
        m.gamma0 = cov.at(0);
        m.gamma1 = cov.at(1);
        m.labels = panel.labels();
        return m;
    }
    const io::InputDocument& doc = *loaded.doc;
    if (doc.kind == io::InputKind::moments) {
        m.gamma0 = doc.gamma0;
        m.gamma1 = doc.gamma1;
    } else {
        const MarketSpec<double> spec(doc.sigma, doc.closing_fractions);
        const ClosingCov<double> cc = theoretical_closing_cov(spec);
        m.gamma0 = cc.gamma0;
        m.gamma1 = cc.gamma1;
    }
    m.labels = doc.labels;
    return m;
}

CovSequence<double> get_cov_sequence(const Loaded& loaded, const Options& opt) {
    if (loaded.panel) return sample_acov(loaded.panel->panel, opt.max_lag, opt.demean);
    const io::InputDocument& doc = *loaded.doc;
    if (doc.kind == io::InputKind::moments)
        return CovSequence<double>({doc.gamma0, doc.gamma1});
    const MarketSpec<double> spec(doc.sigma, doc.closing_fractions);
    return theoretical_closing_cov(spec).sequence(1);
}

Weights<double> resolve_weights(const Options& opt, Eigen::Index n) {
    if (!opt.weights.empty()) {
        Eigen::VectorXd w = parse_weights(opt.weights);
        if (w.size() != n)
            throw InvalidInput("--weights: got " + std::to_string(w.size()) +
                               " weights for " + std::to_string(n) + " assets");
        return Weights<double>(w);
    }
    if (n == 1) return Weights<double>(Eigen::VectorXd::Ones(1));
    throw InvalidInput("--weights is required for multi-asset input");
}

struct OutputTarget {
    std::ofstream file;
    std::ostream* os = nullptr;
};

OutputTarget open_output(const std::string& path) {
    OutputTarget t;
    if (path.empty()) {
        t.os = &std::cout;
        return t;
    }
    t.file.open(path);
    if (!t.file) throw InvalidInput("cannot open output file '" + path + "'");
    t.os = &t.file;
    return t;
}

constexpr double kAnnualFactor = 250.0;  // trading days per year

double vol_scale(const Options& opt) { return opt.annualize ? std::sqrt(kAnnualFactor) : 1.0; }

// ---------------------------------------------------------------------------
// estimate

void run_estimate(const Options& opt) {
    check_format(opt.format);
    const Loaded loaded = load_input(opt.input);
    if (!loaded.panel)
        throw InvalidInput("estimate requires a CSV return panel as input");
    const auto& panel = loaded.panel->panel;
    const CovSequence<double> cov = sample_acov(panel, opt.max_lag, opt.demean);
    const auto& labels = panel.labels();

    std::optional<ContemporaneousEstimate<double>> naive;
    std::optional<ContemporaneousEstimate<double>> nw;
    if (cov.max_lag() >= 1) {
        naive = naive_contemporaneous(cov);
        nw = newey_west_lag1(cov);
    }

    OutputTarget out = open_output(opt.output);
    if (opt.format == "json") {
        json j;
        j["labels"] = labels;
        j["periods"] = panel.periods();
        j["demean"] = opt.demean;
        json acov = json::array();
        for (int k = 0; k <= cov.max_lag(); ++k) acov.push_back(io::matrix_to_json(cov.at(k)));
        j["acov"] = std::move(acov);
        if (naive) {
            j["naive_contemporaneous"] = {{"matrix", io::matrix_to_json(naive->matrix)},
                                          {"psd", naive->psd},
                                          {"min_eigenvalue", io::round_sig12(naive->min_eigenvalue)}};
            j["newey_west"] = {{"matrix", io::matrix_to_json(nw->matrix)},
                               {"psd", nw->psd},
                               {"min_eigenvalue", io::round_sig12(nw->min_eigenvalue)}};
        }
        *out.os << j.dump(2) << '\n';
        return;
    }
    *out.os << "record,lag,row,col,value\n";
    for (int k = 0; k <= cov.max_lag(); ++k)
        io::write_matrix_rows_csv(*out.os, "acov", std::to_string(k), cov.at(k), labels);
    if (naive) {
        io::write_matrix_rows_csv(*out.os, "naive_contemporaneous", "", naive->matrix, labels);
        *out.os << "naive_contemporaneous_psd,,,," << (naive->psd ? 1 : 0) << '\n';
        *out.os << "naive_contemporaneous_min_eigenvalue,,,,"
                << io::format_sig12(naive->min_eigenvalue) << '\n';
        io::write_matrix_rows_csv(*out.os, "newey_west", "", nw->matrix, labels);
        *out.os << "newey_west_psd,,,," << (nw->psd ? 1 : 0) << '\n';
        *out.os << "newey_west_min_eigenvalue,,,," << io::format_sig12(nw->min_eigenvalue)
                << '\n';
    }
}

// ---------------------------------------------------------------------------
// scale

void run_scale(const Options& opt) {
    check_format(opt.format);
    const Loaded loaded = load_input(opt.input);
    const std::vector<int> horizons = parse_horizons(opt.horizons);
    const int max_d = *std::max_element(horizons.begin(), horizons.end());

    ScalingReport<double> report;
    if (opt.model == "empirical") {
        const CovSequence<double> cov = get_cov_sequence(loaded, opt);
        const Weights<double> w = resolve_weights(opt, cov.dimension());
        const PortfolioCov<double> pc = portfolio_acov(cov, w);
        if (max_d - 1 > pc.acf.max_lag())
            std::cerr << "note: lags beyond " << pc.acf.max_lag()
                      << " are treated as zero for the longer horizons\n";
        report = scaling_report(pc.acf, horizons);
    } else {
        const Moments m = get_moments(loaded, opt);
        const Weights<double> w = resolve_weights(opt, m.gamma0.rows());
        const double a = w.lambda().dot(m.gamma0 * w.lambda());
        if (!(a > 0.0)) throw NumericalError("portfolio variance is not positive");
        report.sigma_1 = std::sqrt(a);
        auto add_rows = [&](auto&& delta_fn) {
            for (int d : horizons) {
                ScalingRow<double> row;
                row.horizon = d;
                row.delta_d = delta_fn(d);
                row.sigma_d = report.sigma_1 * row.delta_d;
                row.sqrt_d = std::sqrt(static_cast<double>(d));
                row.ratio = row.delta_d / row.sqrt_d;
                report.rows.push_back(row);
            }
        };
        if (opt.model == "ma1") {
            const double rho1 = w.lambda().dot(m.gamma1 * w.lambda()) / a;
            const Ma1Fit<double> fit = fit_ma1_from_rho(rho1);
            if (fit.at_boundary)
                std::cerr << "note: MA(1) fit sits on the invertibility boundary\n";
            add_rows([&](int d) { return ma1_delta_d(fit.theta1, d); });
        } else if (opt.model == "ar1") {
            const double phi = w.lambda().dot(m.gamma1 * w.lambda()) / a;
            add_rows([&](int d) { return ar1_delta_d(phi, d); });
        } else if (opt.model == "vma1") {
            const Vma1Fit<double> fit = fit_vma1_moments(m.gamma0, m.gamma1);
            add_rows([&](int d) { return vma1_delta_d(fit.theta1, fit.sigma, w, d); });
        } else if (opt.model == "var1") {
            const Var1Fit<double> fit = fit_phi1_from_moments(m.gamma0, m.gamma1);
            if (!fit.stable)
                std::cerr << "note: fitted Phi1 has spectral radius "
                          << io::format_sig12(fit.spectral_radius) << " (unstable)\n";
            add_rows([&](int d) { return var1_delta_d(fit.phi1, m.gamma0, w, d); });
        } else {
            throw InvalidInput("unknown model '" + opt.model +
                               "' (expected empirical, ma1, ar1, vma1 or var1)");
        }
    }

    const double vs = vol_scale(opt);
    OutputTarget out = open_output(opt.output);
    if (opt.format == "json") {
        json j;
        j["model"] = opt.model;
        j["annualized"] = opt.annualize;
        j["sigma_1"] = io::round_sig12(report.sigma_1 * vs);
        json rows = json::array();
        for (const auto& r : report.rows)
            rows.push_back({{"horizon", r.horizon},
                            {"sigma_d", io::round_sig12(r.sigma_d * vs)},
                            {"delta_d", io::round_sig12(r.delta_d)},
                            {"sqrt_d", io::round_sig12(r.sqrt_d)},
                            {"ratio", io::round_sig12(r.ratio)}});
        j["rows"] = std::move(rows);
        *out.os << j.dump(2) << '\n';
        return;
    }
    *out.os << "horizon,sigma_1,sigma_d,delta_d,sqrt_d,ratio\n";
    for (const auto& r : report.rows)
        *out.os << r.horizon << ',' << io::format_sig12(report.sigma_1 * vs) << ','
                << io::format_sig12(r.sigma_d * vs) << ',' << io::format_sig12(r.delta_d) << ','
                << io::format_sig12(r.sqrt_d) << ',' << io::format_sig12(r.ratio) << '\n';
}

// ---------------------------------------------------------------------------
// contrib

void run_contrib(const Options& opt) {
    check_format(opt.format);
    const Loaded loaded = load_input(opt.input);
    const std::vector<int> horizons = parse_horizons(opt.horizons);
    const int max_d = *std::max_element(horizons.begin(), horizons.end());

    CovSequence<double> cov = [&]() -> CovSequence<double> {
        if (opt.model == "empirical") {
            CovSequence<double> c = get_cov_sequence(loaded, opt);
            if (max_d - 1 > c.max_lag())
                std::cerr << "note: lags beyond " << c.max_lag()
                          << " are treated as zero for the longer horizons\n";
            return c;
        }
        const Moments m = get_moments(loaded, opt);
        if (opt.model == "vma1") {
            const Vma1Fit<double> fit = fit_vma1_moments(m.gamma0, m.gamma1);
            const Eigen::MatrixXd g0 =
                fit.theta1 * fit.sigma * fit.theta1.transpose() + fit.sigma;
            const Eigen::MatrixXd g1 = fit.theta1 * fit.sigma;
            return CovSequence<double>({g0, g1});
        }
        if (opt.model == "var1") {
            const Var1Fit<double> fit = fit_phi1_from_moments(m.gamma0, m.gamma1);
            if (!fit.stable)
                std::cerr << "note: fitted Phi1 has spectral radius "
                          << io::format_sig12(fit.spectral_radius) << " (unstable)\n";
            std::vector<MatrixX<double>> gammas{m.gamma0};
            for (int k = 1; k < max_d; ++k) gammas.push_back(fit.phi1 * gammas.back());
            return CovSequence<double>(std::move(gammas));
        }
        if (opt.model == "ma1" || opt.model == "ar1")
            throw InvalidInput("model '" + opt.model +
                               "' is univariate and cannot attribute risk per asset; "
                               "use empirical, vma1 or var1");
        throw InvalidInput("unknown model '" + opt.model +
                           "' (expected empirical, ma1, ar1, vma1 or var1)");
    }();

    const Weights<double> w = resolve_weights(opt, cov.dimension());
    std::vector<std::string> labels = loaded.panel ? loaded.panel->panel.labels()
                                                   : loaded.doc->labels;

    const double vs = vol_scale(opt);
    OutputTarget out = open_output(opt.output);
    json jrows = json::array();
    if (opt.format == "csv")
        *out.os << "horizon,asset,sigma_portfolio,contribution,share,delta_i,sqrt_d\n";
    for (int d : horizons) {
        const ContributionReport<double> rep = contrib_d(cov, w, d);
        const ContributionHorizon<double>& h = rep.horizons.front();
        const double sqrt_d = std::sqrt(static_cast<double>(d));
        for (Eigen::Index i = 0; i < h.sigma.size(); ++i) {
            const bool def = h.delta_defined[static_cast<std::size_t>(i)];
            if (opt.format == "csv") {
                *out.os << d << ',' << labels[static_cast<std::size_t>(i)] << ','
                        << io::format_sig12(h.sigma_portfolio * vs) << ','
                        << io::format_sig12(h.sigma(i) * vs) << ','
                        << io::format_sig12(h.share(i)) << ','
                        << (def ? io::format_sig12(h.delta(i)) : std::string()) << ','
                        << io::format_sig12(sqrt_d) << '\n';
            } else {
                json r = {{"horizon", d},
                          {"asset", labels[static_cast<std::size_t>(i)]},
                          {"sigma_portfolio", io::round_sig12(h.sigma_portfolio * vs)},
                          {"contribution", io::round_sig12(h.sigma(i) * vs)},
                          {"share", io::round_sig12(h.share(i))},
                          {"sqrt_d", io::round_sig12(sqrt_d)}};
                if (def)
                    r["delta_i"] = io::round_sig12(h.delta(i));
                else
                    r["delta_i"] = nullptr;
                jrows.push_back(std::move(r));
            }
        }
    }
    if (opt.format == "json") {
        json j;
        j["model"] = opt.model;
        j["annualized"] = opt.annualize;
        j["rows"] = std::move(jrows);
        *out.os << j.dump(2) << '\n';
    }
}

// ---------------------------------------------------------------------------
// fit

void run_fit(const Options& opt) {
    check_format(opt.format);
    const Loaded loaded = load_input(opt.input);
    const Moments m = get_moments(loaded, opt);

    json j;
    j["model"] = opt.model;
    std::ostringstream csv;
    csv << "parameter,row,col,value\n";
    csv << "model,,," << opt.model << '\n';

    auto emit_scalar = [&](const std::string& name, double v) {
        j[name] = io::round_sig12(v);
        csv << name << ",,," << io::format_sig12(v) << '\n';
    };
    auto emit_flag = [&](const std::string& name, bool v) {
        j[name] = v;
        csv << name << ",,," << (v ? 1 : 0) << '\n';
    };
    auto emit_matrix = [&](const std::string& name, const Eigen::MatrixXd& mat) {
        j[name] = io::matrix_to_json(mat);
        for (Eigen::Index r = 0; r < mat.rows(); ++r)
            for (Eigen::Index c = 0; c < mat.cols(); ++c)
                csv << name << ',' << (r + 1) << ',' << (c + 1) << ','
                    << io::format_sig12(mat(r, c)) << '\n';
    };

    if (opt.model == "ma1" || opt.model == "ar1") {
        const Weights<double> w = resolve_weights(opt, m.gamma0.rows());
        const double a = w.lambda().dot(m.gamma0 * w.lambda());
        if (!(a > 0.0)) throw NumericalError("portfolio variance is not positive");
        const double rho1 = w.lambda().dot(m.gamma1 * w.lambda()) / a;
        emit_scalar("rho1", rho1);
        if (opt.model == "ma1") {
            const Ma1Fit<double> fit = fit_ma1_from_rho(rho1);
            emit_scalar("theta1", fit.theta1);
            emit_scalar("sigma2", a / (1.0 + fit.theta1 * fit.theta1));
            emit_flag("at_boundary", fit.at_boundary);
        } else {
            const double phi = rho1;
            if (!(std::abs(phi) < 1.0))
                throw NumericalError("AR(1) fit is nonstationary (|rho(1)| >= 1)");
            emit_scalar("phi1", phi);
            emit_scalar("sigma2", a * (1.0 - phi * phi));
        }
    } else if (opt.model == "var1") {
        const Var1Fit<double> fit = fit_phi1_from_moments(m.gamma0, m.gamma1);
        emit_matrix("phi1", fit.phi1);
        emit_matrix("sigma", m.gamma0 - fit.phi1 * m.gamma0 * fit.phi1.transpose());
        emit_scalar("spectral_radius", fit.spectral_radius);
        emit_flag("stable", fit.stable);
    } else if (opt.model == "vma1") {
        const Vma1Fit<double> fit = fit_vma1_moments(m.gamma0, m.gamma1);
        emit_matrix("theta1", fit.theta1);
        emit_matrix("sigma", fit.sigma);
        emit_scalar("iterations", fit.iterations);
    } else {
        throw InvalidInput("fit requires --model ma1, ar1, vma1 or var1");
    }

    OutputTarget out = open_output(opt.output);
    if (opt.format == "json")
        *out.os << j.dump(2) << '\n';
    else
        *out.os << csv.str();
}

// ---------------------------------------------------------------------------
// simulate

void run_simulate(const Options& opt) {
    check_format(opt.format);
    const Loaded loaded = load_input(opt.input);
    if (!loaded.doc || loaded.doc->kind != io::InputKind::market)
        throw InvalidInput("simulate requires a JSON market document "
                           "with 'sigma' and 'closing_fractions'");
    const io::InputDocument& doc = *loaded.doc;
    const MarketSpec<double> spec(doc.sigma, doc.closing_fractions);
    const PanelReturns<double> panel =
        simulate_panel(spec, opt.days, opt.steps_per_day, opt.seed, doc.labels);
    const ClosingCov<double> cc = theoretical_closing_cov(spec);

    // Panel goes to --output (or stdout); theoretical moments go to stdout,
    // or stderr when stdout already carries the panel.
    std::ostream* info = opt.output.empty() ? &std::cerr : &std::cout;
    OutputTarget out = open_output(opt.output);
    io::write_panel_csv(*out.os, panel);

    if (opt.format == "json") {
        json j;
        j["labels"] = doc.labels;
        j["gamma0"] = io::matrix_to_json(cc.gamma0);
        j["gamma1"] = io::matrix_to_json(cc.gamma1);
        *info << j.dump(2) << '\n';
    } else {
        *info << "record,lag,row,col,value\n";
        io::write_matrix_rows_csv(*info, "theoretical_acov", "0", cc.gamma0, doc.labels);
        io::write_matrix_rows_csv(*info, "theoretical_acov", "1", cc.gamma1, doc.labels);
    }
}

// ---------------------------------------------------------------------------
// compare

void run_compare(const Options& opt) {
    check_format(opt.format);
    const Loaded loaded = load_input(opt.input);
    const Moments m = get_moments(loaded, opt);
    const Weights<double> w = resolve_weights(opt, m.gamma0.rows());
    const std::vector<int> horizons = parse_horizons(opt.horizons);

    OutputTarget out = open_output(opt.output);
    if (opt.format == "csv")
        *out.os << "horizon,sigma_closing,sigma_naive,sigma_newey_west,"
                   "ratio_naive,ratio_newey_west\n";
    json jrows = json::array();
    for (int d : horizons) {
        const VolatilityComparison<double> c = contemporaneous_ratio(m.gamma0, m.gamma1, w, d);
        if (opt.format == "csv")
            *out.os << d << ',' << io::format_sig12(c.sigma_closing) << ','
                    << io::format_sig12(c.sigma_naive) << ','
                    << io::format_sig12(c.sigma_newey_west) << ','
                    << io::format_sig12(c.ratio_naive) << ','
                    << io::format_sig12(c.ratio_newey_west) << '\n';
        else
            jrows.push_back({{"horizon", d},
                             {"sigma_closing", io::round_sig12(c.sigma_closing)},
                             {"sigma_naive", io::round_sig12(c.sigma_naive)},
                             {"sigma_newey_west", io::round_sig12(c.sigma_newey_west)},
                             {"ratio_naive", io::round_sig12(c.ratio_naive)},
                             {"ratio_newey_west", io::round_sig12(c.ratio_newey_west)}});
    }
    if (opt.format == "json") {
        json j;
        j["rows"] = std::move(jrows);
        *out.os << j.dump(2) << '\n';
    }
}

void add_common(CLI::App* sub, Options& opt, bool with_output = true) {
    sub->add_option("--input", opt.input, "Input file: CSV return panel or JSON document");
    if (with_output)
        sub->add_option("--output", opt.output, "Output path (default: stdout)");
    sub->add_option("--format", opt.format, "Output format: csv or json")
        ->capture_default_str();
    sub->add_option("--config", opt.config,
                    "Flat key=value config file; command-line flags take precedence");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Portfolio volatility scaling and attribution under serial correlation"};
    app.require_subcommand(1);
    Options opt;

    CLI::App* estimate = app.add_subcommand(
        "estimate", "Sample autocovariances and contemporaneous estimators from a panel");
    add_common(estimate, opt);
    estimate->add_option("--max-lag", opt.max_lag, "Highest lag to estimate")
        ->capture_default_str();
    estimate->add_flag("--demean,!--no-demean", opt.demean, "Subtract sample means (default on)");

    CLI::App* scale = app.add_subcommand(
        "scale", "Holding-period volatility table sigma(lambda, d) and scaling factors");
    add_common(scale, opt);
    scale->add_option("--weights", opt.weights, "Portfolio weights, comma separated");
    scale->add_option("--horizons", opt.horizons, "Holding periods in days, comma separated")
        ->capture_default_str();
    scale->add_option("--model", opt.model, "empirical, ma1, ar1, vma1 or var1")
        ->capture_default_str();
    scale->add_option("--max-lag", opt.max_lag, "Highest estimated lag (panel input)")
        ->capture_default_str();
    scale->add_flag("--demean,!--no-demean", opt.demean, "Subtract sample means (default on)");
    scale->add_flag("--annualize", opt.annualize, "Report volatilities scaled by sqrt(250)");

    CLI::App* contrib = app.add_subcommand(
        "contrib", "Per-asset Euler contributions to d-day portfolio volatility");
    add_common(contrib, opt);
    contrib->add_option("--weights", opt.weights, "Portfolio weights, comma separated");
    contrib->add_option("--horizons", opt.horizons, "Holding periods in days, comma separated")
        ->capture_default_str();
    contrib->add_option("--model", opt.model, "empirical, vma1 or var1")
        ->capture_default_str();
    contrib->add_option("--max-lag", opt.max_lag, "Highest estimated lag (panel input)")
        ->capture_default_str();
    contrib->add_flag("--demean,!--no-demean", opt.demean, "Subtract sample means (default on)");
    contrib->add_flag("--annualize", opt.annualize, "Report volatilities scaled by sqrt(250)");

    CLI::App* fit = app.add_subcommand("fit", "Fit a time-series model from moments");
    add_common(fit, opt);
    fit->add_option("--weights", opt.weights, "Portfolio weights (ma1/ar1 on multi-asset input)");
    fit->add_option("--model", opt.model, "ma1, ar1, vma1 or var1")->capture_default_str();
    fit->add_option("--max-lag", opt.max_lag, "Highest estimated lag (panel input)")
        ->capture_default_str();
    fit->add_flag("--demean,!--no-demean", opt.demean, "Subtract sample means (default on)");

    CLI::App* simulate = app.add_subcommand(
        "simulate", "Closing-time Brownian return panel from a market document");
    add_common(simulate, opt);
    simulate->add_option("--days", opt.days, "Number of daily returns")->capture_default_str();
    simulate->add_option("--steps-per-day", opt.steps_per_day, "Brownian grid resolution")
        ->capture_default_str();
    simulate->add_option("--seed", opt.seed, "Master RNG seed")->capture_default_str();

    CLI::App* compare = app.add_subcommand(
        "compare", "Closing-time vs contemporaneous-estimator volatility per horizon");
    add_common(compare, opt);
    compare->add_option("--weights", opt.weights, "Portfolio weights, comma separated");
    compare->add_option("--horizons", opt.horizons, "Holding periods in days, comma separated")
        ->capture_default_str();
    compare->add_option("--max-lag", opt.max_lag, "Highest estimated lag (panel input)")
        ->capture_default_str();
    compare->add_flag("--demean,!--no-demean", opt.demean, "Subtract sample means (default on)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        for (const CLI::App* sub : app.get_subcommands()) apply_config(*sub, opt);
        if (app.got_subcommand(estimate)) run_estimate(opt);
        else if (app.got_subcommand(scale)) run_scale(opt);
        else if (app.got_subcommand(contrib)) run_contrib(opt);
        else if (app.got_subcommand(fit)) run_fit(opt);
        else if (app.got_subcommand(simulate)) run_simulate(opt);
        else if (app.got_subcommand(compare)) run_compare(opt);
    } catch (const volscale::InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const volscale::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
