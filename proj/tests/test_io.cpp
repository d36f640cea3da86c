#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "volscale/io.hpp"

using namespace volscale;
using namespace volscale::io;

namespace {

PanelData parse(const std::string& text) {
    std::istringstream in(text);
    return read_panel_csv(in, "test.csv");
}

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("twelve significant digit formatting") {
    CHECK(format_sig12(0.0) == "0");
    CHECK(format_sig12(1.0) == "1");
    CHECK(format_sig12(1.0 / 3.0) == "0.333333333333");
    CHECK(format_sig12(-2.5e-4) == "-0.00025");
    CHECK(round_sig12(1.0 / 3.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(round_sig12(0.1) == 0.1);
    // rounding is idempotent
    const double r = round_sig12(9.876543210987654321);
    CHECK(round_sig12(r) == r);
}

TEST_CASE("panel parsing without a date column") {
    const auto data = parse("A,B\n0.01,0.02\n0.03,-0.04\n");
    CHECK(data.dates.empty());
    CHECK(data.panel.labels() == std::vector<std::string>{"A", "B"});
    CHECK(data.panel.periods() == 2);
    CHECK(data.panel.values()(1, 1) == -0.04);
}

TEST_CASE("panel parsing with a date column") {
    SUBCASE("declared by header") {
        const auto data = parse("date,A\n2024-01-02,0.01\n2024-01-03,0.02\n");
        CHECK(data.dates == std::vector<std::string>{"2024-01-02", "2024-01-03"});
        CHECK(data.panel.assets() == 1);
    }
    SUBCASE("case-insensitive header") {
        const auto data = parse("Date,A\n2024-01-02,0.01\n2024-01-03,0.02\n");
        CHECK(data.dates.size() == 2);
    }
    SUBCASE("detected from the first data field") {
        const auto data = parse("day,A\n2024-01-02,0.01\n2024-01-03,0.02\n");
        CHECK(data.dates.size() == 2);
        CHECK(data.panel.labels() == std::vector<std::string>{"A"});
    }
    SUBCASE("a malformed date is rejected with its line") {
        const std::string msg = message_of(
            [] { parse("date,A\n2024-01-02,0.01\n2024-13-99x,0.02\n"); });
        CHECK(msg.find("line 3") != std::string::npos);
    }
}

TEST_CASE("panel parsing failures cite the position") {
    CHECK_THROWS_AS(parse("A,B\n"), InvalidInput);
    CHECK_THROWS_AS(parse(""), InvalidInput);

    const std::string bad_number =
        message_of([] { parse("A,B\n0.01,0.02\n0.03,zebra\n"); });
    CHECK(bad_number.find("test.csv line 3") != std::string::npos);
    CHECK(bad_number.find("zebra") != std::string::npos);
    CHECK(bad_number.find("column 2") != std::string::npos);

    const std::string short_row = message_of([] { parse("A,B\n0.01\n"); });
    CHECK(short_row.find("line 2") != std::string::npos);
    CHECK(short_row.find("expected 2 fields, got 1") != std::string::npos);

    const std::string empty_label = message_of([] { parse("A,\n0.01,0.02\n"); });
    CHECK(empty_label.find("line 1") != std::string::npos);

    CHECK_THROWS_AS(read_panel_csv_file("/nonexistent/panel.csv"), InvalidInput);
}

TEST_CASE("CRLF and trailing blank lines are tolerated") {
    const auto data = parse("A,B\r\n0.01,0.02\r\n0.03,0.04\r\n\r\n\n");
    CHECK(data.panel.periods() == 2);
}

TEST_CASE("panel writing round-trips") {
    const auto original = parse("date,A,B\n2024-01-02,0.011,0.021\n2024-01-03,0.031,0.041\n");
    std::ostringstream out;
    write_panel_csv(out, original.panel, original.dates);
    const auto again = parse(out.str());
    CHECK(again.dates == original.dates);
    CHECK(again.panel.labels() == original.panel.labels());
    CHECK((again.panel.values() - original.panel.values()).cwiseAbs().maxCoeff() == 0.0);

    std::ostringstream no_dates;
    write_panel_csv(no_dates, original.panel);
    CHECK(no_dates.str().substr(0, 4) == "A,B\n");

    std::ostringstream bad;
    CHECK_THROWS_AS(write_panel_csv(bad, original.panel, {"2024-01-02"}), InvalidInput);
}

TEST_CASE("JSON sniffing") {
    CHECK(looks_like_json("  {\"gamma0\": [[1]]}"));
    CHECK_FALSE(looks_like_json("A,B\n1,2\n"));
    CHECK_FALSE(looks_like_json(""));
}

TEST_CASE("moment documents") {
    const auto doc = parse_input_document(
        R"({"gamma0": [[2.0, 0.5], [0.5, 1.0]], "gamma1": [[0.1, 0.0], [0.0, 0.2]]})", "m.json");
    CHECK(doc.kind == InputKind::moments);
    CHECK(doc.gamma0(0, 1) == 0.5);
    CHECK(doc.gamma1(1, 1) == 0.2);
    CHECK(doc.labels == std::vector<std::string>{"asset_1", "asset_2"});

    const auto no_lag = parse_input_document(R"({"gamma0": [[1.0]]})", "m.json");
    CHECK(no_lag.gamma1.rows() == 1);
    CHECK(no_lag.gamma1(0, 0) == 0.0);

    const auto named = parse_input_document(
        R"({"gamma0": [[1.0, 0.0], [0.0, 1.0]], "labels": ["x", "y"]})", "m.json");
    CHECK(named.labels == std::vector<std::string>{"x", "y"});
}

TEST_CASE("market documents") {
    const auto doc = parse_input_document(
        R"({"sigma": [[1.0, 0.5], [0.5, 1.0]], "closing_fractions": [0.25, 0.75]})", "s.json");
    CHECK(doc.kind == InputKind::market);
    CHECK(doc.sigma(0, 1) == 0.5);
    CHECK(doc.closing_fractions(1) == 0.75);
}

TEST_CASE("document validation failures") {
    CHECK_THROWS_AS(parse_input_document("{ not json", "x.json"), InvalidInput);
    CHECK_THROWS_AS(parse_input_document("[1,2,3]", "x.json"), InvalidInput);
    CHECK_THROWS_AS(parse_input_document(R"({"other": 1})", "x.json"), InvalidInput);
    CHECK_THROWS_AS(parse_input_document(R"({"gamma0": [[1.0, 2.0]]})", "x.json"), InvalidInput);
    CHECK_THROWS_AS(
        parse_input_document(R"({"gamma0": [[1.0]], "gamma1": [[1.0, 0.0], [0.0, 1.0]]})",
                             "x.json"),
        InvalidInput);
    CHECK_THROWS_AS(parse_input_document(R"({"sigma": [[1.0]]})", "x.json"), InvalidInput);
    CHECK_THROWS_AS(
        parse_input_document(R"({"gamma0": [[1.0]], "labels": ["a", "b"]})", "x.json"),
        InvalidInput);

    const std::string ragged = message_of([] {
        parse_input_document(R"({"gamma0": [[1.0, 0.0], [0.0]]})", "x.json");
    });
    CHECK(ragged.find("row 2") != std::string::npos);

    const std::string not_number = message_of([] {
        parse_input_document(R"({"gamma0": [["a"]]})", "x.json");
    });
    CHECK(not_number.find("(1,1)") != std::string::npos);
}

TEST_CASE("matrix JSON round trip keeps 12 significant digits") {
    Eigen::MatrixXd m(2, 2);
    m << 1.0 / 3.0, -2.5e-4, 1.23456789012345e8, 0.0;
    const auto j = matrix_to_json(m);
    const Eigen::MatrixXd back = matrix_from_json(j, "round");
    for (Eigen::Index r = 0; r < 2; ++r)
        for (Eigen::Index c = 0; c < 2; ++c)
            CHECK(back(r, c) == round_sig12(m(r, c)));

    Eigen::VectorXd v(3);
    v << 0.25, 0.5, 0.75;
    const Eigen::VectorXd vb = vector_from_json(vector_to_json(v), "round");
    CHECK((vb - v).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("long-format matrix rows") {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 2.0, 3.0, 4.0;
    std::ostringstream out;
    write_matrix_rows_csv(out, "acov", "1", m, {"A", "B"});
    CHECK(out.str() ==
          "acov,1,A,A,1\n"
          "acov,1,A,B,2\n"
          "acov,1,B,A,3\n"
          "acov,1,B,B,4\n");
    std::ostringstream bad;
    CHECK_THROWS_AS(write_matrix_rows_csv(bad, "acov", "0", m, {"A"}), InvalidInput);
}
