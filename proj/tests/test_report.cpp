#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "fhntorus/report.hpp"
#include "support/gen.hpp"

using namespace fhntorus;

TEST(Fmt17, RoundTripsDoubles) {
    gen::for_all(200, 1000, [](gen::Gen& g) {
        const double v = g.uniform(-1, 1) * std::pow(10.0, g.integer(-20, 20));
        EXPECT_EQ(std::stod(fmt17(v)), v);
    });
    EXPECT_EQ(fmt17(0.1), "0.10000000000000001");
}

TEST(DumpJson, LayoutAndNonFinite) {
    Json j{{"x", 1.5}, {"n", 3}, {"bad", std::numeric_limits<double>::infinity()}, {"list", Json::array({1, 2})},
           {"empty", Json::object()}};
    EXPECT_EQ(dump_json(j),
              "{\n  \"x\": 1.5,\n  \"n\": 3,\n  \"bad\": null,\n  \"list\": [\n    1,\n    2\n  ],\n"
              "  \"empty\": {}\n}\n");
}

TEST(DumpJson, ParsesBackExactly) {
    const LatticeParams lp({0.1, 1.7, 0.03}, {-0.3, 0.9}, 5);
    const auto rep = spectrum_report(lp, {1e-10, 1e-9, false});
    const Json j = to_json(rep);
    const Json back = Json::parse(dump_json(j));
    ASSERT_EQ(back["records"].size(), rep.records.size());
    for (std::size_t i = 0; i < rep.records.size(); ++i) {
        EXPECT_EQ(back["records"][i]["re"].get<double>(), rep.records[i].lambda.real());
        EXPECT_EQ(back["records"][i]["im"].get<double>(), rep.records[i].lambda.imag());
    }
}

TEST(SpectrumCsv, HeaderAndRows) {
    const LatticeParams lp({0, 1, 0}, {-1, -0.5}, 3);
    std::ostringstream os;
    write_spectrum_csv(os, spectrum_report(lp));
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "r,s,branch,re,im,residual,k1,k2,repeated");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    EXPECT_EQ(rows, 18);
}

TEST(TrajectoryCsv, HeaderOrder) {
    EXPECT_EQ(trajectory_header(3).substr(0, 30), "t,x_1_1,y_1_1,x_2_1,y_2_1,x_3_");
    const std::string h = trajectory_header(3);
    EXPECT_EQ(std::count(h.begin(), h.end(), ','), 18);
}

TEST(TrajectoryCsv, RoundTrip) {
    const LatticeParams lp({-0.05, 1, 0}, {-1, 0.5}, 3);
    gen::Gen g(1010);
    const auto tr = integrate(g.state(3, 0.1), lp, 5.0);
    std::ostringstream os;
    write_trajectory_csv(os, tr, 3);
    std::istringstream is(os.str());
    const auto back = read_trajectory_csv(is, lp);
    ASSERT_EQ(back.size(), tr.size());
    for (std::size_t i = 0; i < tr.size(); ++i) {
        EXPECT_EQ(back.times[i], tr.times[i]);
        EXPECT_EQ(back.states[i], tr.states[i]);
    }
}

TEST(TrajectoryCsv, Errors) {
    const LatticeParams lp({0, 1, 0}, {-1, -1}, 3);
    std::istringstream empty("");
    EXPECT_THROW(read_trajectory_csv(empty, lp), IoError);
    std::istringstream narrow("t,x_1_1,y_1_1\n0,1,2\n");
    EXPECT_THROW(read_trajectory_csv(narrow, lp), DimensionError);
    std::string row0 = "0", row1 = "1", bad = "1";
    for (int i = 0; i < 18; ++i) row0 += ",0", row1 += ",0", bad += i == 4 ? ",abc" : ",0";
    std::istringstream badnum(trajectory_header(3) + "\n" + row0 + "\n" + bad + "\n");
    EXPECT_THROW(read_trajectory_csv(badnum, lp), IoError);
    std::istringstream backwards(trajectory_header(3) + "\n" + row1 + "\n" + row0 + "\n");
    EXPECT_THROW(read_trajectory_csv(backwards, lp), IoError);
    std::istringstream one(trajectory_header(3) + "\n" + row0 + "\n");
    EXPECT_THROW(read_trajectory_csv(one, lp), IoError);
}

TEST(SweepCsv, Columns) {
    std::ostringstream os;
    const LatticeParams lp({0, 1, 0}, {-1, -1}, 3);
    write_sweep_csv(os, {SweepRow{lp, 0.0, 0.0, 0, 0, 1.0, "Gamma", Criticality::undetermined}});
    EXPECT_EQ(os.str(),
              "N,a,b,c,gamma,delta,a_star,a_hat,mode_r,mode_s,omega,K,criticality\n"
              "3,0,1,0,-1,-1,0,0,0,0,1,Gamma,undetermined\n");
}

TEST(EmitText, WritesFileOrFallback) {
    std::ostringstream os;
    emit_text("hello", "", os);
    EXPECT_EQ(os.str(), "hello");
    EXPECT_THROW(emit_text("x", "/nonexistent-dir/file.txt", os), IoError);
}

TEST(ToJson, HopfReportFields) {
    const LatticeParams lp({0, 1, 0}, {-1, -1}, 3);
    const Json j = to_json(hopf_at_critical(lp));
    for (const char* key : {"pattern", "a_hat", "a_star", "mode", "omega_hopf", "K", "resonances", "criticality",
                            "s_star", "warnings"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["K"], "Gamma");
    EXPECT_EQ(j["s_star"].get<double>(), -0.375);
}
