// End-to-end exercise of the tp2a binary: subcommands, exit codes, output
// formats, schema conformance and byte-level determinism.

#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracle.hpp"
#include "schema_check.hpp"

namespace {

using nlohmann::json;

struct RunResult {
    int code = -1;
    std::string out;
};

int g_seq = 0;

RunResult run_cli(const std::string& args) {
    const std::string tmp = "/tmp/tp2a_cli_" + std::to_string(g_seq++) + ".out";
    const std::string cmd =
        std::string(TP2A_CLI_BIN) + " " + args + " > " + tmp + " 2> /dev/null";
    const int st = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    std::ifstream in(tmp);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    std::remove(tmp.c_str());
    return r;
}

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = "/tmp/tp2a_cfg_" + name + ".json";
    std::ofstream f(path);
    f << content;
    return path;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

json schema_doc(const char* name) {
    return schema::load(std::string(TP2A_SCHEMA_DIR) + "/" + name);
}

const char* kSpdcDeltaConfig = R"({
  "state": {"kind": "spdc",
            "source": {"omega_alpha": 1.5, "omega_beta": 3.5,
                        "width_alpha": 0.05, "width_beta": 0.5, "t0": 30.0}},
  "atoms": {"omega1": 1.0, "omega2": 4.0},
  "grid": {"T": 628.3185307179587, "coverage": 12},
  "method": "delta"
})";

}  // namespace

TEST_CASE("prob: records, schema and the quadrature/closed agreement") {
    const RunResult r = run_cli("prob --preset cascade-enhance --format json");
    REQUIRE(r.code == 0);
    const json recs = json::parse(r.out);
    std::string why;
    CHECK_MESSAGE(schema::validate(recs, schema_doc("prob_output.schema.json"), &why), why);
    REQUIRE(recs.size() == 3);

    double closed = 0.0, quad = 0.0;
    bool quad_has_estimate = false;
    for (const auto& rec : recs) {
        if (rec["method"] == "closed_form") closed = rec["value"].get<double>();
        if (rec["method"] == "quadrature") {
            quad = rec["value"].get<double>();
            quad_has_estimate = rec["error_estimate"].is_number();
        } else {
            CHECK(rec["error_estimate"].is_null());
        }
    }
    CHECK(quad_has_estimate);
    CHECK(quad / closed > 0.95);
    CHECK(quad / closed < 1.05);
}

TEST_CASE("prob: delta method flags an unverified switched-on condition") {
    const std::string cfg = write_temp("spdc_delta", kSpdcDeltaConfig);
    const RunResult r = run_cli("prob --config " + cfg);
    REQUIRE(r.code == 0);
    const json recs = json::parse(r.out);
    REQUIRE(recs.size() == 1);
    bool flagged = false;
    for (const auto& f : recs[0]["regime_flags"])
        flagged |= f.get<std::string>() == "switched_on_unverified";
    CHECK(flagged);
}

TEST_CASE("prob: csv format uses 9-significant-digit scientific notation") {
    const RunResult r = run_cli("prob --preset cascade-enhance --format csv");
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] ==
          std::vector<std::string>{"method", "value", "time", "error_estimate",
                                   "regime_flags"});
    const std::string& v = rows[1][1];
    REQUIRE(v.size() >= 12);
    CHECK(v[1] == '.');
    CHECK(v.find('e') == 10);  // d.dddddddde+xx
}

TEST_CASE("exit codes: config errors, refusals, strict regime") {
    // malformed JSON: exit 2 and no output file
    const std::string bad = write_temp("bad", "{ not json");
    const std::string out = "/tmp/tp2a_should_not_exist.csv";
    std::remove(out.c_str());
    CHECK(run_cli("prob --config " + bad + " --out " + out).code == 2);
    CHECK_FALSE(std::ifstream(out).good());

    CHECK(run_cli("prob --preset no-such-preset").code == 2);
    CHECK(run_cli("prob").code == 2);
    CHECK(run_cli("nonsense-subcommand").code == 2);

    // mode budget: a window far wider than the per-axis mode budget
    const std::string huge = write_temp("huge", R"({
      "state": {"kind": "cascade",
                "source": {"omega_alpha": 1.5, "omega_beta": 3.5,
                            "width_alpha": 0.05, "width_beta": 0.5}},
      "atoms": {"omega1": 1.0, "omega2": 4.0},
      "grid": {"T": 6283.185307179587, "coverage": 2000}})");
    CHECK(run_cli("prob --config " + huge).code == 3);

    // strict: closed form outside the long-time regime
    const std::string early = write_temp("early", R"({
      "state": {"kind": "cascade",
                "source": {"omega_alpha": 1.5, "omega_beta": 3.5,
                            "width_alpha": 0.05, "width_beta": 0.5}},
      "atoms": {"omega1": 1.0, "omega2": 4.0},
      "grid": {"T": 628.3185307179587, "coverage": 15},
      "time": 5.0,
      "method": "closed"})");
    CHECK(run_cli("prob --config " + early + " --strict").code == 4);
    CHECK(run_cli("prob --config " + early).code == 0);
}

TEST_CASE("sweep: uncorrelated delta sweep is flat within 1%") {
    const RunResult r = run_cli("sweep --preset sweep-uncorrelated-delta");
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 42);  // header + 41
    CHECK(rows[0] == std::vector<std::string>{"variable", "value_closed",
                                              "value_quadrature", "ratio"});
    double lo = 1e300, hi = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double q = std::stod(rows[i][2]);
        lo = std::min(lo, q);
        hi = std::max(hi, q);
    }
    CHECK(hi / lo - 1.0 < 0.01);
}

TEST_CASE("sweep: cascade delta sweep has a Lorentzian peak of FWHM 2 gamma_alpha") {
    const RunResult r = run_cli("sweep --preset sweep-cascade-delta --threads 2");
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 82);
    std::vector<double> x, q;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        x.push_back(std::stod(rows[i][0]));
        q.push_back(std::stod(rows[i][2]));
    }
    CHECK(oracle::fwhm(x, q) == doctest::Approx(2.0 * 0.05).epsilon(0.10));
    // peak centered at exact 2P2A resonance
    std::size_t imax = 0;
    for (std::size_t i = 1; i < q.size(); ++i)
        if (q[i] > q[imax]) imax = i;
    CHECK(std::abs(x[imax]) <= 0.01 + 1e-12);
}

TEST_CASE("sweep: rho1 time sweep follows the quadratic law") {
    const RunResult r = run_cli("sweep --preset sweep-rho1-t");
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 11);
    std::vector<double> lnt, lnq;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        lnt.push_back(std::log(std::stod(rows[i][0])));
        lnq.push_back(std::log(std::stod(rows[i][2])));
    }
    const oracle::Fit f = oracle::linear_fit(lnt, lnq);
    CHECK(f.slope == doctest::Approx(2.00).epsilon(0.025));
}

TEST_CASE("g2: explicit 2x2 grid emits exactly four data rows") {
    const std::string cfg = write_temp("g2small", R"({
      "state": {"kind": "cascade",
                "source": {"omega_alpha": 1.5, "omega_beta": 3.5,
                            "width_alpha": 0.05, "width_beta": 0.5}},
      "atoms": {"omega1": 1.0, "omega2": 4.0},
      "grid": {"T": 628.3185307179587, "coverage": 15},
      "map": {"kind": "freq",
               "axis1": {"from": 1.0, "to": 2.0, "points": 2},
               "axis2": {"from": 3.0, "to": 4.0, "points": 2}}})");
    const RunResult r = run_cli("g2 --config " + cfg);
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == std::vector<std::string>{"axis1", "axis2", "value"});
}

TEST_CASE("g2: fig2-a preset concentrates on the anti-diagonal; json validates") {
    const RunResult r = run_cli("g2 --preset fig2-a --format json");
    REQUIRE(r.code == 0);
    const json env = json::parse(r.out);
    std::string why;
    CHECK_MESSAGE(schema::validate(env, schema_doc("map_envelope.schema.json"), &why), why);
    const auto& a1 = env["axis1"];
    const auto& a2 = env["axis2"];
    const auto& vals = env["values"];
    const std::size_t n2 = a2.size();
    double best = 0.0;
    double best_sum = 0.0;
    for (std::size_t i = 0; i < a1.size(); ++i)
        for (std::size_t j = 0; j < n2; ++j) {
            const double v = vals[i * n2 + j].get<double>();
            if (v > best) {
                best = v;
                best_sum = a1[i].get<double>() + a2[j].get<double>();
            }
        }
    CHECK(best > 0.0);
    CHECK(best_sum == doctest::Approx(5.0).epsilon(0.01));  // wa + wb
}

TEST_CASE("enhance: cascade preset report and toy extremes") {
    const RunResult r = run_cli("enhance --preset cascade-enhance --threads 2");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    std::string why;
    CHECK_MESSAGE(schema::validate(j, schema_doc("enhance_output.schema.json"), &why), why);
    CHECK(j["G_p"].get<double>() > 0.9);
    CHECK(j["G_p"].get<double>() < 1.1);
    CHECK(j["G_12"].get<double>() > 100.0);
    CHECK(j["antidiagonal_width"].get<double>() ==
          doctest::Approx(2.0 * 0.05).epsilon(0.25));

    const json sym = json::parse(run_cli("enhance --preset toy-symmetric").out);
    CHECK(sym["G_p"].get<double>() == doctest::Approx(2.0).epsilon(1e-9));

    const json prod = json::parse(run_cli("enhance --preset toy-product").out);
    CHECK(prod["G_12"].get<double>() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("validate: default certificates pass; designed failure and refusal") {
    const RunResult ok = run_cli("validate --which all --threads 2");
    CHECK(ok.code == 0);
    const json certs = json::parse(ok.out);
    std::string why;
    CHECK_MESSAGE(schema::validate(certs, schema_doc("validate_output.schema.json"), &why),
                  why);
    CHECK(certs.size() >= 7);  // 3 delta functions + 2 presets x 2 certificates
    for (const auto& c : certs) CHECK(c["pass"].get<bool>());

    CHECK(run_cli("validate --which energy --preset spdc-cert-late --threads 2").code == 1);

    const std::string pole = write_temp("pole", R"({
      "delta_function": {"form": "single_pole", "gamma": 1.0}})");
    CHECK(run_cli("validate --which delta --config " + pole).code == 2);

    const std::string acausal = write_temp("acausal", R"({
      "delta_function": {"form": "poly_exp", "gamma": 1.0,
                          "coeffs": [0.0, 1.0], "shift": -2.0}})");
    CHECK(run_cli("validate --which delta --config " + acausal).code == 2);
}

TEST_CASE("sweep: alpha_mag and Delta variables") {
    const std::string lift = write_temp("lift_sweep", R"({
      "base": {
        "state": {"kind": "cascade",
                   "source": {"omega_alpha": 1.5, "omega_beta": 3.5,
                               "width_alpha": 0.05, "width_beta": 0.5},
                   "transforms": ["coherent_lift"], "alpha": {"re": 1.0, "im": 0.0}},
        "atoms": {"omega1": 1.0, "omega2": 4.0},
        "grid": {"T": 628.3185307179587, "coverage": 15}},
      "variable": "alpha_mag",
      "range": {"from": 1.0, "to": 2.0, "steps": 3}})");
    const RunResult r = run_cli("sweep --config " + lift);
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 4);
    // |alpha|^4 scaling: the 2.0 row is 16x the 1.0 row, exactly
    const double q1 = std::stod(rows[1][2]);
    const double q3 = std::stod(rows[3][2]);
    CHECK(q3 / q1 == doctest::Approx(16.0).epsilon(1e-7));

    // atoms far apart so the swap pairing stays off resonance over the range
    const std::string dsweep = write_temp("Delta_sweep", R"({
      "base": {
        "state": {"kind": "uncorrelated",
                   "source": {"omega_alpha": 11.5, "omega_beta": 33.5,
                               "width_alpha": 0.5, "width_beta": 0.5}},
        "atoms": {"omega1": 9.5, "omega2": 35.5},
        "grid": {"T": 80.0, "coverage": 40}},
      "variable": "Delta",
      "range": {"from": 0.5, "to": 2.5, "steps": 5}})");
    const RunResult rd = run_cli("sweep --config " + dsweep);
    REQUIRE(rd.code == 0);
    const auto drows = parse_csv(rd.out);
    REQUIRE(drows.size() == 6);
    // single-photon wings: monotone decrease with Delta, closed route agrees
    double prev = 1e300;
    for (std::size_t i = 1; i < drows.size(); ++i) {
        const double q = std::stod(drows[i][2]);
        CHECK(q < prev);
        prev = q;
        CHECK(std::stod(drows[i][3]) == doctest::Approx(1.0).epsilon(0.05));
    }
}

TEST_CASE("g2: fig2-d factorized map is a four-spot file") {
    const RunResult r = run_cli("g2 --preset fig2-d --format json --threads 2");
    REQUIRE(r.code == 0);
    const json env = json::parse(r.out);
    const auto& a1 = env["axis1"];
    const auto& a2 = env["axis2"];
    const auto& vals = env["values"];
    const std::size_t n2 = a2.size();
    auto value_near = [&](double x, double y) {
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < a1.size(); ++i)
            if (std::abs(a1[i].get<double>() - x) <
                std::abs(a1[bi].get<double>() - x))
                bi = i;
        for (std::size_t j = 0; j < n2; ++j)
            if (std::abs(a2[j].get<double>() - y) <
                std::abs(a2[bj].get<double>() - y))
                bj = j;
        return vals[bi * n2 + bj].get<double>();
    };
    const double ref = value_near(1.5, 3.5);
    int spots = 0;
    for (auto [x, y] : {std::pair{1.5, 1.5}, {1.5, 3.5}, {3.5, 1.5}, {3.5, 3.5}})
        if (value_near(x, y) > 0.2 * ref) ++spots;
    CHECK(spots == 4);
}

TEST_CASE("determinism: identical bytes across repeated runs and worker counts") {
    const std::string a = run_cli("sweep --preset sweep-uncorrelated-delta --threads 1").out;
    const std::string b = run_cli("sweep --preset sweep-uncorrelated-delta --threads 1").out;
    const std::string c = run_cli("sweep --preset sweep-uncorrelated-delta --threads 4").out;
    REQUIRE(!a.empty());
    CHECK(a == b);
    CHECK(a == c);

    const std::string p1 = run_cli("prob --preset cascade-enhance --threads 1").out;
    const std::string p4 = run_cli("prob --preset cascade-enhance --threads 4").out;
    REQUIRE(!p1.empty());
    CHECK(p1 == p4);
}

TEST_CASE("input schemas document the accepted configuration shape") {
    // the shipped scenario schema accepts the documented example
    const json cfg = json::parse(kSpdcDeltaConfig);
    std::string why;
    CHECK_MESSAGE(
        schema::validate(cfg, schema_doc("scenario_config.schema.json"), &why), why);
}
