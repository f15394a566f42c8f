#include <doctest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "qotto/run_config.hpp"

using namespace qotto;
using nlohmann::json;

namespace {

std::string cli_path() {
    const char* p = std::getenv("QOTTO_CLI");
    return p ? p : "";
}

struct TempDir {
    std::string path;
    TempDir() {
        char tmpl[] = "/tmp/qotto_test_XXXXXX";
        path = mkdtemp(tmpl);
    }
    std::string file(const std::string& name) const { return path + "/" + name; }
};

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    f << text;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int run(const std::string& cmd) { return std::system(cmd.c_str()) / 256; }

json fig2_config(double tau) {
    return json{{"protocol",
                 {{"tanh",
                   {{"delta", 1.0}, {"u_i", 2.0}, {"u_f", 0.0}, {"t1", 0.0},
                    {"t2", 20.0}, {"tau", tau}}}}},
                {"coupling", {{"J", 0.125}}},
                {"bath", {{"kB_Th", 2.0}, {"Tc_over_Th", 0.5}}},
                {"discretization", {{"steps", 20000}}}};
}

}  // namespace

TEST_CASE("run config: parse, echo, re-parse identity") {
    json j = fig2_config(2.0);
    j["sweep"] = {{"axes", json::array({{{"name", "J"}, {"min", 0.0}, {"max", 0.5},
                                         {"count", 12}},
                                        {{"name", "tau"}, {"min", 0.1}, {"max", 5.0},
                                         {"count", 7}}})},
                  {"objective", "work"}};
    j["trajectory"] = {{"tau_values", {0.1, 1.0, 10.0}}};
    j["output"] = {{"format", "csv"}};

    const auto cfg = cli::parse_run_config(j);
    const auto echo = cli::run_config_json(cfg);
    const auto cfg2 = cli::parse_run_config(echo);
    CHECK(cfg == cfg2);

    CHECK(cfg.sweep.has_value());
    CHECK(cfg.sweep->homega1 == doctest::Approx(2.0 * std::sqrt(5.0)));
    CHECK(cfg.sweep->J == doctest::Approx(0.125));
    CHECK(cfg.sweep->axes.size() == 2);
}

TEST_CASE("run config: validation failures") {
    json j = fig2_config(2.0);
    j["bath"] = {{"kB_Th", 2.0}, {"Tc_over_Th", 1.0}};
    CHECK_THROWS_AS(cli::parse_run_config(j), ConfigError);

    json two_forms = fig2_config(2.0);
    two_forms["protocol"]["samples"] = {{0.0, 1.0, 0.0, 0.0}, {1.0, 1.0, 0.0, 0.0}};
    CHECK_THROWS_AS(cli::parse_run_config(two_forms), ConfigError);

    json unknown = fig2_config(2.0);
    unknown["extra_section"] = 1;
    CHECK_THROWS_AS(cli::parse_run_config(unknown), ConfigError);

    json no_protocol;
    no_protocol["coupling"] = {{"J", 0.1}};
    CHECK_THROWS_AS(cli::parse_run_config(no_protocol), ConfigError);
}

TEST_CASE("cli: evolve emits the documented JSON shape") {
    REQUIRE(!cli_path().empty());
    TempDir tmp;
    write_file(tmp.file("cfg.json"), fig2_config(2.0).dump());
    const std::string out = tmp.file("out.json");
    const int rc = run(cli_path() + " evolve --config " + tmp.file("cfg.json") +
                       " --out " + out + " 2>" + tmp.file("err"));
    CHECK(rc == 0);

    const json j = json::parse(read_file(out));
    CHECK(j.contains("alpha"));
    CHECK(j.contains("beta"));
    CHECK(j.contains("gamma"));
    CHECK(j.at("U").size() == 4);
    CHECK(j.at("U")[0][0].size() == 2);
    CHECK(j.at("omega1").get<double>() == doctest::Approx(2.0 * std::sqrt(5.0)));
    CHECK(j.at("omega2").get<double>() == doctest::Approx(2.0));
    const double p = j.at("persistence").at("P").get<double>();
    CHECK(p > 0.9);
    CHECK(p <= 1.0);
    // config echo re-parses identically
    const auto cfg = cli::parse_run_config(json::parse(read_file(tmp.file("cfg.json"))));
    CHECK(cli::parse_run_config(j.at("config")) == cfg);
}

TEST_CASE("cli: constant field keeps every persistence at one") {
    REQUIRE(!cli_path().empty());
    TempDir tmp;
    json cfg = fig2_config(2.0);
    cfg["protocol"]["tanh"]["u_f"] = 2.0;  // u_i == u_f: constant field
    cfg["discretization"] = {{"steps", 2000}};
    write_file(tmp.file("cfg.json"), cfg.dump());
    const std::string out = tmp.file("out.json");
    CHECK(run(cli_path() + " evolve --config " + tmp.file("cfg.json") + " --out " + out +
              " 2>/dev/null") == 0);
    const json j = json::parse(read_file(out));
    CHECK(j.at("persistence").at("P").get<double>() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(j.at("persistence").at("Pp").get<double>() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("cli: zero field exits 3 with a machine-readable error") {
    REQUIRE(!cli_path().empty());
    TempDir tmp;
    json cfg;
    cfg["protocol"]["samples"] = {{0.0, 0.0, 0.0, 0.0}, {1.0, 0.0, 0.0, 0.0}};
    write_file(tmp.file("cfg.json"), cfg.dump());
    const int rc = run(cli_path() + " evolve --config " + tmp.file("cfg.json") +
                       " 1>/dev/null 2>" + tmp.file("err.json"));
    CHECK(rc == 3);
    const json err = json::parse(read_file(tmp.file("err.json")));
    CHECK(err.at("error").at("type").get<std::string>() == "DegenerateField");
}

TEST_CASE("cli: equal bath temperatures exit 2") {
    REQUIRE(!cli_path().empty());
    TempDir tmp;
    json cfg = fig2_config(2.0);
    cfg["bath"]["Tc_over_Th"] = 1.0;
    write_file(tmp.file("cfg.json"), cfg.dump());
    const int rc = run(cli_path() + " cycle --config " + tmp.file("cfg.json") +
                       " 1>/dev/null 2>" + tmp.file("err.json"));
    CHECK(rc == 2);
    const json err = json::parse(read_file(tmp.file("err.json")));
    CHECK(err.at("error").at("type").get<std::string>() == "ConfigError");
}

TEST_CASE("cli: cycle regimes at the figure settings") {
    REQUIRE(!cli_path().empty());
    TempDir tmp;
    // fast sweep at the colder bath: heater
    json cfg = fig2_config(0.05);
    cfg["discretization"] = {{"steps", 40000}};
    write_file(tmp.file("a.json"), cfg.dump());
    const std::string out = tmp.file("a_out.json");
    CHECK(run(cli_path() + " cycle --config " + tmp.file("a.json") + " --out " + out +
              " 2>/dev/null") == 0);
    CHECK(json::parse(read_file(out)).at("report").at("regime").get<std::string>() ==
          "heater");

    // adiabatic uncoupled: exact frequency-ratio efficiency in the output
    json ad = fig2_config(2.0);
    ad["adiabatic"] = true;
    ad["coupling"]["J"] = 0.0;
    write_file(tmp.file("b.json"), ad.dump());
    const std::string outb = tmp.file("b_out.json");
    CHECK(run(cli_path() + " cycle --config " + tmp.file("b.json") + " --out " + outb +
              " 2>/dev/null") == 0);
    const json jb = json::parse(read_file(outb));
    CHECK(jb.at("report").at("regime").get<std::string>() == "refrigerator");
    CHECK(jb.at("report").at("efficiency").is_null());

    // warmer bath turns it into an engine with the exact ratio efficiency
    json eng = ad;
    eng["bath"] = {{"kB_Th", 4.7}, {"Tc_over_Th", 0.375}};
    write_file(tmp.file("c.json"), eng.dump());
    const std::string outc = tmp.file("c_out.json");
    CHECK(run(cli_path() + " cycle --config " + tmp.file("c.json") + " --out " + outc +
              " 2>/dev/null") == 0);
    const json jc = json::parse(read_file(outc));
    CHECK(jc.at("report").at("regime").get<std::string>() == "engine");
    CHECK(jc.at("report").at("efficiency").get<double>() ==
          doctest::Approx(1.0 - 1.0 / std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("cli: planes emits three coefficient rows, work row is the sum") {
    REQUIRE(!cli_path().empty());
    TempDir tmp;
    // zero-plane figure setting
    json cfg;
    const double w1 = 2.0 * std::sqrt(5.0);
    const double w2 = 0.5 * w1;
    const double delta = w2 / 2.0;
    const double ui = std::sqrt(w1 * w1 - w2 * w2) / 2.0;
    cfg["protocol"]["tanh"] = {{"delta", delta}, {"u_i", ui}, {"u_f", 0.0},
                               {"t1", 0.0},      {"t2", 20.0}, {"tau", 2.0}};
    cfg["coupling"] = {{"J", 0.2}};
    cfg["bath"] = {{"kB_Th", 2.0}, {"Tc_over_Th", 0.5}};
    write_file(tmp.file("cfg.json"), cfg.dump());
    const std::string out = tmp.file("planes.csv");
    CHECK(run(cli_path() + " planes --config " + tmp.file("cfg.json") + " --out " + out +
              " 2>/dev/null") == 0);

    std::istringstream lines(read_file(out));
    std::string header, qh, qc, w;
    std::getline(lines, header);
    std::getline(lines, qh);
    std::getline(lines, qc);
    std::getline(lines, w);
    CHECK(header == "quantity,c0,cP,cPp,cPpp");
    const auto split = [](const std::string& s) {
        std::vector<double> v;
        std::istringstream ss(s);
        std::string tok;
        std::getline(ss, tok, ',');  // quantity label
        while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
        return v;
    };
    const auto vh = split(qh), vc = split(qc), vw = split(w);
    REQUIRE(vh.size() == 4);
    for (int k = 0; k < 4; ++k)
        CHECK(vw[k] == doctest::Approx(vh[k] + vc[k]).epsilon(1e-12));
}

TEST_CASE("cli: sweep rejects a config without axes") {
    REQUIRE(!cli_path().empty());
    TempDir tmp;
    json cfg = fig2_config(2.0);
    cfg["sweep"] = {{"axes", json::array()}};
    write_file(tmp.file("cfg.json"), cfg.dump());
    CHECK(run(cli_path() + " sweep --config " + tmp.file("cfg.json") +
              " 1>/dev/null 2>/dev/null") == 2);
}

TEST_CASE("cli: sweep and optimize run end to end") {
    REQUIRE(!cli_path().empty());
    TempDir tmp;
    json cfg = fig2_config(2.0);
    cfg["adiabatic"] = true;
    cfg["sweep"] = {{"homega1", 4.0},
                    {"omega_ratio", 0.375},
                    {"kB_Th", 5.54},
                    {"Tc_over_Th", 0.1},
                    {"axes", json::array({{{"name", "J"}, {"min", 0.0}, {"max", 0.4},
                                           {"count", 5}}})},
                    {"objective", "work"}};
    write_file(tmp.file("cfg.json"), cfg.dump());

    const std::string csv = tmp.file("sweep.csv");
    CHECK(run(cli_path() + " sweep --config " + tmp.file("cfg.json") + " --out " + csv +
              " 2>/dev/null") == 0);
    const auto text = read_file(csv);
    CHECK(text.rfind("J,P,Pp,Ppp,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 6);  // header + 5 rows

    const std::string opt = tmp.file("opt.json");
    CHECK(run(cli_path() + " optimize --config " + tmp.file("cfg.json") + " --out " +
              opt + " 2>/dev/null") == 0);
    const json jo = json::parse(read_file(opt));
    CHECK(jo.at("value").get<double>() > 1.0);
    CHECK(jo.at("argmax").contains("J"));
}

TEST_CASE("cli: sweep emits JSON records on request") {
    REQUIRE(!cli_path().empty());
    TempDir tmp;
    json cfg = fig2_config(2.0);
    cfg["adiabatic"] = true;
    cfg["sweep"] = {{"axes", json::array({{{"name", "J"}, {"min", 0.0}, {"max", 0.2},
                                           {"count", 3}}})}};
    write_file(tmp.file("cfg.json"), cfg.dump());
    const std::string out = tmp.file("sweep.json");
    CHECK(run(cli_path() + " sweep --config " + tmp.file("cfg.json") +
              " --format json --out " + out + " 2>/dev/null") == 0);
    const json j = json::parse(read_file(out));
    REQUIRE(j.at("records").size() == 3);
    CHECK(j.at("records")[0].contains("report"));
    CHECK(j.at("records")[0].at("persistence").at("P").get<double>() == 1.0);
    CHECK(j.at("records")[2].at("J").get<double>() == doctest::Approx(0.2));
}

TEST_CASE("run config: endpoint splittings honor the asymptotic switch") {
    json j = fig2_config(2.0);
    const auto cfg = cli::parse_run_config(j);
    const auto [w1a, w2a] = cfg.endpoint_splittings();
    CHECK(w1a == doctest::Approx(2.0 * std::sqrt(5.0)).epsilon(1e-15));
    CHECK(w2a == doctest::Approx(2.0).epsilon(1e-15));

    j["use_asymptotic_endpoints"] = false;
    const auto cfg2 = cli::parse_run_config(j);
    const auto [w1s, w2s] = cfg2.endpoint_splittings();
    // sampled endpoints carry the (tiny) tanh residue of the finite window;
    // at the u_f = 0 end the residue enters the splitting quadratically and
    // falls below double resolution
    CHECK(w1s != w1a);
    CHECK(w1s == doctest::Approx(w1a).epsilon(1e-6));
    CHECK(w2s == doctest::Approx(w2a).epsilon(1e-12));
}
