#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ringpol/fitting.hpp"
#include "ringpol/io.hpp"

using namespace ringpol;

namespace {

bool same_double(double a, double b) {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

EvolutionResult sample_series(int n_max = 6) {
    return evolve({Layout::ZCompensated, {}}, PhaseDistribution{-0.2182, 0.0839},
                  QuadratureMethod{64}, Vec3{1.0, 0.0, 0.0}, n_max);
}

}  // namespace

TEST_CASE("number formatting round-trips exactly", "[io]") {
    SECTION("hand-picked values") {
        for (double v : {0.0, -0.0, 1.0, -1.0, 0.1, 1.0 / 3.0, kPi, 6.02214076e23, 1e-300,
                         -0.2182, 0.0839, 123456789.123456789}) {
            CAPTURE(v);
            CHECK(same_double(parse_double(format_double(v)), v));
        }
        CHECK(format_double(1.0) == "1");
        CHECK(format_double(0.5) == "0.5");
        CHECK(format_double(-0.0) == "-0");
    }

    SECTION("random bit patterns") {
        std::mt19937_64 rng(20240823);
        int checked = 0;
        while (checked < 1000) {
            double v = std::bit_cast<double>(rng());
            if (!std::isfinite(v)) continue;
            CHECK(same_double(parse_double(format_double(v)), v));
            ++checked;
        }
    }

    SECTION("rejects what is not exactly one number") {
        CHECK_THROWS_AS(parse_double(""), std::invalid_argument);
        CHECK_THROWS_AS(parse_double("abc"), std::invalid_argument);
        CHECK_THROWS_AS(parse_double("1.2.3"), std::invalid_argument);
        CHECK_THROWS_AS(parse_double("1 "), std::invalid_argument);
        CHECK_THROWS_AS(parse_double(" 1"), std::invalid_argument);
        CHECK(parse_int("42") == 42);
        CHECK(parse_int("-7") == -7);
        CHECK_THROWS_AS(parse_int("4.2"), std::invalid_argument);
        CHECK_THROWS_AS(parse_int(""), std::invalid_argument);
        CHECK_THROWS_AS(parse_int("0x10"), std::invalid_argument);
    }
}

TEST_CASE("fnv1a64 matches the published test vectors", "[io]") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
    CHECK(fnv1a64_hex("") == "cbf29ce484222325");
    CHECK(fnv1a64_hex("foobar") == "85944171f73967e8");
    CHECK(fnv1a64_hex("a").size() == 16);
    CHECK(fnv1a64("ab") != fnv1a64("ba"));
}

TEST_CASE("decay series CSV", "[io]") {
    EvolutionResult ev = sample_series();

    SECTION("round trip preserves every record bit for bit") {
        ParsedDecaySeries back = parse_decay_csv(decay_csv(ev));
        REQUIRE(back.records.size() == ev.records.size());
        for (std::size_t i = 0; i < back.records.size(); ++i) {
            CHECK(back.records[i].n == ev.records[i].n);
            CHECK(same_double(back.records[i].purity, ev.records[i].purity));
            CHECK(same_double(back.records[i].fidelity, ev.records[i].fidelity));
            CHECK(same_double(back.records[i].bloch.x, ev.records[i].bloch.x));
            CHECK(same_double(back.records[i].bloch.y, ev.records[i].bloch.y));
            CHECK(same_double(back.records[i].bloch.z, ev.records[i].bloch.z));
        }
        CHECK(back.method == "quad");
        CHECK(back.layout == "zcomp");
        CHECK(back.theta == 0.0);
        CHECK(same_double(back.sigma_phi, 0.0839));
        CHECK(same_double(back.phi0, -0.2182));
    }

    SECTION("optional wall-clock column") {
        std::string text = decay_csv(ev, true);
        auto lines = detail::csv_lines(text);
        CHECK(lines[0] == "n,purity,fidelity,px,py,pz,method,layout,theta,sigma_phi,phi0,t_ns");
        auto first = detail::split_csv_line(lines[1]);
        REQUIRE(first.size() == 12);
        CHECK(same_double(parse_double(first[11]), 6.80));  // one trip at the default interval
        auto last = detail::split_csv_line(lines.back());
        CHECK(same_double(parse_double(last[11]), 6 * 6.80));
        // the parser ignores trailing extra columns
        ParsedDecaySeries back = parse_decay_csv(text);
        CHECK(back.records.size() == ev.records.size());
    }

    SECTION("carriage returns are tolerated") {
        std::string text = decay_csv(ev);
        std::string crlf;
        for (char c : text) {
            if (c == '\n') crlf += '\r';
            crlf += c;
        }
        ParsedDecaySeries back = parse_decay_csv(crlf);
        CHECK(back.records.size() == ev.records.size());
    }

    SECTION("malformed input is rejected") {
        CHECK_THROWS_AS(parse_decay_csv(""), std::invalid_argument);
        CHECK_THROWS_AS(parse_decay_csv("n,purity\n1,0.5\n"), std::invalid_argument);
        CHECK_THROWS_AS(parse_decay_csv("a,b,c,d,e,f,g,h,i,j,k\n"), std::invalid_argument);
        CHECK_THROWS_AS(parse_decay_csv("n,purity,fidelity,px,py,pz,method,layout,theta,sigma_phi,"
                                        "phi0\n1,0.9\n"),
                        std::invalid_argument);
    }

    SECTION("JSON rendering carries the same content") {
        nlohmann::json j = nlohmann::json::parse(decay_json(ev, true));
        CHECK(j["method"] == "quad");
        CHECK(j["layout"] == "zcomp");
        CHECK(j["records"].size() == ev.records.size());
        CHECK(same_double(j["records"][0]["px"].get<double>(), ev.records[0].bloch.x));
        CHECK(same_double(j["records"][2]["t_ns"].get<double>(), 3 * 6.80));
    }
}

TEST_CASE("count table CSV", "[io]") {
    std::vector<CountRecord> rows{{1, {512.25, 12.0, 300.0, 224.25, 270.0, 254.5}},
                                  {2, {480.0, 44.0, 310.0, 214.0, 260.0, 264.0}}};

    SECTION("round trip") {
        std::vector<CountRecord> back = parse_counts_csv(counts_csv(rows));
        REQUIRE(back.size() == rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            CHECK(back[i].n_trip == rows[i].n_trip);
            for (int k = 0; k < 6; ++k)
                CHECK(same_double(back[i].counts[std::size_t(k)], rows[i].counts[std::size_t(k)]));
        }
    }

    SECTION("header and row shape are enforced") {
        CHECK(counts_csv(rows).rfind("n_trip,H,V,D,A,R,L\n", 0) == 0);
        CHECK_THROWS_AS(parse_counts_csv(""), std::invalid_argument);
        CHECK_THROWS_AS(parse_counts_csv("n,H,V,D,A,R,L\n"), std::invalid_argument);
        CHECK_THROWS_AS(parse_counts_csv("n_trip,H,V,D,A,R,L\n1,2,3\n"), std::invalid_argument);
    }
}

TEST_CASE("closed-form prediction table", "[io]") {
    CavityConfig cfg{Layout::GenericBB, NoiseDelay{0.8}};
    ExpansionCoeffs c = expansion_coeffs(cfg, -0.2182);
    std::vector<AnalyticRecord> rows;
    for (int n = 1; n <= 4; ++n) rows.push_back(analytic_step(c, 0.0839, n));
    const Vec3 input{0.0, 1.0, 0.0};

    SECTION("CSV layout and spot values") {
        std::string text = analytic_csv(rows, input);
        auto lines = detail::csv_lines(text);
        REQUIRE(lines.size() == 5);
        CHECK(lines[0] == "n,D_n,gamma_n,purity,fidelity,v11,v12,v13,v21,v22,v23,v31,v32,v33");
        auto row = detail::split_csv_line(lines[2]);
        REQUIRE(row.size() == 14);
        CHECK(parse_int(row[0]) == 2);
        CHECK(same_double(parse_double(row[1]), rows[1].d));
        CHECK(same_double(parse_double(row[2]), rows[1].gamma));
        Vec3 p = rows[1].v.apply(input);
        CHECK(same_double(parse_double(row[3]), 0.5 * (1.0 + p.dot(p))));
        CHECK(same_double(parse_double(row[5]), rows[1].v.m[0][0]));
        CHECK(same_double(parse_double(row[13]), rows[1].v.m[2][2]));
    }

    SECTION("JSON mirror") {
        nlohmann::json j = nlohmann::json::parse(analytic_json(rows, input));
        REQUIRE(j["records"].size() == 4);
        CHECK(j["records"][1]["n"] == 2);
        CHECK(same_double(j["records"][1]["D_n"].get<double>(), rows[1].d));
        CHECK(j["records"][1]["v"].size() == 9);
        CHECK(same_double(j["records"][1]["v"][8].get<double>(), rows[1].v.m[2][2]));
    }
}

TEST_CASE("reconstruction table CSV", "[io]") {
    std::vector<ReconRecord> rows{{1, {0.9, 0.01, -0.02}, 0.905}, {2, {0.7, 0.02, -0.01}, 0.745}};
    std::string text = recon_csv(rows, "mle");
    auto lines = detail::csv_lines(text);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "n_trip,px,py,pz,purity,method");
    auto row = detail::split_csv_line(lines[1]);
    REQUIRE(row.size() == 6);
    CHECK(parse_int(row[0]) == 1);
    CHECK(same_double(parse_double(row[1]), 0.9));
    CHECK(row[5] == "mle");

    nlohmann::json j = nlohmann::json::parse(recon_json(rows, "mle"));
    CHECK(j["method"] == "mle");
    CHECK(j["records"].size() == 2);
    CHECK(same_double(j["records"][1]["pz"].get<double>(), -0.01));
}

TEST_CASE("spectral table CSV", "[io]") {
    SpectralAmplitudes amps;
    amps.omega = {-1.0, 0.0, 1.0};
    amps.alpha_h = {{0.5, -0.25}, {1.0, 0.0}, {0.5, 0.25}};
    amps.alpha_v = {{0.1, 0.2}, {0.0, -1.0}, {-0.1, 0.2}};

    SECTION("round trip") {
        SpectralAmplitudes back = parse_spectral_csv(spectral_csv(amps));
        REQUIRE(back.omega.size() == 3);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(same_double(back.omega[i], amps.omega[i]));
            CHECK(same_double(back.alpha_h[i].real(), amps.alpha_h[i].real()));
            CHECK(same_double(back.alpha_h[i].imag(), amps.alpha_h[i].imag()));
            CHECK(same_double(back.alpha_v[i].real(), amps.alpha_v[i].real()));
            CHECK(same_double(back.alpha_v[i].imag(), amps.alpha_v[i].imag()));
        }
    }

    SECTION("malformed input is rejected") {
        CHECK_THROWS_AS(parse_spectral_csv(""), std::invalid_argument);
        CHECK_THROWS_AS(parse_spectral_csv("omega,re_h\n"), std::invalid_argument);
        CHECK_THROWS_AS(parse_spectral_csv("omega,re_h,im_h,re_v,im_v\n1,2,3\n"),
                        std::invalid_argument);
    }
}

TEST_CASE("KEY=VALUE run configuration", "[io]") {
    SECTION("parsing, comments, and whitespace") {
        ConfigMap cfg = ConfigMap::parse(
            "layout=zcomp\n"
            "  sigma_phi = 0.0839  # width\n"
            "# a full-line comment\n"
            "\n"
            "n_max=40\r\n"
            "emit_time=yes\n");
        CHECK(cfg.kv.size() == 4);
        CHECK(cfg.require("layout") == "zcomp");
        CHECK(cfg.get_double("sigma_phi", 0.0) == 0.0839);
        CHECK(cfg.get_int("n_max", 0) == 40);
        CHECK(cfg.get_bool("emit_time", false));
        CHECK(cfg.has("layout"));
        CHECK(!cfg.has("seed"));
        CHECK(cfg.get("seed", "1") == "1");
        CHECK(cfg.get_double("phi0", -0.5) == -0.5);
    }

    SECTION("booleans accept the usual spellings") {
        ConfigMap cfg = ConfigMap::parse("a=true\nb=1\nc=no\nd=false\ne=maybe\n");
        CHECK(cfg.get_bool("a", false));
        CHECK(cfg.get_bool("b", false));
        CHECK(!cfg.get_bool("c", true));
        CHECK(!cfg.get_bool("d", true));
        CHECK_THROWS_AS(cfg.get_bool("e", true), std::invalid_argument);
    }

    SECTION("mistakes are loud") {
        CHECK_THROWS_AS(ConfigMap::parse("layout zcomp\n"), std::invalid_argument);
        CHECK_THROWS_AS(ConfigMap::parse("=zcomp\n"), std::invalid_argument);
        CHECK_THROWS_AS(ConfigMap::parse("a=1\na=2\n"), std::invalid_argument);
        ConfigMap cfg = ConfigMap::parse("layout=bare\ntypo_key=3\n");
        CHECK_THROWS_AS(cfg.require("absent"), std::invalid_argument);
        CHECK_THROWS_AS(cfg.ensure_known({"layout", "sigma_phi"}), std::invalid_argument);
        ConfigMap ok = ConfigMap::parse("layout=bare\n");
        ok.ensure_known({"layout", "sigma_phi"});  // must not throw
    }

    SECTION("empty and comment-only inputs are valid") {
        CHECK(ConfigMap::parse("").kv.empty());
        CHECK(ConfigMap::parse("# nothing here\n\n").kv.empty());
    }
}

TEST_CASE("run manifest JSON", "[io]") {
    RunManifest m;
    m.command = "simulate";
    m.figure = "fig4-zcomp";
    m.config = {{"layout", "zcomp"}, {"sigma_phi", "0.0839"}};
    m.seed = 123456789ull;
    m.wall_ms = 41.625;
    m.outputs = {{"fig4-zcomp.csv", 1024, "cbf29ce484222325"},
                 {"fig4-zcomp-recon.csv", 77, "85944171f73967e8"}};

    std::string text = manifest_to_json(m);
    CHECK(text.find("\"tool\": \"ringpol\"") != std::string::npos);
    CHECK(text.find(kVersion) != std::string::npos);
    CHECK(text.back() == '\n');

    RunManifest back = manifest_from_json(text);
    CHECK(back.command == m.command);
    CHECK(back.figure == m.figure);
    CHECK(back.config == m.config);
    CHECK(back.seed == m.seed);
    CHECK(same_double(back.wall_ms, m.wall_ms));
    REQUIRE(back.outputs.size() == 2);
    CHECK(back.outputs[0].path == "fig4-zcomp.csv");
    CHECK(back.outputs[0].bytes == 1024);
    CHECK(back.outputs[0].fnv1a64 == "cbf29ce484222325");
    CHECK(back.outputs[1].fnv1a64 == m.outputs[1].fnv1a64);

    SECTION("absent optional fields default quietly") {
        RunManifest bare = manifest_from_json("{\"command\":\"fit\"}");
        CHECK(bare.command == "fit");
        CHECK(bare.figure.empty());
        CHECK(bare.outputs.empty());
        CHECK(bare.seed == 0);
    }
}

TEST_CASE("whole-file helpers", "[io]") {
    const std::string path = "/tmp/ringpol-io-test.bin";
    const std::string payload = "line one\nline two\r\nbinary \x01\x02 tail";
    write_file(path, payload);
    CHECK(read_file(path) == payload);
    write_file(path, "shorter");  // truncates, not appends
    CHECK(read_file(path) == "shorter");
    CHECK_THROWS_AS(read_file("/tmp/ringpol-io-test-does-not-exist"), std::runtime_error);
    CHECK_THROWS_AS(write_file("/tmp/no-such-dir-ringpol/x", "y"), std::runtime_error);
}
