#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "shinf/io.hpp"

using namespace shinf;

TEST_CASE("system document round trip") {
    const DdaeSystem s = fx::neutral1(0.99, 2.0);
    const json j = system_to_json(s);
    const DdaeSystem t = system_from_json(json::parse(j.dump()));
    CHECK(t.E() == s.E());
    CHECK(t.B() == s.B());
    CHECK(t.C() == s.C());
    CHECK(t.delays().values() == s.delays().values());
    for (std::size_t i = 0; i < s.A().size(); ++i) CHECK(t.A(i) == s.A(i));
}

TEST_CASE("malformed documents") {
    CHECK_THROWS_AS(system_from_json(json::parse(R"({"E": [[1]], "A": [[[1]]], "B": [[1]]})")), InputError);
    CHECK_THROWS_AS(system_from_json(json::parse(R"({"n": 2, "E": [[1]], "A": [[[1]]], "B": [[1]], "C": [[1]]})")),
                    InputError);
    CHECK_THROWS_AS(matrix_from_json(json::parse("[[1, 2], [3]]"), "M"), InputError);
    CHECK_THROWS_AS(matrix_from_json(json::parse(R"([["a"]])"), "M"), InputError);
    CHECK_THROWS_AS(system_from_json(json::parse(R"({"E": [[1]], "A": [[[1]]], "B": [[1]], "C": [[1]], "delays": [1]})")),
                    DimensionError);
    CHECK_THROWS_AS(read_json_file("/nonexistent/file.json"), InputError);
}

TEST_CASE("shipped fixtures") {
    const DdaeSystem s = system_from_json(read_json_file(SHINF_DATA_DIR "/neutral1_tau1.0.json"));
    CHECK(s.n() == 2);
    CHECK(s.num_delays() == 2);

    const InterconnectionSpec spec = interconnection_from_json(read_json_file(SHINF_DATA_DIR "/bench_h0.5.json"));
    CHECK(spec.controller.num_params() == 2);
    REQUIRE(spec.initial.size() == 1);
    const DdaeSystem cl = interconnect(spec.plant, spec.controller, spec.initial[0]);
    const DdaeSystem ref = fx::bench_loop(0.5, fx::gain(-3.5878, 1.5017));
    for (std::size_t i = 0; i < cl.A().size(); ++i) CHECK(cl.A(i) == ref.A(i));
}

TEST_CASE("controller options") {
    json j = read_json_file(SHINF_DATA_DIR "/bench_h0.5.json");
    j["controller"]["controller_delays"] = {0.2};
    j["controller"]["mask"]["Dc"] = {{true, false}};
    j["controller"]["fixed_values"]["Dc"] = {{0.0, 1.25}};
    j.erase("initial");
    const InterconnectionSpec spec = interconnection_from_json(j);
    CHECK(spec.controller.num_params() == 1);
    CHECK(spec.controller.input_delay() == 0.2);
    Vector p(1);
    p << -2.0;
    CHECK(spec.controller.unpack(p).Dc(0, 1) == 1.25);

    j["controller"]["controller_delays"] = {0.2, 0.3};
    CHECK_THROWS_AS(interconnection_from_json(j), InputError);
}

TEST_CASE("certificate document") {
    const NormCertificate c = strong_hinf(fx::neutral1());
    const json j = json::parse(certificate_to_json(c).dump());
    CHECK(j.at("branch") == "frequency");
    CHECK(j.at("value").get<double>() == c.value);
    CHECK(j.at("theta_hat").is_null());
    CHECK(j.at("N") == 20);
    for (const char* k : {"omega_hat", "iterations", "tol"}) CHECK(j.contains(k));
}

TEST_CASE("sweep table") {
    std::ostringstream os;
    SweepRow a{0.5, Vector::Constant(2, 1.0)}, b{1.0, Vector::Constant(1, 0.25)};
    write_sweep_csv(os, {a, b});
    CHECK(os.str() == "omega,sigma1,sigma2\n0.5,1,1\n1,0.25,\n");
    std::ostringstream one;
    write_sweep_csv(one, {b});
    CHECK(one.str().rfind("omega,sigma1\n", 0) == 0);
}
