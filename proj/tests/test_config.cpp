#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lakevort/config.hpp"

#include <string>

using namespace lakevort;

namespace {

// Expect a ConfigError whose message contains every listed fragment.
template <typename Fn>
void expect_error(Fn&& fn, std::initializer_list<const char*> fragments) {
    try {
        fn();
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        for (const char* frag : fragments) {
            INFO("message: " << msg);
            CHECK(msg.find(frag) != std::string::npos);
        }
    }
}

RunConfig parse(const std::string& text) { return parse_config_text(text, "test.toml"); }

} // namespace

TEST_CASE("a minimal config materializes the documented defaults") {
    // Unit disc, unit depth, linear profile, single eps, unit circulation.
    RunConfig c = parse("[solver]\neps = 0.1\nkappa = 1.0\n");

    CHECK(c.experiment == ExperimentKind::steady);
    CHECK_FALSE(c.experiment_declared);
    CHECK(c.nx == 256);
    CHECK(c.shape.kind == ShapeKind::disc);
    CHECK(c.shape.center.x == 0.0);
    CHECK(c.shape.center.y == 0.0);
    CHECK(c.shape.radius == 1.0);
    CHECK(c.depth.kind == DepthKind::constant);
    CHECK(c.depth.a == 1.0);
    CHECK(c.profile.kind == ProfileKind::power);
    CHECK(c.profile.exponent == 1.0);
    REQUIRE(c.eps_schedule.size() == 1);
    CHECK(c.eps_schedule[0] == 0.1);
    CHECK(c.kappa == 1.0);
    CHECK(c.lambda == 0.0); // automatic cap
    CHECK(c.tol_fix == 1e-8);
    CHECK(c.tol_circ == 1e-10);
    CHECK(c.tol_pcg == 1e-10);
    CHECK(c.max_iter == 3000);
    CHECK(c.damping == 1.0);
    CHECK(c.regime == Regime::interior);
    CHECK(c.out_dir == "out");
    CHECK(c.seed == 1u);
    CHECK(c.depth_floor == -1.0);
    CHECK(c.stability.perturbation == PerturbationKind::none);

    // The empty config is equivalent: every key has a default.
    CHECK(parse("") == c);
}

TEST_CASE("an increasing eps schedule is rejected") {
    expect_error([] { parse("[solver]\neps_schedule = [0.1, 0.2]\n"); },
                 {"strictly decreasing", "eps_schedule", ":2:"});
    // Repeats are not strictly decreasing either.
    expect_error([] { parse("[solver]\neps_schedule = [0.1, 0.1]\n"); },
                 {"strictly decreasing"});
    expect_error([] { parse("[solver]\neps_schedule = []\n"); }, {"must not be empty"});
    expect_error([] { parse("[solver]\neps_schedule = [0.1, -0.05]\n"); },
                 {"entries must be positive"});
}

TEST_CASE("unknown keys are rejected with a nearest-name hint") {
    // Misspelled section-level concept: the hint points at the [depth] section.
    expect_error([] { parse("[domain]\ndept = 1.0\n"); },
                 {"unknown key 'dept'", "depth", "test.toml:2:"});
    // Misspelled key inside the right section.
    expect_error([] { parse("[solver]\nkapa = 2.0\n"); },
                 {"unknown key 'kapa'", "did you mean 'kappa'?"});
    // Misspelled section name.
    expect_error([] { parse("[solvr]\n"); },
                 {"unknown section 'solvr'", "did you mean '[solver]'?"});
    // A key that belongs to a different section.
    expect_error([] { parse("[solver]\nnx = 64\n"); }, {"unknown key 'nx'", "[domain]"});
}

TEST_CASE("keys outside any section are rejected") {
    expect_error([] { parse("eps = 0.1\n"); }, {"before any [section]"});
}

TEST_CASE("duplicate keys are rejected with the line of the repeat") {
    expect_error([] { parse("[solver]\neps = 0.1\neps = 0.2\n"); },
                 {"duplicate key 'eps'", ":3:"});
}

TEST_CASE("type mismatches name the key and line") {
    expect_error([] { parse("[solver]\neps = \"small\"\n"); }, {"'eps'", "number", ":2:"});
    expect_error([] { parse("[domain]\nnx = 3.5\n"); }, {"'nx'", "integer"});
    expect_error([] { parse("[domain]\ncenter = [1.0]\n"); }, {"'center'", "two"});
    expect_error([] { parse("[output]\nseed = -5\n"); }, {"'seed'", "nonnegative integer"});
    expect_error([] { parse("[output]\nseed = 1.5\n"); }, {"'seed'", "nonnegative integer"});
}

TEST_CASE("value validation names the offending key") {
    expect_error([] { parse("[solver]\nkappa = -1.0\n"); }, {"'kappa'", "positive"});
    expect_error([] { parse("[solver]\ndamping = 0.0\n"); }, {"'damping'", "(0, 1]"});
    expect_error([] { parse("[solver]\nregime = \"edge\"\n"); },
                 {"'regime'", "interior or boundary"});
    expect_error([] { parse("[domain]\nnx = 8\n"); }, {"'nx'", "at least 16"});
    expect_error([] { parse("[domain]\nshape = \"triangle\"\n"); },
                 {"'shape'", "disc, rectangle, ellipse"});
    expect_error(
        [] { parse("[domain]\nshape = \"rectangle\"\nlo = [1.0, 0.0]\nhi = [0.0, 1.0]\n"); },
        {"lo < hi"});
    expect_error([] { parse("[stability]\ncfl = 0.95\n"); }, {"'cfl'"});
    expect_error([] { parse("[stability]\nnoise_level = 1.5\n"); }, {"'noise_level'"});
    expect_error([] { parse("[stability]\nshift = [1.5, 0]\n"); }, {"integers"});
    expect_error([] { parse("[experiment]\nkind = \"sweeps\"\n"); }, {"'kind'"});
}

TEST_CASE("eps and eps_schedule are mutually exclusive") {
    expect_error([] { parse("[solver]\neps = 0.1\neps_schedule = [0.2, 0.1]\n"); },
                 {"mutually exclusive"});
}

TEST_CASE("keys irrelevant to the selected kind are rejected") {
    // radius belongs to disc, not rectangle.
    expect_error([] { parse("[domain]\nshape = \"rectangle\"\nradius = 2.0\n"); },
                 {"'radius'", "rectangle"});
    // shift belongs to shifted_power profiles only.
    expect_error([] { parse("[profile]\nkind = \"power\"\nshift = 0.5\n"); },
                 {"'shift'", "power"});
    // peak belongs to radial_bump depths only.
    expect_error([] { parse("[depth]\nkind = \"constant\"\npeak = 2.0\n"); }, {"'peak'"});
}

TEST_CASE("the cap accepts auto or a positive number") {
    CHECK(parse("[solver]\nlambda = \"auto\"\n").lambda == 0.0);
    CHECK(parse("[solver]\nlambda = 5.5\n").lambda == 5.5);
    expect_error([] { parse("[solver]\nlambda = \"none\"\n"); }, {"'lambda'", "auto"});
    expect_error([] { parse("[solver]\nlambda = -2.0\n"); }, {"'lambda'", "positive"});
    expect_error([] { parse("[solver]\nlambda = [1.0, 2.0]\n"); }, {"'lambda'"});
}

TEST_CASE("comments and quoted strings coexist") {
    RunConfig c = parse("# leading comment\n"
                        "[solver]  # section comment\n"
                        "eps = 0.25  # inline comment\n"
                        "[output]\n"
                        "dir = \"runs#7\"\n");
    CHECK(c.eps_schedule[0] == 0.25);
    CHECK(c.out_dir == "runs#7"); // '#' inside quotes is not a comment
}

TEST_CASE("the splus alias is a linear power profile") {
    RunConfig a = parse("[profile]\nkind = \"splus\"\n");
    CHECK(a.profile.kind == ProfileKind::power);
    CHECK(a.profile.exponent == 1.0);
    RunConfig b = parse("[profile]\nkind = \"power\"\nexponent = 1.0\n");
    CHECK(a.profile == b.profile);
}

TEST_CASE("the seed accepts the full 64-bit range exactly") {
    RunConfig c = parse("[output]\nseed = 18446744073709551615\n");
    CHECK(c.seed == 18446744073709551615ULL);
    RunConfig back = parse(config_echo(c));
    CHECK(back.seed == c.seed);
}

TEST_CASE("echoed configs re-parse to an equal value") {
    const char* samples[] = {
        // Defaults only.
        "",
        // Disc steady with explicit solver knobs.
        "[experiment]\nkind = \"steady\"\n[domain]\nnx = 64\n[depth]\nkind = \"radial_bump\"\n"
        "peak = 2.0\ncoeff = 1.0\n[solver]\neps = 0.2\nkappa = 1.5\nlambda = 4.0\n"
        "damping = 0.7\n",
        // Sweep on an ellipse with an affine depth and a schedule.
        "[experiment]\nkind = \"sweep\"\n[domain]\nshape = \"ellipse\"\nsemi = [1.5, 0.8]\n"
        "center = [0.1, -0.2]\nnx = 48\n[depth]\nkind = \"affine\"\nbase = 1.0\n"
        "slope = [1.0, 0.0]\n[solver]\neps_schedule = [0.4, 0.3, 0.2]\nregime = \"boundary\"\n"
        "[profile]\nkind = \"shifted_power\"\nexponent = 1.5\nshift = 0.25\n",
        // Stability run on a rectangle with every stability knob set.
        "[experiment]\nkind = \"stability\"\n[domain]\nshape = \"rectangle\"\n"
        "lo = [-2.0, -1.0]\nhi = [2.0, 1.0]\nnx = 40\n[depth]\nkind = \"product_distance\"\n"
        "scale = 0.5\npower = 2.0\n[solver]\neps = 0.35\n[stability]\n"
        "perturbation = \"shift\"\nshift = [2, -1]\ndelta = 0.05\nturnovers = 3.0\n"
        "cfl = 0.6\nrecord_every = 4\np_list = [1.0, 2.0, 4.0]\n[output]\n"
        "dir = \"elsewhere\"\nseed = 99\n",
        // Tabulated profile: the path is carried, not opened, at parse time.
        "[profile]\nkind = \"tabulated\"\ntable = \"knots.csv\"\n",
    };
    for (const char* text : samples) {
        CAPTURE(text);
        RunConfig c = parse(text);
        std::string echo = config_echo(c);
        RunConfig back = parse_config_text(echo, "echo");
        CHECK(back == c);
        // The echo is canonical: echoing the re-parse reproduces it verbatim.
        CHECK(config_echo(back) == echo);
    }
}

TEST_CASE("declared experiment kinds parse and echo") {
    CHECK(parse("[experiment]\nkind = \"sweep\"\n").experiment == ExperimentKind::sweep);
    CHECK(parse("[experiment]\nkind = \"greens-check\"\n").experiment ==
          ExperimentKind::greens_check);
    CHECK(parse("[experiment]\nkind = \"profile-check\"\n").experiment ==
          ExperimentKind::profile_check);
    CHECK(parse("[experiment]\nkind = \"stability\"\n").experiment == ExperimentKind::stability);
    CHECK(parse("[experiment]\nkind = \"sweep\"\n").experiment_declared);
    CHECK(std::string(experiment_name(ExperimentKind::greens_check)) == "greens-check");
}

TEST_CASE("equality ignores whether the experiment was declared") {
    RunConfig a = parse("[experiment]\nkind = \"steady\"\n");
    RunConfig b = parse("");
    CHECK(a.experiment_declared);
    CHECK_FALSE(b.experiment_declared);
    CHECK(a == b);
    RunConfig c = parse("[solver]\nkappa = 2.0\n");
    CHECK(a != c);
}

TEST_CASE("the embedded config block extracts from surrounding text") {
    RunConfig c = parse("[domain]\nnx = 32\n[solver]\neps = 0.3\n");
    std::string manifest = "status ok\nwall_time 1.0\n--- config ---\n" + config_echo(c) +
                           "--- end config ---\nfiles none\n";
    std::string block = extract_config_echo(manifest);
    CHECK(parse_config_text(block, "embedded") == c);
    CHECK_THROWS_AS(extract_config_echo("no markers here"), std::runtime_error);
}

TEST_CASE("malformed lines report their location") {
    expect_error([] { parse("[solver\n"); }, {"unterminated section", ":1:"});
    expect_error([] { parse("[solver]\neps 0.1\n"); }, {":2:"});
    expect_error([] { parse("[solver]\neps = [0.1, 0.2\n"); }, {":2:"});
    expect_error([] { parse("[solver]\neps = \"unclosed\n"); }, {":2:"});
}
