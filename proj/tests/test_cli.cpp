#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "degenlog/cli.hpp"
#include "degenlog/errors.hpp"

using namespace degenlog;
namespace fs = std::filesystem;

namespace {

Scenario parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in, "test.ini");
}

std::string error_of(const std::string& text) {
  try {
    parse_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("degenlog_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("shape expressions") {
  CHECK(parse_shape("ball(0.5,0.25;0.1)") == SetShape{Ball{point(0.5, 0.25), 0.1}});
  CHECK(parse_shape(" point( 0.3 , 0.7 ) ") == SetShape{PointSet{point(0.3, 0.7)}});
  CHECK(parse_shape("empty") == SetShape{EmptySet{}});
  CHECK(parse_shape("ball(0.4;0.1)") == SetShape{Ball{point(0.4, 0.0), 0.1}});
  const SetShape u = parse_shape("union(ball(0.3,0.5;0.1), sector(0.5,0.5;0.2;0;1.5707963267948966), point(1,2))");
  REQUIRE(u.get_if<Union>());
  CHECK(u.get_if<Union>()->parts.size() == 3);
  CHECK(parse_shape(format_shape(u)) == u);

  CHECK_THROWS_AS(parse_shape("ball(0.5,0.5)"), ConfigError);
  CHECK_THROWS_AS(parse_shape("blob(1)"), ConfigError);
  CHECK_THROWS_AS(parse_shape("ball(0,0;1) extra"), ConfigError);
}

TEST_CASE("domain expressions") {
  for (const std::string text : {"rect(0,0;1,2)", "disc(0,0;1)", "interval(-1;1)"})
    CHECK(format_domain(parse_domain(text)) == text);
}

TEST_CASE("numbers format to the shortest round-tripping form") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1e-10) == "1e-10");
  const double x = 2.0 * 3.14159265358979323846 * 3.14159265358979323846 / 3.0;
  CHECK(std::strtod(format_number(x).c_str(), nullptr) == x);
}

TEST_CASE("minimal file takes the documented defaults") {
  const Scenario s = parse_text("[equation]\nlambda = 5\n[initial]\nkind = constant\n");
  CHECK(s.params.lambda == 5.0);
  CHECK(s.params.rho == 2.0);
  CHECK(s.resolution == 32);
  CHECK(s.scheme.dt == 0.0);
  CHECK(s.scheme.solve_tol == 1e-10);
  CHECK(s.scheme.growth_cap == 0.0);
  CHECK(s.t0 == 0.0);
  CHECK(s.t_end == 1.0);
  CHECK(s.outputs.sample_every == 1);
  CHECK(resolved(s).scheme.dt == doctest::Approx(1e-3 / (2.0 * 9.869604401089358)));
}

TEST_CASE("semantic errors name the invariant") {
  const std::string msg = error_of("[equation]\nrho = 0.5\n");
  CHECK(msg.find("rho > 1") != std::string::npos);
  CHECK(msg.find("test.ini") != std::string::npos);
  CHECK(error_of("[time]\nt0 = 2\nt_end = 1\n").find("t_end >= t0") != std::string::npos);
  CHECK(error_of("[kset]\nkind = static\nshape = ball(0.95,0.5;0.2)\n").find("inside the domain") !=
        std::string::npos);
}

TEST_CASE("syntax errors carry the line number") {
  CHECK(error_of("[equation]\nlambda = 5\n\nsigma = 2\n").find("test.ini:4: unknown key 'sigma'") !=
        std::string::npos);
  CHECK(error_of("[equation]\nlambda = five\n").find("test.ini:2") != std::string::npos);
  CHECK(error_of("label = x\n[physics]\n").find("test.ini:2: unknown section") != std::string::npos);
  CHECK(error_of("[time]\nt_end 3\n").find("test.ini:2") != std::string::npos);
  CHECK(error_of("[time]\nt_end = 3\nt_end = 4\n").find("test.ini:3: duplicate") != std::string::npos);
  CHECK(error_of("[kset]\nkind = wobbling\n").find("test.ini:2") != std::string::npos);
  // A key valid for one kind is unknown for another.
  CHECK(error_of("[kset]\nkind = static\nomega = 3\n").find("test.ini:3: unknown key 'omega'") !=
        std::string::npos);
}

TEST_CASE("canonical form round-trips every registry scenario") {
  for (const std::string& label : registry_labels()) {
    CAPTURE(label);
    const Scenario s = registry_entry(label).scenario;
    const std::string text = emit_scenario(s);
    const Scenario back = parse_text(text);
    CHECK(back == s);
    CHECK(emit_scenario(back) == text);
  }
}

TEST_CASE("round-trip of the other variants") {
  Scenario s;
  s.label = "variants";
  s.domain = DomainSpec{Disc{point(0, 0), 1.0}};
  s.params.nu = NuProfile{Indicator{2.5}, 0.7};
  s.params.moving_set = Translating{SetShape{Ball{point(0, 0), 0.1}},
                                    PathSchedule{PathKind::segment, point(-0.3, 0), point(0.3, 0.1), 0, 0, 0, 4.0},
                                    AngleSchedule{0.1, 0.2}};
  s.initial.kind = BumpInit{point(0.1, -0.2), 0.3, 2.0};
  s.outputs = {5, 0.25};
  CHECK(parse_text(emit_scenario(s)) == s);

  s.params.moving_set = RotatingSector{point(0, 0), 0.5, 0.0, 1.0, 3.0};
  s.initial.kind = EigenInit{SetShape{Ball{point(0, 0), 0.5}}, 2.0};
  CHECK(parse_text(emit_scenario(s)) == s);

  s.initial.kind = CustomInit{Eigen::VectorXd::Ones(4)};
  CHECK_THROWS_AS(emit_scenario(s), ConfigError);
}

TEST_CASE("overrides") {
  const Scenario base = registry_entry("trichotomy-low").scenario;
  const Scenario s = apply_overrides(base, {"equation.lambda=7.5", "time.t_end=0.5", "label=custom"});
  CHECK(s.params.lambda == 7.5);
  CHECK(s.t_end == 0.5);
  CHECK(s.label == "custom");
  CHECK(s.params.moving_set == base.params.moving_set);

  // Switching the kind drops the keys of the old one.
  const Scenario j = apply_overrides(base, {"kset.kind=jumping", "kset.k0=ball(0.3,0.5;0.1)", "kset.k1=empty"});
  REQUIRE(j.params.moving_set.get_if<Jumping>());
  CHECK(j.params.moving_set.get_if<Jumping>()->k1 == SetShape{EmptySet{}});

  CHECK_THROWS_AS(apply_overrides(base, {"equation.sigma=1"}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(base, {"physics.lambda=1"}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(base, {"equation.lambda"}), ConfigError);
}

TEST_CASE("load_scenario resolves labels and files") {
  CHECK(load_scenario("intermittent").label == "intermittent");
  const fs::path dir = scratch_dir("load");
  const fs::path file = dir / "s.ini";
  std::ofstream(file) << emit_scenario(registry_entry("shrink-case1").scenario);
  CHECK(load_scenario(file.string()) == registry_entry("shrink-case1").scenario);
  CHECK_THROWS_AS(load_scenario((dir / "missing.ini").string()), ConfigError);
}

TEST_CASE("trajectory CSV") {
  Trajectory one;
  one.times = {0.0};
  one.sup_norms = {1.0};
  one.l2_norms = {0.5};
  one.masses = {0.25};
  std::ostringstream os;
  write_trajectory_csv(one, os);
  CHECK(os.str() == "t,sup_norm,l2_norm,mass,cap_hit\n0,1,0.5,0.25,\n");

  Scenario s = registry_entry("trichotomy-high").scenario;
  const Trajectory tr = run(s);
  REQUIRE(tr.cap_hit);
  std::ostringstream full;
  write_trajectory_csv(tr, full);
  std::istringstream in(full.str());
  const Trajectory back = read_trajectory_csv(in);
  CHECK(back.times == tr.times);
  CHECK(back.sup_norms == tr.sup_norms);
  CHECK(back.l2_norms == tr.l2_norms);
  CHECK(back.masses == tr.masses);
  CHECK(back.cap_hit == tr.cap_hit);

  // cap_hit is empty before the cap and "1" from it on.
  std::istringstream lines(full.str());
  std::string line, last;
  int flagged = 0;
  while (std::getline(lines, line)) {
    if (line.back() == '1' && line[line.size() - 2] == ',') ++flagged;
    last = line;
  }
  CHECK(flagged == 1);
  CHECK(last.substr(last.size() - 2) == ",1");

  std::ostringstream again;
  write_trajectory_csv(run(s), again);
  CHECK(again.str() == full.str());
}

TEST_CASE("PGM snapshots") {
  Scenario s = registry_entry("trichotomy-mid").scenario;
  s.t_end = 0.1;
  s.resolution = 16;
  s.outputs.snapshot_every = 0.05;
  const Trajectory tr = run(s);
  const fs::path dir = scratch_dir("pgm");
  const auto paths = write_snapshots(tr, (dir / "snap").string());
  REQUIRE(paths.size() == tr.snapshots.size());
  REQUIRE(paths.size() == 3);
  std::ifstream f(paths.back(), std::ios::binary);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  f >> magic >> w >> h >> maxval;
  CHECK(magic == "P5");
  CHECK(w == 17);
  CHECK(h == 17);
  CHECK(maxval == 255);
  CHECK(fs::exists(paths.back() + ".scale"));
  CHECK(fs::file_size(paths.back()) == std::string("P5\n17 17\n255\n").size() + 17 * 17);
}

TEST_CASE("job count") {
  unsetenv("DEGENLOG_JOBS");
  CHECK(resolve_jobs(3) == 3);
  CHECK(resolve_jobs(0) == 1);
  setenv("DEGENLOG_JOBS", "2", 1);
  CHECK(resolve_jobs(5) == 2);
  setenv("DEGENLOG_JOBS", "two", 1);
  CHECK_THROWS_AS(resolve_jobs(1), ConfigError);
  unsetenv("DEGENLOG_JOBS");
}

TEST_CASE("property suite exit status") {
  const SuiteReport ok = run_suite("properties");
  CHECK(ok.exit_code == 0);
  CHECK(ok.text.find("FAIL") == std::string::npos);
  CHECK(ok.csv.rfind("suite,name,status", 0) == 0);

  SuiteOptions faulty;
  faulty.inject_fault = true;
  faulty.jobs = 2;
  const SuiteReport bad = run_suite("properties", faulty);
  CHECK(bad.exit_code != 0);
  CHECK(bad.csv.find("comparison in n (n1 >= n2 => u1 <= u2),FAIL") != std::string::npos);

  CHECK_THROWS_AS(run_suite("everything"), ConfigError);
}
