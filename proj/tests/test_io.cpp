#include <doctest.h>

#include <sstream>

#include "cmlax/dynamics.hpp"
#include "cmlax/io.hpp"
#include "cmlax/sampling.hpp"
#include "test_helpers.hpp"

using namespace cmlax;
using cmlax::testing::make_state;
using cmlax::testing::test_state;

TEST_SUITE_BEGIN("io");

TEST_CASE("phase state round trip and schema") {
  const PhaseState s = test_state();
  const nlohmann::json j = state_to_json(s);
  CHECK(j["n"] == 2);
  CHECK(j["coupling"] == "imaginary");
  CHECK(j["x"][0] == 1.0);
  CHECK(j["x"][1] == -1.0);
  const PhaseState back = state_from_json(j);
  CHECK(back.n == s.n);
  CHECK(back.coupling == s.coupling);
  CHECK((back.x - s.x).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.p - s.p).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("json round trips preserve doubles bit-exactly") {
  std::mt19937_64 rng(191);
  for (int rep = 0; rep < 10; ++rep) {
    const PhaseState s = random_state(4, Coupling::Imaginary, rng);
    const std::string text = state_to_json(s).dump();
    const PhaseState back = state_from_json(nlohmann::json::parse(text));
    CHECK((back.x - s.x).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.p - s.p).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("malformed states are rejected") {
  CHECK_THROWS_AS(state_from_json(nlohmann::json{{"n", 2}}), CmError);
  CHECK_THROWS_AS(
      state_from_json(nlohmann::json{{"n", 2},
                                     {"coupling", "quaternionic"},
                                     {"x", {1.0, -1.0}},
                                     {"p", {0.0, 0.0}}}),
      CmError);
}

TEST_CASE("spectral coordinates serialize complex entries as [re, im]") {
  const SpectralCoords c = spectral_coords(build_lax(test_state()));
  const nlohmann::json j = coords_to_json(c);
  CHECK(j["lambda"][0][0].get<double>() == doctest::Approx(-0.5));
  CHECK(j["lambda"][0][1].get<double>() == doctest::Approx(0.0));
  CHECK(j["mu_tilde"][0][1].get<double>() == doctest::Approx(-1.0));
  CHECK(j["degenerate"] == false);
  const SpectralCoords back = coords_from_json(j);
  CHECK((back.lambdas - c.lambdas).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.mu_tilde - c.mu_tilde).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bracket report json carries entries and pass flag") {
  BracketReport r;
  r.check = "demo";
  r.tolerance = 1e-6;
  r.add("x", 0, 1, Complex(1.0, 0.0), Complex(1.0, 0.0));
  r.finalize();
  const nlohmann::json j = report_to_json(r);
  CHECK(j["check"] == "demo");
  CHECK(j["pass"] == true);
  CHECK(j["entries"][0]["value"][0] == 1.0);
  CHECK(j["entries"][0]["abs_err"] == 0.0);
}

TEST_CASE("lifted point round trip") {
  std::mt19937_64 rng(193);
  const lift::LiftedPoint pt = random_lifted_point(3, rng);
  const lift::LiftedPoint back = lifted_from_json(lifted_to_json(pt));
  CHECK((back.A - pt.A).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.B - pt.B).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("trajectory csv header and row shape") {
  Trajectory traj = integrate(test_state(), 1.0, 1e-8, {0.5});
  traj = track_coordinates(std::move(traj));
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header ==
        "t,x_1,x_2,p_1,p_2,lambda_1,lambda_2,re_mu_1,re_mu_2,im_mu_1,im_mu_2,"
        "re_mutilde_1,re_mutilde_2,im_mutilde_1,im_mutilde_2,energy");
  std::string row;
  int rows = 0;
  while (std::getline(is, row)) {
    ++rows;
    CHECK(std::count(row.begin(), row.end(), ',') == 15);
  }
  CHECK(rows == static_cast<int>(traj.times.size()));
}

TEST_SUITE_END();
