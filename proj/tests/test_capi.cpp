#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstring>
#include <fstream>
#include <string>

#include "doctest.h"
#include "hopfmean/hopfmean.h"
#include "json.hpp"

namespace {

struct Model {
  hm_model* m;
  explicit Model(hm_model* h) : m(h) {}
  ~Model() { hm_model_free(m); }
};

struct Result {
  hm_result* r;
  explicit Result(hm_result* h) : r(h) {}
  ~Result() { hm_result_free(r); }
};

}  // namespace

TEST_CASE("version and error state") {
  CHECK(hm_version() != nullptr);
  CHECK(std::string(hm_version()).find('.') != std::string::npos);
  CHECK(hm_last_error() != nullptr);
}

TEST_CASE("builtin model lifecycle") {
  Model m(hm_model_builtin("brusselator"));
  REQUIRE(m.m != nullptr);
  CHECK(hm_model_dimension(m.m) == 2);
  CHECK(std::string(hm_model_name(m.m)) == "brusselator");
  CHECK(std::string(hm_model_bifurcation_parameter(m.m)) == "alpha");
  CHECK(hm_model_set_param(m.m, "A", 1.2) == HM_OK);
  CHECK(hm_model_set_param(m.m, "bogus", 1.0) == HM_ERR_INVALID);
  CHECK(std::string(hm_last_error()).find("bogus") != std::string::npos);
  double guess[2] = {0, 0};
  CHECK(hm_model_default_guess(m.m, 2.5, guess) == HM_OK);
  CHECK(guess[0] == doctest::Approx(1.2));  // equilibrium x1 = A
}

TEST_CASE("unknown builtin") {
  CHECK(hm_model_builtin("nope") == nullptr);
  CHECK(std::string(hm_last_error()).find("nope") != std::string::npos);
  CHECK(hm_last_error_code() == HM_ERR_INVALID);
  CHECK(hm_model_builtin(nullptr) == nullptr);
}

TEST_CASE("custom model from json and file") {
  const char* text = R"({
    "dimension": 2,
    "parameters": {"A": 1.0, "alpha": 2.0},
    "bifurcation_parameter": "alpha",
    "equations": ["A - (alpha+1)*x1 + x1^2*x2", "alpha*x1 - x1^2*x2"]
  })";
  Model m(hm_model_from_json(text));
  REQUIRE(m.m != nullptr);
  CHECK(hm_model_dimension(m.m) == 2);
  double guess[2] = {1.0, 2.1};
  Result loc(hm_locate(m.m, 1.5, 2.5, guess));
  REQUIRE(loc.r != nullptr);
  double astar = 0;
  CHECK(hm_result_scalar(loc.r, "alpha_star", &astar) == HM_OK);
  CHECK(astar == doctest::Approx(2.0).epsilon(1e-8));

  CHECK(hm_model_from_json("{broken") == nullptr);
  CHECK(hm_last_error_code() == HM_ERR_INVALID);
  CHECK(hm_model_from_file("missing_file.json") == nullptr);

  std::ofstream("capi_model_test.json") << text;
  Model mf(hm_model_from_file("capi_model_test.json"));
  CHECK(mf.m != nullptr);
  std::remove("capi_model_test.json");
}

TEST_CASE("analyze report") {
  Model m(hm_model_builtin("predator-prey"));
  REQUIRE(m.m != nullptr);
  Result res(hm_analyze(m.m, 4.8, nullptr));
  REQUIRE(res.r != nullptr);
  auto doc = nlohmann::json::parse(hm_result_json(res.r));
  for (const char* key : {"alpha", "x0", "mu", "omega", "q", "p", "g20", "g11", "g21", "c1",
                          "re_c1", "K", "predicted_mean", "criticality", "residuals"})
    CHECK(doc.contains(key));
  CHECK(doc["criticality"] == "supercritical");
  double mu = 0;
  CHECK(hm_result_scalar(res.r, "mu", &mu) == HM_OK);
  CHECK(mu > 0);
  double cyc = 0;
  CHECK(hm_result_scalar(res.r, "cycle_predicted", &cyc) == HM_OK);  // booleans read as 0/1
  CHECK(cyc == 1.0);
  double K[2] = {0, 0};
  CHECK(hm_result_vector(res.r, "K", K, 2) == 2);
  CHECK((K[0] != 0 || K[1] != 0));
  CHECK(hm_result_scalar(res.r, "no_such_key", &mu) == HM_ERR_INVALID);
  CHECK(hm_result_vector(res.r, "mu", K, 2) == HM_ERR_INVALID);  // scalar, not vector
}

TEST_CASE("locate and bracket failures") {
  Model m(hm_model_builtin("brusselator"));
  REQUIRE(m.m != nullptr);
  Result loc(hm_locate(m.m, 1.5, 2.5, nullptr));
  REQUIRE(loc.r != nullptr);
  double v = 0;
  CHECK(hm_result_scalar(loc.r, "alpha_star", &v) == HM_OK);
  CHECK(v == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(hm_result_scalar(loc.r, "mu_prime", &v) == HM_OK);
  CHECK(v == doctest::Approx(0.5).epsilon(1e-5));
  double jump[2] = {0, 0};
  CHECK(hm_result_vector(loc.r, "oigm_gain_jump", jump, 2) == 2);

  CHECK(hm_locate(m.m, 1.2, 1.6, nullptr) == nullptr);
  CHECK(hm_last_error_code() == HM_ERR_BRACKET);
}

TEST_CASE("observe compares prediction and measurement") {
  Model m(hm_model_builtin("brusselator"));
  REQUIRE(m.m != nullptr);
  Result obs(hm_observe(m.m, 2.1, nullptr, 1e-8, 1e-10));
  REQUIRE(obs.r != nullptr);
  double conv = 0, period = 0, ratio = 0;
  CHECK(hm_result_scalar(obs.r, "converged", &conv) == HM_OK);
  CHECK(conv == 1.0);
  CHECK(hm_result_scalar(obs.r, "period", &period) == HM_OK);
  CHECK(period == doctest::Approx(6.28).epsilon(0.05));
  CHECK(hm_result_scalar(obs.r, "amplitude_ratio", &ratio) == HM_OK);
  CHECK(ratio == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("null argument handling") {
  CHECK(hm_analyze(nullptr, 1.0, nullptr) == nullptr);
  CHECK(hm_locate(nullptr, 0, 1, nullptr) == nullptr);
  CHECK(hm_observe(nullptr, 1.0, nullptr, 0, 0) == nullptr);
  CHECK(hm_model_dimension(nullptr) == HM_ERR_INVALID);
  CHECK(hm_model_name(nullptr) == nullptr);
  CHECK(hm_result_json(nullptr) == nullptr);
  double v;
  CHECK(hm_result_scalar(nullptr, "x", &v) == HM_ERR_INVALID);
  hm_model_free(nullptr);
  hm_result_free(nullptr);
}
