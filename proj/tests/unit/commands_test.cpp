#include <gtest/gtest.h>

#include "mtp/commands.hpp"
#include "mtp/error.hpp"

using namespace mtp;

namespace {

CommandResult demo_construct(std::uint64_t seed = 1) {
  Inputs in;
  auto params = ConstructionParams::defaults(1, Mode::Demo);
  params.depth = 3;
  params.trials = 300;
  params.seed = seed;
  return run_construct(in, params, default_root(1));
}

}  // namespace

TEST(Commands, CriteriaRowAtFour) {
  Inputs in;
  in.tau = Rational(1);
  auto r = run_criteria(in, 4);
  EXPECT_EQ(r.document["version"], kFormatVersion);
  const auto& last = r.document["rows"].back();
  EXPECT_EQ(last["N"], 4);
  EXPECT_EQ(last["sum_conjecture1"], "115/72");
  EXPECT_NE(r.csv.find("\n4,115/72,"), std::string::npos);
}

TEST(Commands, GenerateListsTheFarey) {
  Inputs in;
  auto r = run_generate(in, 8);
  // 1 + phi(1) + ... + phi(8)
  EXPECT_EQ(r.document["members"].size(), 23u);
  EXPECT_EQ(r.document["members"][0]["radius"], "1/1");
  EXPECT_EQ(r.csv.substr(0, r.csv.find('\n')), "index,q,p1,radius");
}

TEST(Commands, ConstructPassesAndRoundTrips) {
  auto c = demo_construct();
  ASSERT_TRUE(c.ok);
  const auto& cert = c.document["certificate"];
  EXPECT_EQ(cert["mode"], "demo");
  EXPECT_EQ(cert["params"]["demo_c3"], "1/1000000000");
  EXPECT_TRUE(cert["verification"]["p1"].get<bool>());
  EXPECT_TRUE(c.document["sandwich"].get<bool>());
  EXPECT_EQ(c.document["mdp_lower_bound"]["constants"], "demo constants");

  auto reparsed = Json::parse(c.document.dump());
  auto v = run_verify(reparsed);
  EXPECT_TRUE(v.ok);
  EXPECT_TRUE(v.document["matches_recorded"].get<bool>());
  EXPECT_EQ(v.document["certificate"], cert);
}

TEST(Commands, ConstructIsByteIdentical) {
  EXPECT_EQ(demo_construct(5).document.dump(2), demo_construct(5).document.dump(2));
}

TEST(Commands, VerifyReportsTamperedMeasure) {
  auto c = demo_construct();
  auto doc = c.document;
  auto leaf = doc["tree"]["levels"].back()[0].get<std::size_t>();
  doc["tree"]["nodes"][leaf]["mu"] = {{"lo", "1/3"}, {"hi", "1/3"}};
  auto v = run_verify(doc);
  EXPECT_FALSE(v.ok);
  EXPECT_FALSE(v.document["certificate"]["verification"]["conservation"].get<bool>());
  EXPECT_FALSE(v.document["matches_recorded"].get<bool>());
}

TEST(Commands, VerifyRejectsUnversionedDocuments) {
  auto doc = demo_construct().document;
  doc.erase("version");
  EXPECT_THROW(run_verify(doc), InvalidArgument);
  doc["version"] = 99;
  EXPECT_THROW(run_verify(doc), InvalidArgument);
}

TEST(Commands, DimensionReport) {
  Inputs in;
  auto r = run_dimension(in, {16, 32, 64, 128, 256}, PremeasureRequest{});
  EXPECT_EQ(r.document["box_dimension"]["target"], "2/3");
  EXPECT_EQ(r.document["box_dimension"]["counts"].size(), 5u);
  EXPECT_EQ(r.csv.substr(0, r.csv.find('\n')), "Q,delta,N");
  EXPECT_EQ(r.document["premeasure_upper"]["rho"], "1/8");
}

TEST(Commands, JbCheck) {
  auto r = run_jb_check({Rational(2), Rational(3)}, default_scales(), 0.1);
  EXPECT_TRUE(r.ok);
  auto strict = run_jb_check({Rational(2)}, {16, 32, 64}, 1e-9);
  EXPECT_FALSE(strict.ok);
}
