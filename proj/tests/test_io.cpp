#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "qslimit/csv.hpp"
#include "qslimit/json.hpp"

using namespace qslimit;

TEST(Csv, CfFormat) {
  std::ostringstream os;
  write_cf_csv(os, init_gaussian_cf(1.0, 3));
  EXPECT_EQ(os.str().substr(0, 16), "t,re,im\n0,1,0\n0.");
}

TEST(Csv, DensityHeaders) {
  const RealGrid g(0.0, 0.5, {1.0, 2.0});
  std::ostringstream a, b;
  write_density_csv(a, g);
  write_density_csv(b, g, 2);
  EXPECT_EQ(a.str(), "x,f\n0,1\n0.5,2\n");
  EXPECT_EQ(b.str(), "# k=2\nx,fk\n0,1\n0.5,2\n");
}

TEST(Csv, CdfRoundTrip) {
  const RealGrid F(-1.0, 0.1, {0.0, 0.25, 0.5, 0.75, 1.0});
  std::stringstream ss;
  write_cdf_csv(ss, F);
  const auto back = read_cdf_csv(ss);
  ASSERT_EQ(back.size(), F.size());
  EXPECT_DOUBLE_EQ(back.origin(), -1.0);
  EXPECT_NEAR(back.spacing(), 0.1, 1e-15);
  for (std::size_t i = 0; i < F.size(); ++i) EXPECT_EQ(back[i], F[i]);
  std::istringstream bad("x,f\n0,1\n");
  EXPECT_THROW(read_cdf_csv(bad), std::invalid_argument);
  std::istringstream uneven("x,F\n0,0\n1,0.5\n3,1\n");
  EXPECT_THROW(read_cdf_csv(uneven), std::invalid_argument);
}

TEST(Csv, Histogram) {
  std::ostringstream os;
  write_histogram_csv(os, make_histogram({0.1, 0.6, 0.7, 9.0}, 2, 0.0, 1.0));
  EXPECT_EQ(os.str(), "bin_lo,bin_hi,count\n0,0.5,1\n0.5,1,3\n");
}

TEST(Json, ChainAndEnvelope) {
  const auto j = to_json(standard_chain(3.5));
  bool saw = false;
  for (const auto& e : j["entries"])
    if (e["ceiling"] == 103215.0) saw = true;
  EXPECT_TRUE(saw);
  const auto env = to_json(make_envelope(standard_chain(3.5), false));
  EXPECT_TRUE(env["pieces"].back()["t_hi"].is_null());
}

TEST(Json, ReportKeysInOrder) {
  auto r = sup_fk_report(make_envelope(standard_chain(3.5), true), 0);
  r.published_ceiling = 15.3;
  const auto j = to_json(r);
  std::string keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys += it.key() + ",";
  EXPECT_EQ(keys, "k,use_log,pieces,total,paper_ceiling,");
  EXPECT_EQ(j.dump(), to_json(r).dump());
}

TEST(Json, MomentsCarryTolerance) {
  const auto j = to_json(pump_moments(4));
  EXPECT_EQ(j["moments"][2]["provenance"], "pumped");
  EXPECT_DOUBLE_EQ(j["moments"][2]["quadrature_abs_tol"].get<double>(), 1e-13);
}

TEST(Csv, CdfReaderAcceptsSubnormals) {
  std::istringstream in("x,F\n-4,4.9406564584124654e-324\n-3.5,1e-310\n-3,0.5\n");
  const auto F = read_cdf_csv(in);
  EXPECT_GT(F[0], 0.0);
  EXPECT_DOUBLE_EQ(F[2], 0.5);
  std::istringstream junk("x,F\n0,abc\n1,1\n");
  EXPECT_THROW(read_cdf_csv(junk), std::invalid_argument);
}
