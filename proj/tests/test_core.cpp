#include <gtest/gtest.h>

#include <atomic>
#include <sstream>

#include "hudtrace/core/csv.hpp"
#include "hudtrace/core/error.hpp"
#include "hudtrace/core/kv.hpp"
#include "hudtrace/core/parallel.hpp"
#include "hudtrace/core/png_io.hpp"
#include "hudtrace/core/random.hpp"
#include "hudtrace/core/rational.hpp"
#include "test_util.hpp"

using namespace hudtrace;

TEST(Csv, QuotedFieldsRoundTrip) {
  std::ostringstream out;
  CsvWriter w(out);
  w.row({"a", "b,c", "say \"hi\"", "line\nbreak", ""});
  const auto t = parse_csv("h1,h2,h3,h4,h5\n" + out.str());
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0], (std::vector<std::string>{"a", "b,c", "say \"hi\"", "line\nbreak", ""}));
  EXPECT_EQ(t.column("h3"), 2u);
  EXPECT_FALSE(t.find_column("zz").has_value());
  EXPECT_THROW((void)t.column("zz"), InputError);
}

TEST(Csv, HeaderMismatchIsAnInputError) {
  const auto t = parse_csv("x,y\n1,2\n");
  EXPECT_NO_THROW(require_header(t, {"x", "y"}, "t"));
  EXPECT_THROW(require_header(t, {"x", "z"}, "t"), Error);
}

TEST(Csv, FixedFormatting) {
  EXPECT_EQ(fmt_fixed(1.0 / 3.0, 3), "0.333");
  EXPECT_EQ(fmt_fixed(-2.5, 1), "-2.5");
  EXPECT_EQ(fmt_opt(std::optional<double>{}, 2), "");
  EXPECT_EQ(fmt_opt(std::optional<int>{7}), "7");
}

TEST(KeyValue, ParsesCommentsAndRejectsUnknownKeys) {
  const auto kv = KeyValueFile::parse("# comment\n a = 1.5 \nname=x # trailing\n\n");
  EXPECT_DOUBLE_EQ(kv.get_double("a"), 1.5);
  EXPECT_EQ(kv.get("name"), "x");
  EXPECT_EQ(kv.get_int_or("missing", 4), 4);
  EXPECT_THROW((void)kv.get("missing"), Error);
  EXPECT_NO_THROW(kv.reject_unknown({"a", "name"}));
  try {
    kv.reject_unknown({"a"});
    FAIL() << "unknown key accepted";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("name"), std::string::npos);
  }
}

TEST(KeyValue, StrictNumbers) {
  EXPECT_EQ(parse_long("42"), 42);
  EXPECT_THROW(parse_long("4x"), std::invalid_argument);
  EXPECT_THROW(parse_double(""), std::invalid_argument);
  const auto toks = parse_kv_tokens("symbol=7 file=g7.png");
  ASSERT_EQ(toks.size(), 2u);
  EXPECT_EQ(toks[1].second, "g7.png");
}

TEST(Rational, ExactArithmetic) {
  const auto r = Rational::parse("30000/1001");
  EXPECT_EQ(r.num(), 30000);
  EXPECT_EQ(r.den(), 1001);
  EXPECT_EQ(Rational::parse("30"), Rational(30));
  EXPECT_EQ(Rational(60, 30), Rational(2));
  EXPECT_EQ((Rational(59) / Rational(30)).floor(), 1);
  EXPECT_LT(Rational(1, 3), Rational(1, 2));
  EXPECT_THROW(Rational::parse("3/a"), std::invalid_argument);
}

TEST(Parallel, CoversEveryIndexAndRethrows) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(100, 4,
                            [](std::size_t i) {
                              if (i == 37) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST(Random, SeededStreamsRepeat) {
  Rng a(9), b(9);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.bits(), b.bits());
  Rng c(1);
  for (int i = 0; i < 1000; ++i) {
    const int v = c.range(3, 5);
    EXPECT_GE(v, 3);
    EXPECT_LE(v, 5);
    const double u = c.u01();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  EXPECT_NE(mix_seed(1, 0), mix_seed(1, 1));
}

TEST(Png, RgbAndGrayRoundTrip) {
  testutil::TempDir dir("png");
  RgbImage rgb(7, 5);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 7; ++x) rgb.set(x, y, x * 30, y * 50, (x * y) % 256);
  write_png(dir / "c.png", rgb, 1);
  EXPECT_EQ(read_png_rgb(dir / "c.png"), rgb);
  GrayImage g(9, 4);
  for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] = static_cast<std::uint8_t>(i * 7);
  write_png(dir / "g.png", g);
  EXPECT_EQ(read_png_gray(dir / "g.png"), g);
  EXPECT_THROW(read_png_rgb(dir / "missing.png"), Error);
}
