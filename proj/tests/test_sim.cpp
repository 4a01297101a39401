#include <sstream>

#include <gtest/gtest.h>

#include <polarlab/sim.hpp>

using namespace polarlab;

static const std::string kSpecPath = std::string(POLARLAB_SOURCE_DIR) + "/data/pc1024_512_crc24.code";

TEST(SweepConfig, Parse)
{
	std::istringstream in(R"(# comment
spec = data/x.code
schemes = smb-dts, exact, dts-advance
lists = 8, 32
merges = 2,4
ebn0 = 1.5, 2.0
max_frames = 500
max_errors = 7
seed = 99
workers = 3
arith = float
llr_scale = 1.5
smb_variant = standard
output = out.csv
)");
	auto c = parse_sweep_config(in);
	EXPECT_EQ(c.spec_path, "data/x.code");
	EXPECT_EQ(c.schemes.size(), 3u);
	EXPECT_EQ(c.lists, (std::vector<int>{8, 32}));
	EXPECT_EQ(c.merges, (std::vector<int>{2, 4}));
	EXPECT_EQ(c.ebn0, (std::vector<double>{1.5, 2.0}));
	EXPECT_EQ(c.max_frames, 500);
	EXPECT_EQ(c.max_errors, 7);
	EXPECT_EQ(c.seed, 99u);
	EXPECT_EQ(c.workers, 3);
	EXPECT_EQ(c.arith, ArithKind::Float);
	EXPECT_EQ(c.smb_variant, DtsVariant::Standard);
	// 2 points per smb-dts (L, M) pair, 1 per other scheme
	EXPECT_EQ(expand_points(c).size(), 2u * (2 * 2 + 2 + 2));
}

TEST(SweepConfig, Errors)
{
	std::istringstream bad("lists 8\n");
	EXPECT_THROW(parse_sweep_config(bad), std::invalid_argument);
	std::istringstream unknown("colour = red\n");
	EXPECT_THROW(parse_sweep_config(unknown), std::invalid_argument);
	std::istringstream zero("max_errors = 0\n");
	EXPECT_THROW(parse_sweep_config(zero), std::invalid_argument);
	std::istringstream scheme("schemes = fancy\n");
	EXPECT_THROW(parse_sweep_config(scheme), std::invalid_argument);
}

TEST(Sweep, ZeroFramesGivesNothing)
{
	SweepConfig c;
	c.max_frames = 0;
	EXPECT_TRUE(run_sweep(c, load_codespec(kSpecPath)).empty());
}

static std::string strip_wall_time(const std::string &csv)
{
	std::istringstream in(csv);
	std::string line, out;
	while (std::getline(in, line))
		out += line.substr(0, line.rfind(',')) + "\n";
	return out;
}

TEST(Sweep, IndependentOfWorkerCount)
{
	auto spec = load_codespec(kSpecPath);
	SweepConfig c;
	c.schemes = {Scheme::SMBDTS, Scheme::DTS};
	c.lists = {4};
	c.merges = {4};
	c.ebn0 = {1.0};
	c.max_frames = 300;
	c.max_errors = 20;
	c.workers = 1;
	auto a = to_csv(run_sweep(c, spec));
	c.workers = 3;
	auto b = to_csv(run_sweep(c, spec));
	EXPECT_EQ(strip_wall_time(a), strip_wall_time(b));
	// early stop lands exactly on the max_errors-th error
	auto pts = run_sweep(c, spec);
	for (const auto &p : pts)
		EXPECT_TRUE(p.block_errors == 20 || p.frames == 300);
}

TEST(Compare, IdenticalSchemesHaveZeroDelta)
{
	auto spec = load_codespec(kSpecPath);
	SweepConfig c;
	c.schemes = {Scheme::SMBDTS, Scheme::SMBDTS};
	c.lists = {4};
	c.merges = {8};
	c.ebn0 = {1.5};
	c.max_frames = 200;
	auto cs = compare_schemes(c, spec);
	ASSERT_EQ(cs.size(), 1u);
	EXPECT_EQ(cs[0].delta(), 0.0);
	EXPECT_EQ(cs[0].only_a + cs[0].only_b, 0);
	EXPECT_TRUE(cs[0].overlap());
	EXPECT_NE(format_comparisons(cs).find("smb-dts"), std::string::npos);
}

TEST(Stats, WilsonInterval)
{
	auto [lo, hi] = binomial_ci(10, 100);
	EXPECT_NEAR(lo, 0.0552, 1e-3);
	EXPECT_NEAR(hi, 0.1744, 1e-3);
	auto z = binomial_ci(0, 1000);
	EXPECT_EQ(z.first, 0.0);
	EXPECT_NEAR(z.second, 0.00383, 1e-4);
}

TEST(Stats, PairedSignTest)
{
	EXPECT_DOUBLE_EQ(paired_p_value(0, 0), 1.0);
	EXPECT_NEAR(paired_p_value(0, 5), 1.0 / 32, 1e-12);
	EXPECT_NEAR(paired_p_value(1, 9), 11.0 / 1024, 1e-12);
	EXPECT_GT(paired_p_value(5, 5), 0.5);
}

TEST(Output, CsvAndJson)
{
	BlerPoint p{"smb-dts", 32, 8, 2.0, 1000, 3, 0.003, 1.25};
	auto csv = to_csv({p});
	EXPECT_EQ(csv.rfind(kCsvHeader, 0), 0u);
	EXPECT_NE(csv.find("smb-dts,32,8,2.000,1000,3,3.000000e-03"), std::string::npos);
	auto j = to_json_doc({p});
	EXPECT_EQ(j["points"][0]["block_errors"], 3);
	EXPECT_EQ(j["curves"]["smb-dts/L32/M8"][0][1], 0.003);
}
