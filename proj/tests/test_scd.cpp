#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <polarlab/channel.hpp>
#include <polarlab/code_spec.hpp>
#include <polarlab/scd.hpp>

#include "oracles.hpp"

using namespace polarlab;

static Llr L(int v) { return make_llr(v); }

static CodeSpec toy_spec(int n, int K, double snr = 4.0)
{
	return build_codespec(n, K, 0, CrcPoly{1}, ga_reliabilities(n, snr, double(K) / (1 << n)), 0);
}

TEST(FExact, Examples)
{
	EXPECT_DOUBLE_EQ(f_exact(0, 3.3), 0);
	EXPECT_NEAR(f_exact(2.5, 60), 2.5, 1e-9);
	EXPECT_NEAR(f_exact(1.2, -0.7), 2 * std::atanh(std::tanh(0.6) * std::tanh(-0.35)), 1e-15);
	EXPECT_NEAR(f_exact(1.2, -0.7), -0.3653, 1e-4);
}

TEST(FMinsum, ExamplesAndBound)
{
	EXPECT_EQ(f_minsum(L(5), L(-3)).value(), -3);
	EXPECT_EQ(f_minsum(Llr{false, 0}, L(-17)).mag, 0);
	std::mt19937 rng(2);
	for (int i = 0; i < 5000; ++i) {
		int a = int(rng() % 63) - 31, b = int(rng() % 63) - 31;
		if (!a || !b)
			continue;
		double fe = f_exact(a, b);
		Llr fm = f_minsum(L(a), L(b));
		EXPECT_EQ(fe < 0, fm.neg);
		EXPECT_LE(std::fabs(fe), fm.mag + 1e-9);
	}
}

TEST(GNode, Examples)
{
	EXPECT_EQ(g_node(L(4), L(-2), 1).value(), -6);
	for (int a = -31; a <= 31; ++a)
		EXPECT_EQ(g_node(L(a), Llr{}, 0).value(), a);
	EXPECT_EQ(g_node(L(31), L(31), 0), L(31));
	for (int a = -31; a <= 31; ++a)
		for (int b = -31; b <= 31; ++b)
			for (int ps = 0; ps < 2; ++ps) {
				int wide = (ps ? -a : a) + b;
				EXPECT_EQ(g_node(L(a), L(b), Bit(ps)).value(), std::clamp(wide, -31, 31));
			}
}

TEST(Glah, PairMatchesDirect)
{
	auto p = glah_pair(L(2), L(3));
	EXPECT_EQ(p.f.value(), 2);
	EXPECT_EQ(p.g0.value(), 5);
	EXPECT_EQ(p.g1.value(), 1);
	std::mt19937 rng(9);
	for (int i = 0; i < 5000; ++i) {
		Llr a = L(int(rng() % 63) - 31), b = L(int(rng() % 63) - 31);
		Bit ps = rng() & 1;
		auto q = glah_pair(a, b);
		EXPECT_EQ(q.f, f_minsum(a, b));
		EXPECT_EQ(q.select(ps), g_node(a, b, ps));
	}
}

TEST(HardDecision, ZeroDecodesToOne)
{
	EXPECT_EQ(FixedArith::hd(Llr{false, 0}), 1);
	EXPECT_EQ(FixedArith::hd(Llr{true, 0}), 1);
	EXPECT_EQ(FixedArith::hd(Llr{false, 1}), 0);
	EXPECT_EQ(FloatArith::hd(0.0), 1);
	EXPECT_EQ(FloatArith::hd(-0.0), 1);
	// a lone info bit with zero LLR
	auto spec = parse_codespec("0 1 0 0\nR");
	std::vector<Llr> zero{Llr{}};
	EXPECT_EQ(scd_decode<FixedArith>(zero, spec), (BitVector{1}));
}

TEST(ScDecode, NoiselessRecoversCodeword)
{
	auto spec = toy_spec(8, 128);
	std::mt19937_64 rng(4);
	for (int t = 0; t < 20; ++t) {
		BitVector u(spec.N, 0);
		for (int i : spec.info_indices())
			u[i] = rng() & 1;
		auto x = kron_encode(u, spec.n);
		std::vector<Llr> ch(spec.N);
		for (int i = 0; i < spec.N; ++i)
			ch[i] = x[i] ? L(-20) : L(20);
		EXPECT_EQ(scd_decode<FixedArith>(ch, spec), u);
		EXPECT_EQ(scd_decode<FixedArith>(ch, spec, Schedule::Lookahead), u);
	}
}

TEST(ScDecode, AllFrozenIsZero)
{
	auto spec = parse_codespec("3 0 0 0\nFFFFFFFF");
	std::vector<Llr> ch{L(-3), L(4), L(-31), L(0), L(9), L(-1), L(-7), L(2)};
	EXPECT_EQ(scd_decode<FixedArith>(ch, spec), BitVector(8, 0));
}

TEST(ScDecode, LengthMismatch)
{
	auto spec = toy_spec(3, 4);
	std::vector<Llr> ch(4);
	EXPECT_THROW(scd_decode<FixedArith>(ch, spec), std::invalid_argument);
}

TEST(ScDecode, LookaheadEqualsPlain)
{
	auto spec = toy_spec(10, 512, 2.5);
	std::mt19937_64 rng(8);
	for (int P : {1, 4, 64, 256}) {
		ScDecoder<FixedArith> plain(spec), la(spec, Schedule::Lookahead, P);
		for (int t = 0; t < 50; ++t) {
			BitVector x(spec.N, 0);
			auto f = transmit(x, 1.0, 0.5, rng);
			std::vector<Llr> q(spec.N);
			for (int i = 0; i < spec.N; ++i)
				q[i] = quantize(f.rx_llrs[i]);
			EXPECT_EQ(plain.decode(q), la.decode(q));
		}
	}
}

TEST(ScDecode, PartialSumsMatchReencodedPrefix)
{
	auto spec = toy_spec(7, 64);
	ScDecoder<FixedArith> dec(spec);
	BitVector decided;
	int checks = 0;
	// every G evaluation at stage s sees x = encode(u[off, off + 2^s))
	std::mt19937_64 rng(6);
	std::vector<Llr> q(spec.N);
	for (auto &v : q)
		v = L(int(rng() % 63) - 31);
	std::vector<std::tuple<int, int, BitVector>> seen;
	dec.on_g = [&](int s, int off, std::span<const Bit> ps) { seen.emplace_back(s, off, BitVector(ps.begin(), ps.end())); };
	auto u = dec.decode(q);
	for (auto &[s, off, ps] : seen) {
		BitVector seg(u.begin() + off, u.begin() + off + (1 << s));
		EXPECT_EQ(kron_encode(seg, s), ps);
		++checks;
	}
	EXPECT_EQ(checks, spec.N - 1);
}

TEST(ScDecode, MatchesStraightLineReference)
{
	// N=8, K=4 at 4 dB: identical decisions frame by frame, so the BLERs agree
	auto spec = toy_spec(3, 4);
	std::vector<bool> frozen(8);
	for (int i = 0; i < 8; ++i)
		frozen[i] = spec.frozen(i);
	ScDecoder<FixedArith> dec(spec);
	long err_fast = 0, err_ref = 0;
	const long frames = 10000;
	for (long i = 0; i < frames; ++i) {
		auto rng = frame_rng(99, i);
		BitVector u(8, 0);
		for (int k : spec.info_indices())
			u[k] = rng() & 1;
		auto f = transmit(kron_encode(u, 3), 4.0, 0.5, rng);
		std::vector<Llr> q(8);
		for (int j = 0; j < 8; ++j)
			q[j] = quantize(f.rx_llrs[j]);
		auto a = dec.decode(q);
		auto b = oracle::sc_decode<FixedArith>(q, frozen);
		ASSERT_EQ(a, b) << "frame " << i;
		err_fast += a != u;
		err_ref += b != u;
	}
	double p = double(err_ref) / frames;
	double se = std::sqrt(p * (1 - p) / frames);
	EXPECT_LE(std::fabs(double(err_fast - err_ref) / frames), 2 * se + 1e-12);
}

TEST(ScDecode, FloatMatchesReference)
{
	auto spec = toy_spec(6, 32);
	std::vector<bool> frozen(64);
	for (int i = 0; i < 64; ++i)
		frozen[i] = spec.frozen(i);
	std::mt19937_64 rng(12);
	ScDecoder<FloatArith> dec(spec);
	for (int t = 0; t < 200; ++t) {
		auto f = transmit(BitVector(64, 0), 1.5, 0.5, rng);
		EXPECT_EQ(dec.decode(f.rx_llrs), oracle::sc_decode<FloatArith>(f.rx_llrs, frozen));
	}
}
