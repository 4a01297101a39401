#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "bits.hpp"
#include "llr.hpp"

namespace polarlab {

struct QuantizerConfig {
	double scale = 1.0;
};

// Round half away from zero, saturate at 31. NaN maps to +31 (counted in nan_count()).
inline std::uint64_t &nan_count()
{
	static thread_local std::uint64_t n = 0;
	return n;
}

inline Llr quantize(double l, const QuantizerConfig &q = {})
{
	if (std::isnan(l)) {
		++nan_count();
		return Llr{false, Llr::kMax};
	}
	double a = std::fabs(l) * q.scale;
	double r = std::floor(a + 0.5);
	std::uint8_t m = r >= Llr::kMax ? Llr::kMax : std::uint8_t(r);
	return Llr{l < 0, m};
}

inline double noise_sigma2(double ebn0_db, double rate)
{
	return 1.0 / (2 * rate * std::pow(10.0, ebn0_db / 10));
}

struct ChannelFrame {
	BitVector tx_bits;
	std::vector<double> rx_llrs;
	double ebn0_db = 0;
	std::uint64_t noise_seed = 0;
};

// BPSK 0 -> +1, 1 -> -1 over AWGN; LLR = 2y / sigma^2.
template <class Rng>
ChannelFrame transmit(const BitVector &x, double ebn0_db, double rate, Rng &rng)
{
	ChannelFrame f;
	f.tx_bits = x;
	f.ebn0_db = ebn0_db;
	const double s2 = noise_sigma2(ebn0_db, rate);
	const double sigma = std::sqrt(s2);
	std::normal_distribution<double> gauss(0.0, 1.0);
	f.rx_llrs.resize(x.size());
	for (std::size_t i = 0; i < x.size(); ++i) {
		double y = (x[i] ? -1.0 : 1.0) + sigma * gauss(rng);
		f.rx_llrs[i] = 2 * y / s2;
	}
	return f;
}

inline std::uint64_t splitmix64(std::uint64_t x)
{
	x += 0x9e3779b97f4a7c15ull;
	x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
	x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
	return x ^ (x >> 31);
}

// Per-frame stream: depends only on (master_seed, frame_index).
inline std::uint64_t frame_seed(std::uint64_t master_seed, std::uint64_t frame_index)
{
	return splitmix64(splitmix64(master_seed) ^ splitmix64(frame_index + 0x632be59bd9b4e019ull));
}

inline std::mt19937_64 frame_rng(std::uint64_t master_seed, std::uint64_t frame_index)
{
	return std::mt19937_64(frame_seed(master_seed, frame_index));
}

} // namespace polarlab
