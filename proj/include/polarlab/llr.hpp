#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace polarlab {

// Sign-magnitude LLR as the datapath sees it: 1 sign bit + kLlrBits-1 magnitude bits.
// Note -0 and +0 both hard-decide to 1 (the decision is 0 only for a strictly positive value).
inline constexpr int kLlrBits = 6;
inline constexpr int kPmBits = 8;

struct Llr {
	bool neg = false;
	std::uint8_t mag = 0;

	static constexpr std::uint8_t kMax = (1u << (kLlrBits - 1)) - 1;

	constexpr int value() const { return neg ? -int(mag) : int(mag); }
	friend constexpr bool operator==(Llr a, Llr b) { return a.neg == b.neg && a.mag == b.mag; }
};

constexpr Llr make_llr(int v)
{
	int m = v < 0 ? -v : v;
	return Llr{v < 0, std::uint8_t(m > Llr::kMax ? Llr::kMax : m)};
}

// Arithmetic policies shared by the SC and list decoders.
// Fixed: 6-bit sign-magnitude LLRs, Q_PM-bit saturating metrics.
struct FixedArith {
	using llr_t = Llr;
	using metric_t = std::uint16_t;
	static constexpr metric_t kMetricMax = (1u << kPmBits) - 1;

	static Llr f(Llr a, Llr b) { return Llr{bool(a.neg ^ b.neg), std::min(a.mag, b.mag)}; }

	static Llr g(Llr a, Llr b, std::uint8_t ps)
	{
		int va = (a.neg ^ bool(ps)) ? -int(a.mag) : int(a.mag);
		int vb = b.neg ? -int(b.mag) : int(b.mag);
		int v = std::clamp(va + vb, -int(Llr::kMax), int(Llr::kMax));
		return Llr{v < 0, std::uint8_t(v < 0 ? -v : v)};
	}

	static std::uint8_t hd(Llr a) { return !(a.mag > 0 && !a.neg); }
	static metric_t mag(Llr a) { return a.mag; }
	static metric_t add(metric_t m, metric_t d)
	{
		unsigned s = unsigned(m) + d;
		return metric_t(s > kMetricMax ? kMetricMax : s);
	}
};

// Floating point min-sum reference. With integer-valued inputs it is exact
// (no rounding, no saturation), which the oracle tests rely on.
struct FloatArith {
	using llr_t = double;
	using metric_t = double;

	static double f(double a, double b)
	{
		double m = std::min(std::fabs(a), std::fabs(b));
		return (std::signbit(a) != std::signbit(b)) ? -m : m;
	}
	static double g(double a, double b, std::uint8_t ps) { return (ps ? -a : a) + b; }
	static std::uint8_t hd(double a) { return !(a > 0); }
	static double mag(double a) { return std::fabs(a); }
	static double add(double m, double d) { return m + d; }
};

} // namespace polarlab
