#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "code_spec.hpp"
#include "llr.hpp"

namespace polarlab {

inline double f_exact(double a, double b)
{
	double t = std::tanh(a / 2) * std::tanh(b / 2);
	// keep atanh finite when both inputs are huge
	if (t >= 1.0)
		t = std::nextafter(1.0, 0.0);
	if (t <= -1.0)
		t = std::nextafter(-1.0, 0.0);
	return 2 * std::atanh(t);
}

inline Llr f_minsum(Llr a, Llr b) { return FixedArith::f(a, b); }
inline Llr g_node(Llr a, Llr b, Bit ps) { return FixedArith::g(a, b, ps); }

struct GlahPair {
	Llr f, g0, g1;
	Llr select(Bit ps) const { return ps ? g1 : g0; }
};

// Both G outcomes computed with the F node; the partial sum only picks one later.
inline GlahPair glah_pair(Llr a, Llr b) { return {f_minsum(a, b), g_node(a, b, 0), g_node(a, b, 1)}; }

enum class Schedule { Plain, Lookahead };

// Single SC decoder. Node at stage s covers 2^s bits; its children read
// llr[s] and write llr[s-1]. With Schedule::Lookahead every stage <= p
// produces F, G0 and G1 in one pass and resolves G once the left partial
// sums are known (the P-GLAH semantics; P = 2^p lanes).
template <class A = FixedArith>
class ScDecoder {
public:
	using llr_t = typename A::llr_t;

	// called at every G evaluation: (stage of the G outputs, bit offset of the
	// left sibling, partial sums fed to G)
	std::function<void(int, int, std::span<const Bit>)> on_g;

	explicit ScDecoder(const CodeSpec &spec, Schedule sched = Schedule::Plain, int P = 64)
		: spec_(spec), sched_(sched), p_(ilog2(std::size_t(P)))
	{
		const int n = spec.n;
		llr_.resize(n + 1);
		ps_.resize(n + 1);
		g0_.resize(n + 1);
		g1_.resize(n + 1);
		for (int s = 0; s <= n; ++s) {
			llr_[s].resize(std::size_t(1) << s);
			ps_[s].resize(std::size_t(1) << s);
			g0_[s].resize(std::size_t(1) << s);
			g1_[s].resize(std::size_t(1) << s);
		}
		u_.resize(spec.N);
	}

	BitVector decode(std::span<const llr_t> ch)
	{
		if (int(ch.size()) != spec_.N)
			throw std::invalid_argument("scd_decode: frame length differs from N");
		std::copy(ch.begin(), ch.end(), llr_[spec_.n].begin());
		node(spec_.n, 0);
		return u_;
	}

private:
	void node(int s, int off)
	{
		if (s == 0) {
			Bit b = spec_.frozen(off) ? 0 : A::hd(llr_[0][0]);
			u_[off] = b;
			ps_[0][0] = b;
			return;
		}
		const int h = 1 << (s - 1);
		const auto &in = llr_[s];
		auto &out = llr_[s - 1];
		const bool la = sched_ == Schedule::Lookahead && (s - 1) <= p_;
		if (la) {
			for (int j = 0; j < h; ++j) {
				out[j] = A::f(in[j], in[j + h]);
				g0_[s - 1][j] = A::g(in[j], in[j + h], 0);
				g1_[s - 1][j] = A::g(in[j], in[j + h], 1);
			}
		} else {
			for (int j = 0; j < h; ++j)
				out[j] = A::f(in[j], in[j + h]);
		}
		node(s - 1, off);
		auto &ps = ps_[s];
		const auto &left = ps_[s - 1];
		std::copy(left.begin(), left.begin() + h, ps.begin());
		if (on_g)
			on_g(s - 1, off, std::span<const Bit>(ps.data(), h));
		if (la) {
			for (int j = 0; j < h; ++j)
				out[j] = ps[j] ? g1_[s - 1][j] : g0_[s - 1][j];
		} else {
			for (int j = 0; j < h; ++j)
				out[j] = A::g(in[j], in[j + h], ps[j]);
		}
		node(s - 1, off + h);
		for (int j = 0; j < h; ++j) {
			ps[j] ^= left[j];
			ps[j + h] = left[j];
		}
	}

	const CodeSpec &spec_;
	Schedule sched_;
	int p_;
	std::vector<std::vector<llr_t>> llr_, g0_, g1_;
	std::vector<BitVector> ps_;
	BitVector u_;
};

template <class A = FixedArith>
BitVector scd_decode(std::span<const typename A::llr_t> ch, const CodeSpec &spec, Schedule sched = Schedule::Plain)
{
	ScDecoder<A> d(spec, sched);
	return d.decode(ch);
}

} // namespace polarlab
