#pragma once

#include <algorithm>
#include <cassert>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "bits.hpp"
#include "llr.hpp"
#include "tuples.hpp"

namespace polarlab {

template <class M>
struct MetricPair {
	M same, flip;
};

// One expanded bit: keeping the hard decision costs nothing, flipping costs |Λ|.
template <class A = FixedArith>
MetricPair<typename A::metric_t> pmu_bit(typename A::metric_t g, typename A::llr_t lam)
{
	return {g, A::add(g, A::mag(lam))};
}

template <class M>
struct ExpandedPath {
	M metric{};
	int parent = 0;
	int bit = 0; // candidate index under the parent (bit value for per-bit expansion)
};

// Indices of the L smallest metrics; ties go to the earlier entry, which is
// (lower parent, bit 0 first) when entries are laid out parent-major.
// Returned in ascending entry order.
template <class M>
std::vector<int> prune_exact(std::span<const M> metrics, int L)
{
	std::vector<int> idx(metrics.size());
	std::iota(idx.begin(), idx.end(), 0);
	if (int(idx.size()) <= L)
		return idx;
	std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return metrics[a] < metrics[b]; });
	idx.resize(L);
	std::sort(idx.begin(), idx.end());
	return idx;
}

template <class M>
std::vector<int> prune_exact(std::span<const ExpandedPath<M>> exp, int L)
{
	std::vector<M> m(exp.size());
	for (std::size_t i = 0; i < exp.size(); ++i)
		m[i] = exp[i].metric;
	return prune_exact<M>(std::span<const M>(m), L);
}

enum class DtsVariant { Standard, Advance };

template <class M>
struct Thresholds {
	M at{}, rt{};
};

// Rejection index used by the advance variant; unknown L falls back to L-1.
inline int advance_rt_index(int L)
{
	switch (L) {
	case 8: return 6;
	case 16: return 12;
	case 32: return 25;
	default: return L - 1;
	}
}

template <class M>
Thresholds<M> dts_thresholds(std::span<const M> sorted, DtsVariant v = DtsVariant::Standard, int rt_index = -1)
{
	const int L = int(sorted.size());
	if (L < 2)
		throw std::invalid_argument("dts_thresholds: need at least two metrics");
	assert(std::is_sorted(sorted.begin(), sorted.end()));
	int ri = rt_index >= 0 ? rt_index : (v == DtsVariant::Advance ? advance_rt_index(L) : L - 1);
	ri = std::clamp(ri, L / 2, L - 1);
	return {sorted[L / 2], sorted[ri]};
}

// Accept everything below AT, drop everything above RT, fill the rest of the
// list from the band in entry order, then (only if still short) from above RT.
template <class M>
std::vector<int> dts_prune(std::span<const M> metrics, int L, Thresholds<M> th)
{
	const int n = int(metrics.size());
	if (n <= L) {
		std::vector<int> all(n);
		std::iota(all.begin(), all.end(), 0);
		return all;
	}
	std::vector<char> keep(n, 0);
	int kept = 0;
	for (int i = 0; i < n && kept < L; ++i)
		if (metrics[i] < th.at)
			keep[i] = 1, ++kept;
	for (int i = 0; i < n && kept < L; ++i)
		if (!keep[i] && metrics[i] <= th.rt)
			keep[i] = 1, ++kept;
	for (int i = 0; i < n && kept < L; ++i)
		if (!keep[i])
			keep[i] = 1, ++kept;
	std::vector<int> out;
	out.reserve(L);
	for (int i = 0; i < n; ++i)
		if (keep[i])
			out.push_back(i);
	return out;
}

// Penalty of forcing the stage-t node output to v: sum of |L_j| where v_j
// disagrees with the hard decision.
template <class A>
typename A::metric_t tuple_penalty(std::span<const typename A::llr_t> llr, std::span<const Bit> v)
{
	typename A::metric_t d{};
	for (std::size_t j = 0; j < llr.size(); ++j)
		if (v[j] != A::hd(llr[j]))
			d = A::add(d, A::mag(llr[j]));
	return d;
}

// Node-output (V) candidates for the two values of the unreliable bit, plus
// their penalties. u = V * F^{(x)t} recovers the decoded bits.
template <class M>
struct TupleDecision {
	M metric[2]{};
	BitVector v[2];
	BitVector u[2];
};

// rate-1/T: u is zero except possibly at the unreliable position q, so the
// two candidates are the zero word and row q of F^{(x)t}.
template <class A = FixedArith>
TupleDecision<typename A::metric_t> subt_pmu(typename A::metric_t g, std::span<const typename A::llr_t> llr, int q)
{
	const std::size_t T = llr.size();
	if (q < 0 || std::size_t(q) >= T)
		throw std::invalid_argument("subt_pmu: unreliable position outside the tuple");
	TupleDecision<typename A::metric_t> r;
	r.u[0].assign(T, 0);
	r.u[1].assign(T, 0);
	r.u[1][q] = 1;
	for (int c = 0; c < 2; ++c) {
		r.v[c] = r.u[c];
		kron_encode_inplace(r.v[c]);
		r.metric[c] = A::add(g, tuple_penalty<A>(llr, r.v[c]));
	}
	return r;
}

// SP1: every bit but u_q is reliable, so the two candidates are the best
// words with (V*F)_q = 0 and = 1. That bit is the parity of V over
// S = {j : j & q == q} (all of V when q = 0), so each candidate is the hard
// decision with at most the weakest position of S flipped.
template <class A = FixedArith>
TupleDecision<typename A::metric_t> sp1_decode(typename A::metric_t g, std::span<const typename A::llr_t> llr, int q = 0)
{
	const int T = int(llr.size());
	if (q < 0 || q >= T)
		throw std::invalid_argument("sp1_decode: unreliable position outside the tuple");
	int k = -1;
	Bit eta = 0;
	BitVector hd(T);
	for (int j = 0; j < T; ++j) {
		hd[j] = A::hd(llr[j]);
		if ((j & q) != q)
			continue;
		eta ^= hd[j];
		if (k < 0 || A::mag(llr[j]) < A::mag(llr[k]))
			k = j;
	}
	TupleDecision<typename A::metric_t> r;
	for (int c = 0; c < 2; ++c) {
		Bit flip = Bit(eta ^ c);
		r.v[c] = hd;
		r.v[c][k] ^= flip;
		r.metric[c] = flip ? A::add(g, A::mag(llr[k])) : g;
		r.u[c] = r.v[c];
		kron_encode_inplace(r.u[c]);
	}
	return r;
}

template <class M>
struct Sp2Decision {
	M metric{};
	BitVector v;
	BitVector u;
};

template <class A = FixedArith>
Sp2Decision<typename A::metric_t> sp2_decode(typename A::metric_t g, std::span<const typename A::llr_t> llr, TupleClass cls)
{
	const std::size_t T = llr.size();
	Sp2Decision<typename A::metric_t> r;
	if (cls == TupleClass::SP2Frozen) {
		r.v.assign(T, 0);
		r.u.assign(T, 0);
		r.metric = A::add(g, tuple_penalty<A>(llr, r.v));
	} else if (cls == TupleClass::SP2Reliable) {
		r.v.resize(T);
		for (std::size_t j = 0; j < T; ++j)
			r.v[j] = A::hd(llr[j]);
		r.u = r.v;
		kron_encode_inplace(r.u);
		r.metric = g;
	} else {
		throw std::invalid_argument("sp2_decode: tuple is not SP2");
	}
	return r;
}

} // namespace polarlab
