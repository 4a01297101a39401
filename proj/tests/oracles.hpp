#pragma once
// Slow, independent reference implementations used only by the tests.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <polarlab/bits.hpp>
#include <polarlab/code_spec.hpp>
#include <polarlab/llr.hpp>

namespace oracle {

using polarlab::Bit;
using polarlab::BitVector;

// explicit F^{(x)n} generator matrix and a GF(2) vector-matrix product
inline std::vector<BitVector> kron_matrix(int n)
{
	std::vector<BitVector> G{{1}};
	for (int s = 0; s < n; ++s) {
		const std::size_t m = G.size();
		std::vector<BitVector> H(2 * m, BitVector(2 * m, 0));
		for (std::size_t i = 0; i < m; ++i)
			for (std::size_t j = 0; j < m; ++j) {
				H[i][j] = G[i][j];
				H[i + m][j] = G[i][j];
				H[i + m][j + m] = G[i][j];
			}
		G.swap(H);
	}
	return G;
}

inline BitVector matmul(const BitVector &u, const std::vector<BitVector> &G)
{
	BitVector x(G.size(), 0);
	for (std::size_t i = 0; i < u.size(); ++i)
		if (u[i])
			for (std::size_t j = 0; j < x.size(); ++j)
				x[j] ^= G[i][j];
	return x;
}

// polynomial long division on the full dividend m(x) * x^r
inline BitVector crc_long_division(const BitVector &msg, const BitVector &poly)
{
	const int r = int(poly.size()) - 1;
	BitVector d = msg;
	d.resize(msg.size() + r, 0);
	for (std::size_t i = 0; i < msg.size(); ++i)
		if (d[i])
			for (int k = 0; k <= r; ++k)
				d[i + k] ^= poly[k];
	return BitVector(d.end() - r, d.end());
}

// Λ_i straight from the recursive definition (no shared memories):
// left half sees f(L_j, L_{j+h}), right half g(L_j, L_{j+h}, x_j) where x
// encodes the decided left half.
template <class A>
typename A::llr_t lambda(const std::vector<typename A::llr_t> &L, std::span<const Bit> prefix, int i)
{
	const std::size_t N = L.size();
	if (N == 1)
		return L[0];
	const std::size_t h = N / 2;
	std::vector<typename A::llr_t> sub(h);
	if (std::size_t(i) < h) {
		for (std::size_t j = 0; j < h; ++j)
			sub[j] = A::f(L[j], L[j + h]);
		return lambda<A>(sub, prefix.first(i), i);
	}
	BitVector x(prefix.begin(), prefix.begin() + h);
	polarlab::kron_encode_inplace(x);
	for (std::size_t j = 0; j < h; ++j)
		sub[j] = A::g(L[j], L[j + h], x[j]);
	return lambda<A>(sub, prefix.subspan(h, i - h), int(i - h));
}

template <class A>
BitVector sc_decode(const std::vector<typename A::llr_t> &L, const std::vector<bool> &frozen)
{
	BitVector u(L.size(), 0);
	for (std::size_t i = 0; i < L.size(); ++i) {
		auto lam = lambda<A>(L, std::span<const Bit>(u.data(), i), int(i));
		u[i] = frozen[i] ? 0 : A::hd(lam);
	}
	return u;
}

// accumulated per-bit penalty of a full decision vector u (every bit, frozen included)
template <class A>
typename A::metric_t sc_metric(const std::vector<typename A::llr_t> &L, const BitVector &u)
{
	typename A::metric_t m{};
	for (std::size_t i = 0; i < L.size(); ++i) {
		auto lam = lambda<A>(L, std::span<const Bit>(u.data(), i), int(i));
		if (u[i] != A::hd(lam))
			m = A::add(m, A::mag(lam));
	}
	return m;
}

// Best tuple decision with the unreliable bit fixed to c, by enumerating
// every u consistent with the frozen positions.
template <class A>
struct TupleOptimum {
	typename A::metric_t penalty{};
	BitVector u;
	int count = 0; // number of minimisers
};

template <class A>
TupleOptimum<A> tuple_ml(std::span<const typename A::llr_t> L, const std::vector<polarlab::BitClass> &cls, int q, Bit c)
{
	const int T = int(L.size());
	TupleOptimum<A> best;
	bool have = false;
	for (std::uint32_t w = 0; w < (1u << T); ++w) {
		BitVector u(T);
		bool ok = true;
		for (int j = 0; j < T; ++j) {
			u[j] = Bit((w >> (T - 1 - j)) & 1);
			if (cls[j] == polarlab::BitClass::Frozen && u[j])
				ok = false;
		}
		if (!ok || u[q] != c)
			continue;
		BitVector v = u;
		polarlab::kron_encode_inplace(v);
		typename A::metric_t p{};
		for (int j = 0; j < T; ++j)
			if (v[j] != A::hd(L[j]))
				p = A::add(p, A::mag(L[j]));
		if (!have || p < best.penalty) {
			best.penalty = p;
			best.u = u;
			best.count = 1;
			have = true;
		} else if (p == best.penalty) {
			++best.count;
		}
	}
	return best;
}

// Bit-by-bit decoding of one tuple with the unreliable bit forced to c:
// frozen -> 0, reliable -> hard decision (free), unreliable -> c.
template <class A>
typename A::metric_t serial_tuple_metric(const std::vector<typename A::llr_t> &L, const std::vector<polarlab::BitClass> &cls,
					 Bit c, BitVector *u_out = nullptr)
{
	BitVector u(L.size(), 0);
	typename A::metric_t m{};
	for (std::size_t i = 0; i < L.size(); ++i) {
		auto lam = lambda<A>(L, std::span<const Bit>(u.data(), i), int(i));
		Bit h = A::hd(lam);
		switch (cls[i]) {
		case polarlab::BitClass::Frozen: u[i] = 0; break;
		case polarlab::BitClass::Reliable: u[i] = h; break;
		default: u[i] = c; break;
		}
		if (u[i] != h)
			m = A::add(m, A::mag(lam));
	}
	if (u_out)
		*u_out = u;
	return m;
}

} // namespace oracle
