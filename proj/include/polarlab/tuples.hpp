#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "code_spec.hpp"

namespace polarlab {

enum class TupleClass : std::uint8_t { SP1, SP2Frozen, SP2Reliable, RateInvT };

inline const char *tuple_class_name(TupleClass c)
{
	switch (c) {
	case TupleClass::SP1: return "SP1";
	case TupleClass::SP2Frozen: return "SP2-frozen";
	case TupleClass::SP2Reliable: return "SP2-reliable";
	default: return "rate-1/T";
	}
}

struct Tuple {
	int offset = 0;
	int length = 1;
	TupleClass cls = TupleClass::SP2Frozen;
	int unreliable_pos = -1; // within the tuple; -1 for SP2

	int stage() const { return ilog2(std::size_t(length)); }
	bool expands() const { return cls == TupleClass::SP1 || cls == TupleClass::RateInvT; }
	friend bool operator==(const Tuple &, const Tuple &) = default;
};

// Admissible patterns only: one U + rest R, all F, all R, one U + rest F.
// A single bit is always admissible (a lone U is an SP1).
inline std::optional<TupleClass> classify_block(std::span<const BitClass> b, int *upos = nullptr)
{
	int nf = 0, nr = 0, nu = 0, u = -1;
	for (std::size_t j = 0; j < b.size(); ++j) {
		switch (b[j]) {
		case BitClass::Frozen: ++nf; break;
		case BitClass::Reliable: ++nr; break;
		default: ++nu; u = int(j); break;
		}
	}
	if (upos)
		*upos = u;
	const int T = int(b.size());
	if (nf == T)
		return TupleClass::SP2Frozen;
	if (nr == T)
		return TupleClass::SP2Reliable;
	if (nu == 1 && nr == T - 1)
		return TupleClass::SP1;
	if (nu == 1 && nf == T - 1)
		return TupleClass::RateInvT;
	return std::nullopt;
}

namespace detail {

inline void divide(const CodeSpec &spec, int off, int T, std::vector<Tuple> &out)
{
	int u = -1;
	auto c = classify_block(std::span<const BitClass>(spec.bit_class).subspan(off, T), &u);
	if (c) {
		out.push_back(Tuple{off, T, *c, (*c == TupleClass::SP1 || *c == TupleClass::RateInvT) ? u : -1});
		return;
	}
	divide(spec, off, T / 2, out);
	divide(spec, off + T / 2, T / 2, out);
}

} // namespace detail

// Splits every aligned M-bit block until each piece is admissible. M = 1 gives
// the bit-serial decomposition used by the per-bit engines.
inline std::vector<Tuple> tuple_divide(const CodeSpec &spec, int M)
{
	if (M < 1 || !is_pow2(std::size_t(M)) || M > spec.N)
		throw std::invalid_argument("tuple_divide: M must be a power of two no larger than N");
	std::vector<Tuple> out;
	for (int off = 0; off < spec.N; off += M)
		detail::divide(spec, off, M, out);
	return out;
}

struct CensusRow {
	int sp1 = 0, sp2 = 0, rate1t = 0;
	int total() const { return sp1 + sp2 + rate1t; }
};

// tuple length -> counts per class (SP2 frozen and reliable pooled)
using Census = std::map<int, CensusRow>;

inline Census census(const std::vector<Tuple> &tuples)
{
	Census c;
	for (const auto &t : tuples) {
		auto &row = c[t.length];
		switch (t.cls) {
		case TupleClass::SP1: ++row.sp1; break;
		case TupleClass::RateInvT: ++row.rate1t; break;
		default: ++row.sp2; break;
		}
	}
	return c;
}

} // namespace polarlab
