#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace polarlab {

using Bit = std::uint8_t;
using BitVector = std::vector<Bit>;

inline bool is_pow2(std::size_t v) { return v && !(v & (v - 1)); }

inline int ilog2(std::size_t v)
{
	int r = 0;
	while (v >>= 1)
		++r;
	return r;
}

// x = u * F^{(x)n} in place; F = [1 0; 1 1]. Works on any power-of-two span,
// which is how partial sums and tuple candidates get encoded too.
inline void kron_encode_inplace(std::span<Bit> v)
{
	if (!is_pow2(v.size()))
		throw std::invalid_argument("kron_encode: length is not a power of two");
	const std::size_t N = v.size();
	for (std::size_t h = 1; h < N; h <<= 1)
		for (std::size_t i = 0; i < N; i += 2 * h)
			for (std::size_t j = i; j < i + h; ++j)
				v[j] ^= v[j + h];
}

inline BitVector kron_encode(const BitVector &u, int n)
{
	if (n < 0 || u.size() != (std::size_t(1) << n))
		throw std::invalid_argument("kron_encode: length must be 2^n");
	BitVector x = u;
	kron_encode_inplace(x);
	return x;
}

inline std::string to_string(std::span<const Bit> v)
{
	std::string s;
	s.reserve(v.size());
	for (Bit b : v)
		s.push_back(b ? '1' : '0');
	return s;
}

inline BitVector from_string(const std::string &s)
{
	BitVector v;
	for (char c : s) {
		if (c == '0' || c == '1')
			v.push_back(Bit(c - '0'));
		else
			throw std::invalid_argument("bit string contains '" + std::string(1, c) + "'");
	}
	return v;
}

} // namespace polarlab
