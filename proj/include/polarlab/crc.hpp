#pragma once

#include <cstdint>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>

#include "bits.hpp"

namespace polarlab {

// Generator polynomial as coefficient bits, highest degree first.
// poly.size() == degree + 1 and poly.front() == 1.
using CrcPoly = BitVector;

inline int crc_degree(const CrcPoly &poly) { return int(poly.size()) - 1; }

// Accepts the hex both with and without the x^r term: 0x1864cfb (25 bits)
// and 0x864cfb both give CRC-24-Radix-64 for r = 24.
inline CrcPoly parse_crc_poly(const std::string &hex, int r)
{
	if (r < 0 || r > 63)
		throw std::invalid_argument("crc degree out of range");
	std::uint64_t v = std::stoull(hex, nullptr, 16);
	if (r == 0) {
		if (v > 1)
			throw std::invalid_argument("crc polynomial given for r = 0");
		return CrcPoly{1};
	}
	if ((v >> r) == 0)
		v |= std::uint64_t(1) << r;
	else if ((v >> r) != 1)
		throw std::invalid_argument("crc polynomial " + hex + " has degree above " + std::to_string(r));
	CrcPoly p(r + 1);
	for (int i = 0; i <= r; ++i)
		p[i] = Bit((v >> (r - i)) & 1);
	return p;
}

inline std::string crc_poly_hex(const CrcPoly &poly)
{
	std::uint64_t v = 0;
	for (Bit b : poly)
		v = (v << 1) | b;
	char buf[32];
	std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(v));
	return buf;
}

// remainder of message * x^r mod poly, MSB first
inline BitVector crc_remainder(std::span<const Bit> message, const CrcPoly &poly)
{
	const int r = crc_degree(poly);
	if (r < 1)
		throw std::invalid_argument("crc_remainder: polynomial degree must be >= 1");
	if (message.empty())
		throw std::invalid_argument("crc_remainder: empty message");
	std::uint64_t low = 0;
	for (int i = 1; i <= r; ++i)
		low = (low << 1) | poly[i];
	const std::uint64_t mask = r == 64 ? ~0ull : (std::uint64_t(1) << r) - 1;
	std::uint64_t reg = 0;
	for (Bit m : message) {
		std::uint64_t fb = ((reg >> (r - 1)) ^ m) & 1;
		reg = ((reg << 1) & mask) ^ (low & (0 - fb));
	}
	BitVector out(r);
	for (int i = 0; i < r; ++i)
		out[i] = Bit((reg >> (r - 1 - i)) & 1);
	return out;
}

inline BitVector crc_attach(std::span<const Bit> message, const CrcPoly &poly)
{
	BitVector out(message.begin(), message.end());
	if (crc_degree(poly) == 0)
		return out;
	BitVector rem = crc_remainder(message, poly);
	out.insert(out.end(), rem.begin(), rem.end());
	return out;
}

// Codeword-style check: message||checksum must divide evenly.
inline bool crc_check(std::span<const Bit> word, const CrcPoly &poly)
{
	const int r = crc_degree(poly);
	if (r == 0)
		return true;
	if (int(word.size()) <= r)
		return false;
	auto msg = word.first(word.size() - r);
	BitVector rem = crc_remainder(msg, poly);
	for (int i = 0; i < r; ++i)
		if (rem[i] != word[word.size() - r + i])
			return false;
	return true;
}

} // namespace polarlab
