#pragma once

#include <cstdio>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "code_spec.hpp"
#include "tuples.hpp"

namespace polarlab {

// Cycle counts for the stage-m sub-PMU scheme: every leaf tuple costs three
// cycles (penalty, sort, prune), an SP1 one less, an SP2 two less. The full
// MB-DTS variant also walks the trimmed tree below the stage-m root, one
// cycle per node.
struct LmCounts {
	int leaves = 0, sp1 = 0, sp2 = 0, nodes = 0;
};

inline LmCounts lm_counts(const std::vector<Tuple> &tuples, int M)
{
	LmCounts c;
	const int m = ilog2(std::size_t(M));
	std::set<std::pair<int, int>> nodes;
	for (const auto &t : tuples) {
		++c.leaves;
		if (t.cls == TupleClass::SP1)
			++c.sp1;
		else if (t.cls == TupleClass::SP2Frozen || t.cls == TupleClass::SP2Reliable)
			++c.sp2;
		for (int s = t.stage(); s < m; ++s)
			nodes.insert({s, t.offset >> s});
	}
	c.nodes = int(nodes.size());
	return c;
}

inline int lm_cycles(const LmCounts &c, bool simplified)
{
	int d = 3 * c.leaves - c.sp1 - 2 * c.sp2;
	return simplified ? d : d + c.nodes;
}

inline int lm_cycles(const std::vector<Tuple> &tuples, int M, bool simplified)
{
	return lm_cycles(lm_counts(tuples, M), simplified);
}

inline int tuple_lm_cost(const Tuple &t)
{
	switch (t.cls) {
	case TupleClass::SP1: return 2;
	case TupleClass::SP2Frozen:
	case TupleClass::SP2Reliable: return 1;
	default: return 3;
	}
}

// Cycles spent producing the stage-t node LLRs over the whole tree.
// Fully parallel stages (t <= p) process a node per cycle; with look-ahead
// the F node and both G candidates share that cycle. Semi-parallel stages
// need 2^(t-p) cycles per node whatever the schedule.
inline long stage_cycles(int n, int p, int t, bool glah)
{
	if (t > p)
		return 1L << (n - p);
	return glah ? 1L << (n - 1 - t) : 1L << (n - t);
}

struct ScdSplit {
	long below = 0;       // stages [m, split)
	long at_or_above = 0; // stages [max(m, split), n-1]
};

inline ScdSplit scd_cycles(int N, int P, int m, bool glah = true, int split = 3)
{
	const int n = ilog2(std::size_t(N)), p = ilog2(std::size_t(P));
	if (!is_pow2(std::size_t(N)) || !is_pow2(std::size_t(P)) || P > N / 4)
		throw std::invalid_argument("scd_cycles: need powers of two with P <= N/4");
	if (m > p)
		throw std::invalid_argument("scd_cycles: m > log2(P) is not supported");
	ScdSplit r;
	for (int t = m; t < n; ++t)
		(t < split ? r.below : r.at_or_above) += stage_cycles(n, p, t, glah);
	return r;
}

inline long d_pglah(int N, int P)
{
	const int lg = ilog2(std::size_t(N / (4 * P)));
	return N + N / (2 * P) + long(N / P) * lg;
}

inline long d_trd(int N, int P)
{
	const int lg = ilog2(std::size_t(N / (4 * P)));
	return 2L * N + long(N / P) * lg;
}

// Walks the scheduling tree node by node (cross-check for the closed forms).
inline long scd_schedule_walk(int N, int P, bool glah)
{
	const int n = ilog2(std::size_t(N)), p = ilog2(std::size_t(P));
	long cyc = 0;
	// node at stage s spawns an F and a G child at stage s-1
	auto walk = [&](auto &&self, int s) -> void {
		if (s == 0)
			return;
		const int t = s - 1;
		if (t > p)
			cyc += 2L << (t - p);
		else
			cyc += glah ? 1 : 2;
		self(self, t);
		self(self, t);
	};
	walk(walk, n);
	return cyc;
}

inline long fine_tune_saving(int N, int M) { return N / (2 * M); }

struct LatencyReport {
	int N = 0, P = 0, M = 0, m = 0;
	long lm_cycles = 0;
	long scd_below = 0;       // stages m .. 2
	long scd_at_or_above = 0; // stages 3 .. n-1
	long d_fine = 0;
	long d_zero = 0;
	long total = 0;
	long d_trd = 0;
	long d_pglah = 0;

	long total_without_savings() const { return lm_cycles + scd_below + scd_at_or_above; }
};

// Cycles from decoder start until the LM of the tuple holding the first
// information bit, minus the cycles of the direct root-to-that-block path
// (one node per stage, no stage-m merge). The difference is what a decoder
// that jumps straight to the first information bit never spends. Clamped at
// zero; an all-frozen code skips the whole schedule.
inline long zero_prefix_saving(const CodeSpec &spec, const std::vector<Tuple> &tuples, int M, int P)
{
	const int n = spec.n, N = spec.N, m = ilog2(std::size_t(M)), p = ilog2(std::size_t(P));
	const int first = spec.first_info();
	if (first < 0) {
		auto sc = scd_cycles(N, P, m);
		return lm_cycles(tuples, M, true) + sc.below + sc.at_or_above - fine_tune_saving(N, M);
	}
	long elapsed = 0;
	std::size_t cursor = 0;
	bool found = false;
	auto pair_cost = [&](int t) -> long { return t == m ? 0 : (t > p ? 1L << (t - p) : 1); };
	auto g_cost = [&](int t) -> long { return t > p ? 1L << (t - p) : 0; };
	auto walk = [&](auto &&self, int s, int off) -> void {
		if (found)
			return;
		if (s == m) {
			for (; cursor < tuples.size() && tuples[cursor].offset < off + M; ++cursor) {
				const Tuple &t = tuples[cursor];
				if (first >= t.offset && first < t.offset + t.length) {
					found = true;
					return;
				}
				elapsed += tuple_lm_cost(t);
			}
			return;
		}
		const int t = s - 1, h = 1 << t;
		elapsed += pair_cost(t);
		self(self, t, off);
		if (found)
			return;
		elapsed += g_cost(t);
		self(self, t, off + h);
	};
	walk(walk, n, 0);
	long path = 0;
	for (int t = m; t < n; ++t)
		path += t > p ? 1L << (t - p) : 1;
	return std::max(0L, elapsed - path);
}

inline LatencyReport total_latency(const CodeSpec &spec, int M, int P = 64)
{
	LatencyReport r;
	r.N = spec.N;
	r.P = P;
	r.M = M;
	r.m = ilog2(std::size_t(M));
	auto tuples = tuple_divide(spec, M);
	r.lm_cycles = lm_cycles(tuples, M, true);
	auto sc = scd_cycles(spec.N, P, r.m);
	r.scd_below = sc.below;
	r.scd_at_or_above = sc.at_or_above;
	r.d_fine = fine_tune_saving(spec.N, M);
	r.d_zero = zero_prefix_saving(spec, tuples, M, P);
	r.total = r.lm_cycles + r.scd_below + r.scd_at_or_above - r.d_fine - r.d_zero;
	r.d_trd = d_trd(spec.N, P);
	r.d_pglah = d_pglah(spec.N, P);
	if (r.total != r.total_without_savings() - r.d_fine - r.d_zero)
		throw std::logic_error("latency report identity violated");
	return r;
}

inline void to_json(nlohmann::json &j, const LatencyReport &r)
{
	j = nlohmann::json{{"N", r.N}, {"P", r.P}, {"M", r.M}, {"m", r.m},
			   {"lm_cycles", r.lm_cycles}, {"scd_below_stage3", r.scd_below},
			   {"scd_at_or_above_stage3", r.scd_at_or_above}, {"d_fine", r.d_fine},
			   {"d_zero", r.d_zero}, {"total", r.total},
			   {"total_without_savings", r.total_without_savings()},
			   {"d_trd", r.d_trd}, {"d_pglah", r.d_pglah}};
}

// Prior architectures evaluated on the same code.
struct ReferenceRow {
	std::string name;
	long lm = 0, scd_below = 0, scd_at_or_above = 0;
	long total() const { return lm + scd_below + scd_at_or_above; }
};

// Per-bit LLR-based list decoder: traditional SCD schedule plus one LM cycle per information bit.
inline ReferenceRow baseline_reference(const CodeSpec &spec, int P = 64)
{
	auto sc = scd_cycles(spec.N, P, 0, false);
	return {"per-bit LSCD", spec.K, sc.below, sc.at_or_above};
}

// Double-thresholding decoder with selective expansion that resolves bit
// pairs at stage 1: the SCD schedule starts at stage 1, pairs without an
// unreliable bit need no LM cycles, a pair with one unreliable bit takes
// three and a pair with two takes four.
inline ReferenceRow pairwise_dts_reference(const CodeSpec &spec, int P = 64)
{
	auto sc = scd_cycles(spec.N, P, 1, false);
	long lm = 0;
	for (int i = 0; i < spec.N; i += 2) {
		int u = (spec.bit_class[i] == BitClass::Unreliable) + (spec.bit_class[i + 1] == BitClass::Unreliable);
		lm += u == 0 ? 0 : 2 + u;
	}
	return {"pairwise DTS", lm, sc.below, sc.at_or_above};
}

inline std::string format_latency_table(const std::vector<LatencyReport> &rows, const std::vector<ReferenceRow> &refs,
					double freq_mhz = 0)
{
	std::string out;
	char buf[256];
	auto line = [&](const char *label, auto get_ref, auto get_row) {
		std::snprintf(buf, sizeof buf, "%-22s", label);
		out += buf;
		for (const auto &r : refs) {
			std::snprintf(buf, sizeof buf, "%14s", get_ref(r).c_str());
			out += buf;
		}
		for (const auto &r : rows) {
			std::snprintf(buf, sizeof buf, "%10s", get_row(r).c_str());
			out += buf;
		}
		out += '\n';
	};
	auto str = [](long v) { return std::to_string(v); };
	auto dash = [](const auto &) { return std::string("-"); };
	line("", [](const ReferenceRow &r) { return r.name; },
	     [](const LatencyReport &r) { return "M=" + std::to_string(r.M); });
	line("LM", [&](const ReferenceRow &r) { return str(r.lm); }, [&](const LatencyReport &r) { return str(r.lm_cycles); });
	line("SCD < stage 3", [&](const ReferenceRow &r) { return str(r.scd_below); },
	     [&](const LatencyReport &r) { return str(r.scd_below); });
	line("SCD >= stage 3", [&](const ReferenceRow &r) { return str(r.scd_at_or_above); },
	     [&](const LatencyReport &r) { return str(r.scd_at_or_above); });
	line("total w/o saving", [&](const ReferenceRow &r) { return str(r.total()); },
	     [&](const LatencyReport &r) { return str(r.total_without_savings()); });
	line("D_fine", dash, [&](const LatencyReport &r) { return str(r.d_fine); });
	line("D_zero", dash, [&](const LatencyReport &r) { return str(r.d_zero); });
	line("total", [&](const ReferenceRow &r) { return str(r.total()); },
	     [&](const LatencyReport &r) { return str(r.total); });
	if (freq_mhz > 0) {
		auto tp = [&](long cycles) {
			char b[32];
			std::snprintf(b, sizeof b, "%.1f", double(rows.empty() ? 0 : rows.front().N) * freq_mhz / cycles);
			return std::string(b);
		};
		line("throughput Mb/s", [&](const ReferenceRow &r) { return tp(r.total()); },
		     [&](const LatencyReport &r) { return tp(r.total); });
	}
	if (!rows.empty()) {
		std::snprintf(buf, sizeof buf, "SCD schedule (N=%d, P=%d): traditional %ld, look-ahead %ld (%.1f%%)\n",
			      rows.front().N, rows.front().P, rows.front().d_trd, rows.front().d_pglah,
			      100.0 * rows.front().d_pglah / rows.front().d_trd);
		out += buf;
	}
	return out;
}

} // namespace polarlab
