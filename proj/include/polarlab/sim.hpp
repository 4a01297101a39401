#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "channel.hpp"
#include "code_spec.hpp"
#include "list_decoder.hpp"

namespace polarlab {

enum class ArithKind { Fixed, Float };

struct SweepConfig {
	std::string spec_path = "data/pc1024_512_crc24.code";
	std::vector<Scheme> schemes{Scheme::SMBDTS};
	std::vector<int> lists{8};
	std::vector<int> merges{8}; // block sizes for smb-dts / full-mbd; others run with M = 1
	std::vector<double> ebn0{2.0};
	long max_frames = 20000;
	long max_errors = 100;
	std::uint64_t seed = 1;
	int workers = 1;
	std::string output;
	ArithKind arith = ArithKind::Fixed;
	double llr_scale = 1.0;
	DtsVariant smb_variant = DtsVariant::Advance;
};

namespace detail {

inline std::string trim(const std::string &s)
{
	auto b = s.find_first_not_of(" \t\r");
	if (b == std::string::npos)
		return "";
	auto e = s.find_last_not_of(" \t\r");
	return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string &v)
{
	std::vector<std::string> out;
	std::string item;
	std::istringstream ss(v);
	while (std::getline(ss, item, ','))
		if (!trim(item).empty())
			out.push_back(trim(item));
	return out;
}

} // namespace detail

// `key = value` lines, lists comma separated, '#' starts a comment.
inline SweepConfig parse_sweep_config(std::istream &in)
{
	SweepConfig c;
	std::string line;
	int lineno = 0;
	while (std::getline(in, line)) {
		++lineno;
		auto h = line.find('#');
		if (h != std::string::npos)
			line.erase(h);
		line = detail::trim(line);
		if (line.empty())
			continue;
		auto eq = line.find('=');
		if (eq == std::string::npos)
			throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
		const std::string key = detail::trim(line.substr(0, eq));
		const std::string val = detail::trim(line.substr(eq + 1));
		auto items = detail::split_list(val);
		try {
			if (key == "spec")
				c.spec_path = val;
			else if (key == "schemes") {
				c.schemes.clear();
				for (auto &s : items)
					c.schemes.push_back(parse_scheme(s));
			} else if (key == "lists") {
				c.lists.clear();
				for (auto &s : items)
					c.lists.push_back(std::stoi(s));
			} else if (key == "merges") {
				c.merges.clear();
				for (auto &s : items)
					c.merges.push_back(std::stoi(s));
			} else if (key == "ebn0") {
				c.ebn0.clear();
				for (auto &s : items)
					c.ebn0.push_back(std::stod(s));
			} else if (key == "max_frames")
				c.max_frames = std::stol(val);
			else if (key == "max_errors")
				c.max_errors = std::stol(val);
			else if (key == "seed")
				c.seed = std::stoull(val);
			else if (key == "workers")
				c.workers = std::stoi(val);
			else if (key == "output")
				c.output = val;
			else if (key == "arith") {
				if (val == "fixed")
					c.arith = ArithKind::Fixed;
				else if (val == "float")
					c.arith = ArithKind::Float;
				else
					throw std::invalid_argument("arith must be fixed or float");
			} else if (key == "llr_scale")
				c.llr_scale = std::stod(val);
			else if (key == "smb_variant") {
				if (val == "standard")
					c.smb_variant = DtsVariant::Standard;
				else if (val == "advance")
					c.smb_variant = DtsVariant::Advance;
				else
					throw std::invalid_argument("smb_variant must be standard or advance");
			} else
				throw std::invalid_argument("unknown key '" + key + "'");
		} catch (const std::invalid_argument &e) {
			throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
		} catch (const std::out_of_range &) {
			throw std::invalid_argument("config line " + std::to_string(lineno) + ": value out of range");
		}
	}
	if (c.max_errors < 1)
		throw std::invalid_argument("max_errors must be at least 1");
	if (c.ebn0.empty() || c.schemes.empty() || c.lists.empty())
		throw std::invalid_argument("config needs at least one scheme, list size and Eb/N0 point");
	if (c.workers < 1)
		c.workers = 1;
	return c;
}

inline SweepConfig load_sweep_config(const std::string &path)
{
	std::ifstream in(path);
	if (!in)
		throw std::runtime_error("cannot open config " + path);
	return parse_sweep_config(in);
}

struct PointSpec {
	Scheme scheme = Scheme::SMBDTS;
	int L = 8;
	int M = 1;
	double ebn0_db = 2.0;
};

struct BlerPoint {
	std::string scheme;
	int L = 0, M = 1;
	double ebn0_db = 0;
	long frames = 0, block_errors = 0;
	double bler = 0;
	double wall_time = 0; // seconds; the only non-reproducible field
};

// Wilson score interval
inline std::pair<double, double> binomial_ci(long errors, long frames, double z = 1.959963984540054)
{
	if (frames <= 0)
		return {0.0, 1.0};
	const double n = double(frames), p = errors / n, z2 = z * z;
	const double c = (p + z2 / (2 * n)) / (1 + z2 / n);
	const double h = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
	return {errors == 0 ? 0.0 : std::max(0.0, c - h), errors == frames ? 1.0 : std::min(1.0, c + h)};
}

// One-sided exact sign test on the discordant frames of a paired run:
// P(X >= only_b | X ~ Bin(only_a + only_b, 1/2)). Small values mean B fails more often than A.
inline double paired_p_value(long only_a, long only_b)
{
	const long n = only_a + only_b;
	if (n == 0)
		return 1.0;
	double p = 0;
	for (long k = only_b; k <= n; ++k)
		p += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) - n * std::log(2.0));
	return std::min(1.0, p);
}

inline std::vector<PointSpec> expand_points(const SweepConfig &cfg)
{
	std::vector<PointSpec> pts;
	for (double e : cfg.ebn0)
		for (Scheme s : cfg.schemes)
			for (int L : cfg.lists) {
				if (s == Scheme::SMBDTS || s == Scheme::FullMBD) {
					for (int M : cfg.merges)
						pts.push_back({s, L, M, e});
				} else {
					pts.push_back({s, L, 1, e});
				}
			}
	return pts;
}

namespace detail {

struct FrameWork {
	BitVector msg, u, x;
	std::vector<double> llr;
};

// Draws frame i: message bits then channel noise, all from stream (seed, i).
inline void make_frame(const CodeSpec &spec, std::uint64_t seed, long i, double ebn0, FrameWork &w)
{
	auto rng = frame_rng(seed, std::uint64_t(i));
	w.msg.resize(spec.K - spec.r);
	for (auto &b : w.msg)
		b = Bit(rng() >> 63);
	w.u = place_message(spec, w.msg);
	w.x = w.u;
	kron_encode_inplace(w.x);
	w.llr = transmit(w.x, ebn0, spec.rate(), rng).rx_llrs;
}

inline bool same_info(const CodeSpec &spec, const BitVector &a, const BitVector &b)
{
	for (int i = 0; i < spec.N; ++i)
		if (!spec.frozen(i) && a[i] != b[i])
			return false;
	return true;
}

template <class A>
struct FrameDecoder {
	ListDecoder<A> dec;
	double scale;
	std::vector<typename A::llr_t> q;

	FrameDecoder(const CodeSpec &spec, const ListConfig &lc, double s) : dec(spec, lc), scale(s) {}

	BitVector operator()(const std::vector<double> &llr)
	{
		q.resize(llr.size());
		for (std::size_t i = 0; i < llr.size(); ++i) {
			if constexpr (std::is_same_v<A, FixedArith>)
				q[i] = quantize(llr[i], QuantizerConfig{scale});
			else
				q[i] = llr[i];
		}
		return dec.decode(q).u;
	}
};

} // namespace detail

// Error flag per frame for frames [0, frames), in frame order. With
// early stop the vector ends at the frame that brought the count to
// max_errors. Workers take contiguous chunks; the result is independent
// of the worker count.
inline std::vector<char> simulate_point(const CodeSpec &spec, const PointSpec &pt, const SweepConfig &cfg,
					bool early_stop = true, const std::atomic<bool> *cancel = nullptr)
{
	std::vector<char> err;
	if (cfg.max_frames <= 0)
		return err;
	ListConfig lc;
	lc.L = pt.L;
	lc.scheme = pt.scheme;
	lc.M = pt.M;
	lc.smb_variant = cfg.smb_variant;
	const int W = std::max(1, cfg.workers);
	const long chunk = 64;
	const long round = std::max<long>(chunk * W * 4, 1024);
	long errors = 0;
	for (long base = 0; base < cfg.max_frames; base += round) {
		const long end = std::min(cfg.max_frames, base + round);
		std::vector<char> r(end - base, 0);
		std::atomic<long> next{base};
		auto work = [&]() {
			detail::FrameWork fw;
			std::function<BitVector(const std::vector<double> &)> decode;
			if (cfg.arith == ArithKind::Fixed)
				decode = detail::FrameDecoder<FixedArith>(spec, lc, cfg.llr_scale);
			else
				decode = detail::FrameDecoder<FloatArith>(spec, lc, cfg.llr_scale);
			for (;;) {
				long b = next.fetch_add(chunk);
				if (b >= end)
					break;
				for (long i = b; i < std::min(end, b + chunk); ++i) {
					detail::make_frame(spec, cfg.seed, i, pt.ebn0_db, fw);
					r[i - base] = !detail::same_info(spec, decode(fw.llr), fw.u);
				}
			}
		};
		if (W == 1) {
			work();
		} else {
			std::vector<std::thread> pool;
			for (int w = 0; w < W; ++w)
				pool.emplace_back(work);
			for (auto &t : pool)
				t.join();
		}
		for (long i = 0; i < end - base; ++i) {
			err.push_back(r[i]);
			errors += r[i];
			if (early_stop && errors >= cfg.max_errors)
				return err;
		}
		if (cancel && cancel->load())
			break;
	}
	return err;
}

inline BlerPoint summarize(const PointSpec &pt, const std::vector<char> &err, double wall)
{
	BlerPoint p;
	p.scheme = scheme_name(pt.scheme);
	p.L = pt.L;
	p.M = pt.M;
	p.ebn0_db = pt.ebn0_db;
	p.frames = long(err.size());
	p.block_errors = long(std::count(err.begin(), err.end(), 1));
	p.bler = p.frames ? double(p.block_errors) / p.frames : 0.0;
	p.wall_time = wall;
	return p;
}

inline std::vector<BlerPoint> run_sweep(const SweepConfig &cfg, const CodeSpec &spec,
					const std::function<void(const BlerPoint &)> &on_point = {},
					const std::atomic<bool> *cancel = nullptr)
{
	std::vector<BlerPoint> out;
	if (cfg.max_frames <= 0)
		return out;
	for (const auto &pt : expand_points(cfg)) {
		auto t0 = std::chrono::steady_clock::now();
		auto err = simulate_point(spec, pt, cfg, true, cancel);
		double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
		out.push_back(summarize(pt, err, wall));
		if (on_point)
			on_point(out.back());
		if (cancel && cancel->load())
			break;
	}
	return out;
}

inline std::vector<BlerPoint> run_sweep(const SweepConfig &cfg)
{
	return run_sweep(cfg, load_codespec(cfg.spec_path));
}

inline constexpr const char *kCsvHeader =
	"# polarlab bler v1\nscheme,L,M,ebn0_db,frames,block_errors,bler,ci_low,ci_high,wall_time_s\n";

inline std::string csv_row(const BlerPoint &p)
{
	auto [lo, hi] = binomial_ci(p.block_errors, p.frames);
	char buf[256];
	std::snprintf(buf, sizeof buf, "%s,%d,%d,%.3f,%ld,%ld,%.6e,%.6e,%.6e,%.3f\n", p.scheme.c_str(), p.L, p.M,
		      p.ebn0_db, p.frames, p.block_errors, p.bler, lo, hi, p.wall_time);
	return buf;
}

inline std::string to_csv(const std::vector<BlerPoint> &pts)
{
	std::string s = kCsvHeader;
	for (const auto &p : pts)
		s += csv_row(p);
	return s;
}

inline nlohmann::json to_json_doc(const std::vector<BlerPoint> &pts)
{
	nlohmann::json rows = nlohmann::json::array();
	for (const auto &p : pts) {
		auto [lo, hi] = binomial_ci(p.block_errors, p.frames);
		rows.push_back({{"scheme", p.scheme}, {"L", p.L}, {"M", p.M}, {"ebn0_db", p.ebn0_db},
				{"frames", p.frames}, {"block_errors", p.block_errors}, {"bler", p.bler},
				{"ci_low", lo}, {"ci_high", hi}, {"wall_time_s", p.wall_time}});
	}
	// curves: one (ebn0, bler) series per scheme/L/M for plotting
	std::map<std::string, nlohmann::json> curves;
	for (const auto &p : pts) {
		std::string key = p.scheme + "/L" + std::to_string(p.L) + "/M" + std::to_string(p.M);
		curves[key].push_back({p.ebn0_db, p.bler});
	}
	return {{"format", "polarlab bler v1"}, {"points", rows}, {"curves", curves}};
}

struct Comparison {
	PointSpec a, b;
	long frames = 0;
	long errors_a = 0, errors_b = 0;
	long only_a = 0, only_b = 0; // discordant frames
	double bler_a = 0, bler_b = 0;
	std::pair<double, double> ci_a, ci_b;

	double delta() const { return bler_b - bler_a; }
	bool overlap() const { return ci_a.first <= ci_b.second && ci_b.first <= ci_a.second; }
};

inline Comparison compare_runs(const PointSpec &a, const std::vector<char> &ea, const PointSpec &b,
			       const std::vector<char> &eb)
{
	if (ea.size() != eb.size())
		throw std::invalid_argument("compare_runs: runs cover different frame counts");
	Comparison c;
	c.a = a;
	c.b = b;
	c.frames = long(ea.size());
	for (std::size_t i = 0; i < ea.size(); ++i) {
		c.errors_a += ea[i];
		c.errors_b += eb[i];
		c.only_a += ea[i] && !eb[i];
		c.only_b += eb[i] && !ea[i];
	}
	c.bler_a = c.frames ? double(c.errors_a) / c.frames : 0;
	c.bler_b = c.frames ? double(c.errors_b) / c.frames : 0;
	c.ci_a = binomial_ci(c.errors_a, c.frames);
	c.ci_b = binomial_ci(c.errors_b, c.frames);
	return c;
}

// Paired runs (same frames, no early stop) of every point against the first
// scheme of the config at the same (L, Eb/N0).
inline std::vector<Comparison> compare_schemes(const SweepConfig &cfg, const CodeSpec &spec)
{
	std::vector<Comparison> out;
	auto pts = expand_points(cfg);
	std::map<std::pair<int, double>, std::pair<PointSpec, std::vector<char>>> base;
	for (const auto &pt : pts) {
		auto err = simulate_point(spec, pt, cfg, false);
		auto key = std::make_pair(pt.L, pt.ebn0_db);
		auto it = base.find(key);
		if (it == base.end()) {
			base.emplace(key, std::make_pair(pt, err));
			continue;
		}
		out.push_back(compare_runs(it->second.first, it->second.second, pt, err));
	}
	return out;
}

inline std::string format_comparisons(const std::vector<Comparison> &cs)
{
	std::string s = "# polarlab compare v1\nL,ebn0_db,scheme_a,M_a,scheme_b,M_b,frames,errors_a,errors_b,bler_a,bler_b,"
			"delta,ci_a_low,ci_a_high,ci_b_low,ci_b_high,only_a,only_b,ci_overlap\n";
	char buf[512];
	for (const auto &c : cs) {
		std::snprintf(buf, sizeof buf, "%d,%.3f,%s,%d,%s,%d,%ld,%ld,%ld,%.6e,%.6e,%.6e,%.6e,%.6e,%.6e,%.6e,%ld,%ld,%d\n",
			      c.a.L, c.a.ebn0_db, scheme_name(c.a.scheme), c.a.M, scheme_name(c.b.scheme), c.b.M, c.frames,
			      c.errors_a, c.errors_b, c.bler_a, c.bler_b, c.delta(), c.ci_a.first, c.ci_a.second,
			      c.ci_b.first, c.ci_b.second, c.only_a, c.only_b, int(c.overlap()));
		s += buf;
	}
	return s;
}

} // namespace polarlab
