#pragma once

#include <algorithm>
#include <functional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "code_spec.hpp"
#include "crc.hpp"
#include "llr.hpp"
#include "path_metric.hpp"
#include "tuples.hpp"

namespace polarlab {

enum class Scheme { ExactSort, DTS, DTSAdvance, SMBDTS, FullMBD };

inline const char *scheme_name(Scheme s)
{
	switch (s) {
	case Scheme::ExactSort: return "exact";
	case Scheme::DTS: return "dts";
	case Scheme::DTSAdvance: return "dts-advance";
	case Scheme::SMBDTS: return "smb-dts";
	default: return "full-mbd";
	}
}

inline Scheme parse_scheme(const std::string &s)
{
	for (Scheme c : {Scheme::ExactSort, Scheme::DTS, Scheme::DTSAdvance, Scheme::SMBDTS, Scheme::FullMBD})
		if (s == scheme_name(c))
			return c;
	throw std::invalid_argument("unknown scheme '" + s + "'");
}

enum class CopyPolicy { Lazy, Deep };

struct ListConfig {
	int L = 8;
	Scheme scheme = Scheme::ExactSort;
	int M = 1; // tuple block size for SMBDTS / FullMBD
	DtsVariant smb_variant = DtsVariant::Advance;
	int rt_index = -1; // overrides the rejection index when >= 0
	CopyPolicy copy = CopyPolicy::Lazy;
};

struct DecodeResult {
	BitVector u;
	bool pass = false;
	double metric = 0;
	int path = 0; // position of the chosen path in the final list
};

struct PruneEvent {
	int offset = 0, length = 0;
	std::vector<double> metrics; // expanded, parent-major
	std::vector<int> parents;
	bool thresholds = false;
	double at = 0, rt = 0;
	std::vector<int> survivors; // ascending entry index
	int L = 0;
};

struct StepEvent {
	int offset = 0, length = 0;
	std::vector<double> metrics; // per active path, list order
	std::vector<int> parents;    // list position of each path's parent before the step
};

struct Observer {
	std::function<void(const PruneEvent &)> on_prune;
	std::function<void(const StepEvent &)> on_step;
};

inline void to_json(nlohmann::json &j, const PruneEvent &e)
{
	j = nlohmann::json{{"offset", e.offset}, {"length", e.length}, {"L", e.L},
			   {"metrics", e.metrics}, {"parents", e.parents}, {"survivors", e.survivors}};
	if (e.thresholds) {
		j["at"] = e.at;
		j["rt"] = e.rt;
	}
}

inline void from_json(const nlohmann::json &j, PruneEvent &e)
{
	j.at("offset").get_to(e.offset);
	j.at("length").get_to(e.length);
	j.at("L").get_to(e.L);
	j.at("metrics").get_to(e.metrics);
	j.at("parents").get_to(e.parents);
	j.at("survivors").get_to(e.survivors);
	e.thresholds = j.contains("at");
	if (e.thresholds) {
		j.at("at").get_to(e.at);
		j.at("rt").get_to(e.rt);
	}
}

// Observer that appends one JSON object per pruning event.
inline Observer json_event_log(std::ostream &os)
{
	Observer o;
	o.on_prune = [&os](const PruneEvent &e) { os << nlohmann::json(e).dump() << '\n'; };
	return o;
}

// CRC-aided list SC decoder. All paths walk the scheduling tree in lockstep;
// the leaves are the tuples of tuple_divide (M = 1 for the per-bit engines).
// Per-stage LLR/partial-sum banks are shared between paths and copied on
// write (reference counted), unless CopyPolicy::Deep is chosen.
template <class A = FixedArith>
class ListDecoder {
public:
	using llr_t = typename A::llr_t;
	using metric_t = typename A::metric_t;

	Observer observer;

	ListDecoder(const CodeSpec &spec, ListConfig cfg) : spec_(spec), cfg_(cfg)
	{
		spec_.validate();
		if (cfg_.L < 1 || !is_pow2(std::size_t(cfg_.L)))
			throw std::invalid_argument("list size must be a power of two");
		n_ = spec_.n;
		N_ = spec_.N;
		L_ = cfg_.L;
		switch (cfg_.scheme) {
		case Scheme::SMBDTS:
			tuples_ = tuple_divide(spec_, cfg_.M);
			break;
		case Scheme::FullMBD:
			if (cfg_.M < 1 || !is_pow2(std::size_t(cfg_.M)) || cfg_.M > N_ || cfg_.M > 8)
				throw std::invalid_argument("FullMBD block size must be a power of two, at most min(N, 8)");
			mbd_stage_ = ilog2(std::size_t(cfg_.M));
			break;
		default:
			tuples_ = tuple_divide(spec_, 1);
			break;
		}
		llr_.resize(n_ + 1);
		ps_.resize(n_ + 1);
		ref_.resize(n_ + 1);
		free_.resize(n_ + 1);
		for (int s = 0; s <= n_; ++s) {
			if (s < n_)
				llr_[s].resize(std::size_t(L_) << s);
			ps_[s].resize(std::size_t(L_) << s);
			ref_[s].assign(L_, 0);
		}
		bank_.assign(std::size_t(L_) * (n_ + 1), 0);
		metric_.assign(L_, metric_t{});
		u_.assign(std::size_t(L_) * N_, 0);
		const int maxT = cfg_.scheme == Scheme::FullMBD ? cfg_.M : max_tuple_len();
		const int fan = cfg_.scheme == Scheme::FullMBD ? 1 << cfg_.M : 2;
		const std::size_t cap = std::size_t(L_) * fan;
		c_metric_.resize(cap);
		c_parent_.resize(cap);
		c_v_.resize(cap * maxT);
		c_u_.resize(cap * maxT);
	}

	const std::vector<Tuple> &tuples() const { return tuples_; }
	const ListConfig &config() const { return cfg_; }

	DecodeResult decode(std::span<const llr_t> ch)
	{
		if (int(ch.size()) != N_)
			throw std::invalid_argument("lscd_decode: frame length differs from N");
		ch_ = ch.data();
		reset();
		cursor_ = 0;
		node(n_, 0);
		return select();
	}

	// number of live banks at stage s (for consistency checks)
	int live_banks(int s) const { return L_ - int(free_[s].size()); }
	bool refcounts_consistent() const
	{
		for (int s = 0; s <= n_; ++s) {
			std::vector<int> cnt(L_, 0);
			for (int slot : active_)
				++cnt[bank(slot, s)];
			for (int b = 0; b < L_; ++b)
				if (cnt[b] != ref_[s][b])
					return false;
		}
		return true;
	}

private:
	int max_tuple_len() const
	{
		int m = 1;
		for (const auto &t : tuples_)
			m = std::max(m, t.length);
		return m;
	}

	int &bank(int slot, int s) { return bank_[std::size_t(slot) * (n_ + 1) + s]; }
	int bank(int slot, int s) const { return bank_[std::size_t(slot) * (n_ + 1) + s]; }
	llr_t *llr_at(int s, int b) { return llr_[s].data() + (std::size_t(b) << s); }
	Bit *ps_at(int s, int b) { return ps_[s].data() + (std::size_t(b) << s); }
	const llr_t *input(int slot, int s) { return s == n_ ? ch_ : llr_at(s, bank(slot, s)); }
	Bit *u_of(int slot) { return u_.data() + std::size_t(slot) * N_; }

	int acquire(int s)
	{
		int b = free_[s].back();
		free_[s].pop_back();
		ref_[s][b] = 1;
		return b;
	}

	void reset()
	{
		for (int s = 0; s <= n_; ++s) {
			free_[s].clear();
			for (int b = L_ - 1; b >= 0; --b)
				free_[s].push_back(b);
			std::fill(ref_[s].begin(), ref_[s].end(), 0);
		}
		free_slots_.clear();
		for (int l = L_ - 1; l >= 1; --l)
			free_slots_.push_back(l);
		active_.assign(1, 0);
		for (int s = 0; s <= n_; ++s)
			bank(0, s) = acquire(s);
		metric_[0] = metric_t{};
	}

	void release(int slot)
	{
		for (int s = 0; s <= n_; ++s) {
			int b = bank(slot, s);
			if (--ref_[s][b] == 0)
				free_[s].push_back(b);
		}
		free_slots_.push_back(slot);
	}

	// private bank at stage s; contents are about to be overwritten
	int fresh(int slot, int s)
	{
		int &b = bank(slot, s);
		if (ref_[s][b] == 1)
			return b;
		--ref_[s][b];
		b = acquire(s);
		return b;
	}

	// private bank at stage s keeping the current contents
	int writable(int slot, int s)
	{
		int &b = bank(slot, s);
		if (ref_[s][b] == 1)
			return b;
		--ref_[s][b];
		int nb = acquire(s);
		const std::size_t w = std::size_t(1) << s;
		if (s < n_)
			std::copy_n(llr_at(s, b), w, llr_at(s, nb));
		std::copy_n(ps_at(s, b), w, ps_at(s, nb));
		b = nb;
		return nb;
	}

	int clone(int slot, int upto)
	{
		int c = free_slots_.back();
		free_slots_.pop_back();
		for (int s = 0; s <= n_; ++s) {
			int b = bank(slot, s);
			if (cfg_.copy == CopyPolicy::Lazy) {
				bank(c, s) = b;
				++ref_[s][b];
			} else {
				int nb = acquire(s);
				const std::size_t w = std::size_t(1) << s;
				if (s < n_)
					std::copy_n(llr_at(s, b), w, llr_at(s, nb));
				std::copy_n(ps_at(s, b), w, ps_at(s, nb));
				bank(c, s) = nb;
			}
		}
		metric_[c] = metric_[slot];
		std::copy_n(u_of(slot), upto, u_of(c));
		return c;
	}

	void node(int s, int off)
	{
		if (cfg_.scheme == Scheme::FullMBD) {
			if (s == mbd_stage_) {
				mbd_block(s, off);
				return;
			}
		} else if (cursor_ < tuples_.size() && tuples_[cursor_].offset == off &&
			   tuples_[cursor_].length == (1 << s)) {
			leaf(tuples_[cursor_++], s);
			return;
		}
		const int h = 1 << (s - 1);
		for (int slot : active_) {
			const llr_t *in = input(slot, s);
			llr_t *out = llr_at(s - 1, fresh(slot, s - 1));
			for (int j = 0; j < h; ++j)
				out[j] = A::f(in[j], in[j + h]);
		}
		node(s - 1, off);
		for (int slot : active_) {
			Bit *ps = ps_at(s, writable(slot, s));
			std::copy_n(ps_at(s - 1, bank(slot, s - 1)), h, ps);
			const llr_t *in = input(slot, s);
			llr_t *out = llr_at(s - 1, fresh(slot, s - 1));
			for (int j = 0; j < h; ++j)
				out[j] = A::g(in[j], in[j + h], ps[j]);
		}
		node(s - 1, off + h);
		if (s == n_)
			return;
		for (int slot : active_) {
			Bit *ps = ps_at(s, writable(slot, s));
			const Bit *right = ps_at(s - 1, bank(slot, s - 1));
			for (int j = 0; j < h; ++j) {
				ps[j] ^= right[j];
				ps[j + h] = right[j];
			}
		}
	}

	// Candidate e: parent list position c_parent_[e], metric, V and u (T bits each).
	void leaf(const Tuple &t, int s)
	{
		const int T = t.length;
		const int na = int(active_.size());
		int ne = 0;
		for (int i = 0; i < na; ++i) {
			const int slot = active_[i];
			const llr_t *lam = input(slot, s);
			const metric_t g = metric_[slot];
			if (!t.expands()) {
				Bit *v = &c_v_[std::size_t(ne) * T];
				Bit *u = &c_u_[std::size_t(ne) * T];
				metric_t d{};
				for (int j = 0; j < T; ++j) {
					Bit h = A::hd(lam[j]);
					if (t.cls == TupleClass::SP2Frozen) {
						v[j] = 0;
						if (h)
							d = A::add(d, A::mag(lam[j]));
					} else {
						v[j] = h;
					}
				}
				std::copy_n(v, T, u);
				if (t.cls == TupleClass::SP2Frozen)
					std::fill_n(u, T, Bit(0));
				else
					kron_encode_inplace(std::span<Bit>(u, T));
				c_metric_[ne] = A::add(g, d);
				c_parent_[ne] = i;
				++ne;
				continue;
			}
			if (t.cls == TupleClass::SP1)
				sp1_candidates(lam, T, t.unreliable_pos, g, ne);
			else
				rate1t_candidates(lam, T, t.unreliable_pos, g, ne);
			c_parent_[ne] = i;
			c_parent_[ne + 1] = i;
			ne += 2;
		}
		finish_step(t.offset, T, s, ne, t.expands());
	}

	void sp1_candidates(const llr_t *lam, int T, int q, metric_t g, int e)
	{
		int k = -1;
		Bit eta = 0;
		Bit *v0 = &c_v_[std::size_t(e) * T];
		Bit *v1 = v0 + T;
		for (int j = 0; j < T; ++j) {
			Bit h = A::hd(lam[j]);
			v0[j] = v1[j] = h;
			if ((j & q) != q)
				continue;
			eta ^= h;
			if (k < 0 || A::mag(lam[j]) < A::mag(lam[k]))
				k = j;
		}
		// candidate 0 carries u_q = 0
		if (eta) {
			v0[k] ^= 1;
			c_metric_[e] = A::add(g, A::mag(lam[k]));
			c_metric_[e + 1] = g;
		} else {
			v1[k] ^= 1;
			c_metric_[e] = g;
			c_metric_[e + 1] = A::add(g, A::mag(lam[k]));
		}
		for (int c = 0; c < 2; ++c) {
			Bit *u = &c_u_[std::size_t(e + c) * T];
			std::copy_n(v0 + c * T, T, u);
			kron_encode_inplace(std::span<Bit>(u, T));
		}
	}

	void rate1t_candidates(const llr_t *lam, int T, int q, metric_t g, int e)
	{
		for (int c = 0; c < 2; ++c) {
			Bit *u = &c_u_[std::size_t(e + c) * T];
			Bit *v = &c_v_[std::size_t(e + c) * T];
			std::fill_n(u, T, Bit(0));
			u[q] = Bit(c);
			std::copy_n(u, T, v);
			kron_encode_inplace(std::span<Bit>(v, T));
			metric_t d{};
			for (int j = 0; j < T; ++j)
				if (v[j] != A::hd(lam[j]))
					d = A::add(d, A::mag(lam[j]));
			c_metric_[e + c] = A::add(g, d);
		}
	}

	// Exhaustive oracle: every message of the block, scored by summed per-bit penalties.
	void mbd_block(int s, int off)
	{
		const int T = 1 << s;
		std::vector<int> info;
		for (int j = 0; j < T; ++j)
			if (!spec_.frozen(off + j))
				info.push_back(j);
		const int k = int(info.size());
		const int na = int(active_.size());
		int ne = 0;
		for (int i = 0; i < na; ++i) {
			const int slot = active_[i];
			const llr_t *lam = input(slot, s);
			for (int a = 0; a < (1 << k); ++a) {
				Bit *u = &c_u_[std::size_t(ne) * T];
				Bit *v = &c_v_[std::size_t(ne) * T];
				std::fill_n(u, T, Bit(0));
				for (int b = 0; b < k; ++b)
					u[info[b]] = Bit((a >> (k - 1 - b)) & 1);
				std::copy_n(u, T, v);
				kron_encode_inplace(std::span<Bit>(v, T));
				metric_t d{};
				for (int j = 0; j < T; ++j)
					if (v[j] != A::hd(lam[j]))
						d = A::add(d, A::mag(lam[j]));
				c_metric_[ne] = A::add(metric_[slot], d);
				c_parent_[ne] = i;
				++ne;
			}
		}
		finish_step(off, T, s, ne, k > 0);
	}

	std::vector<int> select_survivors(int ne, int T, int off)
	{
		std::span<const metric_t> m(c_metric_.data(), ne);
		if (ne <= L_) {
			std::vector<int> all(ne);
			for (int e = 0; e < ne; ++e)
				all[e] = e;
			return all;
		}
		PruneEvent ev;
		std::vector<int> keep;
		const bool dts = cfg_.scheme == Scheme::DTS || cfg_.scheme == Scheme::DTSAdvance ||
				 cfg_.scheme == Scheme::SMBDTS;
		if (!dts) {
			keep = prune_exact<metric_t>(m, L_);
		} else {
			// theta: best child of each current path, sorted
			std::vector<metric_t> theta(active_.size());
			std::vector<char> seen(active_.size(), 0);
			for (int e = 0; e < ne; ++e) {
				int p = c_parent_[e];
				if (!seen[p] || m[e] < theta[p])
					theta[p] = m[e];
				seen[p] = 1;
			}
			std::sort(theta.begin(), theta.end());
			DtsVariant v = cfg_.scheme == Scheme::DTS ? DtsVariant::Standard
				       : cfg_.scheme == Scheme::DTSAdvance ? DtsVariant::Advance
									      : cfg_.smb_variant;
			auto th = dts_thresholds<metric_t>(theta, v, cfg_.rt_index);
			keep = dts_prune<metric_t>(m, L_, th);
			ev.thresholds = true;
			ev.at = double(th.at);
			ev.rt = double(th.rt);
		}
		if (observer.on_prune) {
			ev.offset = off;
			ev.length = T;
			ev.L = L_;
			ev.metrics.assign(m.begin(), m.end());
			ev.parents.assign(c_parent_.begin(), c_parent_.begin() + ne);
			ev.survivors = keep;
			observer.on_prune(ev);
		}
		return keep;
	}

	void finish_step(int off, int T, int s, int ne, bool expanded)
	{
		std::vector<int> keep;
		if (expanded)
			keep = select_survivors(ne, T, off);
		else {
			keep.resize(ne);
			for (int e = 0; e < ne; ++e)
				keep[e] = e;
		}
		const int na = int(active_.size());
		std::vector<int> kids(na, 0);
		for (int e : keep)
			++kids[c_parent_[e]];
		for (int i = 0; i < na; ++i)
			if (!kids[i])
				release(active_[i]);
		// assign slots first (clones need the untouched parent), then write
		std::vector<int> slot_of(keep.size());
		std::vector<char> used(na, 0);
		for (std::size_t k = 0; k < keep.size(); ++k) {
			int p = c_parent_[keep[k]];
			if (!used[p]) {
				used[p] = 1;
				slot_of[k] = active_[p];
			} else {
				slot_of[k] = clone(active_[p], off);
			}
		}
		for (std::size_t k = 0; k < keep.size(); ++k) {
			const int e = keep[k];
			const int slot = slot_of[k];
			metric_[slot] = c_metric_[e];
			std::copy_n(&c_u_[std::size_t(e) * T], T, u_of(slot) + off);
			std::copy_n(&c_v_[std::size_t(e) * T], T, ps_at(s, fresh(slot, s)));
		}
		std::vector<int> parents;
		if (observer.on_step) {
			parents.reserve(keep.size());
			for (int e : keep)
				parents.push_back(c_parent_[e]);
		}
		active_ = std::move(slot_of);
		if (observer.on_step) {
			StepEvent ev;
			ev.offset = off;
			ev.length = T;
			ev.parents = std::move(parents);
			for (int slot : active_)
				ev.metrics.push_back(double(metric_[slot]));
			observer.on_step(ev);
		}
	}

	// lowest metric first (list position breaks ties); first CRC pass wins
	DecodeResult select()
	{
		const int na = int(active_.size());
		order_.resize(na);
		for (int i = 0; i < na; ++i)
			order_[i] = i;
		std::stable_sort(order_.begin(), order_.end(),
				 [&](int a, int b) { return metric_[active_[a]] < metric_[active_[b]]; });
		DecodeResult r;
		r.path = order_[0];
		for (int i : order_) {
			BitVector w = info_word(spec_, std::span<const Bit>(u_of(active_[i]), N_));
			if (crc_check(w, spec_.crc_poly)) {
				r.pass = true;
				r.path = i;
				break;
			}
		}
		const int slot = active_[r.path];
		r.u.assign(u_of(slot), u_of(slot) + N_);
		r.metric = double(metric_[slot]);
		return r;
	}

	CodeSpec spec_;
	ListConfig cfg_;
	int n_ = 0, N_ = 0, L_ = 0;
	int mbd_stage_ = 0;
	std::vector<Tuple> tuples_;
	std::size_t cursor_ = 0;
	const llr_t *ch_ = nullptr;

	std::vector<std::vector<llr_t>> llr_;
	std::vector<std::vector<Bit>> ps_;
	std::vector<std::vector<int>> ref_;
	std::vector<std::vector<int>> free_;
	std::vector<int> bank_;
	std::vector<metric_t> metric_;
	std::vector<Bit> u_;
	std::vector<int> free_slots_;
	std::vector<int> active_;
	std::vector<int> order_;

	std::vector<metric_t> c_metric_;
	std::vector<int> c_parent_;
	std::vector<Bit> c_v_, c_u_;
};

template <class A = FixedArith>
DecodeResult lscd_decode(std::span<const typename A::llr_t> frame, const CodeSpec &spec, const ListConfig &cfg)
{
	ListDecoder<A> d(spec, cfg);
	return d.decode(frame);
}

} // namespace polarlab
