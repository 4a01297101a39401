#include <atomic>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include <polarlab/latency.hpp>
#include <polarlab/sim.hpp>

using namespace polarlab;

static std::atomic<bool> g_cancel{false};

static void on_sigint(int) { g_cancel = true; }

static void write_out(const std::string &path, const std::string &text)
{
	if (path.empty() || path == "-") {
		std::cout << text << std::flush;
		return;
	}
	std::ofstream f(path);
	if (!f)
		throw std::runtime_error("cannot write " + path);
	f << text;
}

int main(int argc, char **argv)
{
	CLI::App app{"polar code list decoding: BLER sweeps and latency model"};
	app.require_subcommand(1);

	std::string config, out, spec_path;
	long seed = -1;
	int workers = 0;
	bool json = false, check = false;

	// sweep
	auto *sweep = app.add_subcommand("sweep", "Monte-Carlo BLER sweep");
	sweep->add_option("--config", config, "sweep config file")->required()->check(CLI::ExistingFile);
	sweep->add_option("--seed", seed, "override the config seed");
	sweep->add_option("--workers", workers, "worker threads");
	sweep->add_option("--out", out, "output file (default: config 'output', else stdout)");
	sweep->add_flag("--json", json, "write JSON instead of CSV");

	// compare
	auto *compare = app.add_subcommand("compare", "paired-seed scheme comparison");
	compare->add_option("--config", config, "sweep config file")->required()->check(CLI::ExistingFile);
	compare->add_option("--seed", seed, "override the config seed");
	compare->add_option("--workers", workers, "worker threads");
	compare->add_option("--out", out, "output file");
	compare->add_flag("--check", check, "exit nonzero when a pair's confidence intervals do not overlap");

	// latency
	std::vector<int> merges{2, 4, 8};
	int P = 64;
	double freq = 0;
	auto *latency = app.add_subcommand("latency", "decoding latency in clock cycles");
	latency->add_option("--spec", spec_path, "code spec file")->default_val("data/pc1024_512_crc24.code");
	latency->add_option("--M", merges, "tuple sizes")->default_str("2 4 8");
	latency->add_option("--P", P, "processing elements")->default_val(64);
	latency->add_option("--freq", freq, "clock frequency in MHz for a throughput line");
	latency->add_option("--out", out, "output file");
	latency->add_flag("--json", json, "write JSON");
	latency->add_flag("--check", check, "verify the reference cycle counts of the committed code");

	// census
	auto *census_cmd = app.add_subcommand("census", "tuple counts per size and class");
	census_cmd->add_option("--spec", spec_path, "code spec file")->default_val("data/pc1024_512_crc24.code");
	census_cmd->add_option("--M", merges, "tuple sizes")->default_str("2 4 8");
	census_cmd->add_option("--out", out, "output file");
	census_cmd->add_flag("--json", json, "write JSON");

	CLI11_PARSE(app, argc, argv);

	try {
		if (*sweep || *compare) {
			auto cfg = load_sweep_config(config);
			if (seed >= 0)
				cfg.seed = std::uint64_t(seed);
			if (workers > 0)
				cfg.workers = workers;
			auto spec = load_codespec(cfg.spec_path);

			if (*compare) {
				auto cs = compare_schemes(cfg, spec);
				write_out(out, format_comparisons(cs));
				if (check)
					for (const auto &c : cs)
						if (!c.overlap()) {
							std::fprintf(stderr, "check failed: %s L=%d M=%d vs %s M=%d at %.2f dB\n",
								     scheme_name(c.a.scheme), c.a.L, c.a.M, scheme_name(c.b.scheme),
								     c.b.M, c.a.ebn0_db);
							return 1;
						}
				return 0;
			}

			if (out.empty())
				out = cfg.output;
			std::signal(SIGINT, on_sigint);
			auto pts = run_sweep(cfg, spec,
					     [&](const BlerPoint &p) {
						     std::fprintf(stderr, "%s", csv_row(p).c_str());
					     },
					     &g_cancel);
			// partial results are flushed on interrupt too
			write_out(out, json ? to_json_doc(pts).dump(2) + "\n" : to_csv(pts));
			if (g_cancel) {
				std::fprintf(stderr, "interrupted: %zu point(s) written, the last one may be partial\n", pts.size());
				return 130;
			}
			return 0;
		}

		auto spec = load_codespec(spec_path);
		if (*latency) {
			std::vector<LatencyReport> rows;
			for (int M : merges)
				rows.push_back(total_latency(spec, M, P));
			std::vector<ReferenceRow> refs{baseline_reference(spec, P), pairwise_dts_reference(spec, P)};
			if (json) {
				nlohmann::json j{{"rows", rows}, {"references", nlohmann::json::array()}};
				for (const auto &r : refs)
					j["references"].push_back({{"name", r.name}, {"lm_cycles", r.lm},
								   {"scd_below_stage3", r.scd_below},
								   {"scd_at_or_above_stage3", r.scd_at_or_above},
								   {"total", r.total()}});
				write_out(out, j.dump(2) + "\n");
			} else {
				write_out(out, format_latency_table(rows, refs, freq));
			}
			if (check) {
				const long want[] = {943, 647, 516};
				bool ok = P == 64 && d_pglah(1024, 64) == 1064 && d_trd(1024, 64) == 2080;
				for (std::size_t i = 0; i < rows.size(); ++i) {
					int k = rows[i].M == 2 ? 0 : rows[i].M == 4 ? 1 : rows[i].M == 8 ? 2 : -1;
					if (k >= 0)
						ok &= rows[i].total == want[k];
				}
				if (!ok) {
					std::fprintf(stderr, "check failed: latency differs from the reference values\n");
					return 1;
				}
			}
			return 0;
		}

		// census
		nlohmann::json j = nlohmann::json::object();
		std::string text;
		char buf[128];
		for (int M : merges) {
			auto c = census(tuple_divide(spec, M));
			std::snprintf(buf, sizeof buf, "M=%d\n  %-6s %6s %6s %8s %6s\n", M, "size", "SP1", "SP2", "rate-1/T", "total");
			text += buf;
			for (const auto &[T, row] : c) {
				std::snprintf(buf, sizeof buf, "  %-6d %6d %6d %8d %6d\n", T, row.sp1, row.sp2, row.rate1t, row.total());
				text += buf;
				j[std::to_string(M)][std::to_string(T)] = {{"sp1", row.sp1}, {"sp2", row.sp2}, {"rate1t", row.rate1t}};
			}
		}
		write_out(out, json ? j.dump(2) + "\n" : text);
		return 0;
	} catch (const std::exception &e) {
		std::fprintf(stderr, "error: %s\n", e.what());
		return 2;
	}
}
