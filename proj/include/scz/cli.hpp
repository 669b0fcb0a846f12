#pragma once

// `scz` command-line front end. Exit codes: 0 success, 1 usage error,
// 2 data error (bad file, corrupt container, infeasible request).

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "scz/bench.hpp"
#include "scz/channel.hpp"
#include "scz/container.hpp"
#include "scz/reshape_optimizer.hpp"
#include "scz/tensor.hpp"

namespace scz {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

namespace detail {

inline void print_candidates(std::ostream& out, const SearchReport& all, const SearchReport& fast,
                             std::size_t optimum) {
  out << std::left << std::setw(10) << "N" << std::setw(8) << "K" << std::setw(10) << "nnz"
      << std::setw(14) << "entropy" << std::setw(16) << "t_tot_bits" << "chosen\n";
  out << std::fixed;
  for (const auto& c : all.evaluated) {
    out << std::setw(10) << c.n_rows << std::setw(8) << c.n_cols << std::setw(10) << c.nnz
        << std::setw(14) << std::setprecision(6) << c.entropy_bits << std::setw(16)
        << std::setprecision(1) << c.t_tot_bits << (c.n_rows == fast.chosen ? "*" : "") << '\n';
  }
  out.unsetf(std::ios::fixed);
  out << "search: N=" << fast.chosen << " after " << fast.evaluated.size() << " of "
      << fast.candidate_count << " candidates" << (fast.early_stopped ? " (early stop)" : "")
      << "; exhaustive optimum N=" << optimum << '\n';
}

}  // namespace detail

inline int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Split-computing feature compressor (quantize, sparse CSR, rANS)", "scz"};
  app.require_subcommand(1);

  std::string in_path;
  std::string out_path;
  int q_bits = 4;
  std::size_t n_rows = 0;
  int precision = kDefaultPrecision;

  auto* compress_cmd = app.add_subcommand("compress", "Compress an RTF tensor into a .scz container");
  compress_cmd->add_option("input", in_path, "Input tensor (.rtf)")->required();
  compress_cmd->add_option("--q", q_bits, "Quantization bit width")->check(CLI::Range(2, 8));
  compress_cmd->add_option("--n", n_rows, "Reshape rows N (default: optimizer)");
  compress_cmd->add_option("--precision", precision, "rANS precision bits")->check(CLI::Range(8, 15));
  compress_cmd->add_option("-o,--output", out_path, "Output container (.scz)")->required();

  auto* decompress_cmd = app.add_subcommand("decompress", "Decode a .scz container into RTF");
  decompress_cmd->add_option("input", in_path, "Input container (.scz)")->required();
  decompress_cmd->add_option("-o,--output", out_path, "Output tensor (.rtf)")->required();

  std::string csv_path;
  auto* analyze_cmd = app.add_subcommand("analyze", "Score every feasible reshape of a tensor");
  analyze_cmd->add_option("input", in_path, "Input tensor (.rtf)")->required();
  analyze_cmd->add_option("--q", q_bits, "Quantization bit width")->check(CLI::Range(2, 8));
  analyze_cmd->add_option("--csv", csv_path, "Write the search report as CSV");

  std::string kind = "relu-laplace";
  std::vector<std::uint32_t> dims{128, 28, 28};
  double sparsity = 0.9;
  std::uint64_t seed = 42;
  std::vector<int> q_list{2, 3, 4, 6, 8};
  std::vector<std::size_t> n_list;
  std::string policy = "optimizer";
  int reps = 20;
  auto* bench_cmd = app.add_subcommand("bench", "Sweep Q and N over a synthetic tensor");
  bench_cmd->add_option("--kind", kind, "relu-laplace | uniform | constant");
  bench_cmd->add_option("--dims", dims, "Tensor dims, e.g. --dims 128 28 28")->delimiter(',');
  bench_cmd->add_option("--sparsity", sparsity, "Zero fraction")->check(CLI::Range(0.0, 1.0));
  bench_cmd->add_option("--seed", seed, "Generator seed");
  bench_cmd->add_option("--q-list", q_list, "Bit widths to sweep")->delimiter(',');
  bench_cmd->add_option("--n-list", n_list, "Explicit reshape rows (implies --policy explicit)")
      ->delimiter(',');
  bench_cmd->add_option("--policy", policy, "optimizer | exhaustive | explicit")
      ->check(CLI::IsMember({"optimizer", "exhaustive", "explicit"}));
  bench_cmd->add_option("--reps", reps, "Timed repetitions per row")->check(CLI::Range(1, 100000));
  bench_cmd->add_option("--csv", csv_path, "Output CSV")->required();

  std::optional<double> eps;
  std::optional<double> bw_hz;
  std::optional<double> snr_db;
  std::optional<double> sigma2;
  auto* latency_cmd = app.add_subcommand("latency", "Model link latency for a container");
  latency_cmd->add_option("input", in_path, "Container (.scz)")->required();
  latency_cmd->add_option("--eps", eps, "Outage probability");
  latency_cmd->add_option("--bw-hz", bw_hz, "Bandwidth in Hz");
  latency_cmd->add_option("--snr-db", snr_db, "Mean SNR in dB");
  latency_cmd->add_option("--sigma2", sigma2, "Fading variance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (compress_cmd->parsed()) {
      const auto t = read_rtf(in_path);
      CompressOptions opt;
      opt.q_bits = q_bits;
      opt.precision = precision;
      if (n_rows != 0) opt.n_rows = n_rows;
      const auto c = compress(t, opt);
      write_file(out_path, serialize(c));
      out << "N=" << c.header.n_rows << " K=" << c.header.n_cols << " nnz=" << c.header.nnz
          << " header_bytes=" << c.header_bytes() << " payload_bytes=" << c.payload_bytes()
          << " total_bytes=" << c.total_bytes() << " raw_bytes=" << t.size() * sizeof(float)
          << '\n';
    } else if (decompress_cmd->parsed()) {
      const auto t = decompress_bytes(read_file(in_path));
      write_rtf(out_path, t);
      out << "T=" << t.size() << '\n';
    } else if (analyze_cmd->parsed()) {
      const auto t = read_rtf(in_path);
      SearchReport all;
      SearchReport fast;
      const auto optimum = exhaustive_search(t, q_bits, {}, &all);
      search(t, q_bits, {}, &fast);
      detail::print_candidates(out, all, fast, optimum);
      if (!csv_path.empty()) {
        std::ostringstream csv;
        write_report_csv(csv, fast);
        const auto text = csv.str();
        write_file(csv_path,
                   std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
      }
    } else if (bench_cmd->parsed()) {
      const auto t = gen_synthetic(parse_kind(kind), dims, sparsity, seed);
      ReshapePolicy p = ReshapePolicy::optimizer();
      if (!n_list.empty() || policy == "explicit") {
        if (n_list.empty()) {
          err << "error: --policy explicit requires --n-list\n";
          return kExitUsage;
        }
        p = ReshapePolicy::explicit_rows(n_list);
      } else if (policy == "exhaustive") {
        p = ReshapePolicy::exhaustive();
      }
      SweepOptions opt;
      opt.tensor_id = kind + "-seed" + std::to_string(seed);
      opt.repetitions = reps;
      opt.channel = channel_from_env();
      const auto records = run_sweep(t, q_list, p, opt);
      write_csv(csv_path, records);
      for (const auto& r : records) {
        if (!r.ok()) {
          err << "row Q=" << r.q_bits << " N=" << r.n_rows << " failed: " << r.error << '\n';
        } else if (!r.timing_stable()) {
          err << "warning: noisy timing at Q=" << r.q_bits << " N=" << r.n_rows << '\n';
        }
      }
      out << records.size() << " rows written to " << csv_path << '\n';
    } else if (latency_cmd->parsed()) {
      const auto c = deserialize(read_file(in_path));
      auto params = channel_from_env();
      if (eps) params.outage = *eps;
      if (bw_hz) params.bandwidth_hz = *bw_hz;
      if (snr_db) params.mean_snr = db_to_linear(*snr_db);
      if (sigma2) params.fading_var = *sigma2;
      const double rate = outage_rate(params);
      const double payload_bits = static_cast<double>(c.payload_bytes()) * 8.0;
      const double total_bits = static_cast<double>(c.total_bytes()) * 8.0;
      out.precision(10);
      out << "rate_bps=" << rate << " payload_bits=" << payload_bits
          << " total_bits=" << total_bits << " t_comm_payload_s=" << comm_latency(payload_bits, params)
          << " t_comm_total_s=" << comm_latency(total_bits, params) << '\n';
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace scz
