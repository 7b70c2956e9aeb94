/*
 * Copyright 2026 The hbmsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "hbmsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iterator>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "hbmsim/interconnect.hpp"
#include "hbmsim/report.hpp"

namespace hbmsim {

using nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

const char* type_name(const json& v) { return v.type_name(); }

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> known) {
  const std::set<std::string> ok(known.begin(), known.end());
  for (const auto& [k, _] : obj.items())
    if (!ok.count(k)) field_error(where + "." + k, "unknown field");
}

std::uint64_t as_u64(const json& v, const std::string& where) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) field_error(where, "must be non-negative");
  field_error(where, std::string("expected an unsigned integer, got ") + type_name(v));
}

unsigned as_uint(const json& v, const std::string& where) {
  const std::uint64_t x = as_u64(v, where);
  if (x > 0xffffffffULL) field_error(where, "value too large");
  return static_cast<unsigned>(x);
}

double as_real(const json& v, const std::string& where) {
  if (!v.is_number()) field_error(where, std::string("expected a number, got ") + type_name(v));
  return v.get<double>();
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) field_error(where, std::string("expected a string, got ") + type_name(v));
  return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& where) {
  if (!v.is_boolean()) field_error(where, std::string("expected true or false, got ") + type_name(v));
  return v.get<bool>();
}

template <class F>
auto as_list(const json& v, const std::string& where, F elem) {
  using T = decltype(elem(v, where));
  if (!v.is_array()) field_error(where, std::string("expected an array, got ") + type_name(v));
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(elem(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

/// "NxN" or n.
unsigned as_pattern(const json& v, const std::string& where) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    const auto x = s.find('x');
    if (x == std::string::npos || s.substr(0, x) != s.substr(x + 1) || x == 0)
      field_error(where, "pattern must look like \"4x4\"");
    try {
      return static_cast<unsigned>(std::stoul(s.substr(0, x)));
    } catch (const std::exception&) {
      field_error(where, "pattern must look like \"4x4\"");
    }
  }
  return as_uint(v, where);
}

/// Converts parser exceptions of the enum helpers into field errors.
template <class F>
auto parse_enum(const json& v, const std::string& where, F parse) {
  const std::string s = as_string(v, where);
  try {
    return parse(s);
  } catch (const ConfigError& e) {
    field_error(where, e.what());
  }
}

MasterFlavor parse_master(const std::string& s) {
  if (s == "hls") return MasterFlavor::hls;
  if (s == "rtl") return MasterFlavor::rtl;
  throw ConfigError("unknown master '" + s + "' (expected hls or rtl)");
}

SweepGrid grid_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) field_error(where, "expected an object");
  reject_unknown(j, where, {"blen", "pe_count", "stride", "freq_mhz", "width", "pattern"});
  SweepGrid g;
  if (j.contains("blen")) g.blen = as_list(j["blen"], where + ".blen", as_uint);
  if (j.contains("pe_count")) g.pe_count = as_list(j["pe_count"], where + ".pe_count", as_uint);
  if (j.contains("stride")) g.stride = as_list(j["stride"], where + ".stride", as_u64);
  if (j.contains("freq_mhz")) {
    for (double mhz : as_list(j["freq_mhz"], where + ".freq_mhz", as_real)) {
      if (!(mhz > 0)) field_error(where + ".freq_mhz", "frequencies must be positive");
      g.freq_hz.push_back(mhz * 1e6);
    }
  }
  if (j.contains("width")) g.width = as_list(j["width"], where + ".width", as_uint);
  if (j.contains("pattern")) g.pattern = as_list(j["pattern"], where + ".pattern", as_pattern);
  return g;
}

BundleBinding binding_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) field_error(where, "expected an object");
  reject_unknown(j, where, {"master", "read_pes", "write_pes", "target_pcs"});
  BundleBinding b;
  if (j.contains("master")) b.master = as_uint(j["master"], where + ".master");
  if (j.contains("read_pes")) b.read_pes = as_list(j["read_pes"], where + ".read_pes", as_uint);
  if (j.contains("write_pes")) b.write_pes = as_list(j["write_pes"], where + ".write_pes", as_uint);
  if (j.contains("target_pcs")) b.target_pcs = as_list(j["target_pcs"], where + ".target_pcs", as_uint);
  return b;
}

PlatformProfile profile_ref(const json& v, const std::filesystem::path& base, const std::string& where) {
  try {
    if (v.is_object()) return profile_from_json(v);
    const std::string ref = as_string(v, where);
    const std::filesystem::path rel = base / ref;
    if (!base.empty() && std::filesystem::exists(rel)) return load_profile(rel.string());
    return load_profile(ref);
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(where + ":", 0) == 0) throw;
    field_error(where, msg);
  }
}

/// Line and column of a byte offset, both 1-based.
std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

bool SweepGrid::empty() const {
  return blen.empty() && pe_count.empty() && stride.empty() && freq_hz.empty() && width.empty() && pattern.empty();
}

WorkloadSpec workload_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) field_error(where, "expected an object");
  reject_unknown(j, where,
                 {"kind",         "arch",        "mode",         "master",      "bytes_per_pc",   "pc_num",
                  "read_pcs",     "write_pcs",   "kernel_clock", "kernel_clock_mhz", "data_width", "stride",
                  "pattern",      "blen",        "fifo_depth",   "pes_per_pc",  "arbitration_cost",
                  "response_routing_cost",      "key_bits",     "chain_length", "lat_pe_ns",   "presorted",
                  "single_bucket", "tree_nodes", "seed",         "sweeps"});
  if (!j.contains("kind")) field_error(where + ".kind", "required");
  WorkloadSpec s;
  const auto at = [&](const char* k) { return where + "." + k; };
  s.kind = parse_enum(j["kind"], at("kind"), parse_workload_kind);
  if (j.contains("arch")) s.arch = parse_enum(j["arch"], at("arch"), parse_arch);
  if (j.contains("mode")) s.mode = parse_enum(j["mode"], at("mode"), parse_copy_mode);
  if (j.contains("master")) s.master = parse_enum(j["master"], at("master"), parse_master);
  if (j.contains("bytes_per_pc")) s.bytes_per_pc = as_u64(j["bytes_per_pc"], at("bytes_per_pc"));
  if (j.contains("pc_num")) s.pc_num = as_uint(j["pc_num"], at("pc_num"));
  if (j.contains("read_pcs")) s.read_pcs = as_list(j["read_pcs"], at("read_pcs"), as_uint);
  if (j.contains("write_pcs")) s.write_pcs = as_list(j["write_pcs"], at("write_pcs"), as_uint);
  if (j.contains("kernel_clock") && j.contains("kernel_clock_mhz"))
    field_error(at("kernel_clock"), "give kernel_clock or kernel_clock_mhz, not both");
  if (j.contains("kernel_clock")) s.kernel_clock = as_real(j["kernel_clock"], at("kernel_clock"));
  if (j.contains("kernel_clock_mhz")) s.kernel_clock = as_real(j["kernel_clock_mhz"], at("kernel_clock_mhz")) * 1e6;
  if (s.kernel_clock < 0) field_error(at("kernel_clock"), "must be positive");
  if (j.contains("data_width")) s.data_width = as_uint(j["data_width"], at("data_width"));
  if (j.contains("stride")) s.stride = as_u64(j["stride"], at("stride"));
  if (j.contains("pattern")) s.pattern = as_pattern(j["pattern"], at("pattern"));
  if (j.contains("blen")) s.blen = as_uint(j["blen"], at("blen"));
  if (j.contains("fifo_depth")) s.fifo_depth = as_uint(j["fifo_depth"], at("fifo_depth"));
  if (j.contains("pes_per_pc")) s.pes_per_pc = as_uint(j["pes_per_pc"], at("pes_per_pc"));
  if (j.contains("arbitration_cost")) s.arbitration_cost = as_uint(j["arbitration_cost"], at("arbitration_cost"));
  if (j.contains("response_routing_cost"))
    s.response_routing_cost = as_uint(j["response_routing_cost"], at("response_routing_cost"));
  if (j.contains("key_bits")) s.key_bits = as_uint(j["key_bits"], at("key_bits"));
  if (j.contains("chain_length")) s.chain_length = as_u64(j["chain_length"], at("chain_length"));
  if (j.contains("lat_pe_ns")) {
    const double ns = as_real(j["lat_pe_ns"], at("lat_pe_ns"));
    if (ns < 0) field_error(at("lat_pe_ns"), "must be non-negative");
    s.lat_pe = SimTime::from_ns(ns);
  }
  if (j.contains("presorted")) s.presorted = as_bool(j["presorted"], at("presorted"));
  if (j.contains("single_bucket")) s.single_bucket = as_uint(j["single_bucket"], at("single_bucket"));
  if (j.contains("tree_nodes")) s.tree_nodes = as_u64(j["tree_nodes"], at("tree_nodes"));
  if (j.contains("seed")) s.seed = as_u64(j["seed"], at("seed"));
  return s;
}

json workload_to_json(const WorkloadSpec& s) {
  json j{{"kind", to_string(s.kind)},
         {"arch", to_string(s.arch)},
         {"mode", to_string(s.mode)},
         {"master", s.master == MasterFlavor::hls ? "hls" : "rtl"},
         {"bytes_per_pc", s.bytes_per_pc},
         {"pc_num", s.pc_num},
         {"read_pcs", s.read_pcs},
         {"write_pcs", s.write_pcs},
         {"kernel_clock", s.kernel_clock},
         {"data_width", s.data_width},
         {"stride", s.stride},
         {"pattern", s.pattern},
         {"blen", s.blen},
         {"fifo_depth", s.fifo_depth},
         {"pes_per_pc", s.pes_per_pc},
         {"arbitration_cost", s.arbitration_cost},
         {"response_routing_cost", s.response_routing_cost},
         {"key_bits", s.key_bits},
         {"chain_length", s.chain_length},
         {"presorted", s.presorted},
         {"tree_nodes", s.tree_nodes},
         {"seed", s.seed}};
  if (s.lat_pe) j["lat_pe_ns"] = s.lat_pe->ns();
  if (s.single_bucket) j["single_bucket"] = *s.single_bucket;
  return j;
}

ExperimentConfig parse_experiment(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object at the top level");
  reject_unknown(j, "config", {"profile", "workloads", "sweeps", "bindings", "output", "seed", "parallelism"});
  ExperimentConfig cfg;
  cfg.profile = j.contains("profile") ? profile_ref(j["profile"], base_dir, "profile") : builtin_profile("u280");
  if (j.contains("seed")) cfg.seed = as_u64(j["seed"], "seed");
  if (j.contains("parallelism")) {
    cfg.parallelism = as_uint(j["parallelism"], "parallelism");
    if (cfg.parallelism == 0) field_error("parallelism", "must be >= 1");
  }
  if (j.contains("output")) {
    const json& o = j["output"];
    if (!o.is_object()) field_error("output", "expected an object");
    reject_unknown(o, "output", {"path", "format"});
    if (o.contains("format")) {
      const std::string f = as_string(o["format"], "output.format");
      if (f == "csv")
        cfg.output.format = ReportFormat::csv;
      else if (f == "json")
        cfg.output.format = ReportFormat::json;
      else
        field_error("output.format", "expected \"csv\" or \"json\", got \"" + f + "\"");
      cfg.output.path = f == "json" ? "hbmsim_report.json" : "hbmsim_report.csv";
    }
    if (o.contains("path")) cfg.output.path = as_string(o["path"], "output.path");
  }
  const SweepGrid global = j.contains("sweeps") ? grid_from_json(j["sweeps"], "sweeps") : SweepGrid{};
  if (j.contains("bindings")) {
    if (!j["bindings"].is_array()) field_error("bindings", "expected an array");
    for (std::size_t i = 0; i < j["bindings"].size(); ++i)
      cfg.bindings.push_back(binding_from_json(j["bindings"][i], "bindings[" + std::to_string(i) + "]"));
  }
  if (!j.contains("workloads")) field_error("workloads", "required");
  const json& w = j["workloads"];
  if (!w.is_array()) field_error("workloads", "expected an array");
  for (std::size_t i = 0; i < w.size(); ++i) {
    const std::string where = "workloads[" + std::to_string(i) + "]";
    WorkloadSpec s = workload_from_json(w[i], where);
    // per-workload seeds win; otherwise derive from the config seed
    if (!w[i].contains("seed")) s.seed = cfg.seed + i;
    cfg.workloads.push_back(std::move(s));
    cfg.sweeps.push_back(w[i].contains("sweeps") ? grid_from_json(w[i]["sweeps"], where + ".sweeps") : global);
  }
  validate_experiment(cfg);
  return cfg;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    const auto colon = msg.rfind(": ");
    if (colon != std::string::npos) msg = msg.substr(colon + 2);
    throw ConfigError(path.string() + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  }
  try {
    return parse_experiment(j, path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void validate_experiment(const ExperimentConfig& cfg) {
  cfg.profile.validate();
  for (std::size_t i = 0; i < cfg.bindings.size(); ++i) {
    try {
      validate_binding(cfg.profile, cfg.bindings[i]);
    } catch (const ConfigError& e) {
      field_error("bindings[" + std::to_string(i) + "]", e.what());
    }
  }
  const auto specs = expand(cfg);
  std::size_t k = 0;
  for (std::size_t i = 0; i < cfg.workloads.size(); ++i) {
    const std::string where = "workloads[" + std::to_string(i) + "]";
    const SweepGrid& g = cfg.sweeps[i];
    const std::size_t n = std::max<std::size_t>(1, g.blen.size()) * std::max<std::size_t>(1, g.pe_count.size()) *
                          std::max<std::size_t>(1, g.stride.size()) * std::max<std::size_t>(1, g.freq_hz.size()) *
                          std::max<std::size_t>(1, g.width.size()) * std::max<std::size_t>(1, g.pattern.size());
    for (std::size_t m = 0; m < n; ++m, ++k) {
      const WorkloadSpec& s = specs[k];
      try {
        s.validate(cfg.profile);
        const bool search = s.kind == WorkloadKind::binary_search || s.kind == WorkloadKind::dfs;
        if (search && s.arch == Arch::bica) throw ConfigError("arch must be baseline or bipa");
        if (search && s.arch == Arch::baseline && s.pes_per_pc > 1) {
          // without an arbiter every PE needs its own read port on the bundle
          BundleBinding b;
          b.target_pcs = {0};
          b.read_pes.resize(s.pes_per_pc);
          std::iota(b.read_pes.begin(), b.read_pes.end(), 0U);
          validate_binding(cfg.profile, b);
        }
      } catch (const ConfigError& e) {
        field_error(where, e.what());
      }
    }
  }
}

std::vector<WorkloadSpec> expand(const ExperimentConfig& cfg) {
  std::vector<WorkloadSpec> out;
  for (std::size_t i = 0; i < cfg.workloads.size(); ++i) {
    const SweepGrid g = i < cfg.sweeps.size() ? cfg.sweeps[i] : SweepGrid{};
    std::vector<WorkloadSpec> cur{cfg.workloads[i]};
    auto axis = [&cur](const auto& values, auto apply) {
      if (values.empty()) return;
      std::vector<WorkloadSpec> next;
      for (const auto& s : cur)
        for (const auto& v : values) {
          WorkloadSpec t = s;
          apply(t, v);
          next.push_back(std::move(t));
        }
      cur = std::move(next);
    };
    axis(g.blen, [](WorkloadSpec& s, unsigned v) {
      s.blen = v;
      s.fifo_depth = std::max(s.fifo_depth, v);
    });
    axis(g.pe_count, [](WorkloadSpec& s, unsigned v) { s.pes_per_pc = v; });
    axis(g.stride, [](WorkloadSpec& s, std::uint64_t v) { s.stride = v; });
    axis(g.freq_hz, [](WorkloadSpec& s, double v) { s.kernel_clock = v; });
    axis(g.width, [](WorkloadSpec& s, unsigned v) { s.data_width = v; });
    axis(g.pattern, [](WorkloadSpec& s, unsigned v) { s.pattern = v; });
    std::move(cur.begin(), cur.end(), std::back_inserter(out));
  }
  return out;
}

std::string describe(const WorkloadSpec& s) {
  std::ostringstream os;
  os << to_string(s.kind) << " arch=" << to_string(s.arch);
  switch (s.kind) {
    case WorkloadKind::seq_copy: os << " mode=" << to_string(s.mode); break;
    case WorkloadKind::strided: os << " stride=" << s.stride; break;
    case WorkloadKind::unicast: os << " pattern=" << s.pattern << 'x' << s.pattern; break;
    case WorkloadKind::bucket_sort:
    case WorkloadKind::radix_sort: os << " blen=" << s.blen; break;
    case WorkloadKind::binary_search:
    case WorkloadKind::dfs: os << " pes=" << s.pes_per_pc; break;
    default: break;
  }
  if (s.kernel_clock > 0) os << " clock=" << format_real(s.kernel_clock / 1e6) << "MHz";
  if (s.data_width) os << " width=" << s.data_width;
  if (s.pc_num) os << " pcs=" << s.pc_num;
  os << " bytes/pc=" << s.bytes_per_pc;
  return os.str();
}

std::vector<BandwidthReport> run_jobs(const std::vector<Job>& jobs, unsigned parallelism) {
  std::vector<BandwidthReport> out(jobs.size());
  const unsigned workers = std::max(1U, std::min<unsigned>(parallelism, static_cast<unsigned>(jobs.size())));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first;
  std::size_t first_idx = jobs.size();
  std::mutex mu;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size() || failed.load()) return;
      try {
        out[i] = run_workload(jobs[i].profile, jobs[i].spec);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        // keep the lowest-index failure so the message is reproducible
        if (i < first_idx) {
          first_idx = i;
          first = std::current_exception();
        }
        failed = true;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (first) std::rethrow_exception(first);
  return out;
}

std::vector<BandwidthReport> run_specs(const PlatformProfile& profile, const std::vector<WorkloadSpec>& specs,
                                       unsigned parallelism) {
  std::vector<Job> jobs;
  jobs.reserve(specs.size());
  for (const auto& s : specs) jobs.push_back({profile, s});
  return run_jobs(jobs, parallelism);
}

unsigned env_parallelism(unsigned fallback) {
  const char* v = std::getenv("HBMSIM_PARALLELISM");
  if (!v || !*v) return fallback;
  char* end = nullptr;
  const unsigned long n = std::strtoul(v, &end, 10);
  if (*end != '\0' || n == 0 || n > 1024) throw ConfigError("HBMSIM_PARALLELISM must be an integer in [1, 1024]");
  return static_cast<unsigned>(n);
}

std::filesystem::path env_output_dir(const std::filesystem::path& fallback) {
  const char* v = std::getenv("HBMSIM_OUTPUT_DIR");
  if (!v || !*v) return fallback;
  return v;
}

void write_reports(const std::filesystem::path& path, ReportFormat format, const std::vector<BandwidthReport>& reports) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write '" + path.string() + "'");
  if (format == ReportFormat::csv)
    write_csv(os, reports);
  else
    os << reports_to_json(reports).dump(2) << '\n';
  if (!os) throw ConfigError("error writing '" + path.string() + "'");
}

}  // namespace hbmsim
