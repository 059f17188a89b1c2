#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "mechpf/analysis.hpp"
#include "mechpf/errors.hpp"
#include "mechpf/fitting.hpp"
#include "mechpf/sweep_csv.hpp"
#include "mechpf/touchstone.hpp"

namespace mechpf::cli {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

/// Unreadable or unwritable data files; maps to exit code 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config;
  std::string out;
  bool to_stdout = false;
  std::uint64_t seed = 0;
};

struct Context {
  Globals globals;
  JobConfig job;
  std::ostream& out;
  std::ostream& err;
};

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file || !(file << content) || !file.flush()) throw DataError("cannot write '" + path + "'");
}

TouchstoneRecord read_touchstone(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return parse_touchstone(text);
  } catch (const ParseError& e) {
    throw ParseError(0, path + ": " + e.what());
  }
}

/// `base` with `suffix` inserted before the extension.
std::string with_suffix(const std::string& base, const std::string& suffix) {
  const std::filesystem::path p(base);
  return (p.parent_path() / (p.stem().string() + suffix + p.extension().string())).string();
}

void emit(Context& ctx, const std::string& content, const std::string& suffix = {}) {
  if (ctx.globals.to_stdout) {
    ctx.out << content;
    return;
  }
  const std::string base = !ctx.globals.out.empty() ? ctx.globals.out : ctx.job.io.output.value_or("");
  if (base.empty()) throw ConfigError("no output destination: use --out, [io] output or --stdout");
  const std::string path = with_suffix(base, suffix);
  write_file(path, content);
  ctx.err << "wrote " << path << "\n";
}

void log_warnings(Context& ctx, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) ctx.err << "warning: " << w << "\n";
}

const LadderFilterSpec& need_filter(const Context& ctx) {
  if (!ctx.job.filter) throw ConfigError("filter: section is required for this command");
  return *ctx.job.filter;
}

const SweepConfig& need_sweep(const Context& ctx) {
  if (!ctx.job.sweep) throw ConfigError("sweep: section is required for this command");
  return *ctx.job.sweep;
}

const QubitConfig& need_qubit(const Context& ctx) {
  if (!ctx.job.qubit) throw ConfigError("qubit: section is required for this command");
  return *ctx.job.qubit;
}

std::vector<std::string> describe(const LadderFilterSpec& spec, const std::optional<DeviceRecord>& device) {
  const auto resonator = [](const char* role, const ResonatorSpec& r) {
    return std::string("! ") + role + ": f " + shortest(r.omega_m / kTau / 1e9) + " GHz, k2 " +
           shortest(r.k2) + ", Q " +
           (r.q.is_unbounded() ? std::string("inf") : shortest(r.q.value())) + ", Cg " +
           shortest(r.c_g * 1e12) + " pF";
  };
  std::vector<std::string> lines = {
      "! ladder filter: order " + std::to_string(spec.order) + ", shunt multiplicity " +
          std::to_string(spec.shunt_multiplicity) + ", z0 " + shortest(spec.z0) + " ohm",
      resonator("series", spec.series), resonator("shunt", spec.shunt)};
  if (device) {
    lines.push_back("! device " + device->name + ": series pitch " + shortest(device->pitch_series_um) +
                    " um, " + std::to_string(device->idt_pairs_series) + " pairs, width " +
                    shortest(device->width_series_um) + " um; shunt pitch " +
                    shortest(device->pitch_shunt_um) + " um, " +
                    std::to_string(device->idt_pairs_shunt) + " pairs, width " +
                    shortest(device->width_shunt_um) + " um; rotation " +
                    shortest(device->rotation_deg) + " deg, order " + std::to_string(device->order));
  }
  return lines;
}

struct Run {
  LadderFilterSpec spec;
  std::string suffix;
};

/// One run per (Q, series detuning) pair; a single run when no lists are set.
std::vector<Run> family(const Context& ctx) {
  const LadderFilterSpec& base = need_filter(ctx);
  std::vector<std::optional<Quality>> qs(1);
  std::vector<std::optional<double>> detunings(1);
  if (!ctx.job.q_list.empty()) qs.assign(ctx.job.q_list.begin(), ctx.job.q_list.end());
  if (!ctx.job.series_detuning_hz.empty()) {
    detunings.assign(ctx.job.series_detuning_hz.begin(), ctx.job.series_detuning_hz.end());
  }
  std::vector<Run> runs;
  for (const auto& q : qs) {
    for (const auto& d : detunings) {
      Run run{base, ""};
      if (q) {
        run.spec.series.q = *q;
        run.spec.shunt.q = *q;
        run.suffix += "_q" + (q->is_unbounded() ? std::string("inf") : shortest(q->value()));
      }
      if (d) {
        run.spec.series.omega_m += kTau * *d;
        run.suffix += "_det" + shortest(*d / 1e6) + "MHz";
      }
      runs.push_back(std::move(run));
    }
  }
  if (runs.size() > 1 && ctx.globals.to_stdout) {
    throw ConfigError("filter: --stdout takes a single run; remove q_list and series_detuning_hz_list");
  }
  return runs;
}

void log_band(Context& ctx, const std::string& label, const SweepResult& sweep) {
  std::vector<double> freqs;
  std::vector<std::optional<double>> il;
  for (const auto& row : sweep.rows) {
    freqs.push_back(row.freq_hz);
    if (!row.s21) {
      il.emplace_back();
    } else {
      const double t = std::abs(*row.s21);
      il.emplace_back(t == 0.0 ? INFINITY : -20.0 * std::log10(t));
    }
  }
  const auto bw = bandwidth(freqs, il, 3.0);
  ctx.err << label << ": ";
  if (!bw) {
    ctx.err << "no transmission\n";
    return;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "3 dB band %.4f-%.4f GHz (%.1f MHz), peak insertion loss %.3f dB at %.4f GHz\n",
                bw->lower_hz / 1e9, bw->upper_hz / 1e9, bw->width_hz / 1e6,
                bw->peak_insertion_loss_db, bw->peak_hz / 1e9);
  ctx.err << buf;
}

void log_enhancement(Context& ctx, const std::string& label, const SweepResult& sweep) {
  const auto peak = peak_enhancement(sweep);
  ctx.err << label << ": ";
  if (!peak) {
    ctx.err << "no enhancement available\n";
    return;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "peak enhancement %.1fx at %.4f GHz\n", peak->factor,
                peak->freq_hz / 1e9);
  ctx.err << buf;
}

std::string label_of(const Run& run) { return run.suffix.empty() ? "run" : run.suffix.substr(1); }

void cmd_simulate(Context& ctx) {
  const auto grid = need_sweep(ctx).grid();
  std::optional<ReadoutSystem> sys;
  for (const auto& run : family(ctx)) {
    if (ctx.job.qubit) sys = ctx.job.qubit->system(run.spec.z0);
    const auto sweep = simulate_sweep(run.spec, grid, sys);
    log_warnings(ctx, sweep.warnings);
    log_band(ctx, label_of(run), sweep);
    if (sys) log_enhancement(ctx, label_of(run), sweep);
    emit(ctx, write_sweep_csv(sweep), run.suffix);
    if (ctx.job.io.touchstone) {
      auto comments = describe(run.spec, ctx.job.device);
      comments.insert(comments.begin(), "! simulated ladder filter");
      const auto rec = touchstone_from_network(build_ladder(run.spec, grid), comments);
      const std::string path = with_suffix(*ctx.job.io.touchstone, run.suffix);
      write_file(path, write_touchstone(rec));
      ctx.err << "wrote " << path << "\n";
    }
  }
}

void cmd_t1(Context& ctx, const std::string& s2p, bool no_filter) {
  const QubitConfig& qubit = need_qubit(ctx);
  if (no_filter && !s2p.empty()) throw ConfigError("t1: --no-filter and --s2p are exclusive");
  if (no_filter) {
    const double z0 = ctx.job.filter ? ctx.job.filter->z0 : 50.0;
    const auto sweep = t1_flat(qubit.system(z0), need_sweep(ctx).grid());
    log_enhancement(ctx, "flat environment", sweep);
    emit(ctx, write_sweep_csv(sweep));
    return;
  }
  if (!s2p.empty()) {
    const auto rec = read_touchstone(s2p);
    const auto sweep = t1_from_touchstone(rec, qubit.system(rec.z0));
    log_warnings(ctx, sweep.warnings);
    log_enhancement(ctx, s2p, sweep);
    emit(ctx, write_sweep_csv(sweep));
    return;
  }
  const auto grid = need_sweep(ctx).grid();
  for (const auto& run : family(ctx)) {
    const auto sweep = simulate_sweep(run.spec, grid, qubit.system(run.spec.z0));
    log_warnings(ctx, sweep.warnings);
    log_enhancement(ctx, label_of(run), sweep);
    emit(ctx, write_sweep_csv(sweep), run.suffix);
  }
}

nlohmann::ordered_json device_json(const DeviceRecord& d) {
  return {{"name", d.name},
          {"pitch_series_um", d.pitch_series_um},
          {"idt_pairs_series", d.idt_pairs_series},
          {"width_series_um", d.width_series_um},
          {"pitch_shunt_um", d.pitch_shunt_um},
          {"idt_pairs_shunt", d.idt_pairs_shunt},
          {"width_shunt_um", d.width_shunt_um},
          {"rotation_deg", d.rotation_deg},
          {"order", d.order}};
}

std::string report_json(const Context& ctx, const std::string& input, const FitReport& r) {
  const FitConfig& f = ctx.job.fit;
  nlohmann::ordered_json params = nlohmann::ordered_json::array();
  for (const auto& p : r.parameters) {
    params.push_back({{"name", p.name}, {"value", p.value}, {"sigma", p.sigma}});
  }
  nlohmann::ordered_json j = {
      {"input", input},
      {"model", f.model == FitModel::ladder ? "ladder" : "resonator"},
      {"kind", to_string(f.kind)},
      {"status", to_string(r.status)},
      {"iterations", r.iterations},
      {"residual_rms", r.residual_rms},
      {"relative_residual", r.relative_residual},
      {"model_mismatch", r.model_mismatch},
      {"parameters", params},
      {"residual_history", r.residual_history},
      {"warnings", r.warnings}};
  if (f.add_noise > 0.0) {
    j["added_noise"] = f.add_noise;
    j["seed"] = ctx.globals.seed;
  }
  if (ctx.job.device) j["device"] = device_json(*ctx.job.device);
  return j.dump(2) + "\n";
}

void cmd_fit(Context& ctx) {
  const FitConfig& f = ctx.job.fit;
  if (!ctx.job.io.input) throw ConfigError("io.input: required for fit");
  if (f.model == FitModel::ladder && f.kind == ObservableKind::admittance) {
    throw ConfigError("fit.kind: a ladder is fitted on s21 or s11");
  }
  const LadderFilterSpec& initial = need_filter(ctx);
  const auto rec = read_touchstone(*ctx.job.io.input);

  FitProblem problem;
  problem.freqs_hz = rec.freqs_hz;
  problem.kind = f.kind;
  problem.z0 = rec.z0;
  for (const auto& s : rec.s) {
    switch (f.kind) {
      case ObservableKind::s21: problem.target.push_back(s(1, 0)); break;
      case ObservableKind::s11: problem.target.push_back(s(0, 0)); break;
      case ObservableKind::admittance:
        // Series element between two z0 ports: S21 = 2 z0 Y / (2 z0 Y + 1).
        if (s(1, 0) == Complex{1.0, 0.0}) throw DomainError("S21 = 1 has no finite series admittance");
        problem.target.push_back(s(1, 0) / (2.0 * rec.z0 * (1.0 - s(1, 0))));
        break;
    }
  }
  if (f.add_noise > 0.0) {
    double power = 0.0;
    for (const auto& t : problem.target) power += std::norm(t);
    const double sigma = f.add_noise * std::sqrt(power / static_cast<double>(problem.target.size()));
    std::mt19937_64 rng(ctx.globals.seed);
    std::normal_distribution<double> noise(0.0, sigma / std::numbers::sqrt2);
    for (auto& t : problem.target) t += Complex{noise(rng), noise(rng)};
  }
  if (f.model == FitModel::ladder) {
    LadderFilterSpec spec = initial;
    if (spec.z0 != rec.z0) {
      ctx.err << "warning: using the data reference impedance " << shortest(rec.z0) << " ohm\n";
      spec.z0 = rec.z0;
    }
    problem.initial = spec;
  } else {
    problem.initial = initial.series;
  }
  problem.bounds = f.bounds;
  problem.options.max_iterations = f.max_iterations;
  problem.options.magnitude_only = f.magnitude_only;
  problem.options.mismatch_threshold = f.mismatch_threshold;

  const FitReport report = f.model == FitModel::ladder ? fit_ladder(problem) : fit_bvd(problem);
  log_warnings(ctx, report.warnings);
  char buf[128];
  std::snprintf(buf, sizeof buf, "fit %s after %d iterations, relative residual %.3g\n",
                to_string(report.status).c_str(), report.iterations, report.relative_residual);
  ctx.err << buf;
  emit(ctx, report_json(ctx, *ctx.job.io.input, report));
}

void cmd_convert(Context& ctx, const std::string& positional) {
  const std::string input = !positional.empty() ? positional : ctx.job.io.input.value_or("");
  if (input.empty()) throw ConfigError("convert: no input file given");
  if (std::filesystem::path(input).extension() == ".csv") {
    throw ConfigError("convert: a sweep CSV cannot be converted back to Touchstone");
  }
  const auto rec = read_touchstone(input);
  const std::string target = !ctx.globals.out.empty() ? ctx.globals.out : ctx.job.io.output.value_or("");
  std::string ext = std::filesystem::path(target).extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (!ctx.globals.to_stdout && ext == ".s2p") {
    emit(ctx, write_touchstone(rec));
    return;
  }
  SweepResult sweep;
  for (std::size_t i = 0; i < rec.s.size(); ++i) {
    SweepRow row;
    row.freq_hz = rec.freqs_hz[i];
    row.s11 = rec.s[i](0, 0);
    row.s21 = rec.s[i](1, 0);
    const auto r = re_zext_from_s11(rec.s[i](0, 0), rec.z0);
    if (r.status != ResistanceStatus::non_passive) row.re_zext_ohm = r.ohms;
    sweep.rows.push_back(row);
  }
  emit(ctx, write_sweep_csv(sweep));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ladder Purcell filter simulation, T1 analysis, fitting and file conversion", "mechpf"};
  app.require_subcommand(1);
  Globals globals;
  app.add_option("--config", globals.config, "INI job configuration");
  app.add_option("--out", globals.out, "output path; families insert a suffix before the extension");
  app.add_flag("--stdout", globals.to_stdout, "write data to stdout instead of a file");
  app.add_option("--seed", globals.seed, "seed for added fit noise");

  auto* simulate = app.add_subcommand("simulate", "sweep the filter and write CSV (and Touchstone)");
  auto* t1 = app.add_subcommand("t1", "Purcell-limited T1 with and without the filter");
  std::string s2p;
  bool no_filter = false;
  t1->add_option("--s2p", s2p, "measured Touchstone file as the environment");
  t1->add_flag("--no-filter", no_filter, "flat environment at z0");
  auto* fit = app.add_subcommand("fit", "fit the [filter] model to the [io] input file");
  auto* convert = app.add_subcommand("convert", "Touchstone to sweep CSV or normalized Touchstone");
  std::string convert_input;
  convert->add_option("input", convert_input, "Touchstone input (default [io] input)");
  for (auto* sub : {simulate, t1, fit, convert}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    Context ctx{globals, {}, out, err};
    if (!globals.config.empty()) ctx.job = load_job_config(globals.config);
    else if (!convert->parsed()) throw ConfigError("--config is required for this command");
    if (simulate->parsed()) cmd_simulate(ctx);
    else if (t1->parsed()) cmd_t1(ctx, s2p, no_filter);
    else if (fit->parsed()) cmd_fit(ctx);
    else cmd_convert(ctx, convert_input);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace mechpf::cli
