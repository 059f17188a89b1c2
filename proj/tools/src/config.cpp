#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "mechpf/analysis.hpp"
#include "mechpf/errors.hpp"

namespace mechpf::cli {

namespace pt = boost::property_tree;

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

/// One section's key/value pairs with tracking of which keys were consumed.
class Section {
 public:
  Section(std::string name, const pt::ptree& tree) : name_(std::move(name)) {
    for (const auto& [key, child] : tree) {
      if (!child.empty()) throw ConfigError(path(key) + ": nested values are not supported");
      if (!values_.emplace(key, trim(child.data())).second) {
        throw ConfigError(path(key) + ": duplicate key");
      }
    }
  }

  std::string path(const std::string& key) const { return name_ + "." + key; }

  std::optional<std::string> text(const std::string& key) {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    used_.insert(key);
    return it->second;
  }

  std::string required_text(const std::string& key) {
    auto v = text(key);
    if (!v) throw ConfigError(path(key) + ": required key is missing");
    return *v;
  }

  double number(const std::string& key, const std::string& value) const {
    double out = 0.0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || !std::isfinite(out)) {
      throw ConfigError(path(key) + ": expected a finite number, got '" + value + "'");
    }
    return out;
  }

  std::optional<double> optional_number(const std::string& key) {
    const auto v = text(key);
    if (!v) return std::nullopt;
    return number(key, *v);
  }

  double required_number(const std::string& key) { return number(key, required_text(key)); }

  double positive(const std::string& key) {
    const double v = required_number(key);
    if (!(v > 0.0)) throw ConfigError(path(key) + ": must be positive");
    return v;
  }

  int integer(const std::string& key, int fallback, int minimum) {
    const auto v = text(key);
    if (!v) return fallback;
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || ptr != v->data() + v->size()) {
      throw ConfigError(path(key) + ": expected an integer, got '" + *v + "'");
    }
    if (out < minimum) {
      throw ConfigError(path(key) + ": must be at least " + std::to_string(minimum));
    }
    return out;
  }

  bool boolean(const std::string& key, bool fallback) {
    const auto v = text(key);
    if (!v) return fallback;
    if (*v == "true") return true;
    if (*v == "false") return false;
    throw ConfigError(path(key) + ": expected true or false, got '" + *v + "'");
  }

  Quality quality(const std::string& key, const std::string& value) const {
    if (value == "inf") return Quality::unbounded();
    const double q = number(key, value);
    if (!(q > 0.0)) throw ConfigError(path(key) + ": quality factor must be positive or inf");
    return Quality::finite(q);
  }

  std::vector<std::string> list(const std::string& key) {
    std::vector<std::string> out;
    const auto v = text(key);
    if (!v) return out;
    std::stringstream in(*v);
    std::string item;
    while (std::getline(in, item, ',')) {
      item = trim(item);
      if (item.empty()) throw ConfigError(path(key) + ": empty list entry");
      out.push_back(item);
    }
    return out;
  }

  /// Throws for any key that no reader asked for.
  void finish() const {
    for (const auto& [key, value] : values_) {
      if (!used_.contains(key)) throw ConfigError(path(key) + ": unknown key");
    }
  }

 private:
  std::string name_;
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

ResonatorSpec resonator(Section& s, const std::string& prefix) {
  ResonatorSpec r;
  r.omega_m = kTau * s.positive(prefix + "_freq_hz");
  r.k2 = s.positive(prefix + "_k2");
  r.q = s.quality(prefix + "_q", s.required_text(prefix + "_q"));
  r.c_g = s.positive(prefix + "_cg_f");
  return r;
}

void read_filter(Section& s, JobConfig& job) {
  LadderFilterSpec f;
  f.order = s.integer("order", 3, 1);
  f.shunt_multiplicity = s.integer("shunt_multiplicity", 2, 1);
  f.z0 = s.optional_number("z0").value_or(50.0);
  f.series = resonator(s, "series");
  f.shunt = resonator(s, "shunt");
  try {
    validate(f);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("filter: ") + e.what());
  }
  for (const auto& item : s.list("q_list")) job.q_list.push_back(s.quality("q_list", item));
  for (const auto& item : s.list("series_detuning_hz_list")) {
    job.series_detuning_hz.push_back(s.number("series_detuning_hz_list", item));
  }
  for (const double d : job.series_detuning_hz) {
    if (!(f.series.omega_m + kTau * d > 0.0)) {
      throw ConfigError(s.path("series_detuning_hz_list") + ": detuning moves the series resonance below zero");
    }
  }
  job.filter = f;
}

void read_sweep(Section& s, JobConfig& job) {
  SweepConfig sw;
  sw.start_hz = s.required_number("start_hz");
  sw.stop_hz = s.required_number("stop_hz");
  sw.points = s.integer("points", 2001, 1);
  try {
    (void)sw.grid();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("sweep: ") + e.what());
  }
  job.sweep = sw;
}

void read_qubit(Section& s, JobConfig& job) {
  job.qubit = QubitConfig{s.positive("omega_r"), s.positive("g"), s.positive("kappa")};
}

void read_io(Section& s, JobConfig& job) {
  job.io.input = s.text("input");
  job.io.output = s.text("output");
  job.io.touchstone = s.text("touchstone");
}

void read_fit(Section& s, JobConfig& job) {
  FitConfig& f = job.fit;
  if (const auto model = s.text("model")) {
    if (*model == "ladder") f.model = FitModel::ladder;
    else if (*model == "resonator") f.model = FitModel::resonator;
    else throw ConfigError(s.path("model") + ": expected ladder or resonator, got '" + *model + "'");
  }
  if (const auto kind = s.text("kind")) {
    if (*kind == "s21") f.kind = ObservableKind::s21;
    else if (*kind == "s11") f.kind = ObservableKind::s11;
    else if (*kind == "admittance") f.kind = ObservableKind::admittance;
    else throw ConfigError(s.path("kind") + ": expected s21, s11 or admittance, got '" + *kind + "'");
  }
  f.max_iterations = s.integer("max_iterations", 200, 1);
  f.magnitude_only = s.boolean("magnitude_only", false);
  f.mismatch_threshold = s.optional_number("mismatch_threshold").value_or(0.05);
  if (!(f.mismatch_threshold > 0.0)) throw ConfigError(s.path("mismatch_threshold") + ": must be positive");
  f.add_noise = s.optional_number("add_noise").value_or(0.0);
  if (f.add_noise < 0.0) throw ConfigError(s.path("add_noise") + ": must not be negative");
  for (const char* name : {"f_m", "k2", "q", "c_g", "f_series", "f_shunt", "k2_series",
                           "k2_shunt", "q_series", "q_shunt", "c_g_scale"}) {
    const std::string key = std::string("bound_") + name;
    const auto items = s.list(key);
    if (items.empty()) continue;
    if (items.size() != 2) throw ConfigError(s.path(key) + ": expected 'lower, upper'");
    f.bounds.push_back({name, s.number(key, items[0]), s.number(key, items[1])});
  }
}

void read_device(Section& s, JobConfig& job) {
  DeviceRecord d;
  d.name = s.required_text("name");
  bool known = false;
  for (const auto& ref : reference_devices()) {
    if (ref.name == d.name) {
      d = ref;
      known = true;
    }
  }
  const auto real = [&](const std::string& key, double& field) {
    if (const auto v = s.optional_number(key)) field = *v;
    else if (!known) throw ConfigError(s.path(key) + ": required for a custom device");
  };
  const auto whole = [&](const std::string& key, int& field) {
    if (s.text(key)) field = s.integer(key, 0, 1);
    else if (!known) throw ConfigError(s.path(key) + ": required for a custom device");
  };
  real("pitch_series_um", d.pitch_series_um);
  whole("idt_pairs_series", d.idt_pairs_series);
  real("width_series_um", d.width_series_um);
  real("pitch_shunt_um", d.pitch_shunt_um);
  whole("idt_pairs_shunt", d.idt_pairs_shunt);
  real("width_shunt_um", d.width_shunt_um);
  real("rotation_deg", d.rotation_deg);
  whole("order", d.order);
  try {
    validate(d);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("device: ") + e.what());
  }
  job.device = d;
}

}  // namespace

std::vector<double> SweepConfig::grid() const { return linear_grid(start_hz, stop_hz, points); }

ReadoutSystem QubitConfig::system(double z0) const {
  return {kTau * omega_r_hz, kTau * omega_r_hz, kTau * g_hz, kTau * kappa_hz, z0};
}

JobConfig parse_job_config(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  using Reader = void (*)(Section&, JobConfig&);
  const std::map<std::string, Reader> readers = {
      {"filter", read_filter}, {"sweep", read_sweep}, {"qubit", read_qubit},
      {"io", read_io},         {"fit", read_fit},     {"device", read_device}};
  JobConfig job;
  std::set<std::string> seen;
  for (const auto& [name, child] : tree) {
    if (child.empty() && !child.data().empty()) {
      throw ConfigError(name + ": keys must appear inside a section");
    }
    const auto reader = readers.find(name);
    if (reader == readers.end()) throw ConfigError(name + ": unknown section");
    if (!seen.insert(name).second) throw ConfigError(name + ": duplicate section");
    Section section(name, child);
    reader->second(section, job);
    section.finish();
  }
  return job;
}

JobConfig load_job_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_job_config(text.str());
}

}  // namespace mechpf::cli
