#include "mechpf/touchstone.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "mechpf/errors.hpp"
#include "text_format.hpp"

namespace mechpf {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

struct OptionLine {
  double unit_scale = 1e9;
  TouchstoneFormat format = TouchstoneFormat::ma;
  double z0 = 50.0;
};

OptionLine parse_option_line(std::string_view content, int line) {
  OptionLine opt;
  bool seen_unit = false;
  bool seen_param = false;
  bool seen_format = false;
  bool seen_r = false;
  const auto tokens = detail::split_whitespace(content.substr(1));
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string t = lower(tokens[i]);
    const auto once = [&](bool& seen, const char* what) {
      if (seen) throw ParseError(line, std::string("option line repeats the ") + what);
      seen = true;
    };
    if (t == "hz" || t == "khz" || t == "mhz" || t == "ghz") {
      once(seen_unit, "frequency unit");
      opt.unit_scale = t == "hz" ? 1.0 : t == "khz" ? 1e3 : t == "mhz" ? 1e6 : 1e9;
    } else if (t == "s" || t == "y" || t == "z" || t == "h" || t == "g") {
      once(seen_param, "parameter type");
      if (t != "s") throw ParseError(line, "only S parameters are supported, found " + t);
    } else if (t == "ri" || t == "ma" || t == "db") {
      once(seen_format, "data format");
      opt.format = t == "ri" ? TouchstoneFormat::ri
                   : t == "ma" ? TouchstoneFormat::ma
                               : TouchstoneFormat::db;
    } else if (t == "r") {
      once(seen_r, "reference resistance");
      if (i + 1 >= tokens.size()) throw ParseError(line, "option R needs a resistance value");
      const auto z0 = detail::parse_number(tokens[++i]);
      if (!z0 || !std::isfinite(*z0) || !(*z0 > 0.0)) {
        throw ParseError(line, "invalid reference resistance '" + std::string(tokens[i]) + "'");
      }
      opt.z0 = *z0;
    } else {
      throw ParseError(line, "unknown option '" + std::string(tokens[i]) + "'");
    }
  }
  return opt;
}

Complex decode_pair(double a, double b, TouchstoneFormat format, int line) {
  constexpr double deg = std::numbers::pi / 180.0;
  switch (format) {
    case TouchstoneFormat::ri: return {a, b};
    case TouchstoneFormat::ma:
      if (a < 0.0) throw ParseError(line, "negative magnitude in MA data");
      return std::polar(a, b * deg);
    case TouchstoneFormat::db: {
      const double mag = std::pow(10.0, a / 20.0);
      if (!std::isfinite(mag)) throw ParseError(line, "dB magnitude out of range");
      return std::polar(mag, b * deg);
    }
  }
  return {};
}

bool is_comment_text(const std::string& c) {
  if (c.find('\n') != std::string::npos || (!c.empty() && c.back() == '\r')) return false;
  const auto first = c.find_first_not_of(" \t");
  return first != std::string::npos && c[first] == '!';
}

}  // namespace

void validate(const TouchstoneRecord& rec) {
  if (rec.freqs_hz.size() != rec.s.size()) {
    throw DomainError("touchstone record has mismatched frequency and data lengths");
  }
  if (!(rec.z0 > 0.0) || !std::isfinite(rec.z0)) {
    throw DomainError("touchstone reference impedance must be positive");
  }
  for (std::size_t i = 0; i < rec.freqs_hz.size(); ++i) {
    const double f = rec.freqs_hz[i];
    if (!(f >= 0.0) || !std::isfinite(f) || (i > 0 && !(f > rec.freqs_hz[i - 1]))) {
      throw DomainError("touchstone frequencies must be non-negative and strictly increasing");
    }
    if (!rec.s[i].allFinite()) throw DomainError("touchstone S values must be finite");
  }
  for (const auto& c : rec.comments) {
    if (!is_comment_text(c)) throw DomainError("touchstone comment lines must start with '!'");
  }
}

TouchstoneRecord parse_touchstone(std::string_view text) {
  TouchstoneRecord rec;
  OptionLine opt;
  bool have_option = false;
  const auto lines = detail::split_lines(text);
  for (std::size_t idx = 0; idx < lines.size(); ++idx) {
    const int line = static_cast<int>(idx) + 1;
    const std::string_view raw = lines[idx];
    const auto first = raw.find_first_not_of(" \t");
    if (first == std::string_view::npos) continue;
    if (raw[first] == '!') {
      rec.comments.emplace_back(raw);
      continue;
    }
    if (raw[first] == '[') {
      throw ParseError(line, "Touchstone 2.0 keyword found; only version 1 files are supported");
    }
    std::string_view content = raw.substr(first);
    if (const auto bang = content.find('!'); bang != std::string_view::npos) {
      rec.comments.emplace_back(content.substr(bang));
      content = content.substr(0, bang);
    }
    if (content.front() == '#') {
      if (!rec.freqs_hz.empty()) throw ParseError(line, "option line after data");
      // Only the first option line counts.
      if (!have_option) opt = parse_option_line(content, line);
      have_option = true;
      continue;
    }

    const auto tokens = detail::split_whitespace(content);
    if (tokens.size() != 9) {
      throw ParseError(line, "expected 9 values on a two-port data line, found " +
                                 std::to_string(tokens.size()));
    }
    double v[9];
    for (std::size_t k = 0; k < 9; ++k) {
      const auto parsed = detail::parse_number(tokens[k]);
      if (!parsed) throw ParseError(line, "invalid number '" + std::string(tokens[k]) + "'");
      if (!std::isfinite(*parsed)) throw ParseError(line, "non-finite value");
      v[k] = *parsed;
    }
    const double f = v[0] * opt.unit_scale;
    if (f < 0.0) throw ParseError(line, "negative frequency");
    if (!rec.freqs_hz.empty() && !(f > rec.freqs_hz.back())) {
      throw ParseError(line, "frequencies must be strictly increasing");
    }
    SMatrix s;
    s(0, 0) = decode_pair(v[1], v[2], opt.format, line);
    s(1, 0) = decode_pair(v[3], v[4], opt.format, line);
    s(0, 1) = decode_pair(v[5], v[6], opt.format, line);
    s(1, 1) = decode_pair(v[7], v[8], opt.format, line);
    if (!s.allFinite()) throw ParseError(line, "S value out of range");
    rec.freqs_hz.push_back(f);
    rec.s.push_back(s);
  }
  if (rec.freqs_hz.empty()) {
    throw ParseError(static_cast<int>(std::max<std::size_t>(lines.size(), 1)), "no data lines");
  }
  rec.z0 = opt.z0;
  rec.format = opt.format;
  return rec;
}

std::string write_touchstone(const TouchstoneRecord& rec, int significant_digits) {
  validate(rec);
  const auto num = [&](double x) { return detail::format_number(x, significant_digits); };
  std::string out;
  for (const auto& c : rec.comments) {
    out += c;
    out += '\n';
  }
  out += "# Hz S RI R " + num(rec.z0) + "\n";
  for (std::size_t i = 0; i < rec.freqs_hz.size(); ++i) {
    out += num(rec.freqs_hz[i]);
    const SMatrix& s = rec.s[i];
    for (const Complex z : {s(0, 0), s(1, 0), s(0, 1), s(1, 1)}) {
      out += ' ';
      out += num(z.real());
      out += ' ';
      out += num(z.imag());
    }
    out += '\n';
  }
  return out;
}

TouchstoneRecord touchstone_from_network(const TwoPortNetwork& net,
                                         std::vector<std::string> comments) {
  TouchstoneRecord rec;
  rec.z0 = net.z0();
  rec.comments = std::move(comments);
  rec.freqs_hz.assign(net.freqs_hz().begin(), net.freqs_hz().end());
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto s = abcd_to_s(net.chain()[i], net.z0());
    if (!s) {
      throw NumericalError("S parameters are not representable at " +
                           detail::format_number(rec.freqs_hz[i]) + " Hz");
    }
    rec.s.push_back(*s);
  }
  return rec;
}

std::optional<SMatrix> interpolate_s(const TouchstoneRecord& rec, double freq_hz) {
  const auto& f = rec.freqs_hz;
  if (f.empty() || !(freq_hz >= f.front()) || !(freq_hz <= f.back())) return std::nullopt;
  const auto it = std::lower_bound(f.begin(), f.end(), freq_hz);
  const auto hi = static_cast<std::size_t>(it - f.begin());
  if (f[hi] == freq_hz) return rec.s[hi];
  const std::size_t lo = hi - 1;
  const double t = (freq_hz - f[lo]) / (f[hi] - f[lo]);
  return SMatrix(rec.s[lo] + t * (rec.s[hi] - rec.s[lo]));
}

std::string to_string(TouchstoneFormat format) {
  switch (format) {
    case TouchstoneFormat::ri: return "RI";
    case TouchstoneFormat::ma: return "MA";
    case TouchstoneFormat::db: return "DB";
  }
  return "unknown";
}

}  // namespace mechpf
