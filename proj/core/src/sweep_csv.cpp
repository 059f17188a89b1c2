#include "mechpf/sweep_csv.hpp"

#include <cmath>

#include "mechpf/errors.hpp"
#include "text_format.hpp"

namespace mechpf {

namespace {

std::string cell(const std::optional<double>& v) {
  if (!v || std::isnan(*v)) return {};
  if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
  return detail::format_number(*v);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::optional<double> read_cell(std::string_view text, int line, const char* column) {
  if (text.empty()) return std::nullopt;
  const auto v = detail::parse_number(text);
  if (!v || std::isnan(*v)) {
    throw ParseError(line, std::string("invalid number in column ") + column);
  }
  return v;
}

std::optional<Complex> read_pair(std::string_view re, std::string_view im, int line,
                                 const char* name) {
  const auto r = read_cell(re, line, name);
  const auto i = read_cell(im, line, name);
  if (r.has_value() != i.has_value()) {
    throw ParseError(line, std::string("incomplete complex value in ") + name);
  }
  if (!r) return std::nullopt;
  return Complex{*r, *i};
}

}  // namespace

std::string write_sweep_csv(const SweepResult& sweep) {
  std::string out(kSweepCsvHeader);
  out += '\n';
  for (const auto& row : sweep.rows) {
    const auto re = [](const std::optional<Complex>& z) {
      return z ? std::optional<double>(z->real()) : std::nullopt;
    };
    const auto im = [](const std::optional<Complex>& z) {
      return z ? std::optional<double>(z->imag()) : std::nullopt;
    };
    out += cell(row.freq_hz);
    for (const auto& v : {re(row.s11), im(row.s11), re(row.s21), im(row.s21), row.re_zext_ohm,
                          row.filter_factor, row.t1_unfiltered_s, row.t1_filtered_s}) {
      out += ',';
      out += cell(v);
    }
    out += '\n';
  }
  return out;
}

SweepResult read_sweep_csv(std::string_view text) {
  const auto lines = detail::split_lines(text);
  if (lines.empty() || lines.front() != kSweepCsvHeader) {
    throw ParseError(1, "unexpected sweep CSV header");
  }
  SweepResult out;
  for (std::size_t idx = 1; idx < lines.size(); ++idx) {
    const int line = static_cast<int>(idx) + 1;
    if (lines[idx].empty()) continue;
    const auto cells = split_commas(lines[idx]);
    if (cells.size() != 9) {
      throw ParseError(line, "expected 9 cells, found " + std::to_string(cells.size()));
    }
    SweepRow row;
    const auto f = read_cell(cells[0], line, "freq_hz");
    if (!f || !std::isfinite(*f)) throw ParseError(line, "missing or non-finite frequency");
    row.freq_hz = *f;
    row.s11 = read_pair(cells[1], cells[2], line, "s11");
    row.s21 = read_pair(cells[3], cells[4], line, "s21");
    row.re_zext_ohm = read_cell(cells[5], line, "re_zext_ohm");
    row.filter_factor = read_cell(cells[6], line, "filter_factor");
    row.t1_unfiltered_s = read_cell(cells[7], line, "t1_unfiltered_s");
    row.t1_filtered_s = read_cell(cells[8], line, "t1_filtered_s");
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace mechpf
