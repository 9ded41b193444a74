#pragma once

// Regenerates the three headline tables from scratch and renders them as
// text, CSV, or JSON. Paper precision mirrors the printed digits (three
// decimals for u and LR, five for Table 1 p-values, one for Table 3 sup LR);
// full precision emits shortest round-trip doubles.

#include <array>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "evscale/asymptotics.hpp"
#include "evscale/exact.hpp"
#include "evscale/families.hpp"
#include "evscale/report.hpp"

namespace evscale {

enum class OutputFormat { text, csv, json };
enum class Precision { paper, full };

struct Table1Row {
  std::int64_t n;
  std::int64_t k;
  double u;
  double lr;
  double p_value;
};

inline constexpr std::array<std::int64_t, 6> kTable1N = {
    20, 100, 1000, 10000, 100000, 1000000};

inline std::vector<Table1Row> table1_rows() {
  std::vector<Table1Row> rows;
  for (std::int64_t n : kTable1N) {
    Experiment e = find_neutral_k(n);
    rows.push_back(Table1Row{e.n, e.k, standardize(e, 0.5).u,
                             exact_lr_uniform_vs_fair(e),
                             exact_p_value_fair(e, Sided::two)});
  }
  return rows;
}

struct Table2Column {
  std::string label;
  std::int64_t n;
  std::int64_t k;
  double u;
  double p_value;
  double lr;
};

inline std::array<Table2Column, 2> table2_columns() {
  std::array<Table2Column, 2> cols{
      Table2Column{"a", 10000, 4815, 0, 0, 0},
      Table2Column{"b", 100000000000, 49999214176, 0, 0, 0}};
  for (auto& c : cols) {
    Experiment e(c.n, c.k);
    c.u = standardize(e, 0.5).u;
    c.p_value = exact_p_value_fair(e, Sided::two);
    c.lr = exact_lr_uniform_vs_fair(e);
  }
  return cols;
}

struct Table3Row {
  Sided sided;
  double p_value;
  double u;
  double sup_lr;
};

inline constexpr std::array<double, 4> kTable3PValues = {0.050, 0.010, 0.005,
                                                         0.001};

inline std::vector<Table3Row> table3_rows() {
  std::vector<Table3Row> rows;
  for (Sided sided : {Sided::one, Sided::two}) {
    for (double p : kTable3PValues) {
      auto m = max_lr_for_pvalue(p, sided);
      rows.push_back(Table3Row{sided, p, m.u, m.sup_lr});
    }
  }
  return rows;
}

namespace detail {

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

inline std::string fmt_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string fmt_int(std::int64_t v) { return std::to_string(v); }

// Right-aligned column layout with two-space separators.
inline std::string layout_text(const std::vector<std::string>& header,
                               const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c)
      width[c] = std::max(width[c], row[c].size());
  std::string out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += "  ";
      out.append(width[c] - row[c].size(), ' ');
      out += row[c];
    }
    out += '\n';
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  return out;
}

inline std::string join_csv(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  line += '\n';
  return line;
}

} // namespace detail

inline std::string render_table1(OutputFormat format, Precision precision) {
  auto rows = table1_rows();
  const bool paper = precision == Precision::paper;
  auto u_s = [&](double v) {
    return paper ? detail::fmt("%.3f", v) : detail::fmt_full(v);
  };
  auto lr_s = u_s;
  auto p_s = [&](double v) {
    return paper ? detail::fmt("%.5f", v) : detail::fmt_full(v);
  };

  if (format == OutputFormat::json) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
      ordered_json j;
      j["n"] = r.n;
      j["k"] = r.k;
      j["u"] = r.u;
      j["lr"] = r.lr;
      j["p_value"] = r.p_value;
      arr.push_back(j);
    }
    return arr.dump(2) + "\n";
  }

  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows)
    cells.push_back({detail::fmt_int(r.n), detail::fmt_int(r.k), u_s(r.u),
                     lr_s(r.lr), p_s(r.p_value)});
  if (format == OutputFormat::csv) {
    std::string out = detail::join_csv({"n", "k", "u", "lr", "p_value"});
    for (const auto& row : cells) out += detail::join_csv(row);
    return out;
  }
  return detail::layout_text({"n", "k", "u", "LR", "p-value"}, cells);
}

inline std::string render_table2(OutputFormat format, Precision precision) {
  auto cols = table2_columns();
  const bool paper = precision == Precision::paper;
  auto u_s = [&](double v) {
    return paper ? detail::fmt("%.2f", v) : detail::fmt_full(v);
  };
  auto p_s = [&](double v) {
    return paper ? detail::fmt("%.1e", v) : detail::fmt_full(v);
  };
  auto lr_s = [&](double v) {
    return paper ? detail::fmt("%.3g", v) : detail::fmt_full(v);
  };

  if (format == OutputFormat::json) {
    ordered_json arr = ordered_json::array();
    for (const auto& c : cols) {
      ordered_json j;
      j["researcher"] = c.label;
      j["n"] = c.n;
      j["k"] = c.k;
      j["u"] = c.u;
      j["p_value"] = c.p_value;
      j["lr"] = c.lr;
      arr.push_back(j);
    }
    return arr.dump(2) + "\n";
  }

  const bool csv = format == OutputFormat::csv;
  std::vector<std::vector<std::string>> cells = {
      {"n", detail::fmt_int(cols[0].n), detail::fmt_int(cols[1].n)},
      {"k", detail::fmt_int(cols[0].k), detail::fmt_int(cols[1].k)},
      {"u", u_s(cols[0].u), u_s(cols[1].u)},
      {csv ? "p_value" : "p-value", p_s(cols[0].p_value), p_s(cols[1].p_value)},
      {csv ? "lr" : "LR", lr_s(cols[0].lr), lr_s(cols[1].lr)}};
  if (csv) {
    std::string out = detail::join_csv({"quantity", "a", "b"});
    for (const auto& row : cells) out += detail::join_csv(row);
    return out;
  }
  return detail::layout_text({"quantity", "A", "B"}, cells);
}

inline std::string render_table3(OutputFormat format, Precision precision) {
  auto rows = table3_rows();
  const bool paper = precision == Precision::paper;
  auto p_s = [&](double v) {
    return paper ? detail::fmt("%.3f", v) : detail::fmt_full(v);
  };
  auto u_s = p_s;
  auto sup_s = [&](double v) {
    return paper ? detail::fmt("%.1f", v) : detail::fmt_full(v);
  };

  if (format == OutputFormat::json) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
      ordered_json j;
      j["sided"] = r.sided == Sided::one ? "one" : "two";
      j["p_value"] = r.p_value;
      j["u"] = r.u;
      j["sup_lr"] = r.sup_lr;
      arr.push_back(j);
    }
    return arr.dump(2) + "\n";
  }

  if (format == OutputFormat::csv) {
    std::string out = detail::join_csv({"sided", "p_value", "u", "sup_lr"});
    for (const auto& r : rows)
      out += detail::join_csv({r.sided == Sided::one ? "one" : "two",
                               p_s(r.p_value), u_s(r.u), sup_s(r.sup_lr)});
    return out;
  }

  std::string out;
  for (Sided sided : {Sided::one, Sided::two}) {
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows) {
      if (r.sided != sided) continue;
      cells.push_back({p_s(r.p_value), u_s(r.u), sup_s(r.sup_lr)});
    }
    out += detail::layout_text(
        {sided == Sided::one ? "1-sided p-value" : "2-sided p-value", "u",
         "sup LR"},
        cells);
    if (sided == Sided::one) out += '\n';
  }
  return out;
}

inline std::string render_table(int which, OutputFormat format,
                                Precision precision) {
  switch (which) {
    case 1: return render_table1(format, precision);
    case 2: return render_table2(format, precision);
    case 3: return render_table3(format, precision);
    default: throw domain_error("render_table: table number must be 1, 2, or 3");
  }
}

} // namespace evscale
