#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "xmem/commands.hpp"

namespace xmem {

namespace {

namespace fs = std::filesystem;

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  }
  std::string get(const std::vector<std::string>& row, const std::string& name) const {
    const int c = col(name);
    return c < 0 || c >= static_cast<int>(row.size()) ? "" : row[c];
  }
};

std::optional<Table> read_table(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  if (!in || !std::getline(in, line)) return std::nullopt;
  Table t{split_csv(line), {}};
  while (std::getline(in, line)) {
    if (!line.empty()) t.rows.push_back(split_csv(line));
  }
  return t;
}

std::string fixed2(const std::string& s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", std::stod(s));
  return buf;
}

// Appends gnuplot blocks (n, dispersion) per level; blocks separated by two blank lines.
void append_plot(const Table& t, std::ostream& plot) {
  const bool clt = t.col("variance") >= 0;
  std::string current;
  for (const auto& row : t.rows) {
    const std::string n = t.get(row, "n");
    if (n == "summary") continue;
    const std::string key = t.get(row, "experiment_id") + " level=" + t.get(row, "level");
    if (key != current) {
      if (!current.empty()) plot << "\n\n";
      plot << "# " << key << "\n# n dispersion\n";
      current = key;
    }
    double value = 0.0;
    if (clt) {
      value = std::stod(t.get(row, "variance")) * std::pow(std::stod(n), std::stod(t.get(row, "d")));
    } else {
      value = std::stod(t.get(row, "iqr"));
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s %.17g\n", n.c_str(), value);
    plot << buf;
  }
  if (!current.empty()) plot << "\n\n";
}

bool report_csv(const fs::path& p, std::ostream& out, std::ostream* plot) {
  const auto t = read_table(p);
  if (!t || t->col("exponent") < 0 || t->col("predicted_exponent") < 0) return false;
  out << p.filename().string() << "\n";
  const bool clt = t->col("level") >= 0;
  for (const auto& row : t->rows) {
    if (t->get(row, "n") != "summary") continue;
    out << "  " << t->get(row, "experiment_id");
    if (clt) out << " level=" << t->get(row, "level") << " transform=" << t->get(row, "transform");
    else out << " alpha=" << t->get(row, "alpha");
    out << " eta=" << t->get(row, "eta") << ": measured " << fixed2(t->get(row, "exponent")) << "±"
        << fixed2(t->get(row, "exponent_stderr")) << " predicted " << fixed2(t->get(row, "predicted_exponent"))
        << "\n";
  }
  if (plot) append_plot(*t, *plot);
  return true;
}

std::string value_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v.get<double>());
  return buf;
}

bool report_json(const fs::path& p, std::ostream& out) {
  std::ifstream in(p);
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("schema")) return false;
  out << p.filename().string() << " (" << j.value("command", "?") << ")\n";
  if (j.contains("verdict")) {
    out << "  verdict " << j["verdict"].get<std::string>() << "  series " << value_text(j["series_value"])
        << "  transform " << j.value("transform", "?") << "\n";
    if (j.contains("sweep")) {
      out << "  eta       mu                       verdict       series\n";
      for (const auto& row : j["sweep"]) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "  %-9.4g %-24s %-13s %s\n", row["eta"].get<double>(),
                      row["mu"].get<std::string>().c_str(), row["verdict"].get<std::string>().c_str(),
                      value_text(row["series_value"]).c_str());
        out << buf;
      }
    }
  } else if (j.contains("levels")) {
    for (const auto& row : j["levels"]) {
      out << "  level " << value_text(row["level"]) << ": rank " << value_text(row["q"]);
      if (row.contains("predicted_exponent")) out << " predicted " << value_text(row["predicted_exponent"]);
      out << "\n";
    }
  }
  return true;
}

}  // namespace

int report(const fs::path& target, const std::optional<fs::path>& plot, std::ostream& out,
           std::ostream& err) {
  std::vector<fs::path> files;
  std::error_code ec;
  if (fs::is_directory(target, ec)) {
    for (const auto& e : fs::directory_iterator(target, ec)) {
      const auto ext = e.path().extension();
      if (e.is_regular_file() && (ext == ".csv" || ext == ".json")) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
  } else if (fs::is_regular_file(target, ec)) {
    files.push_back(target);
  }
  if (files.empty()) {
    err << "xmem: no run artifacts found at '" << target.string() << "'\n";
    return kExitConfig;
  }
  std::ostringstream text;
  std::ostringstream plot_data;
  int readable = 0;
  for (const auto& f : files) {
    try {
      const bool ok = f.extension() == ".json" ? report_json(f, text)
                                               : report_csv(f, text, plot ? &plot_data : nullptr);
      readable += ok;
    } catch (const std::exception&) {
      // unreadable artifact: skipped, counted below
    }
  }
  if (readable == 0) {
    err << "xmem: no readable run artifacts at '" << target.string() << "'\n";
    return kExitConfig;
  }
  out << text.str();
  if (plot) {
    try {
      write_atomic(*plot, plot_data.str());
    } catch (const std::exception& e) {
      err << "xmem: " << e.what() << "\n";
      return kExitConfig;
    }
  }
  return kExitOk;
}

}  // namespace xmem
