#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sco/bench.hpp"
#include "util/number_format.hpp"

namespace sco {

namespace {

constexpr const char* kHeader =
    "solver,model,n,p,s_true,s_used,seed,accuracy,recall,precision,f1,runtime_s,objective";
constexpr std::size_t kColumns = 13;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

template <typename Int>
Int parse_integer(const std::string& text) {
  Int value{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw std::invalid_argument("not an integer: '" + text + "'");
  }
  return value;
}

std::string mean_sd(const std::vector<double>& values) {
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double sd = 0.0;
  if (values.size() > 1) {
    for (double v : values) sd += (v - mean) * (v - mean);
    sd = std::sqrt(sd / static_cast<double>(values.size() - 1));
  }
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.2f (%.2f)", mean, sd);
  return buffer;
}

}  // namespace

void write_records_csv(std::ostream& out, std::span<const BenchRecord> records) {
  using detail::format_double;
  out << kHeader << '\n';
  for (const BenchRecord& r : records) {
    out << r.solver << ',' << r.model << ',' << r.n << ',' << r.p << ',' << r.s_true << ','
        << r.s_used << ',' << r.seed << ',' << format_double(r.accuracy) << ','
        << format_double(r.recall) << ',' << format_double(r.precision) << ','
        << format_double(r.f1) << ',' << format_double(r.runtime_s) << ','
        << format_double(r.objective) << '\n';
  }
}

std::vector<BenchRecord> read_records_csv(std::istream& in) {
  using detail::parse_double;
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw std::invalid_argument("benchmark CSV: unexpected header");
  }
  std::vector<BenchRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != kColumns) {
      throw std::invalid_argument("benchmark CSV: expected 13 fields, got " +
                                  std::to_string(f.size()));
    }
    BenchRecord r;
    r.solver = f[0];
    r.model = f[1];
    r.n = parse_integer<Index>(f[2]);
    r.p = parse_integer<Index>(f[3]);
    r.s_true = parse_integer<Index>(f[4]);
    r.s_used = parse_integer<Index>(f[5]);
    r.seed = parse_integer<std::uint64_t>(f[6]);
    r.accuracy = parse_double(f[7]);
    r.recall = parse_double(f[8]);
    r.precision = parse_double(f[9]);
    r.f1 = parse_double(f[10]);
    r.runtime_s = parse_double(f[11]);
    r.objective = parse_double(f[12]);
    records.push_back(std::move(r));
  }
  return records;
}

std::string summary_markdown(std::span<const BenchRecord> records, bool selection) {
  // Groups in order of first appearance.
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, std::vector<const BenchRecord*>> groups;
  for (const BenchRecord& r : records) {
    auto key = std::make_pair(r.model, r.solver);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&r);
  }

  std::ostringstream out;
  if (selection) {
    out << "| Model | Solver | Recall | Precision | F1 | Runtime (s) |\n"
        << "|---|---|---|---|---|---|\n";
  } else {
    out << "| Model | Solver | Accuracy | Runtime (s) |\n|---|---|---|---|\n";
  }
  for (const auto& key : order) {
    const auto& rows = groups.at(key);
    const auto column = [&rows](double BenchRecord::*field) {
      std::vector<double> values;
      values.reserve(rows.size());
      for (const BenchRecord* r : rows) values.push_back(r->*field);
      return mean_sd(values);
    };
    out << "| " << key.first << " | " << key.second << " | ";
    if (selection) {
      out << column(&BenchRecord::recall) << " | " << column(&BenchRecord::precision) << " | "
          << column(&BenchRecord::f1);
    } else {
      out << column(&BenchRecord::accuracy);
    }
    out << " | " << column(&BenchRecord::runtime_s) << " |\n";
  }
  return out.str();
}

}  // namespace sco
