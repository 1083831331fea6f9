#include "voi/psa.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "voi/error.hpp"
#include "voi/reduce.hpp"

namespace voi {

PsaResult simulate_psa(const EconomicModel& model, std::size_t S, std::uint64_t seed, unsigned threads) {
  if (S < 2) throw Error(ErrorKind::InvalidArgument, "simulate_psa needs S >= 2");
  const std::size_t P = model.parameter_count();
  PsaResult out{model.parameter_names(), Matrix(S, P), std::vector<double>(S)};

  parallel_for(S, threads, [&](std::size_t s) {
    auto rng = derive_stream(seed, stream_id(StreamPurpose::Psa, s));
    auto row = out.params.row(s);
    model.draw_prior(rng, row);
    const double v = model.inb(row);
    if (!std::isfinite(v))
      throw Error(ErrorKind::ModelEvaluation, "model returned a non-finite INB at PSA row " + std::to_string(s), s);
    out.inb[s] = v;
  });
  return out;
}

InbMoments inb_moments(const PsaResult& psa) {
  if (psa.inb.size() < 2) throw Error(ErrorKind::InvalidArgument, "inb_moments needs S >= 2");
  return {ordered_mean(psa.inb), sample_variance(psa.inb)};
}

std::string format_double(double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_cell(const std::string& raw, std::size_t line) {
  const std::string cell = trim(raw);
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (!cell.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(v))
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": '" + cell + "' is not a finite number", line);
  return v;
}

}  // namespace

PsaResult load_psa_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path.string());

  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, "empty PSA file " + path.string(), line_no);
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  auto header = split_csv_line(line);
  for (auto& h : header) h = trim(h);
  if (header.size() < 2 || header.back() != "inb")
    throw Error(ErrorKind::ParseError, "header must list parameter names then 'inb'", line_no);
  const std::size_t P = header.size() - 1;

  std::vector<double> values;
  std::vector<double> inb;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != P + 1)
      throw Error(ErrorKind::ParseError,
                  "line " + std::to_string(line_no) + ": expected " + std::to_string(P + 1) + " cells, got " +
                      std::to_string(cells.size()),
                  line_no);
    for (std::size_t c = 0; c < P; ++c) values.push_back(parse_cell(cells[c], line_no));
    inb.push_back(parse_cell(cells[P], line_no));
  }

  PsaResult out{std::vector<std::string>(header.begin(), header.end() - 1), Matrix(inb.size(), P), std::move(inb)};
  for (std::size_t s = 0; s < out.inb.size(); ++s)
    for (std::size_t c = 0; c < P; ++c) out.params(s, c) = values[s * P + c];
  try {
    out.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
  return out;
}

void write_psa_csv(const PsaResult& psa, std::ostream& out) {
  for (const auto& n : psa.names) out << n << ',';
  out << "inb\n";
  for (std::size_t s = 0; s < psa.size(); ++s) {
    for (double v : psa.params.row(s)) out << format_double(v) << ',';
    out << format_double(psa.inb[s]) << '\n';
  }
}

void save_psa_csv(const PsaResult& psa, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  write_psa_csv(psa, out);
  if (!out) throw Error(ErrorKind::InvalidArgument, "failed writing " + path.string());
}

}  // namespace voi
