#include "chron/io.hpp"

#include <array>
#include <cstring>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace chron {

namespace {

constexpr char kFieldsMagic[4] = {'C', 'H', 'R', 'F'};

std::string join(const std::vector<double>& v) {
  std::ostringstream s;
  s << std::setprecision(17);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s << ' ';
    s << v[i];
  }
  return s.str();
}

std::string join(const std::vector<int>& v) {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s << ' ';
    s << v[i];
  }
  return s.str();
}

std::vector<double> split_doubles(const std::string& s) {
  std::vector<double> out;
  std::istringstream in(s);
  double x;
  while (in >> x) out.push_back(x);
  return out;
}

std::vector<int> split_ints(const std::string& s) {
  std::vector<int> out;
  std::istringstream in(s);
  int x;
  while (in >> x) out.push_back(x);
  return out;
}

// Splits a CSV row honoring double-quoted fields (no embedded quotes needed).
std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      out.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field += ch;
    }
  }
  out.push_back(field);
  return out;
}

template <typename T>
void write_raw(std::ostream& out, T value) {
  // Little-endian on every platform this project targets.
  out.write(reinterpret_cast<const char*>(&value), sizeof(value));
}

template <typename T>
T read_raw(std::istream& in) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(value));
  if (!in) throw IoError("truncated fields file");
  return value;
}

}  // namespace

void write_trace_csv(std::ostream& out,
                     const std::vector<SampleRecord>& samples) {
  out << "iter,M,psi,theta,lambda,phase,counts,alpha,beta1,beta2,V,loglik\n";
  out << std::setprecision(17);
  for (const SampleRecord& s : samples) {
    out << s.iter << ',' << s.M << ",\"" << join(s.psi) << "\",\""
        << join(s.theta) << "\",\"" << join(s.lambda) << "\",\""
        << join(s.phase) << "\",\"" << join(s.counts) << "\"," << s.alpha
        << ',' << s.beta1 << ',' << s.beta2 << ',' << s.V << ',' << s.loglik
        << '\n';
  }
}

std::vector<SampleRecord> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty trace file");
  if (split_row(line).size() != 12) throw IoError("bad trace header");
  std::vector<SampleRecord> samples;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_row(line);
    if (f.size() != 12) throw IoError("bad trace row: " + line);
    SampleRecord s;
    s.iter = std::stol(f[0]);
    s.M = std::stoi(f[1]);
    s.psi = split_doubles(f[2]);
    s.theta = split_doubles(f[3]);
    s.lambda = split_doubles(f[4]);
    s.phase = split_ints(f[5]);
    s.counts = split_ints(f[6]);
    s.alpha = std::stod(f[7]);
    s.beta1 = std::stod(f[8]);
    s.beta2 = std::stod(f[9]);
    s.V = std::stoi(f[10]);
    s.loglik = std::stod(f[11]);
    samples.push_back(std::move(s));
  }
  return samples;
}

void write_fields_binary(std::ostream& out,
                         const std::vector<SampleRecord>& samples, int c1,
                         int c2) {
  const std::size_t cells = static_cast<std::size_t>(c1) * c2;
  out.write(kFieldsMagic, 4);
  write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(c1));
  write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(c2));
  std::uint64_t count = 0;
  for (const SampleRecord& s : samples)
    if (!s.phi.empty()) ++count;
  write_raw<std::uint64_t>(out, count);
  for (const SampleRecord& s : samples) {
    if (s.phi.empty()) continue;
    if (s.phi.size() != cells)
      throw IoError("field size does not match lattice shape");
    out.write(reinterpret_cast<const char*>(s.phi.data()),
              static_cast<std::streamsize>(cells * sizeof(double)));
  }
}

FieldsFile read_fields_binary(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kFieldsMagic, 4) != 0)
    throw IoError("not a fields file");
  FieldsFile out;
  out.c1 = static_cast<int>(read_raw<std::uint32_t>(in));
  out.c2 = static_cast<int>(read_raw<std::uint32_t>(in));
  const std::uint64_t count = read_raw<std::uint64_t>(in);
  const std::size_t cells = static_cast<std::size_t>(out.c1) * out.c2;
  out.fields.resize(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    out.fields[k].resize(cells);
    in.read(reinterpret_cast<char*>(out.fields[k].data()),
            static_cast<std::streamsize>(cells * sizeof(double)));
    if (!in) throw IoError("truncated fields file");
  }
  return out;
}

std::uint64_t config_hash(const RunConfig& config) {
  std::ostringstream s;
  s << std::setprecision(17) << to_string(config.variant) << '|'
    << config.iterations << '|' << config.burn_in << '|' << config.thinning
    << '|' << config.seed << '|' << config.L << '|' << config.U << '|'
    << config.A << '|' << config.B << '|' << config.fixed_M << '|'
    << config.flat_likelihood;
  if (config.lattice)
    s << '|' << config.lattice->c1 << 'x' << config.lattice->c2 << '@'
      << config.lattice->cell_side << '/' << config.lattice->x0 << ','
      << config.lattice->y0;
  const MoveWeights& w = config.weights;
  s << '|' << w.theta << ' ' << w.psi << ' ' << w.field_joint << ' '
    << w.field_conditional << ' ' << w.scale_rates << ' ' << w.rj << ' '
    << w.assignment << ' ' << w.rates;
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s.str()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string acceptance_counts_json(const ChainOutput& chain) {
  nlohmann::json j;
  for (const auto& [name, counter] : chain.acceptance) {
    j[name] = {{"proposed", counter.proposed},
               {"accepted", counter.accepted},
               {"rate", counter.rate()}};
  }
  return j.dump(2);
}

}  // namespace chron
