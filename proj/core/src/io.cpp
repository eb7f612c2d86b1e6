#include "contlab/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "contlab/errors.hpp"

namespace contlab::io {
namespace {

constexpr char kMagic[8] = {'C', 'O', 'N', 'T', 'F', 'L', 'D', '1'};
constexpr std::uint32_t kPayloadScalarReal = 0;
constexpr std::uint32_t kPayloadScalarComplex = 1;
constexpr std::uint32_t kPayloadForm = 2;

static_assert(std::endian::native == std::endian::little,
              "snapshot container assumes a little-endian host");

[[noreturn]] void fail(const std::string& path, const std::string& why) {
  throw Error("snapshot " + path + ": " + why);
}

std::ofstream open_out(const std::string& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) fail(path, "cannot open for writing");
  return out;
}

std::ifstream open_in(const std::string& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) fail(path, "cannot open for reading");
  return in;
}

void write_header_row(std::ofstream& out, const GridSpec& g) {
  for (int a = 0; a < g.axes(); ++a)
    out << (a ? "," : "") << g.points_per_axis;
  out << "\n";
}

GridSpec parse_header_row(const std::string& path, const std::string& line) {
  std::vector<int> sizes;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      sizes.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      fail(path, "bad axis size '" + tok + "' in header row");
    }
  }
  if (sizes.size() != 2 && sizes.size() != 4)
    fail(path, "header row must list 2 or 4 axis sizes");
  for (int s : sizes)
    if (s != sizes[0]) fail(path, "axis sizes must match");
  GridSpec g;
  g.n = static_cast<int>(sizes.size()) / 2;
  g.points_per_axis = sizes[0];
  g.validate();
  return g;
}

std::vector<double> parse_row(const std::string& path, const std::string& line,
                              std::size_t row, std::size_t expect) {
  std::vector<double> vals;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(tok, &used));
    } catch (const std::exception&) {
      fail(path, "bad value '" + tok + "' at data row " + std::to_string(row));
    }
  }
  if (vals.size() != expect)
    fail(path, "expected " + std::to_string(expect) + " columns at data row " +
                   std::to_string(row) + ", got " + std::to_string(vals.size()));
  return vals;
}

void append(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  if (!line.empty()) line += ',';
  line += buf;
}

// Per-node serialized order of form components: conjugate index major.
std::vector<double> form_node_values(const HermitianFormField& h, std::size_t node) {
  const int n = h.grid.n;
  std::vector<double> v;
  v.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int kbar = 0; kbar < n; ++kbar)
    for (int j = 0; j < n; ++j) {
      const cplx c = h.at(node, j, kbar);
      v.push_back(c.real());
      v.push_back(c.imag());
    }
  return v;
}

void form_node_store(HermitianFormField& h, std::size_t node, const double* v) {
  const int n = h.grid.n;
  std::size_t p = 0;
  for (int kbar = 0; kbar < n; ++kbar)
    for (int j = 0; j < n; ++j) {
      h.at(node, j, kbar) = cplx(v[p], v[p + 1]);
      p += 2;
    }
}

struct Header {
  std::uint32_t n = 0;
  std::uint32_t points = 0;
  std::uint32_t payload = 0;
  std::uint64_t bytes = 0;
};

void write_binary(const std::string& path, const GridSpec& g, std::uint32_t payload,
                  const std::vector<double>& values) {
  std::ofstream out = open_out(path, true);
  const std::uint32_t n = static_cast<std::uint32_t>(g.n);
  const std::uint32_t pts = static_cast<std::uint32_t>(g.points_per_axis);
  const std::uint32_t reserved = 0;
  const std::uint64_t bytes = values.size() * sizeof(double);
  out.write(kMagic, 8);
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&pts), 4);
  out.write(reinterpret_cast<const char*>(&payload), 4);
  out.write(reinterpret_cast<const char*>(&reserved), 4);
  out.write(reinterpret_cast<const char*>(&bytes), 8);
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(bytes));
  if (!out) fail(path, "write failed");
}

std::pair<GridSpec, std::vector<double>> read_binary(const std::string& path,
                                                     std::uint32_t want_payload) {
  std::ifstream in = open_in(path, true);
  char magic[8];
  Header h;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(&h.n), 4);
  in.read(reinterpret_cast<char*>(&h.points), 4);
  in.read(reinterpret_cast<char*>(&h.payload), 4);
  std::uint32_t reserved = 0;
  in.read(reinterpret_cast<char*>(&reserved), 4);
  in.read(reinterpret_cast<char*>(&h.bytes), 8);
  if (!in) fail(path, "truncated header");
  if (std::memcmp(magic, kMagic, 8) != 0) fail(path, "bad magic");
  if (h.payload != want_payload)
    fail(path, "payload kind " + std::to_string(h.payload) + " does not match expected " +
                   std::to_string(want_payload));
  GridSpec g;
  g.n = static_cast<int>(h.n);
  g.points_per_axis = static_cast<int>(h.points);
  g.validate();
  if (h.bytes % sizeof(double) != 0) fail(path, "payload size is not a float64 multiple");
  std::vector<double> values(h.bytes / sizeof(double));
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(h.bytes));
  if (!in) fail(path, "truncated payload");
  return {g, std::move(values)};
}

bool has_csv_suffix(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}

}  // namespace

void write_scalar_csv(const std::string& path, const ScalarField& f) {
  std::ofstream out = open_out(path, false);
  write_header_row(out, f.grid);
  const bool complex_kind = f.kind == FieldKind::Complex;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    std::string line;
    append(line, f.values[i].real());
    if (complex_kind) append(line, f.values[i].imag());
    out << line << "\n";
  }
  if (!out) fail(path, "write failed");
}

ScalarField read_scalar_csv(const std::string& path) {
  std::ifstream in = open_in(path, false);
  std::string line;
  if (!std::getline(in, line)) fail(path, "missing header row");
  GridSpec g = parse_header_row(path, line);
  ScalarField f = make_field(g);
  bool complex_kind = false;
  for (std::size_t i = 0; i < g.total_nodes(); ++i) {
    if (!std::getline(in, line))
      fail(path, "missing data row " + std::to_string(i + 1));
    if (i == 0) {
      std::size_t cols = 1 + std::count(line.begin(), line.end(), ',');
      if (cols != 1 && cols != 2) fail(path, "scalar rows need 1 or 2 columns");
      complex_kind = cols == 2;
      f.kind = complex_kind ? FieldKind::Complex : FieldKind::Real;
    }
    std::vector<double> v = parse_row(path, line, i + 1, complex_kind ? 2 : 1);
    f.values[i] = complex_kind ? cplx(v[0], v[1]) : cplx(v[0], 0.0);
  }
  check_finite(f, "scalar snapshot");
  return f;
}

void write_form_csv(const std::string& path, const HermitianFormField& h) {
  std::ofstream out = open_out(path, false);
  write_header_row(out, h.grid);
  for (std::size_t i = 0; i < h.grid.total_nodes(); ++i) {
    std::string line;
    for (double v : form_node_values(h, i)) append(line, v);
    out << line << "\n";
  }
  if (!out) fail(path, "write failed");
}

HermitianFormField read_form_csv(const std::string& path) {
  std::ifstream in = open_in(path, false);
  std::string line;
  if (!std::getline(in, line)) fail(path, "missing header row");
  GridSpec g = parse_header_row(path, line);
  HermitianFormField h = zero_form(g);
  const std::size_t per_node = 2 * static_cast<std::size_t>(g.n) * g.n;
  for (std::size_t i = 0; i < g.total_nodes(); ++i) {
    if (!std::getline(in, line))
      fail(path, "missing data row " + std::to_string(i + 1));
    std::vector<double> v = parse_row(path, line, i + 1, per_node);
    form_node_store(h, i, v.data());
  }
  check_finite(h, "form snapshot");
  return h;
}

void write_scalar(const std::string& path, const ScalarField& f) {
  const bool complex_kind = f.kind == FieldKind::Complex;
  std::vector<double> values;
  values.reserve(f.values.size() * (complex_kind ? 2 : 1));
  for (const cplx& c : f.values) {
    values.push_back(c.real());
    if (complex_kind) values.push_back(c.imag());
  }
  write_binary(path, f.grid, complex_kind ? kPayloadScalarComplex : kPayloadScalarReal, values);
}

ScalarField read_scalar(const std::string& path) {
  // Either scalar payload kind is acceptable; probe the header first.
  std::uint32_t payload = kPayloadScalarReal;
  {
    std::ifstream in = open_in(path, true);
    char skip[20];
    in.read(skip, 20);
    std::uint32_t p = 0;
    in.seekg(16);
    in.read(reinterpret_cast<char*>(&p), 4);
    if (in && p == kPayloadScalarComplex) payload = kPayloadScalarComplex;
  }
  auto [g, values] = read_binary(path, payload);
  const bool complex_kind = payload == kPayloadScalarComplex;
  const std::size_t per_node = complex_kind ? 2 : 1;
  if (values.size() != g.total_nodes() * per_node)
    fail(path, "payload size does not match the grid");
  ScalarField f = make_field(g, complex_kind ? FieldKind::Complex : FieldKind::Real);
  for (std::size_t i = 0; i < g.total_nodes(); ++i)
    f.values[i] = complex_kind ? cplx(values[2 * i], values[2 * i + 1])
                               : cplx(values[i], 0.0);
  check_finite(f, "scalar snapshot");
  return f;
}

void write_form(const std::string& path, const HermitianFormField& h) {
  std::vector<double> values;
  const std::size_t per_node = 2 * static_cast<std::size_t>(h.grid.n) * h.grid.n;
  values.reserve(h.grid.total_nodes() * per_node);
  for (std::size_t i = 0; i < h.grid.total_nodes(); ++i)
    for (double v : form_node_values(h, i)) values.push_back(v);
  write_binary(path, h.grid, kPayloadForm, values);
}

HermitianFormField read_form(const std::string& path) {
  auto [g, values] = read_binary(path, kPayloadForm);
  const std::size_t per_node = 2 * static_cast<std::size_t>(g.n) * g.n;
  if (values.size() != g.total_nodes() * per_node)
    fail(path, "payload size does not match the grid");
  HermitianFormField h = zero_form(g);
  for (std::size_t i = 0; i < g.total_nodes(); ++i)
    form_node_store(h, i, values.data() + i * per_node);
  check_finite(h, "form snapshot");
  return h;
}

void save_scalar(const std::string& path, const ScalarField& f) {
  has_csv_suffix(path) ? write_scalar_csv(path, f) : write_scalar(path, f);
}

ScalarField load_scalar(const std::string& path) {
  return has_csv_suffix(path) ? read_scalar_csv(path) : read_scalar(path);
}

void save_form(const std::string& path, const HermitianFormField& h) {
  has_csv_suffix(path) ? write_form_csv(path, h) : write_form(path, h);
}

HermitianFormField load_form(const std::string& path) {
  return has_csv_suffix(path) ? read_form_csv(path) : read_form(path);
}

void write_heatmap_pgm(const std::string& path, const ScalarField& f) {
  const int N = f.grid.points_per_axis;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  // Slice: first two axes, remaining axes pinned at 0. With last-axis-fastest
  // storage the slice stride over (x1, y1) is the block of trailing axes.
  std::size_t stride = 1;
  for (int a = 2; a < f.grid.axes(); ++a) stride *= static_cast<std::size_t>(N);
  auto value = [&](int ix, int iy) {
    return f.values[(static_cast<std::size_t>(ix) * N + iy) * stride].real();
  };
  for (int ix = 0; ix < N; ++ix)
    for (int iy = 0; iy < N; ++iy) {
      lo = std::min(lo, value(ix, iy));
      hi = std::max(hi, value(ix, iy));
    }
  const double span = hi - lo;
  std::ofstream out = open_out(path, true);
  out << "P5\n" << N << " " << N << "\n255\n";
  for (int iy = N - 1; iy >= 0; --iy)  // image rows top-down = y descending
    for (int ix = 0; ix < N; ++ix) {
      const double v = span > 0.0 ? (value(ix, iy) - lo) / span : 0.0;
      out.put(static_cast<char>(static_cast<int>(v * 255.0 + 0.5)));
    }
  if (!out) fail(path, "write failed");
}

}  // namespace contlab::io
