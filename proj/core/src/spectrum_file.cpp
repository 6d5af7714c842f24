#include "randcurv/spectrum_file.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace randcurv {

namespace {

struct Row {
  double lambda;
  std::vector<double> values;
};

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::runtime_error("spectrum file line " + std::to_string(line) + ": " + what);
}

std::vector<double> read_values(std::istringstream& in, std::size_t count, int line) {
  std::vector<double> out;
  double v;
  while (in >> v) {
    if (!std::isfinite(v)) fail(line, "non-finite value");
    out.push_back(v);
  }
  if (!in.eof()) fail(line, "malformed number");
  if (out.size() != count)
    fail(line, "expected " + std::to_string(count) + " values, got " + std::to_string(out.size()));
  return out;
}

}  // namespace

SpectrumModel parse_spectrum(std::istream& in) {
  std::string raw;
  int line_no = 0;
  bool have_format = false;
  int dimension = 0;
  double volume = 0.0;
  std::size_t points = 0;
  SpectralOperator op = SpectralOperator::Laplacian;
  bool have_op = false;
  std::vector<double> weights, reference;
  std::vector<Row> rows;

  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::string key;
    if (!(ls >> key)) continue;
    if (!have_format) {
      std::string name;
      int version = 0;
      if (key != "format" || !(ls >> name >> version) || name != "randcurv-spectrum")
        fail(line_no, "expected 'format randcurv-spectrum 1'");
      if (version != 1) fail(line_no, "unsupported format version " + std::to_string(version));
      have_format = true;
      continue;
    }
    if (key == "dimension") {
      if (!(ls >> dimension) || dimension < 2) fail(line_no, "dimension must be an integer >= 2");
    } else if (key == "volume") {
      if (!(ls >> volume) || !(volume > 0.0)) fail(line_no, "volume must be positive");
    } else if (key == "points") {
      long p = 0;
      if (!(ls >> p) || p < 1) fail(line_no, "points must be a positive integer");
      points = static_cast<std::size_t>(p);
    } else if (key == "operator") {
      std::string name;
      ls >> name;
      if (name == "laplacian") op = SpectralOperator::Laplacian;
      else if (name == "gjms") op = SpectralOperator::Gjms;
      else fail(line_no, "unknown operator '" + name + "'");
      have_op = true;
    } else if (key == "weights" || key == "reference" || key == "lambda") {
      if (points == 0) fail(line_no, "'points' must precede per-point data");
      if (key == "lambda") {
        double lambda = 0.0;
        if (!(ls >> lambda) || !std::isfinite(lambda)) fail(line_no, "bad eigenvalue");
        if (lambda == 0.0) fail(line_no, "zero eigenvalue (constants are excluded)");
        rows.push_back({lambda, read_values(ls, points, line_no)});
      } else if (key == "weights") {
        weights = read_values(ls, points, line_no);
        for (double w : weights)
          if (!(w > 0.0)) fail(line_no, "weights must be positive");
      } else {
        reference = read_values(ls, points, line_no);
      }
    } else {
      fail(line_no, "unknown key '" + key + "'");
    }
  }
  if (!have_format) throw std::runtime_error("spectrum file: missing format line");
  if (dimension == 0 || volume == 0.0 || points == 0 || !have_op)
    throw std::runtime_error("spectrum file: dimension, volume, points and operator are required");
  if (op == SpectralOperator::Gjms && dimension % 2 != 0)
    throw std::runtime_error("spectrum file: GJMS data needs even dimension");
  if (weights.empty()) weights.assign(points, volume / static_cast<double>(points));
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(wsum - volume) > 1e-8 * volume)
    throw std::runtime_error("spectrum file: weights sum to " + std::to_string(wsum) +
                             ", volume is " + std::to_string(volume));

  auto data = std::make_shared<UserEigenData>();
  data->point_count = points;
  data->weights = weights;
  data->reference = reference;

  SpectrumModel model;
  model.geometry = Geometry::UserSupplied;
  model.op = op;
  model.dimension = dimension;
  model.volume = volume;

  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& x, const Row& y) { return x.lambda < y.lambda; });
  for (auto& row : rows) {
    if (row.lambda < 0.0) {
      if (op != SpectralOperator::Gjms)
        throw std::runtime_error("spectrum file: negative eigenvalue needs operator gjms");
      // Ordered by increasing μ.
      continue;
    }
    model.levels.push_back({row.lambda, 1});
    data->positive.push_back(std::move(row.values));
  }
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    if (it->lambda >= 0.0) continue;
    model.negative_levels.push_back({-it->lambda, 1});
    data->negative.push_back(std::move(it->values));
  }
  if (model.levels.empty())
    throw std::runtime_error("spectrum file: no positive eigenvalues");
  model.user = std::move(data);
  return model;
}

SpectrumModel read_spectrum_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spectrum file " + path);
  return parse_spectrum(in);
}

void write_spectrum(std::ostream& out, const SpectrumModel& spectrum) {
  if (!spectrum.user) throw std::invalid_argument("write_spectrum: not a user spectrum");
  const auto& data = *spectrum.user;
  auto row = [&](const std::vector<double>& v) {
    for (double x : v) out << ' ' << x;
    out << '\n';
  };
  out << std::setprecision(17);
  out << "format randcurv-spectrum 1\n";
  out << "dimension " << spectrum.dimension << '\n';
  out << "volume " << spectrum.volume << '\n';
  out << "points " << data.point_count << '\n';
  out << "operator " << (spectrum.op == SpectralOperator::Gjms ? "gjms" : "laplacian") << '\n';
  out << "weights";
  row(data.weights);
  if (!data.reference.empty()) {
    out << "reference";
    row(data.reference);
  }
  for (std::size_t i = 0; i < spectrum.negative_levels.size(); ++i) {
    out << "lambda " << -spectrum.negative_levels[i].eigenvalue;
    row(data.negative[i]);
  }
  for (std::size_t i = 0; i < spectrum.levels.size(); ++i) {
    out << "lambda " << spectrum.levels[i].eigenvalue;
    row(data.positive[i]);
  }
}

PointSet user_point_set(const SpectrumModel& spectrum) {
  if (!spectrum.user) throw std::invalid_argument("user_point_set: not a user spectrum");
  PointSet set;
  set.kind = PointSet::Kind::Opaque;
  for (std::size_t i = 0; i < spectrum.user->point_count; ++i)
    set.points.push_back({static_cast<double>(i), 0.0, 0.0});
  set.weights = spectrum.user->weights;
  return set;
}

}  // namespace randcurv
