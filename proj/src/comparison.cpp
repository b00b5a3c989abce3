#include "wiss/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "wiss/quadrature.hpp"

namespace wiss {
namespace {

// Merges abscissae closer than a relative 1e-13; keeps the grid strictly increasing.
std::vector<double> merged_grid(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  std::vector<double> out;
  for (double x : xs) {
    if (x < 0.0) continue;
    if (!out.empty() && x - out.back() <= 1e-13 * std::max(1.0, x)) continue;
    out.push_back(x);
  }
  if (out.empty() || out.front() != 0.0) out.insert(out.begin(), 0.0);
  return out;
}

std::vector<Breakpoint> sample_on(const std::vector<double>& grid, auto&& f) {
  std::vector<Breakpoint> pts;
  pts.reserve(grid.size());
  for (double x : grid) pts.push_back({x, x == 0.0 ? 0.0 : f(x)});
  // Rounding can flatten neighbouring values of very close abscissae.
  std::vector<Breakpoint> strict;
  for (const auto& p : pts)
    if (strict.empty() || p.y > strict.back().y) strict.push_back(p);
  return strict;
}

std::map<std::string, std::string> parse_header(const std::string& line, std::string_view kind) {
  std::istringstream in(line);
  std::string hash, tag;
  in >> hash >> tag;
  if (hash != "#" || tag != kind)
    throw std::invalid_argument("expected '# " + std::string(kind) + "' header, got: " + line);
  std::map<std::string, std::string> fields;
  std::string kv;
  while (in >> kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("malformed header field: " + kv);
    fields[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return fields;
}

std::vector<Breakpoint> read_rows(std::istream& is) {
  std::vector<Breakpoint> pts;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("malformed row: " + line);
    pts.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
  }
  return pts;
}

}  // namespace

CompFn::CompFn(std::vector<Breakpoint> points, double tail_slope)
    : points_(std::move(points)), tail_slope_(tail_slope) {
  if (points_.empty() || points_.front().x != 0.0 || points_.front().y != 0.0)
    throw std::invalid_argument("CompFn must start at (0, 0)");
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i].x > points_[i - 1].x))
      throw std::invalid_argument("CompFn abscissae must be strictly increasing");
    if (!(points_[i].y > points_[i - 1].y))
      throw std::invalid_argument("CompFn values must be strictly increasing");
  }
  if (!(tail_slope_ > 0.0) || !std::isfinite(tail_slope_))
    throw std::invalid_argument("CompFn tail slope must be positive and finite");
}

CompFn CompFn::identity() { return linear(1.0); }

CompFn CompFn::linear(double slope) { return CompFn({{0.0, 0.0}}, slope); }

double CompFn::operator()(double r) const {
  if (r < 0.0 || std::isnan(r)) throw std::domain_error("CompFn evaluated at negative argument");
  const auto it = std::upper_bound(points_.begin(), points_.end(), r,
                                   [](double v, const Breakpoint& p) { return v < p.x; });
  if (it == points_.end()) {
    const auto& last = points_.back();
    return last.y + tail_slope_ * (r - last.x);
  }
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  if (r == lo.x) return lo.y;
  return lo.y + (hi.y - lo.y) * (r - lo.x) / (hi.x - lo.x);
}

double CompFn::inverse(double y) const {
  if (y < 0.0 || std::isnan(y)) throw std::domain_error("CompFn inverse of negative value");
  const auto it = std::upper_bound(points_.begin(), points_.end(), y,
                                   [](double v, const Breakpoint& p) { return v < p.y; });
  if (it == points_.end()) {
    const auto& last = points_.back();
    return last.x + (y - last.y) / tail_slope_;
  }
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  if (y == lo.y) return lo.x;
  return lo.x + (hi.x - lo.x) * (y - lo.y) / (hi.y - lo.y);
}

CompFn CompFn::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("CompFn scale factor must be positive");
  auto pts = points_;
  for (auto& p : pts) p.y *= factor;
  return CompFn(std::move(pts), tail_slope_ * factor);
}

DecayFn::DecayFn(std::vector<Breakpoint> points, double tail_rate)
    : points_(std::move(points)), tail_rate_(tail_rate) {
  if (points_.empty() || points_.front().x != 0.0)
    throw std::invalid_argument("DecayFn must start at t = 0");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!(points_[i].y > 0.0) || !std::isfinite(points_[i].y))
      throw std::invalid_argument("DecayFn values must be positive and finite");
    if (i > 0 && !(points_[i].x > points_[i - 1].x))
      throw std::invalid_argument("DecayFn abscissae must be strictly increasing");
    if (i > 0 && !(points_[i].y < points_[i - 1].y))
      throw std::invalid_argument("DecayFn values must be strictly decreasing");
  }
  if (!(tail_rate_ > 0.0) || !std::isfinite(tail_rate_))
    throw std::invalid_argument("DecayFn tail rate must be positive and finite");
}

double DecayFn::operator()(double t) const {
  if (t < 0.0 || std::isnan(t)) throw std::domain_error("DecayFn evaluated at negative time");
  const auto it = std::upper_bound(points_.begin(), points_.end(), t,
                                   [](double v, const Breakpoint& p) { return v < p.x; });
  if (it == points_.end()) {
    const auto& last = points_.back();
    return last.y * std::exp(-tail_rate_ * (t - last.x));
  }
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  if (t == lo.x) return lo.y;
  return lo.y + (hi.y - lo.y) * (t - lo.x) / (hi.x - lo.x);
}

double Gain::operator()(double r) const {
  if (r < 0.0) throw std::domain_error("gain evaluated at negative argument");
  return fn_ ? (*fn_)(r) : 0.0;
}

double eval(const CompFn& f, double r) { return f(r); }
double eval(const DecayFn& f, double t) { return f(t); }
double inverse(const CompFn& f, double y) { return f.inverse(y); }

CompFn asymptotic_gain_from_limit(const CompFn& sigma, const CompFn& stability_gain,
                                  const CompFn& limit_gain) {
  // The composite is linear between these abscissae: kinks of either gain, and
  // preimages of sigma's kinks under r ↦ 2 limit_gain(r).
  std::vector<double> xs;
  for (const auto& p : stability_gain.breakpoints()) xs.push_back(p.x);
  for (const auto& p : limit_gain.breakpoints()) xs.push_back(p.x);
  for (const auto& p : sigma.breakpoints()) xs.push_back(limit_gain.inverse(p.x / 2.0));
  const auto grid = merged_grid(std::move(xs));
  auto f = [&](double r) { return sigma(2.0 * limit_gain(r)) + stability_gain(r); };
  const double slope = sigma.tail_slope() * 2.0 * limit_gain.tail_slope() + stability_gain.tail_slope();
  return CompFn(sample_on(grid, f), slope);
}

double limit_tolerance(const CompFn& sigma, double eps) {
  if (!(eps > 0.0)) throw std::domain_error("tolerance must be positive");
  return 0.5 * sigma.inverse(eps);
}

CompFn pointwise_max(const CompFn& f, const CompFn& g) {
  std::vector<double> xs;
  for (const auto& p : f.breakpoints()) xs.push_back(p.x);
  for (const auto& p : g.breakpoints()) xs.push_back(p.x);
  auto grid = merged_grid(xs);
  std::vector<double> crossings;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double a = grid[i - 1], b = grid[i];
    const double da = f(a) - g(a), db = f(b) - g(b);
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0))
      crossings.push_back(a + (b - a) * da / (da - db));
  }
  const double last = grid.back();
  const double dl = f(last) - g(last);
  const double ds = f.tail_slope() - g.tail_slope();
  if (dl * ds < 0.0) crossings.push_back(last - dl / ds);
  grid.insert(grid.end(), crossings.begin(), crossings.end());
  grid = merged_grid(std::move(grid));
  auto h = [&](double r) { return std::max(f(r), g(r)); };
  return CompFn(sample_on(grid, h), std::max(f.tail_slope(), g.tail_slope()));
}

std::pair<CompFn, CompFn> envelope_comparison_pair(const CompFn& sigma,
                                                   const CompFn& stability_gain,
                                                   const CompFn& asymptotic_gain) {
  return {sigma.scaled(2.0), pointwise_max(stability_gain, asymptotic_gain)};
}

CompFn fit_k_upper(std::span<const Breakpoint> samples, double slope_eps) {
  if (samples.empty()) throw std::invalid_argument("fit_k_upper needs at least one sample");
  if (!(slope_eps > 0.0)) throw std::invalid_argument("slope epsilon must be positive");
  std::vector<Breakpoint> sorted(samples.begin(), samples.end());
  for (const auto& s : sorted) {
    if (!(s.x >= 0.0) || !(s.y >= 0.0) || !std::isfinite(s.x) || !std::isfinite(s.y))
      throw std::domain_error("fit_k_upper samples must be finite and nonnegative");
    if (s.x == 0.0 && s.y > 0.0)
      throw std::domain_error("no class-K majorant: positive sample at r = 0");
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const Breakpoint& a, const Breakpoint& b) { return a.x < b.x; });

  std::vector<Breakpoint> pts{{0.0, 0.0}};
  double running = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    running = std::max(running, sorted[i].y);
    const bool last_of_group = i + 1 == sorted.size() || sorted[i + 1].x != sorted[i].x;
    if (!last_of_group || sorted[i].x == 0.0) continue;
    pts.push_back({sorted[i].x, running + slope_eps * sorted[i].x});
  }
  const auto& last = pts.back();
  // Beyond the data the fit extends along the chord through the origin.
  const double tail = slope_eps + (last.x > 0.0 ? (last.y - slope_eps * last.x) / last.x : 0.0);
  return CompFn(std::move(pts), tail);
}

void write_csv(std::ostream& os, std::string_view name, const CompFn& f) {
  os << "# comp_fn name=" << name << " tail_slope=" << format_double(f.tail_slope()) << '\n';
  for (const auto& p : f.breakpoints())
    os << format_double(p.x) << ',' << format_double(p.y) << '\n';
}

void write_csv(std::ostream& os, std::string_view name, const DecayFn& f) {
  os << "# decay_fn name=" << name << " tail_rate=" << format_double(f.tail_rate()) << '\n';
  for (const auto& p : f.breakpoints())
    os << format_double(p.x) << ',' << format_double(p.y) << '\n';
}

CompFn read_comp_fn(std::istream& is, std::string* name) {
  std::string header;
  std::getline(is, header);
  auto fields = parse_header(header, "comp_fn");
  if (name) *name = fields["name"];
  return CompFn(read_rows(is), std::stod(fields.at("tail_slope")));
}

DecayFn read_decay_fn(std::istream& is, std::string* name) {
  std::string header;
  std::getline(is, header);
  auto fields = parse_header(header, "decay_fn");
  if (name) *name = fields["name"];
  return DecayFn(read_rows(is), std::stod(fields.at("tail_rate")));
}

}  // namespace wiss
