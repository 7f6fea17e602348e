#include "invsfm/io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "invsfm/errors.h"

namespace invsfm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Reads data lines, skipping comments and blanks, tracking line numbers.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::vector<std::string>* fields) {
    std::string line;
    while (std::getline(in_, line)) {
      ++number_;
      const std::string_view view = trim(line);
      if (view.empty() || view.front() == '#') continue;
      *fields = split(view);
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::kParseError, "line " + std::to_string(number_) + ": " + msg);
  }

  double to_double(const std::string& s) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail("expected a number, got '" + s + "'");
    return v;
  }

  long to_int(const std::string& s) const {
    long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      fail("expected an integer, got '" + s + "'");
    }
    return v;
  }

  void expect_format(const std::string& name) {
    std::vector<std::string> f;
    if (!next(&f) || f.size() != 3 || f[0] != "format" || f[1] != name) {
      fail("expected 'format," + name + ",1'");
    }
    if (f[2] != "1") fail("unsupported " + name + " version '" + f[2] + "'");
  }

 private:
  std::istream& in_;
  int number_ = 0;
};

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

void write_tracks(std::ostream& out, const PictureTracks& tracks) {
  out << "format,invsfm-tracks,1\n";
  out << "variant," << to_string(tracks.variant) << '\n';
  out << "n," << tracks.n() << '\n';
  out << "t," << tracks.t() << '\n';
  out << "focal";
  for (const Picture& p : tracks.pictures) out << ',' << format_double(p.focal);
  out << '\n';
  out << "bounds," << format_double(tracks.bounds.u_min) << ','
      << format_double(tracks.bounds.u_max) << ',' << format_double(tracks.bounds.v_min) << ','
      << format_double(tracks.bounds.v_max) << '\n';
  out << "tau,point_id,u,v\n";
  for (std::size_t tau = 0; tau < tracks.t(); ++tau) {
    for (const Observation& o : tracks.pictures[tau].observations) {
      out << tau + 1 << ',' << o.point_id << ',' << format_double(o.u) << ','
          << format_double(o.v) << '\n';
    }
  }
}

PictureTracks read_tracks(std::istream& in) {
  LineReader reader(in);
  reader.expect_format("invsfm-tracks");

  PictureTracks tracks;
  long n = -1, t = -1;
  std::vector<double> focals;
  bool have_variant = false;
  std::vector<std::string> f;
  while (true) {
    if (!reader.next(&f)) reader.fail("missing 'tau,point_id,u,v' header");
    const std::string& key = f[0];
    if (key == "tau") {
      if (f != std::vector<std::string>{"tau", "point_id", "u", "v"}) {
        reader.fail("expected 'tau,point_id,u,v'");
      }
      break;
    }
    if (key == "variant" && f.size() == 2) {
      try {
        tracks.variant = parse_variant(f[1]);
      } catch (const Error&) {
        reader.fail("unknown variant '" + f[1] + "'");
      }
      have_variant = true;
    } else if (key == "n" && f.size() == 2) {
      n = reader.to_int(f[1]);
    } else if (key == "t" && f.size() == 2) {
      t = reader.to_int(f[1]);
    } else if (key == "focal" && f.size() >= 2) {
      for (std::size_t k = 1; k < f.size(); ++k) focals.push_back(reader.to_double(f[k]));
    } else if (key == "bounds" && f.size() == 5) {
      tracks.bounds = {reader.to_double(f[1]), reader.to_double(f[2]), reader.to_double(f[3]),
                       reader.to_double(f[4])};
    } else {
      reader.fail("unexpected header entry '" + key + "'");
    }
  }
  if (!have_variant) reader.fail("missing variant");
  if (n < 1 || t < 1) reader.fail("n and t must be given and positive");
  if (!focals.empty() && focals.size() != 1 && focals.size() != static_cast<std::size_t>(t)) {
    reader.fail("focal needs 1 or t values");
  }

  std::vector<std::vector<std::optional<Observation>>> grid(
      t, std::vector<std::optional<Observation>>(n));
  while (reader.next(&f)) {
    if (f.size() != 4) reader.fail("expected tau,point_id,u,v");
    const long tau = reader.to_int(f[0]);
    const long id = reader.to_int(f[1]);
    if (tau < 1 || tau > t) reader.fail("tau " + f[0] + " outside 1.." + std::to_string(t));
    if (id < 1 || id > n) reader.fail("point_id " + f[1] + " outside 1.." + std::to_string(n));
    auto& slot = grid[tau - 1][id - 1];
    if (slot) reader.fail("duplicate observation (" + f[0] + ", " + f[1] + ")");
    slot = Observation{static_cast<int>(id), reader.to_double(f[2]), reader.to_double(f[3])};
  }

  tracks.pictures.resize(t);
  for (long tau = 0; tau < t; ++tau) {
    Picture& pic = tracks.pictures[tau];
    pic.focal = focals.empty() ? 1.0 : focals[focals.size() == 1 ? 0 : tau];
    for (long id = 0; id < n; ++id) {
      if (!grid[tau][id]) {
        throw Error(ErrorCode::kParseError, "missing observation of point " +
                                                std::to_string(id + 1) + " in picture " +
                                                std::to_string(tau + 1));
      }
      pic.observations.push_back(*grid[tau][id]);
    }
  }
  try {
    tracks.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kParseError, e.detail());
  }
  return tracks;
}

void write_scene(std::ostream& out, const SceneFile& scene) {
  out << "format,invsfm-scene,1\n";
  out << "point_id,x,y,z\n";
  for (std::size_t i = 0; i < scene.points.size(); ++i) {
    const Vec3& p = scene.points[i];
    out << scene.ids[i] << ',' << format_double(p.x()) << ',' << format_double(p.y()) << ','
        << format_double(p.z()) << '\n';
  }
}

void write_scene(std::ostream& out, std::span<const Vec3> points) {
  SceneFile scene;
  for (std::size_t i = 0; i < points.size(); ++i) {
    scene.ids.push_back(static_cast<int>(i + 1));
    scene.points.push_back(points[i]);
  }
  write_scene(out, scene);
}

SceneFile read_scene(std::istream& in) {
  LineReader reader(in);
  reader.expect_format("invsfm-scene");
  std::vector<std::string> f;
  if (!reader.next(&f) || f != std::vector<std::string>{"point_id", "x", "y", "z"}) {
    reader.fail("expected 'point_id,x,y,z'");
  }
  SceneFile scene;
  while (reader.next(&f)) {
    if (f.size() != 4) reader.fail("expected point_id,x,y,z");
    const int id = static_cast<int>(reader.to_int(f[0]));
    if (std::find(scene.ids.begin(), scene.ids.end(), id) != scene.ids.end()) {
      reader.fail("duplicate point_id " + f[0]);
    }
    scene.ids.push_back(id);
    scene.points.emplace_back(reader.to_double(f[1]), reader.to_double(f[2]),
                              reader.to_double(f[3]));
  }
  return scene;
}

void Report::set(const std::string& key, const std::string& value) {
  for (auto& kv : values) {
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  }
  values.emplace_back(key, value);
}

void Report::set(const std::string& key, double value) { set(key, format_double(value)); }

std::string Report::get(const std::string& key) const {
  for (const auto& kv : values) {
    if (kv.first == key) return kv.second;
  }
  return {};
}

const ReportTable* Report::table(const std::string& name) const {
  for (const ReportTable& t : tables) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

void write_report(std::ostream& out, const Report& report) {
  out << "format,invsfm-report,1\n";
  for (const auto& [key, value] : report.values) {
    if (value == "nan" || value == "inf" || value == "-inf") {
      throw Error(ErrorCode::kInvalidConfiguration, "report value '" + key + "' is not finite");
    }
    out << key << ',' << value << '\n';
  }
  for (const ReportTable& table : report.tables) {
    out << "table," << table.name << '\n';
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      out << (c ? "," : "") << table.columns[c];
    }
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (!std::isfinite(row[c])) {
          throw Error(ErrorCode::kInvalidConfiguration,
                      "table '" + table.name + "' holds a non-finite entry");
        }
        out << (c ? "," : "") << format_double(row[c]);
      }
      out << '\n';
    }
    out << "end\n";
  }
}

Report read_report(std::istream& in) {
  LineReader reader(in);
  reader.expect_format("invsfm-report");
  Report report;
  std::vector<std::string> f;
  while (reader.next(&f)) {
    if (f[0] == "table") {
      if (f.size() != 2) reader.fail("expected table,<name>");
      ReportTable table;
      table.name = f[1];
      if (!reader.next(&table.columns)) reader.fail("table '" + table.name + "' has no header");
      bool closed = false;
      while (reader.next(&f)) {
        if (f.size() == 1 && f[0] == "end") {
          closed = true;
          break;
        }
        if (f.size() != table.columns.size()) reader.fail("row width differs from the header");
        std::vector<double> row;
        for (const std::string& s : f) row.push_back(reader.to_double(s));
        table.rows.push_back(std::move(row));
      }
      if (!closed) reader.fail("table '" + table.name + "' is not closed by 'end'");
      report.tables.push_back(std::move(table));
    } else {
      if (f.size() < 2) reader.fail("expected key,value");
      std::string value = f[1];
      for (std::size_t k = 2; k < f.size(); ++k) value += "," + f[k];
      report.values.emplace_back(f[0], value);
    }
  }
  return report;
}

void write_views_svg(std::ostream& out, std::span<const Vec3> points,
                     std::span<const Vec3> cameras) {
  constexpr double kPanel = 300.0;
  constexpr double kMargin = 20.0;
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const auto& set : {points, cameras}) {
    for (const Vec3& p : set) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  }
  if (points.empty() && cameras.empty()) lo = hi = Vec3::Zero();
  const double extent = std::max((hi - lo).maxCoeff(), 1e-12);
  const double scale = (kPanel - 2.0 * kMargin) / extent;

  const int axes[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  const char* titles[3] = {"top (x-y)", "front (x-z)", "side (y-z)"};
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 3 * kPanel << "\" height=\""
      << kPanel + 20 << "\">\n";
  for (int v = 0; v < 3; ++v) {
    const double x0 = v * kPanel;
    const int a = axes[v][0], b = axes[v][1];
    out << "<g>\n<rect x=\"" << x0 + 2 << "\" y=\"2\" width=\"" << kPanel - 4
        << "\" height=\"" << kPanel - 4 << "\" fill=\"none\" stroke=\"#999\"/>\n";
    out << "<text x=\"" << x0 + 8 << "\" y=\"" << kPanel + 14
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << titles[v] << "</text>\n";
    auto px = [&](const Vec3& p) { return x0 + kMargin + (p(a) - lo(a)) * scale; };
    // SVG y grows downwards.
    auto py = [&](const Vec3& p) { return kPanel - kMargin - (p(b) - lo(b)) * scale; };
    for (const Vec3& p : points) {
      out << "<circle cx=\"" << format_double(px(p)) << "\" cy=\"" << format_double(py(p))
          << "\" r=\"3\" fill=\"#1f4e9c\"/>\n";
    }
    for (const Vec3& c : cameras) {
      out << "<rect x=\"" << format_double(px(c) - 4) << "\" y=\"" << format_double(py(c) - 4)
          << "\" width=\"8\" height=\"8\" fill=\"#c0392b\"/>\n";
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
}

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open '" + path + "'");
  return in;
}

}  // namespace

PictureTracks load_tracks(const std::string& path) {
  auto in = open_input(path);
  return read_tracks(in);
}

SceneFile load_scene(const std::string& path) {
  auto in = open_input(path);
  return read_scene(in);
}

Report load_report(const std::string& path) {
  auto in = open_input(path);
  return read_report(in);
}

}  // namespace invsfm
