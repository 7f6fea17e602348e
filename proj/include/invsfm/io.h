#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "invsfm/geom.h"
#include "invsfm/synth.h"

namespace invsfm {

// Text formats. Every file starts with a "format,<name>,<version>" line;
// '#' starts a comment line, blank lines are skipped, doubles are written
// with 17 significant digits so a write/read cycle is exact.
//
// tracks:
//   format,invsfm-tracks,1
//   variant,base
//   n,8
//   t,4
//   focal,1,1,1,1
//   bounds,-0.5,0.5,-0.5,0.5
//   tau,point_id,u,v
//   1,1,0.01,-0.2
//   ...
// scene:
//   format,invsfm-scene,1
//   point_id,x,y,z
//   1,0.5,0.25,-1
//   ...

void write_tracks(std::ostream& out, const PictureTracks& tracks);
// Throws kParseError (line number in the message); observations may come
// in any order but every (tau, point_id) must appear exactly once with
// tau in 1..t and ids 1..n.
PictureTracks read_tracks(std::istream& in);

struct SceneFile {
  std::vector<int> ids;
  std::vector<Vec3> points;
};

void write_scene(std::ostream& out, const SceneFile& scene);
// Ids 1..n in order.
void write_scene(std::ostream& out, std::span<const Vec3> points);
// Throws kParseError on malformed rows and duplicate ids.
SceneFile read_scene(std::istream& in);

struct ReportTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Key-value lines followed by tables:
//   format,invsfm-report,1
//   key,value
//   table,<name>
//   <columns>
//   <rows>
//   end
struct Report {
  std::vector<std::pair<std::string, std::string>> values;
  std::vector<ReportTable> tables;

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  // Empty when absent.
  std::string get(const std::string& key) const;
  const ReportTable* table(const std::string& name) const;
};

// Throws kInvalidConfiguration when a numeric entry is not finite.
void write_report(std::ostream& out, const Report& report);
Report read_report(std::istream& in);

// 17 significant digits, reads back to the same double.
std::string format_double(double value);

// Three orthographic views (x-y top, x-z front, y-z side) of the points and
// camera centers as a standalone SVG document.
void write_views_svg(std::ostream& out, std::span<const Vec3> points,
                     std::span<const Vec3> cameras);

// File helpers; throw kParseError when the file cannot be opened.
PictureTracks load_tracks(const std::string& path);
SceneFile load_scene(const std::string& path);
Report load_report(const std::string& path);

}  // namespace invsfm
