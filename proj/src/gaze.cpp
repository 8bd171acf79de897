#include "gazegraph/gaze.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gazegraph {

double angular_velocity_deg_s(const GazeSample& a, const GazeSample& b,
                              const ScreenGeometry& geometry) {
  const double dt_s = (b.timestamp_ms - a.timestamp_ms) / 1000.0;
  if (dt_s <= 0.0) throw std::invalid_argument("gaze samples out of order");
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double dist_mm = std::sqrt(dx * dx + dy * dy) * geometry.mm_per_px();
  const double angle_deg =
      std::atan(dist_mm / geometry.viewing_distance_mm) * 180.0 / 3.14159265358979323846;
  return angle_deg / dt_s;
}

std::vector<bool> ivt_classify(const std::vector<GazeSample>& samples,
                               double velocity_threshold_deg_s,
                               const ScreenGeometry& geometry) {
  std::vector<bool> fixation(samples.size(), false);
  // velocity is taken to the previous valid sample; the first valid sample
  // inherits the classification of its successor pair
  std::ptrdiff_t prev_valid = -1;
  std::ptrdiff_t first_valid = -1;
  bool first_decided = false;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!samples[i].valid) continue;
    if (prev_valid >= 0) {
      if (samples[i].timestamp_ms <= samples[prev_valid].timestamp_ms)
        throw std::invalid_argument("gaze log timestamps are not strictly increasing");
      const double v =
          angular_velocity_deg_s(samples[prev_valid], samples[i], geometry);
      fixation[i] = v <= velocity_threshold_deg_s;
      if (!first_decided) {
        fixation[first_valid] = fixation[i];
        first_decided = true;
      }
    } else {
      first_valid = static_cast<std::ptrdiff_t>(i);
    }
    prev_valid = static_cast<std::ptrdiff_t>(i);
  }
  return fixation;
}

std::vector<Fixation> ivt_filter(const std::vector<GazeSample>& samples,
                                 double velocity_threshold_deg_s,
                                 const ScreenGeometry& geometry,
                                 double min_duration_ms) {
  std::size_t valid_count = 0;
  for (const auto& s : samples)
    if (s.valid) ++valid_count;
  if (valid_count < 2)
    throw std::invalid_argument("ivt_filter: need at least 2 valid samples, got " +
                                std::to_string(valid_count));

  const std::vector<bool> is_fix = ivt_classify(samples, velocity_threshold_deg_s, geometry);

  std::vector<Fixation> out;
  std::vector<std::size_t> group;
  auto flush = [&]() {
    if (group.size() >= 2) {
      const double dur = samples[group.back()].timestamp_ms - samples[group.front()].timestamp_ms;
      if (dur >= min_duration_ms) {
        Fixation f;
        f.start_ms = samples[group.front()].timestamp_ms;
        f.end_ms = samples[group.back()].timestamp_ms;
        double sx = 0.0, sy = 0.0;
        for (std::size_t k : group) {
          sx += samples[k].x;
          sy += samples[k].y;
        }
        f.cx = sx / static_cast<double>(group.size());
        f.cy = sy / static_cast<double>(group.size());
        out.push_back(f);
      }
    }
    group.clear();
  };

  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].valid && is_fix[i]) {
      group.push_back(i);
    } else {
      flush();  // saccade sample or tracking loss ends the run
    }
  }
  flush();
  return out;
}

FrameFixationTrack assign_per_frame(const std::vector<Fixation>& fixations,
                                    const std::vector<double>& frame_times_ms) {
  if (fixations.empty())
    throw std::invalid_argument("assign_per_frame: no fixations to cover the frames");
  FrameFixationTrack track;
  track.x.reserve(frame_times_ms.size());
  track.y.reserve(frame_times_ms.size());
  for (double ft : frame_times_ms) {
    const Fixation* chosen = nullptr;
    for (const Fixation& f : fixations) {
      if (f.start_ms <= ft && ft <= f.end_ms) {
        chosen = &f;
        break;
      }
      if (f.end_ms < ft && (!chosen || f.end_ms > chosen->end_ms)) chosen = &f;
    }
    if (!chosen) chosen = &fixations.front();  // leading frames
    track.x.push_back(chosen->cx);
    track.y.push_back(chosen->cy);
  }
  return track;
}

FrameFixationTrack random_fixation_track(std::size_t frame_count,
                                         const ScreenGeometry& geometry,
                                         std::uint64_t seed) {
  if (frame_count < 1) throw std::invalid_argument("random_fixation_track: frame_count >= 1");
  Rng rng(seed);
  FrameFixationTrack track;
  track.x.reserve(frame_count);
  track.y.reserve(frame_count);
  for (std::size_t t = 0; t < frame_count; ++t) {
    track.x.push_back(rng.uniform(0.0, geometry.width_px));
    track.y.push_back(rng.uniform(0.0, geometry.height_px));
  }
  return track;
}

std::vector<std::size_t> scanpath_derangement(std::size_t video_count, std::uint64_t seed) {
  if (video_count < 2)
    throw std::invalid_argument("scanpath_derangement: need at least 2 videos");
  // Sattolo's algorithm yields a uniformly random single cycle, which has
  // no fixed points by construction.
  std::vector<std::size_t> perm(video_count);
  for (std::size_t i = 0; i < video_count; ++i) perm[i] = i;
  Rng rng(seed);
  for (std::size_t i = video_count - 1; i > 0; --i) {
    const std::size_t j = rng.index(i);
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

FrameFixationTrack resample_track(const FrameFixationTrack& track, std::size_t frame_count) {
  if (track.size() == 0) throw std::invalid_argument("resample_track: empty track");
  FrameFixationTrack out;
  out.x.reserve(frame_count);
  out.y.reserve(frame_count);
  for (std::size_t t = 0; t < frame_count; ++t) {
    std::size_t src = (t * track.size()) / frame_count;
    if (src >= track.size()) src = track.size() - 1;
    out.x.push_back(track.x[src]);
    out.y.push_back(track.y[src]);
  }
  return out;
}

void write_gaze_log(const std::string& path, const std::vector<GazeSample>& samples,
                    const ScreenGeometry& geometry) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open gaze log for writing: " + path);
  out << "# gazegraph-gaze-log v1\n";
  out << "# width_px " << geometry.width_px << "\n";
  out << "# height_px " << geometry.height_px << "\n";
  out << "# physical_width_mm " << geometry.physical_width_mm << "\n";
  out << "# viewing_distance_mm " << geometry.viewing_distance_mm << "\n";
  out << "# timestamp_ms x_px y_px valid\n";
  char buf[128];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f %d\n", s.timestamp_ms, s.x, s.y,
                  s.valid ? 1 : 0);
    out << buf;
  }
}

std::pair<std::vector<GazeSample>, ScreenGeometry> read_gaze_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open gaze log: " + path);
  std::vector<GazeSample> samples;
  ScreenGeometry geometry;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string key;
      hs >> key;
      double v = 0.0;
      if (key == "width_px" && (hs >> v)) geometry.width_px = v;
      if (key == "height_px" && (hs >> v)) geometry.height_px = v;
      if (key == "physical_width_mm" && (hs >> v)) geometry.physical_width_mm = v;
      if (key == "viewing_distance_mm" && (hs >> v)) geometry.viewing_distance_mm = v;
      continue;
    }
    std::istringstream ls(line);
    GazeSample s;
    int valid = 1;
    if (!(ls >> s.timestamp_ms >> s.x >> s.y >> valid))
      throw std::runtime_error("malformed gaze log record: '" + line + "'");
    s.valid = valid != 0;
    samples.push_back(s);
  }
  return {samples, geometry};
}

}  // namespace gazegraph
