#ifndef GAZEGRAPH_GAZE_HPP
#define GAZEGRAPH_GAZE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gazegraph/rng.hpp"

namespace gazegraph {

/// One raw eye-tracker sample.
struct GazeSample {
  double timestamp_ms = 0.0;
  double x = 0.0;  // pixels
  double y = 0.0;  // pixels
  bool valid = true;
};

/// Display and viewing setup used for pixel -> visual-angle conversion.
struct ScreenGeometry {
  double width_px = 1920.0;
  double height_px = 1080.0;
  double physical_width_mm = 530.0;
  double viewing_distance_mm = 600.0;

  double mm_per_px() const { return physical_width_mm / width_px; }
};

struct Fixation {
  double start_ms = 0.0;
  double end_ms = 0.0;
  double cx = 0.0;  // centroid, pixels
  double cy = 0.0;
};

/// Exactly one gaze point per frame, t = 0..T-1.
struct FrameFixationTrack {
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const { return x.size(); }
};

/// Angular velocity between two consecutive samples, degrees/second, using
/// the small-angle model: pixel distance -> mm on screen -> atan at the
/// viewing distance.
double angular_velocity_deg_s(const GazeSample& a, const GazeSample& b,
                              const ScreenGeometry& geometry);

/// Velocity-Threshold Identification: samples moving slower than the
/// threshold are fixation samples; consecutive runs lasting at least
/// min_duration_ms become fixations with centroid coordinates. Saccade
/// samples are discarded. Invalid samples break runs.
std::vector<Fixation> ivt_filter(const std::vector<GazeSample>& samples,
                                 double velocity_threshold_deg_s,
                                 const ScreenGeometry& geometry,
                                 double min_duration_ms = 60.0);

/// Per-sample fixation/saccade labels (true = fixation). Used by the filter
/// and exposed for the classifier-monotonicity property.
std::vector<bool> ivt_classify(const std::vector<GazeSample>& samples,
                               double velocity_threshold_deg_s,
                               const ScreenGeometry& geometry);

/// Assigns one fixation to every frame: overlapping fixation wins, gaps
/// inherit the most recent earlier fixation, leading frames take the first.
FrameFixationTrack assign_per_frame(const std::vector<Fixation>& fixations,
                                    const std::vector<double>& frame_times_ms);

/// Independent uniform fixation per frame (ablation input).
FrameFixationTrack random_fixation_track(std::size_t frame_count,
                                         const ScreenGeometry& geometry,
                                         std::uint64_t seed);

/// Derangement of track indices: result[i] is the source index whose track
/// video i receives, and result[i] != i for all i. Seed-deterministic.
std::vector<std::size_t> scanpath_derangement(std::size_t video_count, std::uint64_t seed);

/// Resamples a track to a new length by index scaling.
FrameFixationTrack resample_track(const FrameFixationTrack& track, std::size_t frame_count);

// Gaze-log file: header lines starting with '#' carry the geometry, then one
// record per line: timestamp_ms x_px y_px valid_flag.
void write_gaze_log(const std::string& path, const std::vector<GazeSample>& samples,
                    const ScreenGeometry& geometry);
std::pair<std::vector<GazeSample>, ScreenGeometry> read_gaze_log(const std::string& path);

}  // namespace gazegraph

#endif  // GAZEGRAPH_GAZE_HPP
