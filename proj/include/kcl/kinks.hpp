#ifndef KCL_KINKS_HPP_
#define KCL_KINKS_HPP_

// Kinks: points of the front across which theta and m jump. They are the
// shocks of the KCL system and obey its jump relations
//   K [g sin(theta)] = [m cos(theta)],   K [g cos(theta)] = -[m sin(theta)]
// where K is the kink speed in xi.

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace kcl {

struct KclState2;

struct PlateauState {
  double m = 1.0;
  double theta = 0.0;
  double g = 1.0;
};

struct KinkRecord {
  double xi_location = 0.0;
  double time = 0.0;
  double theta_jump = 0.0;  // right minus left
  double m_jump = 0.0;
  double g_jump = 0.0;
  double speed_K = 0.0;  // filled in by tracking, 0 until then
  PlateauState left;
  PlateauState right;
  std::size_t track = std::numeric_limits<std::size_t>::max();
};

/// Flags interfaces where theta changes by more than theta_threshold over a
/// three-interface window, the change is a local maximum, and it is at least
/// twice the change over the windows three cells to either side. Plateau
/// states are read where the smeared transition has flattened out, at most
/// sixteen cells away on each side.
std::vector<KinkRecord> detect_kinks(const KclState2& state, double theta_threshold = 0.05);

struct KinkSpeed {
  double speed = 0.0;
  double residual = 0.0;
};

/// Least-squares K from the two jump relations; residual is |[f] - K [h]|.
KinkSpeed kink_speed(const PlateauState& left, const PlateauState& right);

/// |[f] - K [h]| for a given K.
double rh_defect(double speed, const PlateauState& left, const PlateauState& right);

struct KinkTrack {
  std::size_t id = 0;
  std::vector<double> times;
  std::vector<double> xi;  // unwrapped for periodic grids
  double speed = 0.0;      // least-squares slope over the whole track
};

/// Links detections in successive snapshots to the nearest continuing track.
class KinkTracker {
 public:
  /// period: xi period for periodic grids.
  explicit KinkTracker(std::optional<double> period = std::nullopt);

  /// Assigns track ids to the detections of one snapshot. gate is the largest
  /// xi displacement accepted since the previous snapshot.
  void add(double time, std::vector<KinkRecord>& detections, double gate);

  /// Fits speeds. Each record gets the slope over up to five neighbouring
  /// detections of its track.
  void finish(std::span<KinkRecord> records);

  const std::vector<KinkTrack>& tracks() const { return tracks_; }

  /// Tracks seen in at least min_snapshots snapshots.
  std::vector<KinkTrack> persistent(std::size_t min_snapshots) const;

 private:
  std::optional<double> period_;
  std::vector<KinkTrack> tracks_;
  std::vector<std::size_t> active_;
  double last_time_ = 0.0;
};

}  // namespace kcl

#endif  // KCL_KINKS_HPP_
