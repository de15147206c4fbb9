#pragma once

// Synthetic clustered data and the augmentation view protocol.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "heatlab/linalg.hpp"

namespace heatlab {

struct Dataset {
  Matrix points;            // N x d'
  std::vector<int> labels;  // cluster label per point, in [0, num_classes)
  int num_classes = 0;
  std::uint64_t seed = 0;

  Index size() const { return points.rows(); }
  Index ambient_dim() const { return points.cols(); }
};

/// Augmented views. View rows are ordered origin-major, then epoch, then view
/// within the epoch, so the views of origin o occupy rows [o*K, (o+1)*K).
struct ViewSet {
  Matrix views;                // n x d'
  std::vector<Index> origins;  // origin instance per view, in [0, num_origins)
  std::vector<int> labels;     // cluster label per view; empty when unknown
  Index num_origins = 0;       // N
  Index views_per_epoch = 0;   // a
  Index epochs = 0;            // n_epochs

  Index views_per_origin() const { return views_per_epoch * epochs; }  // K
  Index size() const { return num_origins * views_per_origin(); }      // n
  Index row(Index origin, Index epoch, Index view) const {
    return origin * views_per_origin() + epoch * views_per_epoch + view;
  }
};

/// Gaussian blobs with isotropic spread `sigma`. Centers sit on a scaled
/// coordinate simplex (or on a line when there are more classes than
/// dimensions) at mutual distance 10 * max(sigma, 1) * sqrt(d') >= 10 sigma.
/// sigma = 0 yields exact point masses.
Dataset gen_clusters(int num_classes, const std::vector<Index>& sizes, Index ambient_dim,
                     double sigma, std::uint64_t seed);

/// Two interleaved half circles in the plane, embedded in the first two of
/// `ambient_dim` coordinates, with Gaussian noise.
Dataset gen_two_moons(Index per_moon, Index ambient_dim, double noise, std::uint64_t seed);

/// Emits every point a * epochs times with i.i.d. N(0, jitter^2) noise.
ViewSet gen_views(const Dataset& data, Index views_per_epoch, Index epochs, double jitter,
                  std::uint64_t seed);

/// CSV with header `id,origin,label,x0..x{d'-1}`; for a Dataset origin = id.
void write_csv(std::ostream& out, const Dataset& data);
void write_csv(std::ostream& out, const ViewSet& views);
/// Reads the view CSV back. views_per_epoch / epochs are recovered from the
/// caller since the file only stores per-row data.
ViewSet read_view_csv(std::istream& in, Index views_per_epoch, Index epochs);

}  // namespace heatlab
