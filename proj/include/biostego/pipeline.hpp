#pragma once

#include <string>
#include <vector>

#include "biostego/config.hpp"
#include "biostego/enhancement.hpp"
#include "biostego/image.hpp"
#include "biostego/minutiae.hpp"
#include "biostego/segmentation.hpp"
#include "biostego/skeleton.hpp"
#include "biostego/template.hpp"

namespace biostego {

/// Every intermediate of one extraction run.
struct PipelineStages {
  GrayImage equalized;
  GrayImage enhanced;
  BinaryImage binary;  ///< after masking to the ROI
  DirectionMap directions;
  RoiMask roi;
  Skeleton skeleton;   ///< thinned, cleaned and labeled
  std::vector<Minutia> marked;
  FalseMinutiaeResult removal;
  double D = 0.0;      ///< 0 when the skeleton is empty
  MinutiaeTemplate templ;
};

/// equalize -> FFT enhance -> binarize -> segment/ROI -> thin -> clean/label
/// -> mark -> false-minutiae removal -> orientation -> ridge sampling.
inline PipelineStages run_pipeline(const GrayImage& image, const PipelineConfig& config,
                                   const std::string& user_id = {}) {
  config.validate();
  PipelineStages s;
  s.equalized = histogram_equalize(image);
  s.enhanced = fft_enhance(s.equalized, config.k, config.fft_block);
  s.binary = binarize_adaptive(s.enhanced, config.binarize_block);

  s.directions = segment_blocks(sobel_gradients(s.enhanced), config.direction_W, config.E_threshold);
  s.roi = roi_extract(s.directions, config.roi_radius);
  for (std::size_t i = 0; i < s.binary.size(); ++i) {
    if (!s.roi.pixels()[i]) s.binary.pixels()[i] = 1;
  }

  s.skeleton = clean_skeleton(thin(s.binary), config.spur_iterations);

  s.templ.user_id = user_id;
  s.templ.image_width = image.width();
  s.templ.image_height = image.height();
  const RoiMask inner = erode(s.roi, config.border_margin);
  for (const Minutia& m : mark_minutiae(s.skeleton, config.border_margin)) {
    if (inner(m.x, m.y)) s.marked.push_back(m);
  }
  if (s.skeleton.ridge_count == 0) return s;

  s.D = inter_ridge_distance(s.skeleton);
  s.templ.D = s.D;
  s.removal = remove_false_minutiae(s.marked, s.skeleton, s.D, config.broken_ridge_angle);
  s.templ.minutiae = orient_minutiae(s.skeleton, s.removal.kept, s.D);
  for (const Minutia& m : s.templ.minutiae) s.templ.ridge_samples.push_back(sample_ridge_x(s.skeleton, m, s.D));
  return s;
}

inline MinutiaeTemplate extract_template(const GrayImage& image, const PipelineConfig& config,
                                         const std::string& user_id = {}) {
  return run_pipeline(image, config, user_id).templ;
}

}  // namespace biostego
