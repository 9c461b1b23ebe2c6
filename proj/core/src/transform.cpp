#include "volwarp/transform.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <json.hpp>

#include "volwarp/error.hpp"

namespace volwarp {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kVarianceFloor = 1e-12;
// Second singular value of the source spread, relative to the first, below
// which the source is treated as collinear.
constexpr double kCollinearRatio = 1e-9;

// Smallest rotation taking unit vector a onto unit vector b.
Mat3 align_directions(const Vec3& a, const Vec3& b) {
  const Vec3 axis = a.cross(b);
  const double sin_angle = axis.norm();
  const double cos_angle = std::clamp(a.dot(b), -1.0, 1.0);
  if (sin_angle < 1e-12) {
    if (cos_angle > 0.0) return Mat3::Identity();
    // Antiparallel: half turn about any axis perpendicular to a.
    Vec3 perp = a.cross(Vec3::UnitX());
    if (perp.norm() < 1e-6) perp = a.cross(Vec3::UnitY());
    perp.normalize();
    return 2.0 * perp * perp.transpose() - Mat3::Identity();
  }
  return Eigen::AngleAxisd(std::atan2(sin_angle, cos_angle), axis / sin_angle)
      .toRotationMatrix();
}

Helmert3 fit_collinear(std::span<const Vec3> src, std::span<const Vec3> dst,
                       const Vec3& src_mean, const Vec3& dst_mean, const Vec3& src_dir) {
  // Parametrize sources along their line, then fit the destination direction
  // and scale for those parameters in the least-squares sense.
  double param_sq = 0.0;
  Vec3 weighted = Vec3::Zero();
  for (std::size_t k = 0; k < src.size(); ++k) {
    const double a = src_dir.dot(src[k] - src_mean);
    param_sq += a * a;
    weighted += a * (dst[k] - dst_mean);
  }
  const double extent = weighted.norm();
  if (!(extent > 0.0) || !(param_sq > 0.0)) {
    throw Error("fit_helmert: destination collapses the source segment to a point");
  }
  Helmert3 t;
  t.rotation = align_directions(src_dir, weighted / extent);
  t.scale = extent / param_sq;
  t.translation = dst_mean - t.scale * t.rotation * src_mean;
  t.degenerate = true;
  return t;
}

ordered_json matrix_json(const auto& m) {
  ordered_json rows = ordered_json::array();
  for (int r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename M>
M matrix_from_json(const ordered_json& j) {
  M m;
  if (!j.is_array() || j.size() != static_cast<std::size_t>(m.rows())) {
    throw Error("transform: matrix has the wrong shape");
  }
  for (int r = 0; r < m.rows(); ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(m.cols())) {
      throw Error("transform: matrix has the wrong shape");
    }
    for (int c = 0; c < m.cols(); ++c) m(r, c) = row[c].get<double>();
  }
  return m;
}

template <typename V>
V vector_from_json(const ordered_json& j) {
  V v;
  if (!j.is_array() || j.size() != static_cast<std::size_t>(v.size())) {
    throw Error("transform: vector has the wrong length");
  }
  for (int i = 0; i < v.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

ordered_json helmert_json(const Helmert3& t) {
  ordered_json j;
  j["scale"] = t.scale;
  j["rotation"] = matrix_json(t.rotation);
  j["translation"] = {t.translation[0], t.translation[1], t.translation[2]};
  j["degenerate"] = t.degenerate;
  return j;
}

Helmert3 helmert_from(const ordered_json& j) {
  Helmert3 t;
  try {
    t.scale = j.at("scale").get<double>();
    t.rotation = matrix_from_json<Mat3>(j.at("rotation"));
    t.translation = vector_from_json<Vec3>(j.at("translation"));
    t.degenerate = j.value("degenerate", false);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("transform: ") + e.what());
  }
  t.validate();
  return t;
}

ordered_json affine_json(const Affine2& a) {
  ordered_json j;
  j["linear"] = matrix_json(a.linear);
  j["translation"] = {a.translation[0], a.translation[1]};
  j["degenerate"] = a.degenerate;
  return j;
}

Affine2 affine_from(const ordered_json& j) {
  Affine2 a;
  try {
    a.linear = matrix_from_json<Mat2>(j.at("linear"));
    a.translation = vector_from_json<Vec2>(j.at("translation"));
    a.degenerate = j.value("degenerate", false);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("transform: ") + e.what());
  }
  if (!a.linear.allFinite() || !a.translation.allFinite()) {
    throw Error("transform: affine entries must be finite");
  }
  return a;
}

ordered_json parse(std::string_view text) {
  try {
    return ordered_json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("transform: parse error: ") + e.what());
  }
}

}  // namespace

void Helmert3::validate() const {
  if (!std::isfinite(scale) || !(scale > 0.0)) throw Error("helmert: scale must be > 0");
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw Error("helmert: non-finite entries");
  }
  if (!(rotation.transpose() * rotation).isApprox(Mat3::Identity(), 1e-6) ||
      std::abs(rotation.determinant() - 1.0) > 1e-6) {
    throw Error("helmert: rotation is not a proper orthonormal matrix");
  }
}

Vec3 apply(const Helmert3& t, const Vec3& p) {
  return t.scale * (t.rotation * p) + t.translation;
}

Helmert3 invert(const Helmert3& t) {
  Helmert3 inv;
  inv.scale = 1.0 / t.scale;
  inv.rotation = t.rotation.transpose();
  inv.translation = -(inv.scale * (inv.rotation * t.translation));
  inv.degenerate = t.degenerate;
  return inv;
}

Helmert3 compose(const Helmert3& a, const Helmert3& b) {
  Helmert3 out;
  out.scale = a.scale * b.scale;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.scale * (a.rotation * b.translation) + a.translation;
  out.degenerate = a.degenerate || b.degenerate;
  return out;
}

Helmert3 fit_helmert(std::span<const Vec3> src, std::span<const Vec3> dst) {
  if (src.size() != dst.size()) throw Error("fit_helmert: point counts differ");
  if (src.size() < 3) throw Error("fit_helmert: need at least 3 point pairs");
  const double n = static_cast<double>(src.size());
  Vec3 src_mean = Vec3::Zero();
  Vec3 dst_mean = Vec3::Zero();
  for (std::size_t k = 0; k < src.size(); ++k) {
    if (!src[k].allFinite() || !dst[k].allFinite()) {
      throw Error("fit_helmert: non-finite point");
    }
    src_mean += src[k];
    dst_mean += dst[k];
  }
  src_mean /= n;
  dst_mean /= n;

  double src_var = 0.0;
  Mat3 cross = Mat3::Zero();
  Mat3 src_spread = Mat3::Zero();
  for (std::size_t k = 0; k < src.size(); ++k) {
    const Vec3 s = src[k] - src_mean;
    const Vec3 d = dst[k] - dst_mean;
    src_var += s.squaredNorm();
    cross += d * s.transpose();
    src_spread += s * s.transpose();
  }
  src_var /= n;
  cross /= n;
  if (src_var < kVarianceFloor) {
    throw Error("fit_helmert: source points are coincident");
  }

  Eigen::SelfAdjointEigenSolver<Mat3> spread(src_spread / n);
  const Vec3 spread_eigen = spread.eigenvalues();  // ascending
  if (spread_eigen[1] <= kCollinearRatio * kCollinearRatio * spread_eigen[2] ||
      spread_eigen[1] <= 0.0) {
    return fit_collinear(src, dst, src_mean, dst_mean, spread.eigenvectors().col(2));
  }

  Eigen::JacobiSVD<Mat3> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3& u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  Vec3 sign = Vec3::Ones();
  if (u.determinant() * v.determinant() < 0.0) sign[2] = -1.0;

  Helmert3 t;
  t.rotation = u * sign.asDiagonal() * v.transpose();
  const double trace = svd.singularValues().dot(sign);
  if (!(trace > 0.0)) {
    throw Error("fit_helmert: destination points are coincident");
  }
  t.scale = trace / src_var;
  t.translation = dst_mean - t.scale * (t.rotation * src_mean);
  return t;
}

Vec2 apply(const Affine2& a, const Vec2& p) { return a.linear * p + a.translation; }

Affine2 invert(const Affine2& a) {
  const double det = a.linear.determinant();
  const double norm = a.linear.squaredNorm();
  if (!(std::abs(det) > 1e-12 * std::max(norm, 1e-300))) {
    throw Error("affine: linear part is singular");
  }
  Affine2 inv;
  inv.linear = a.linear.inverse();
  inv.translation = -(inv.linear * a.translation);
  inv.degenerate = a.degenerate;
  return inv;
}

Affine2 fit_affine2(std::span<const Vec2> src, std::span<const Vec2> dst) {
  constexpr double kDamping = 1e-9;
  if (src.size() != dst.size()) throw Error("fit_affine2: point counts differ");
  if (src.size() < 3) throw Error("fit_affine2: need at least 3 point pairs");
  const double n = static_cast<double>(src.size());
  Vec2 src_mean = Vec2::Zero();
  Vec2 dst_mean = Vec2::Zero();
  for (std::size_t k = 0; k < src.size(); ++k) {
    if (!src[k].allFinite() || !dst[k].allFinite()) {
      throw Error("fit_affine2: non-finite point");
    }
    src_mean += src[k];
    dst_mean += dst[k];
  }
  src_mean /= n;
  dst_mean /= n;

  // Normal equations on centered points: A (S^T S + lambda I) = D^T S.
  Mat2 gram = Mat2::Zero();
  Mat2 cross = Mat2::Zero();
  for (std::size_t k = 0; k < src.size(); ++k) {
    const Vec2 s = src[k] - src_mean;
    const Vec2 d = dst[k] - dst_mean;
    gram += s * s.transpose();
    cross += d * s.transpose();
  }

  Eigen::SelfAdjointEigenSolver<Mat2> eig(gram);
  const double small = eig.eigenvalues()[0];
  const double large = eig.eigenvalues()[1];

  Affine2 a;
  if (large / n < kVarianceFloor) {
    // Every source projects to one point: only a translation is defined.
    a.linear = Mat2::Identity();
    a.degenerate = true;
  } else if (small <= 1e-10 * large) {
    // Collinear sources: 2D similarity aligning the source line.
    const Vec2 dir = eig.eigenvectors().col(1);
    double param_sq = 0.0;
    Vec2 weighted = Vec2::Zero();
    for (std::size_t k = 0; k < src.size(); ++k) {
      const double p = dir.dot(src[k] - src_mean);
      param_sq += p * p;
      weighted += p * (dst[k] - dst_mean);
    }
    const double extent = weighted.norm();
    if (extent > 0.0) {
      const Vec2 target = weighted / extent;
      const double angle = std::atan2(dir[0] * target[1] - dir[1] * target[0], dir.dot(target));
      const double scale = extent / param_sq;
      a.linear << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
      a.linear *= scale;
    }
    a.degenerate = true;
  } else {
    // Damped solve plus iterated-Tikhonov refinement: each pass shrinks the
    // damping bias by about lambda / small, so well-posed fits interpolate.
    const Mat2 damped_inv = (gram + kDamping * Mat2::Identity()).inverse();
    a.linear = cross * damped_inv;
    for (int pass = 0; pass < 3; ++pass) a.linear += (cross - a.linear * gram) * damped_inv;
  }
  a.translation = dst_mean - a.linear * src_mean;
  return a;
}

double rotation_distance(const Mat3& a, const Mat3& b) {
  // 2 asin(|A - B|_F / (2 sqrt 2)) stays accurate near zero, unlike acos.
  const double frob = (a - b).norm();
  return 2.0 * std::asin(std::min(1.0, frob / (2.0 * std::sqrt(2.0))));
}

std::string to_json(const Helmert3& t) { return helmert_json(t).dump(); }

Helmert3 helmert_from_json(std::string_view text) { return helmert_from(parse(text)); }

std::string to_json(const Affine2& a) { return affine_json(a).dump(); }

Affine2 affine_from_json(std::string_view text) { return affine_from(parse(text)); }

std::string save_transforms(const TransformSet& set) {
  ordered_json j;
  ordered_json parts = ordered_json::object();
  if (set.is_affine()) {
    j["kind"] = "affine2";
    for (const auto& [name, a] : set.affine) parts[name] = affine_json(a);
  } else {
    j["kind"] = "helmert3";
    for (const auto& [name, t] : set.helmert) parts[name] = helmert_json(t);
  }
  j["parts"] = std::move(parts);
  return j.dump(2) + "\n";
}

TransformSet load_transforms(std::string_view text) {
  const ordered_json j = parse(text);
  TransformSet set;
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind != "helmert3" && kind != "affine2") {
      throw Error("transform: unknown kind \"" + kind + "\"");
    }
    for (const auto& [name, value] : j.at("parts").items()) {
      if (kind == "affine2") {
        set.affine.emplace_back(name, affine_from(value));
      } else {
        set.helmert.emplace_back(name, helmert_from(value));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("transform: ") + e.what());
  }
  if (set.size() == 0) throw Error("transform: file lists no parts");
  return set;
}

}  // namespace volwarp
