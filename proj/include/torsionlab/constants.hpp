#pragma once

namespace torsionlab {

// Tolerance ladder shared by every module.
//
//   construction   1e-12  d∘d, Hermitian/unit checks, partition sums
//   invertibility  1e-9   acyclicity certificate of a single complex, eigen gaps
//   family         1e-6   family-level acyclicity, quadrature agreement
namespace tol {
inline constexpr double construction = 1e-12;
inline constexpr double invertibility = 1e-9;
inline constexpr double family = 1e-6;

inline constexpr double eigen_floor = 1e-12;      // smallest admissible eigenvalue of h
inline constexpr double lambda_quadrature = 1e-8; // node-doubling stability of the λ-integral
inline constexpr double strata_loop = 1e-8;       // Cerf loop closure
inline constexpr double projector_idempotent = 1e-10;
inline constexpr double overlap_agreement = 1e-10;
inline constexpr double newton_residual = 1e-9;
inline constexpr double transversality = 1e-6;
inline constexpr double kernel_eigen = 1e-6;
inline constexpr double cubic_coefficient = 1e-6;
inline constexpr double no_limit = 1e-3;
} // namespace tol

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersionString = "1.0.0";

inline constexpr double kPi = 3.14159265358979323846;

} // namespace torsionlab
