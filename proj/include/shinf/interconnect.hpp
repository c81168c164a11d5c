#pragma once

#include <vector>

#include "shinf/ddae.hpp"

namespace shinf {

/// One term `matrix * signal(t - delay)`; delay 0 means undelayed.
struct DelayedTerm {
    double delay = 0.0;
    Matrix matrix;
};

/// Open-loop plant with delayed states, inputs and outputs and neutral terms:
///
///   d/dt (x + sum H x(t-h)) = sum A x(t-.) + sum Bw w(t-.) + sum Bu u(t-.)
///   z = sum Cz x(t-.) + sum Dzw w(t-.) + sum Dzu u(t-.)
///   y = sum Cy x(t-.) + sum Dyw w(t-.) + sum Dyu u(t-.)
struct PlantModel {
    Eigen::Index nx = 0;
    Eigen::Index nw = 0;
    Eigen::Index nu = 0;
    Eigen::Index nz = 0;
    Eigen::Index ny = 0;

    std::vector<DelayedTerm> A;
    std::vector<DelayedTerm> H;
    std::vector<DelayedTerm> Bw;
    std::vector<DelayedTerm> Bu;
    std::vector<DelayedTerm> Cz;
    std::vector<DelayedTerm> Dzw;
    std::vector<DelayedTerm> Dzu;
    std::vector<DelayedTerm> Cy;
    std::vector<DelayedTerm> Dyw;
    std::vector<DelayedTerm> Dyu;

    /// Throws DimensionError on any inconsistent block.
    void validate() const;
};

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Controller of order n_c acting on the measured output delayed by
/// `input_delay`:
///
///   xc' = Ac xc + Bc y(t - input_delay),   u = Cc xc + Dc y(t - input_delay).
///
/// Entries flagged in the masks are free parameters; all others keep the
/// value stored in the fixed-value matrices. Parameters are ordered Ac, Bc,
/// Cc, Dc, each row-major.
class ControllerStructure {
public:
    struct Matrices {
        Matrix Ac, Bc, Cc, Dc;
    };

    ControllerStructure() = default;
    ControllerStructure(Eigen::Index order, Eigen::Index nu, Eigen::Index ny);

    /// Fully free static gain u = K y(t - input_delay).
    static ControllerStructure static_gain(Eigen::Index nu, Eigen::Index ny, double input_delay = 0.0);

    Eigen::Index order() const { return nc_; }
    Eigen::Index nu() const { return nu_; }
    Eigen::Index ny() const { return ny_; }
    double input_delay() const { return input_delay_; }
    std::size_t num_params() const;

    void set_input_delay(double tau);
    void set_fixed(const Matrices& values);
    void set_masks(Mask ac, Mask bc, Mask cc, Mask dc);

    const Matrices& fixed_values() const { return fixed_; }
    const Mask& mask(int which) const { return masks_[which]; }

    /// Controller matrices for parameter vector p (fixed entries from the
    /// fixed values). `with_fixed = false` zeroes the fixed entries, which
    /// yields the linear part of the affine map.
    Matrices unpack(const Vector& p, bool with_fixed = true) const;

    /// Free entries of `m`, in parameter order.
    Vector pack(const Matrices& m) const;

private:
    Eigen::Index nc_ = 0;
    Eigen::Index nu_ = 0;
    Eigen::Index ny_ = 0;
    double input_delay_ = 0.0;
    Matrices fixed_;
    Mask masks_[4];
};

/// Which slack blocks the closed loop carries, and where the signals live.
struct ClosedLoopLayout {
    Eigen::Index n = 0;
    Eigen::Index x = 0;   // plant state (algebraic copy when the plant is neutral)
    Eigen::Index zeta = -1;  // x + sum H x(t-h), only for neutral plants
    Eigen::Index xc = 0;
    Eigen::Index u = 0;
    Eigen::Index y = -1;
    Eigen::Index w = -1;
    Eigen::Index z = -1;
};

/// Closed loop as an affine DDAE in the controller parameters. Slack
/// algebraic states carry u, and (when needed) y, w, z and x + H x(t-h),
/// so that B and C are constant and p enters only A0..Am.
AffineDdae interconnect(const PlantModel& plant, const ControllerStructure& ctrl,
                        ClosedLoopLayout* layout = nullptr);

DdaeSystem interconnect(const PlantModel& plant, const ControllerStructure& ctrl, const Vector& p);

}  // namespace shinf
